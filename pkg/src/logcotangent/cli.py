"""Command line entry point.

Exit codes for ``certify`` and ``cover``: 0 semistable, 3 not semistable,
4 unknown.  Usage and parse errors exit with 2, a failed oracle check or
certificate replay with 1.
"""
from __future__ import annotations

import argparse
import json
import re
import sys

from . import catalog as cat
from .certify import (
    CertificateNode,
    InputError,
    Outcome,
    ReplayError,
    Verdict,
    case_table,
    certify,
    replay,
    theorem_crosscheck,
)
from .cohomology import AMBIGUOUS, bott_dim, default_kb, euler_oracle_dim, parse_stability_kb
from .core import DivisorComponent, LogPair, abstract_fano, projective_space, quadric
from .covers import cover_canonical_twist, cover_log_slope, cover_verdict

EXIT_CODES = {Outcome.SEMISTABLE: 0, Outcome.NOT_SEMISTABLE: 3, Outcome.UNKNOWN: 4}


def parse_ambient(text: str):
    m = re.fullmatch(r"([PQ])(\d+)", text)
    if m:
        n = int(m.group(2))
        return projective_space(n) if m.group(1) == "P" else quadric(n)
    m = re.fullmatch(r"fano:(\d+),(\d+)", text)
    if m:
        return abstract_fano(int(m.group(1)), int(m.group(2)))
    raise ValueError(f"ambient {text!r} is not Pn, Qn or fano:dim,index")


def parse_divisor(text: str):
    comps = []
    for item in text.split(","):
        degree, *flags = item.strip().split(":")
        unknown = set(flags) - {"singular", "reducible"}
        if unknown:
            raise ValueError(f"unknown component flag(s) {sorted(unknown)} in {item!r}")
        comps.append(DivisorComponent(int(degree), "singular" not in flags, "reducible" not in flags))
    return tuple(comps)


def _pair(parser, args) -> LogPair:
    try:
        return LogPair(parse_ambient(args.ambient), parse_divisor(args.divisor))
    except ValueError as exc:
        parser.error(str(exc))


def _kb(parser, args):
    if not getattr(args, "kb", None):
        return default_kb()
    try:
        with open(args.kb) as fh:
            return parse_stability_kb(fh.read())
    except (OSError, ValueError) as exc:
        parser.error(f"knowledge base: {exc}")


def _print_tree(node: CertificateNode, indent=0):
    inputs = " ".join(f"{k}={v}" for k, v in node.inputs.items())
    print(f"{'  ' * indent}{node.rule.value} {inputs}")
    for c in node.children:
        _print_tree(c, indent + 1)


def _print_verdict(pair, v: Verdict):
    print(f"pair: {pair}")
    print(f"verdict: {v.outcome.value}")
    if v.witness:
        w = v.witness
        print(f"witness: a={w.a} t={w.t} h0 >= {w.h0_lower_bound}")
    for row in v.residual:
        print(f"residual: {row}")
    if v.note:
        print(f"note: {v.note}")
    if v.certificate:
        print("certificate:")
        _print_tree(v.certificate, 1)


def cmd_bott(parser, args):
    try:
        value = bott_dim(args.n, args.p, args.t, args.q)
        if not args.oracle:
            print(value)
            return 0
        oracle = euler_oracle_dim(args.n, args.p, args.t, args.q)
    except ValueError as exc:
        parser.error(str(exc))
    ok = oracle is not AMBIGUOUS and oracle == value
    print(f"{value} {oracle} {'OK' if ok else 'MISMATCH'}")
    return 0 if ok else 1


def cmd_certify(parser, args):
    pair = _pair(parser, args)
    try:
        v = certify(pair, _kb(parser, args))
    except InputError as exc:
        parser.error(str(exc))
    if args.format == "json":
        print(json.dumps(dict(pair=str(pair), **v.to_dict()), indent=2))
    else:
        _print_verdict(pair, v)
    return EXIT_CODES[v.outcome]


def cmd_cover(parser, args):
    pair = _pair(parser, args)
    try:
        v = cover_verdict(pair)
    except InputError as exc:
        parser.error(str(exc))
    twist = cover_canonical_twist(pair.s, pair.degrees)
    slope = cover_log_slope(pair.n, pair.s, pair.degrees)
    if args.format == "json":
        print(json.dumps(dict(base=str(pair), canonical_twist=twist, log_slope=str(slope), **v.to_dict()),
                         indent=2))
    else:
        print(f"cover canonical twist: {twist}")
        print(f"cover log slope: {slope}")
        _print_verdict(pair, v)
    return EXIT_CODES[v.outcome]


def cmd_table(parser, args):
    if (args.s is None) != (args.k is None):
        parser.error("--s and --k go together")
    grid = [(args.s, args.k)] if args.s is not None else \
        [(s, k) for s in range(2, args.n + 2) for k in range(1, s)]
    rows = []
    try:
        for s, k in grid:
            rows.extend(case_table(args.n, s, k, _kb(parser, args)))
    except ValueError as exc:
        parser.error(str(exc))
    if args.format == "json":
        print(json.dumps([r.to_dict() for r in rows], indent=2))
    else:
        for r in rows:
            print(r)
    return 0


def cmd_crosscheck(parser, args):
    try:
        report = theorem_crosscheck(args.n, _kb(parser, args))
    except ValueError as exc:
        parser.error(str(exc))
    if args.format == "json":
        print(json.dumps(report.to_dict(), indent=2))
        return 0
    d = report.to_dict()
    print(f"n={report.n}")
    print(f"statement: {report.statement}")
    print(f"engine: {report.engine}")
    for key in ("agree", "engine_resolves_statement_excludes", "statement_includes_engine_unresolved"):
        print(f"{key}: {' '.join(f'(s={s},k={k})' for s, k in d[key]) or '-'}")
    return 0


def cmd_catalog(parser, args):
    try:
        if args.file == "default":
            entries = cat.default_catalog()
        else:
            with open(args.file, "rb") as fh:
                entries = cat.load_catalog(fh)
    except (OSError, ValueError) as exc:
        parser.error(str(exc))
    if args.action == "list":
        if args.format == "json":
            print(json.dumps([{"id": e.id, "pair": str(e.pair()), "source": e.source} for e in entries],
                             indent=2))
        else:
            for e in entries:
                print(f"{e.id}\t{e.pair()}\t{e.source}")
        return 0
    report = cat.certify_catalog(entries, _kb(parser, args))
    if args.format == "json":
        print(json.dumps(report.to_dict(), indent=2))
    else:
        for e, v, err in report.results:
            print(f"{e.id}\t{e.pair()}\t{v.outcome.value if v else 'Error: ' + err}")
        print("summary: " + " ".join(f"{k}={v}" for k, v in report.counts.items()))
    return 0


def cmd_replay(parser, args):
    try:
        with open(args.file) if args.file != "-" else sys.stdin as fh:
            data = json.load(fh)
    except (OSError, ValueError) as exc:
        parser.error(str(exc))
    node = data.get("certificate", data) if isinstance(data, dict) else None
    if not node:
        print("no certificate to replay")
        return 1
    try:
        replay(CertificateNode.from_dict(node), _kb(parser, args))
    except (ReplayError, KeyError, ValueError) as exc:
        print(f"replay failed: {exc}")
        return 1
    print("replay ok")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="logcotangent",
        description="Certify semistability of log cotangent bundles on Picard rank one pairs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def fmt(p):
        p.add_argument("--format", choices=("text", "json"), default="text")

    def kb(p):
        p.add_argument("--kb", help="stability knowledge base file (default: shipped)")

    p = sub.add_parser("bott", help="h^q(P^n, Omega^p(t))")
    for name in ("n", "p", "t", "q"):
        p.add_argument(name, type=int)
    p.add_argument("--oracle", action="store_true", help="also run the Euler-sequence oracle")
    p.set_defaults(func=cmd_bott)

    for name, func, help_ in (("certify", cmd_certify, "verdict for a pair"),
                              ("cover", cmd_cover, "verdict on a Kawamata cover of a pair")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--ambient", required=True, help="Pn, Qn or fano:dim,index")
        p.add_argument("--divisor", required=True, help="component degrees, e.g. 2 or 1,1 or 3:singular")
        fmt(p)
        kb(p)
        p.set_defaults(func=func)

    p = sub.add_parser("table", help="case table of candidate obligations")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--s", type=int)
    p.add_argument("--k", type=int)
    fmt(p)
    kb(p)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("crosscheck", help="compare engine coverage with the published statement")
    p.add_argument("--n", type=int, required=True)
    fmt(p)
    kb(p)
    p.set_defaults(func=cmd_crosscheck)

    p = sub.add_parser("catalog", help="list or certify classified pairs")
    p.add_argument("action", choices=("run", "list"))
    p.add_argument("--file", default="default")
    fmt(p)
    kb(p)
    p.set_defaults(func=cmd_catalog)

    p = sub.add_parser("replay", help="replay a certificate or a certify --format json output")
    p.add_argument("file", help="path, or - for stdin")
    kb(p)
    p.set_defaults(func=cmd_replay)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(parser, args)


if __name__ == "__main__":
    sys.exit(main())
