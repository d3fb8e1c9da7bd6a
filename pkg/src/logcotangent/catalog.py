"""Classified log Fano pairs of dimension 2 and 3 as concrete LogPair records.

Records are blank-line separated blocks of ``key: value`` lines::

    id: threefold-a4
    ambient: P            # P, Q or fano
    dim: 3
    index: 4
    components: 2:smooth:irreducible
    source: <citation>
    note: <optional>
"""
from __future__ import annotations

import io
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from typing import Dict, List, Optional, Tuple, Union

from .certify import InputError, Outcome, Verdict, certify
from .core import DivisorComponent, Kind, LogPair, VarietySpec, abstract_fano, projective_space, quadric

KEYS = ("id", "ambient", "dim", "index", "components", "source", "note")
REQUIRED = ("id", "ambient", "dim", "index", "components", "source")
_AMBIENT_CODES = {"P": Kind.PROJECTIVE_SPACE, "Q": Kind.QUADRIC, "fano": Kind.ABSTRACT_FANO}


class CatalogParseError(ValueError):
    pass


class CatalogValidationError(ValueError):
    pass


@dataclass(frozen=True)
class CatalogEntry:
    id: str
    ambient: VarietySpec
    components: Tuple[DivisorComponent, ...]
    source: str
    note: str = ""

    def pair(self) -> LogPair:
        return LogPair(self.ambient, self.components)


def _parse_component(text: str, lineno: int) -> DivisorComponent:
    parts = [p.strip() for p in text.split(":")]
    if len(parts) != 3:
        raise CatalogParseError(f"line {lineno}: component {text!r} is not degree:smooth:irreducible")
    degree, smooth, irreducible = parts
    if smooth not in ("smooth", "singular") or irreducible not in ("irreducible", "reducible"):
        raise CatalogParseError(f"line {lineno}: bad component flags in {text!r}")
    try:
        deg = int(degree)
    except ValueError:
        raise CatalogParseError(f"line {lineno}: degree {degree!r} is not an integer") from None
    if deg < 1:
        raise CatalogParseError(f"line {lineno}: degree must be positive in {text!r}")
    return DivisorComponent(deg, smooth == "smooth", irreducible == "irreducible")


def _build_entry(rec: Dict[str, Tuple[str, int]], start: int) -> CatalogEntry:
    missing = [k for k in REQUIRED if k not in rec]
    if missing:
        raise CatalogParseError(f"line {start}: record missing {', '.join(missing)}")
    ident = rec["id"][0]
    code, code_line = rec["ambient"]
    if code not in _AMBIENT_CODES:
        raise CatalogParseError(f"line {code_line}: unknown ambient {code!r}")
    try:
        dim, index = int(rec["dim"][0]), int(rec["index"][0])
    except ValueError:
        raise CatalogParseError(f"line {rec['dim'][1]}: dim and index must be integers") from None
    comp_text, comp_line = rec["components"]
    comps = tuple(_parse_component(c, comp_line) for c in comp_text.split(","))

    try:
        kind = _AMBIENT_CODES[code]
        if kind is Kind.PROJECTIVE_SPACE:
            ambient = projective_space(dim)
        elif kind is Kind.QUADRIC:
            ambient = quadric(dim)
        else:
            ambient = abstract_fano(dim, index)
    except ValueError as exc:
        raise CatalogValidationError(f"entry {ident}: {exc}") from None
    if ambient.index != index:
        raise CatalogValidationError(f"entry {ident}: index {index} does not match {ambient}")
    k = sum(c.degree for c in comps)
    if k >= index:
        raise CatalogValidationError(f"entry {ident}: total degree {k} >= index {index}, not log Fano")
    return CatalogEntry(ident, ambient, comps, rec["source"][0], rec.get("note", ("", 0))[0])


def load_catalog(source: Union[str, bytes, io.IOBase]) -> List[CatalogEntry]:
    """Parse catalog records from text, bytes or a (binary or text) stream."""
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, bytes):
        source = source.decode("utf-8")

    entries: List[CatalogEntry] = []
    seen = set()
    rec: Dict[str, Tuple[str, int]] = {}
    start = 0

    def finish():
        if not rec:
            return
        entry = _build_entry(rec, start)
        if entry.id in seen:
            raise CatalogValidationError(f"entry {entry.id}: duplicate id")
        seen.add(entry.id)
        entries.append(entry)

    for lineno, raw in enumerate(source.splitlines(), 1):
        line = raw.strip()
        if line.startswith("#"):
            continue
        if not line:
            finish()
            rec = {}
            continue
        key, sep, value = line.partition(":")
        key = key.strip()
        if not sep or key not in KEYS:
            raise CatalogParseError(f"line {lineno}: expected one of {', '.join(KEYS)} followed by ':'")
        if key in rec:
            raise CatalogParseError(f"line {lineno}: repeated key {key!r}")
        if not rec:
            start = lineno
        rec[key] = (value.strip(), lineno)
    finish()
    return entries


_KIND_CODES = {v: k for k, v in _AMBIENT_CODES.items()}


def format_catalog(entries: List[CatalogEntry]) -> str:
    blocks = []
    for e in entries:
        comps = ", ".join(
            f"{c.degree}:{'smooth' if c.smooth else 'singular'}:{'irreducible' if c.irreducible else 'reducible'}"
            for c in e.components
        )
        lines = [
            f"id: {e.id}",
            f"ambient: {_KIND_CODES[e.ambient.kind]}",
            f"dim: {e.ambient.dim}",
            f"index: {e.ambient.index}",
            f"components: {comps}",
            f"source: {e.source}",
        ]
        if e.note:
            lines.append(f"note: {e.note}")
        blocks.append("\n".join(lines) + "\n")
    return "\n".join(blocks)


def default_catalog_text() -> str:
    return resources.files("logcotangent.data").joinpath("catalog.txt").read_text()


def default_catalog() -> List[CatalogEntry]:
    return load_catalog(default_catalog_text())


@dataclass
class CatalogReport:
    results: List[Tuple[CatalogEntry, Optional[Verdict], str]] = field(default_factory=list)

    @property
    def counts(self) -> Dict[str, int]:
        c = Counter(v.outcome.value if v else "Error" for _, v, _ in self.results)
        return {k: c.get(k, 0) for k in ("Semistable", "NotSemistable", "Unknown", "Error")}

    def snapshot(self) -> Dict[str, str]:
        return {e.id: (v.outcome.value if v else "Error") for e, v, _ in self.results}

    def to_dict(self) -> dict:
        return {
            "entries": [
                {"id": e.id, "pair": str(e.pair()), "source": e.source,
                 "verdict": v.to_dict() if v else None, "error": err}
                for e, v, err in self.results
            ],
            "summary": self.counts,
        }


def certify_catalog(entries: List[CatalogEntry], kb=None) -> CatalogReport:
    report = CatalogReport()
    for e in entries:
        try:
            report.results.append((e, certify(e.pair(), kb), ""))
        except InputError as exc:
            report.results.append((e, None, str(exc)))
    return report
