"""Slope bounds, residue-sequence chases and replayable certificates.

The engine decides semistability of Omega_X(log D) on a Picard rank one pair
by reducing it to H^0(Omega^a_X(log D)(t)) = 0 for the finitely many
integers 0 <= t < a(s-k)/n, then discharging each obligation through the
residue sequence

    0 -> Omega^a_X(t) -> Omega^a_X(log D)(t) -> Omega^{a-1}_D(t) -> 0.

Verdicts are one-sided: SEMISTABLE and NOT_SEMISTABLE are proofs, UNKNOWN
only lists what could not be discharged.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .cohomology import (
    TriBool,
    _as_kb,
    bott_dim,
    divisor_intrinsic_type,
    fano_hodge_vanishes,
    h0_vanishing_rule,
    kan_h0_vanishes,
    quadric_h0_vanishes,
    stability_vanishing,
    standard_embedding,
)
from .core import Kind, LogPair, Rational, VarietySpec, generic_variety, log_pair, rat


class InputError(ValueError):
    """The pair is outside the setting the engine handles."""


class ReplayError(Exception):
    pass


class Rule(str, enum.Enum):
    SLOPE_BOUND = "SlopeBound"
    KAN = "KAN"
    NORIMATSU = "Norimatsu"
    AMPLE_OR_TRIVIAL = "AmpleOrTrivial"
    RESIDUE_SPLIT = "ResidueSplit"
    BOTT_VANISH = "BottVanish"
    SNOW_VANISH = "SnowVanish"
    STABILITY_VANISH = "StabilityVanish"
    FANO_HODGE = "FanoHodge"
    RESTRICTION_SURJECTIVE = "RestrictionSurjective"
    CUPPING_INJECTIVE = "CuppingInjective"
    REDUCIBLE_WITNESS = "ReducibleWitness"
    COVER_PULLBACK = "CoverPullback"


LEAF_RULES = frozenset({
    Rule.BOTT_VANISH, Rule.SNOW_VANISH, Rule.KAN,
    Rule.STABILITY_VANISH, Rule.FANO_HODGE, Rule.CUPPING_INJECTIVE,
})

CITATIONS = {
    Rule.SLOPE_BOUND: "mu(Omega^a(log D)) = a(k-s)/n; semistable once H^0(Omega^a(log D)(t)) = 0 "
                      "for all t < a(s-k)/n, 1 <= a < n",
    Rule.KAN: "Kodaira-Akizuki-Nakano vanishing: H^0(Y, Omega^a(t)) = 0 for t < 0, a < dim Y",
    Rule.NORIMATSU: "Norimatsu vanishing, induction on boundary components through residue sequences",
    Rule.AMPLE_OR_TRIVIAL: "K_X + D ample or trivial: every twist below the slope bound is negative",
    Rule.RESIDUE_SPLIT: "0 -> Omega^a_X(t) -> Omega^a_X(log D)(t) -> Omega^{a-1}_D(t) -> 0",
    Rule.BOTT_VANISH: "Bott formula for h^q(P^n, Omega^p(t))",
    Rule.SNOW_VANISH: "Snow, cohomology of twisted holomorphic forms on Grassmannians and quadrics, "
                      "Theorem 1 p.174",
    Rule.STABILITY_VANISH: "Maruyama: exterior powers of a semistable bundle are semistable",
    Rule.FANO_HODGE: "Fano manifolds are rationally connected: H^0(Omega^a) = 0 for a >= 1",
    Rule.RESTRICTION_SURJECTIVE: "Peternell-Wisniewski Lemma 2.9(a): H^0(Y, Omega^q(c)) -> H^0(D, Omega^q(c)) "
                                 "is onto for c < k, q < dim Y - 1",
    Rule.CUPPING_INJECTIVE: "Peternell-Wisniewski Lemma 2.1: H^0(O_D) -> H^1(Omega_X) is cup product "
                            "with c_1(D), injective for one component when h11 = 1",
    Rule.REDUCIBLE_WITNESS: "residue sequence with H^0(Omega_X) = 0 and h^1(Omega_X) = 1 gives "
                            "h^0(Omega_X(log D)) >= r - 1",
    Rule.COVER_PULLBACK: "Kawamata cover: Omega_X(log D') = pi^* Omega_Y(log D); pullback of a "
                         "semistable sheaf under a finite map is semistable (Maruyama Lemma 1.17)",
}

# Divisor-side rules, tried in this order.  Exact formulas come before the
# stability bound so that tables attribute quadric cases to Snow.
DIVISOR_RULES = (
    Rule.KAN, Rule.FANO_HODGE, Rule.BOTT_VANISH, Rule.SNOW_VANISH,
    Rule.STABILITY_VANISH, Rule.RESTRICTION_SURJECTIVE, Rule.CUPPING_INJECTIVE,
)
AMBIENT_RULES = ("BottVanish", "StabilityVanish", "SnowVanish", "KAN", "FanoHodge")

# Vanishing on D from KAN, Hodge theory and semistability alone: the screen
# that leaves the hard cases of a case analysis.
STABILITY_SCREEN = frozenset({Rule.KAN, Rule.FANO_HODGE, Rule.STABILITY_VANISH, Rule.CUPPING_INJECTIVE})


@dataclass(frozen=True)
class CertificateNode:
    rule: Rule
    inputs: dict
    children: tuple = ()
    citation: str = ""

    def __post_init__(self):
        object.__setattr__(self, "rule", Rule(self.rule))
        object.__setattr__(self, "inputs", dict(sorted(self.inputs.items())))
        object.__setattr__(self, "children", tuple(self.children))
        if not self.citation:
            object.__setattr__(self, "citation", CITATIONS[self.rule])

    def to_dict(self) -> dict:
        return {
            "rule": self.rule.value,
            "citation": self.citation,
            "inputs": dict(self.inputs),
            "children": [c.to_dict() for c in self.children],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CertificateNode":
        return cls(
            rule=Rule(d["rule"]),
            inputs=d.get("inputs", {}),
            children=tuple(cls.from_dict(c) for c in d.get("children", [])),
            citation=d["citation"],
        )

    def leaves(self):
        if not self.children:
            yield self
        for c in self.children:
            yield from c.leaves()

    def depth(self) -> int:
        return 1 + max((c.depth() for c in self.children), default=0)


def to_text(node: CertificateNode) -> str:
    return json.dumps(node.to_dict(), indent=2) + "\n"


def from_text(text: str) -> CertificateNode:
    return CertificateNode.from_dict(json.loads(text))


class Status(str, enum.Enum):
    RESOLVED = "Resolved"
    UNRESOLVED = "Unresolved"


@dataclass(frozen=True)
class CaseRow:
    n: int
    s: int
    k: int
    a: int
    t: int
    status: Status
    rule: Optional[Rule] = None

    def to_dict(self) -> dict:
        return {
            "n": self.n, "s": self.s, "k": self.k, "a": self.a, "t": self.t,
            "status": self.status.value, "rule": self.rule.value if self.rule else None,
        }

    def __str__(self):
        rule = self.rule.value if self.rule else "-"
        return f"n={self.n} s={self.s} k={self.k} a={self.a} t={self.t} {self.status.value} {rule}"


@dataclass(frozen=True)
class Witness:
    """A rank-a subsheaf O(t) of Omega^a_X(log D) with at least ``h0_lower_bound`` sections."""

    a: int
    t: int
    h0_lower_bound: int

    def to_dict(self) -> dict:
        return {"a": self.a, "t": self.t, "h0_lower_bound": self.h0_lower_bound}


class Outcome(str, enum.Enum):
    SEMISTABLE = "Semistable"
    NOT_SEMISTABLE = "NotSemistable"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class Verdict:
    outcome: Outcome
    certificate: Optional[CertificateNode] = None
    witness: Optional[Witness] = None
    residual: Tuple[CaseRow, ...] = ()
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "verdict": self.outcome.value,
            "certificate": self.certificate.to_dict() if self.certificate else None,
            "witness": self.witness.to_dict() if self.witness else None,
            "residual": [r.to_dict() for r in self.residual],
            "note": self.note,
        }


# -- slopes and candidates ---------------------------------------------------


def slope_log(pair: LogPair, a: int) -> Rational:
    """mu(Omega^a_X(log D)) as a coefficient of deg O(1)^n."""
    if not 1 <= a <= pair.n:
        raise ValueError(f"form degree {a} outside [1, {pair.n}]")
    return rat(a * (pair.total_degree - pair.s), pair.n)


def _candidates(n: int, s: int, k: int) -> List[Tuple[int, int]]:
    out = []
    for a in range(1, n):
        bound = rat(a * (s - k), n)
        t = 0
        while t < bound:
            out.append((a, t))
            t += 1
    return out


def destabilizing_candidates(pair: LogPair) -> List[Tuple[int, int]]:
    """Pairs (a, t), 1 <= a < n, 0 <= t < a(s-k)/n, whose H^0 must vanish.

    Negative twists are left out: Norimatsu vanishing handles them uniformly.
    """
    if not pair.log_fano:
        raise ValueError(f"{pair} is not log Fano (s={pair.s}, k={pair.total_degree})")
    return _candidates(pair.n, pair.s, pair.total_degree)


# -- leaves ------------------------------------------------------------------


def _space_inputs(space: VarietySpec) -> dict:
    return space.to_dict()


def _leaf(rule, space: VarietySpec, p: int, t: int, kb=None) -> CertificateNode:
    rule = Rule(rule)
    if rule is Rule.KAN:
        return CertificateNode(Rule.KAN, {"dim": space.dim, "p": p, "t": t})
    inputs = dict(_space_inputs(space), p=p, t=t)
    citation = ""
    if rule is Rule.STABILITY_VANISH:
        fact = _as_kb(kb)[space.dim]
        citation = f"{fact.citation}; {CITATIONS[rule]}"
        inputs["strength"] = fact.strength.value
    return CertificateNode(rule, inputs, citation=citation)


def _kan_leaf(dim: int, p: int, t: int) -> CertificateNode:
    return CertificateNode(Rule.KAN, {"dim": dim, "p": p, "t": t})


# -- Norimatsu induction -----------------------------------------------------


def _norimatsu(dim: int, a: int, t: int, r: int) -> CertificateNode:
    inputs = {"dim": dim, "a": a, "t": t, "r": r}
    if a == 0:
        # Omega^0(log D) = O, no poles to peel off
        children = (_kan_leaf(dim, 0, t),)
    elif r == 1:
        children = (_kan_leaf(dim, a, t), _kan_leaf(dim - 1, a - 1, t))
    else:
        children = (_norimatsu(dim, a, t, r - 1), _norimatsu(dim - 1, a - 1, t, r - 1))
    return CertificateNode(Rule.NORIMATSU, inputs, children)


def norimatsu_certificate(pair: LogPair, a: int, t: int) -> CertificateNode:
    """Certificate for H^0(Omega^a_X(log D)(t)) = 0, t < 0, peeling one component at a time."""
    if t >= 0:
        raise ValueError(f"Norimatsu vanishing needs t < 0, got t={t}")
    if not 1 <= a <= pair.n:
        raise ValueError(f"form degree {a} outside [1, {pair.n}]")
    return _norimatsu(pair.n, a, t, pair.r)


# -- rules on pairs ----------------------------------------------------------


def ample_or_trivial_verdict(pair: LogPair) -> Optional[Verdict]:
    """Semistable when K_X + D is ample or trivial: all obligations have t < 0."""
    if not (pair.kd_ample_or_trivial and pair.ambient.picard_rank_one_known):
        return None
    children = tuple(norimatsu_certificate(pair, a, -1) for a in range(1, pair.n))
    root = CertificateNode(
        Rule.AMPLE_OR_TRIVIAL,
        dict(_space_inputs(pair.ambient), degrees=list(pair.degrees)),
        children,
    )
    return Verdict(Outcome.SEMISTABLE, certificate=root)


def _cupping(r: int, pic1: bool) -> TriBool:
    if not pic1:
        return TriBool.UNKNOWN
    return TriBool.HOLDS if r == 1 else TriBool.FAILS


def cupping_injective(pair: LogPair) -> TriBool:
    """Injectivity of sum H^0(O_{D_i}) -> H^1(Omega_X) for the (a, t) = (1, 0) obligation.

    With h11 = 1 the target is a line, so this holds exactly when r = 1.
    """
    return _cupping(pair.r, pair.ambient.picard_rank_one_known)


def reducible_witness(pair: LogPair) -> Optional[Witness]:
    """Destabilizing sections of Omega_X(log D) when D has r >= 2 components.

    0 -> H^0(Omega_X) -> H^0(Omega_X(log D)) -> C^r -> H^1(Omega_X) = C with
    H^0(Omega_X) = 0 gives h^0 >= r - 1, i.e. O_X of slope 0 > (k-s)/n maps in.
    """
    if not pair.ambient.picard_rank_one_known:
        raise ValueError("reducible witness needs Picard rank one")
    if not pair.log_fano:
        raise ValueError(f"{pair} is not log Fano")
    if pair.r < 2:
        return None
    return Witness(a=1, t=0, h0_lower_bound=pair.r - pair.ambient.h11)


def _witness_certificate(pair: LogPair, w: Witness) -> CertificateNode:
    inputs = dict(_space_inputs(pair.ambient), k=pair.total_degree, r=pair.r,
                  a=w.a, t=w.t, h0_lower_bound=w.h0_lower_bound)
    return CertificateNode(Rule.REDUCIBLE_WITNESS, inputs, (_leaf(Rule.FANO_HODGE, pair.ambient, 1, 0),))


def _divisor_side(X: VarietySpec, k: int, D: VarietySpec, p: int, t: int, kb, rules, sharp,
                  r: int) -> Optional[CertificateNode]:
    for rule in DIVISOR_RULES:
        if rule not in rules:
            continue
        if rule is Rule.KAN:
            if kan_h0_vanishes(D.dim, p, t) is TriBool.HOLDS:
                return _leaf(rule, D, p, t)
        elif rule is Rule.FANO_HODGE:
            if t == 0 and fano_hodge_vanishes(D, p) is TriBool.HOLDS:
                return _leaf(rule, D, p, t)
        elif rule is Rule.BOTT_VANISH:
            if D.kind is Kind.PROJECTIVE_SPACE and bott_dim(D.dim, p, t, 0) == 0:
                return _leaf(rule, D, p, t)
        elif rule is Rule.SNOW_VANISH:
            if D.kind is Kind.QUADRIC and D.dim >= 3 and 1 <= p < D.dim \
                    and quadric_h0_vanishes(D.dim, p, t) is TriBool.HOLDS:
                return _leaf(rule, D, p, t)
        elif rule is Rule.STABILITY_VANISH:
            if 1 <= p < D.dim and stability_vanishing(D, p, t, kb, sharp=sharp) is TriBool.HOLDS:
                return _leaf(rule, D, p, t, kb)
        elif rule is Rule.RESTRICTION_SURJECTIVE:
            node = _restriction_node(D, X, k, p, t, kb)
            if node is not None:
                return node
        elif rule is Rule.CUPPING_INJECTIVE:
            if p == 0 and t == 0 and _cupping(r, X.picard_rank_one_known) is TriBool.HOLDS:
                return CertificateNode(rule, {"r": r, "pic1": X.picard_rank_one_known})
    return None


def _restriction_node(D, X, k, q, c, kb) -> Optional[CertificateNode]:
    emb, kk = standard_embedding(D, X, k)
    if not (0 <= q < emb.dim - 1 and c < kk):
        return None
    rule = h0_vanishing_rule(emb, q, c, kb, order=AMBIENT_RULES)
    if rule is None:
        return None
    inputs = dict(_space_inputs(emb), k=kk, q=q, c=c)
    return CertificateNode(Rule.RESTRICTION_SURJECTIVE, inputs, (_leaf(rule, emb, q, c, kb),))


def resolve_obligation(pair: LogPair, a: int, t: int, kb=None, *, rules=None,
                       sharp: bool = True) -> Tuple[Status, Optional[CertificateNode]]:
    """Discharge H^0(Omega^a_X(log D)(t)) = 0 for an irreducible boundary.

    Needs H^0(Omega^a_X(t)) = 0 and either H^0(Omega^{a-1}_D(t)) = 0 or, at
    (a, t) = (1, 0), injectivity of the connecting map.  ``rules`` restricts
    the divisor-side rules tried; ``sharp`` is passed to the stability rule.
    """
    if pair.r != 1:
        raise ValueError("obligations are resolved for irreducible boundaries; use reducible_witness")
    if not 1 <= a < pair.n:
        raise ValueError(f"form degree {a} outside [1, {pair.n})")
    if t < 0:
        raise ValueError("negative twists are discharged by norimatsu_certificate")
    rules = frozenset(DIVISOR_RULES) if rules is None else frozenset(Rule(x) for x in rules)
    kb = _as_kb(kb)
    X, k = pair.ambient, pair.total_degree
    if not X.picard_rank_one_known:
        return Status.UNRESOLVED, None
    amb_rule = h0_vanishing_rule(X, a, t, kb, order=AMBIENT_RULES)
    if amb_rule is None:
        return Status.UNRESOLVED, None
    D = divisor_intrinsic_type(X, k)
    side = _divisor_side(X, k, D, a - 1, t, kb, rules, sharp, pair.r)
    if side is None:
        return Status.UNRESOLVED, None
    node = CertificateNode(
        Rule.RESIDUE_SPLIT,
        dict(_space_inputs(X), k=k, a=a, t=t),
        (_leaf(amb_rule, X, a, t, kb), side),
    )
    return Status.RESOLVED, node


def _deciding_rule(node: CertificateNode) -> Rule:
    return node.children[1].rule


def _check_pair(pair: LogPair):
    if not pair.snc:
        raise InputError("boundary must be simple normal crossing")
    for c in pair.components:
        if not c.smooth:
            raise InputError(f"component of degree {c.degree} is singular")
        if not c.irreducible:
            raise InputError(f"component of degree {c.degree} is reducible; list its pieces separately")
    if not pair.ambient.picard_rank_one_known:
        raise InputError(f"{pair.ambient} is not known to have Picard rank one")


def certify(pair: LogPair, kb=None) -> Verdict:
    """Decide semistability of Omega_X(log D), or report what stays open."""
    _check_pair(pair)
    kb = _as_kb(kb)
    if pair.kd_ample_or_trivial:
        return ample_or_trivial_verdict(pair)
    if pair.r >= 2:
        w = reducible_witness(pair)
        return Verdict(Outcome.NOT_SEMISTABLE, certificate=_witness_certificate(pair, w), witness=w)

    n, s, k = pair.n, pair.s, pair.total_degree
    children = [norimatsu_certificate(pair, a, -1) for a in range(1, n)]
    residual = []
    for a, t in destabilizing_candidates(pair):
        status, node = resolve_obligation(pair, a, t, kb)
        if node is None:
            residual.append(CaseRow(n, s, k, a, t, status))
        else:
            children.append(node)
    if residual:
        return Verdict(Outcome.UNKNOWN, residual=tuple(residual),
                       note="obligations below could not be discharged; this is not a negative result")
    root = CertificateNode(
        Rule.SLOPE_BOUND,
        dict(_space_inputs(pair.ambient), k=k, r=pair.r, slope=str(slope_log(pair, 1))),
        tuple(children),
    )
    return Verdict(Outcome.SEMISTABLE, certificate=root)


def case_table(n: int, s: int, k: int, kb=None, *, rules=None, sharp: bool = True) -> List[CaseRow]:
    """Every candidate (a, t) for the generic pair of type (n, s, k), with its resolution."""
    if not 2 <= n <= 6:
        raise ValueError(f"n must lie in [2, 6], got {n}")
    if not 0 < k < s <= n + 1:
        raise ValueError(f"need 0 < k < s <= n + 1, got s={s}, k={k}")
    pair = log_pair(generic_variety(n, s), [k])
    rows = []
    for a, t in destabilizing_candidates(pair):
        status, node = resolve_obligation(pair, a, t, kb, rules=rules, sharp=sharp)
        rows.append(CaseRow(n, s, k, a, t, status, _deciding_rule(node) if node else None))
    return rows


# -- comparison with the published statement ---------------------------------

STATEMENT = {
    2: "s = 3",
    3: "s <= 4",
    4: "s <= 5",
    5: "s <= 6 and (s in {2, 5, 6} or (s, k) in {(3, 2), (4, 3)})",
    6: "s <= 7 and (s <= 4 or s in {6, 7} or (s, k) in {(5, 4), (5, 3)})",
}


def statement_includes(n: int, s: int, k: int) -> bool:
    """Whether the published theorem asserts semistability for a smooth irreducible D."""
    if n == 2:
        return s == 3
    if n == 3:
        return s <= 4
    if n == 4:
        return s <= 5
    if n == 5:
        return s <= 6 and (s in (2, 5, 6) or (s, k) in ((3, 2), (4, 3)))
    if n == 6:
        return s <= 7 and (s <= 4 or s in (6, 7) or (s, k) in ((5, 4), (5, 3)))
    raise ValueError(f"no statement for n={n}")


@dataclass
class DiscrepancyReport:
    n: int
    agree: List[Tuple[int, int]] = field(default_factory=list)
    engine_only: List[Tuple[int, int]] = field(default_factory=list)
    statement_only: List[Tuple[int, int]] = field(default_factory=list)
    statement: str = ""
    engine: str = "case_table(n, s, k) fully resolved"

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "statement": self.statement,
            "engine": self.engine,
            "agree": [list(x) for x in self.agree],
            "engine_resolves_statement_excludes": [list(x) for x in self.engine_only],
            "statement_includes_engine_unresolved": [list(x) for x in self.statement_only],
        }


def theorem_crosscheck(n: int, kb=None) -> DiscrepancyReport:
    if not 2 <= n <= 6:
        raise ValueError(f"n must lie in [2, 6], got {n}")
    report = DiscrepancyReport(n, statement=STATEMENT[n])
    for s in range(2, n + 2):
        for k in range(1, s):
            engine = all(row.status is Status.RESOLVED for row in case_table(n, s, k, kb))
            stated = statement_includes(n, s, k)
            if engine == stated:
                report.agree.append((s, k))
            elif engine:
                report.engine_only.append((s, k))
            else:
                report.statement_only.append((s, k))
    return report


# -- replay ------------------------------------------------------------------


def _fail(node, msg):
    raise ReplayError(f"{node.rule.value} {node.inputs}: {msg}")


def _space(node) -> VarietySpec:
    try:
        return VarietySpec.from_dict(node.inputs)
    except (KeyError, ValueError) as exc:
        _fail(node, f"bad variety: {exc}")


def _claim(node) -> Tuple:
    """What a vanishing leaf asserts: (variety or dim, p, t)."""
    i = node.inputs
    if node.rule is Rule.KAN:
        return (i["dim"], i["p"], i["t"])
    return (_space(node), i["p"], i["t"])


def _expect_claim(parent, child, space: VarietySpec, p: int, t: int):
    if child.rule not in LEAF_RULES - {Rule.CUPPING_INJECTIVE}:
        _fail(parent, f"child {child.rule.value} is not a vanishing leaf")
    got = _claim(child)
    want = (space.dim, p, t) if child.rule is Rule.KAN else (space, p, t)
    if got != want:
        _fail(parent, f"child claims {got}, expected {want}")


def _replay_leaf(node, kb):
    i = node.inputs
    try:
        if node.rule is Rule.KAN:
            ok = kan_h0_vanishes(i["dim"], i["p"], i["t"]) is TriBool.HOLDS
        elif node.rule is Rule.BOTT_VANISH:
            sp = _space(node)
            ok = sp.kind is Kind.PROJECTIVE_SPACE and bott_dim(sp.dim, i["p"], i["t"], 0) == 0
        elif node.rule is Rule.SNOW_VANISH:
            sp = _space(node)
            ok = sp.kind is Kind.QUADRIC and quadric_h0_vanishes(sp.dim, i["p"], i["t"]) is TriBool.HOLDS
        elif node.rule is Rule.STABILITY_VANISH:
            ok = stability_vanishing(_space(node), i["p"], i["t"], kb) is TriBool.HOLDS
        elif node.rule is Rule.FANO_HODGE:
            ok = i["t"] == 0 and fano_hodge_vanishes(_space(node), i["p"]) is TriBool.HOLDS
        elif node.rule is Rule.CUPPING_INJECTIVE:
            ok = _cupping(i["r"], i["pic1"]) is TriBool.HOLDS
        else:
            ok = False
    except (KeyError, ValueError, TypeError) as exc:
        _fail(node, f"cannot evaluate: {exc}")
    if not ok:
        _fail(node, "leaf predicate does not hold")


def _expect_children(node, count):
    if len(node.children) != count:
        _fail(node, f"expected {count} children, found {len(node.children)}")


def _replay_norimatsu(node):
    i = node.inputs
    dim, a, t, r = i["dim"], i["a"], i["t"], i["r"]
    if t >= 0:
        _fail(node, "needs a negative twist")
    if a == 0:
        _expect_children(node, 1)
        wants = [(Rule.KAN, {"dim": dim, "p": 0, "t": t})]
    elif r == 1:
        _expect_children(node, 2)
        wants = [(Rule.KAN, {"dim": dim, "p": a, "t": t}), (Rule.KAN, {"dim": dim - 1, "p": a - 1, "t": t})]
    else:
        _expect_children(node, 2)
        wants = [(Rule.NORIMATSU, {"dim": dim, "a": a, "t": t, "r": r - 1}),
                 (Rule.NORIMATSU, {"dim": dim - 1, "a": a - 1, "t": t, "r": r - 1})]
    for child, (rule, inputs) in zip(node.children, wants):
        if child.rule is not rule or child.inputs != inputs:
            _fail(node, f"child {child.rule.value} {child.inputs} does not match {rule.value} {inputs}")


def _replay_negative_twists(node, n, r):
    noris = [c for c in node.children if c.rule is Rule.NORIMATSU]
    seen = sorted(c.inputs["a"] for c in noris)
    if seen != list(range(1, n)):
        _fail(node, f"negative twists covered for a in {seen}, need 1..{n - 1}")
    for c in noris:
        if c.inputs["dim"] != n or c.inputs["r"] != r:
            _fail(node, "Norimatsu child on the wrong pair")


def _replay_residue_split(node, kb):
    i = node.inputs
    X = _space(node)
    k, a, t = i["k"], i["a"], i["t"]
    if not 1 <= a < X.dim or t < 0:
        _fail(node, "obligation out of range")
    _expect_children(node, 2)
    amb, side = node.children
    _expect_claim(node, amb, X, a, t)
    D = divisor_intrinsic_type(X, k)
    if side.rule is Rule.CUPPING_INJECTIVE:
        if (a, t) != (1, 0) or side.inputs.get("r") != 1 or side.inputs.get("pic1") != X.picard_rank_one_known:
            _fail(node, "cupping argument only covers (a, t) = (1, 0) for one component")
    elif side.rule is Rule.RESTRICTION_SURJECTIVE:
        emb, kk = standard_embedding(D, X, k)
        got = (_space(side), side.inputs["k"], side.inputs["q"], side.inputs["c"])
        if got != (emb, kk, a - 1, t):
            _fail(node, f"restriction {got} does not target Omega^{a - 1}_D({t})")
    else:
        _expect_claim(node, side, D, a - 1, t)


def _replay_node(node, kb):
    i = node.inputs
    if node.rule in LEAF_RULES:
        if node.children:
            _fail(node, "leaf with children")
        _replay_leaf(node, kb)
        return
    if node.rule is Rule.NORIMATSU:
        _replay_norimatsu(node)
    elif node.rule is Rule.AMPLE_OR_TRIVIAL:
        X = _space(node)
        if not X.picard_rank_one_known or X.index > sum(i["degrees"]):
            _fail(node, "K_X + D is not ample or trivial on a Picard rank one variety")
        _expect_children(node, X.dim - 1)
        _replay_negative_twists(node, X.dim, len(i["degrees"]))
    elif node.rule is Rule.SLOPE_BOUND:
        X = _space(node)
        n, s, k = X.dim, X.index, i["k"]
        if not s > k or i["r"] != 1:
            _fail(node, "slope bound chase needs a log Fano pair with one component")
        if i["slope"] != str(rat(k - s, n)):
            _fail(node, f"slope {i['slope']} should be {rat(k - s, n)}")
        _replay_negative_twists(node, n, 1)
        splits = [c for c in node.children if c.rule is Rule.RESIDUE_SPLIT]
        if len(splits) + n - 1 != len(node.children):
            _fail(node, "unexpected child rule")
        for c in splits:
            if _space(c) != X or c.inputs["k"] != k:
                _fail(node, "residue split on a different pair")
        covered = sorted((c.inputs["a"], c.inputs["t"]) for c in splits)
        if covered != _candidates(n, s, k):
            _fail(node, f"obligations {covered} differ from candidates {_candidates(n, s, k)}")
    elif node.rule is Rule.RESIDUE_SPLIT:
        _replay_residue_split(node, kb)
    elif node.rule is Rule.RESTRICTION_SURJECTIVE:
        emb = _space(node)
        if not (i["c"] < i["k"] and 0 <= i["q"] < emb.dim - 1):
            _fail(node, "restriction lemma hypotheses c < k, q < dim - 1 fail")
        _expect_children(node, 1)
        _expect_claim(node, node.children[0], emb, i["q"], i["c"])
    elif node.rule is Rule.REDUCIBLE_WITNESS:
        X = _space(node)
        r, k = i["r"], i["k"]
        if not (X.picard_rank_one_known and r >= 2 and X.index > k):
            _fail(node, "witness needs a log Fano pair with r >= 2 on Picard rank one")
        if i["h0_lower_bound"] != r - 1 or (i["a"], i["t"]) != (1, 0):
            _fail(node, "rank count does not give the stated lower bound")
        if not rat(i["t"], i["a"]) > rat(k - X.index, X.dim):
            _fail(node, "witness does not exceed the slope")
        _expect_children(node, 1)
        _expect_claim(node, node.children[0], X, 1, 0)
    elif node.rule is Rule.COVER_PULLBACK:
        _expect_children(node, 1)
        base = node.children[0]
        if base.rule is not Rule.AMPLE_OR_TRIVIAL:
            _fail(node, "cover transfer needs an ample-or-trivial base certificate")
        if base.inputs != {kk: v for kk, v in i.items()}:
            _fail(node, "base certificate is for a different pair")
    else:
        _fail(node, "unknown rule")
    for c in node.children:
        _replay_node(c, kb)


def replay(node: CertificateNode, kb=None) -> bool:
    """Re-evaluate every leaf and side condition; raise ReplayError on the first failure."""
    _replay_node(node, _as_kb(kb))
    return True
