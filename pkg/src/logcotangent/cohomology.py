"""Twisted form cohomology on P^n and one-sided vanishing predicates.

``bott_dim`` is the closed Bott formula; ``euler_oracle_dim`` recomputes the
same numbers by chasing the Euler sequence and is kept independent of it.
Every other predicate answers with a :class:`TriBool`: ``HOLDS`` means the
group provably vanishes, ``UNKNOWN`` means no rule applies.
"""
from __future__ import annotations

import enum
import functools
from importlib import resources
from typing import Dict, Iterable, Mapping, Optional, Union

from .core import (
    Kind,
    Strength,
    StabilityFact,
    VarietySpec,
    abstract_fano,
    binomial,
    projective_space,
    quadric,
    rat,
)


class TriBool(enum.Enum):
    HOLDS = "holds"
    FAILS = "fails"
    UNKNOWN = "unknown"

    def __bool__(self):
        raise TypeError("TriBool has no truth value; compare against TriBool.HOLDS")


class _Ambiguous:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "AMBIGUOUS"


AMBIGUOUS = _Ambiguous()


def _check_range(n, p, q):
    if n < 0:
        raise ValueError(f"dimension must be >= 0, got {n}")
    if not 0 <= p <= n:
        raise ValueError(f"form degree p={p} outside [0, {n}]")
    if not 0 <= q <= n:
        raise ValueError(f"cohomology degree q={q} outside [0, {n}]")


def bott_dim(n: int, p: int, t: int, q: int) -> int:
    """h^q(P^n, Omega^p(t)) by Bott's formula."""
    _check_range(n, p, q)
    if n == 0 or t == 0:
        return 1 if p == q else 0
    if q == 0:
        if t > p:
            return binomial(t + n - p, t) * binomial(t - 1, p)
        return 0
    if q == n:
        if t < p - n:
            return binomial(-t + p, -t) * binomial(-t - 1, n - p)
        return 0
    return 0


def line_bundle_dim(n: int, t: int, q: int) -> int:
    """h^q(P^n, O(t))."""
    if n == 0:
        return 1 if q == 0 else 0
    if q == 0:
        return binomial(n + t, n) if t >= 0 else 0
    if q == n:
        return binomial(-t - 1, n) if t <= -n - 1 else 0
    return 0


# -- Euler sequence oracle ---------------------------------------------------


def _solve_segment(seq, table):
    """Fill the single unknown of an exact segment, if there is exactly one."""
    changed = False
    segment = []

    def flush():
        nonlocal changed
        unknown = [i for i, x in enumerate(segment) if isinstance(x, tuple) and table[x] is None]
        if len(unknown) != 1:
            return
        total = 0
        for i, x in enumerate(segment):
            if i == unknown[0]:
                continue
            v = table[x] if isinstance(x, tuple) else x
            total += (-1) ** i * v
        sign = (-1) ** unknown[0]
        value = -total * sign
        if value < 0:
            raise ArithmeticError(f"Euler chase produced a negative dimension at {segment[unknown[0]]}")
        table[segment[unknown[0]]] = value
        changed = True

    for x in seq:
        v = table[x] if isinstance(x, tuple) else x
        if v == 0:
            flush()
            segment = []
        else:
            segment.append(x)
    flush()
    return changed


@functools.lru_cache(maxsize=None)
def _euler_table(n: int, T: int) -> Mapping:
    """Chase h^q(Omega^p(t)) for t in {T, -T} over all p, q."""
    twists = sorted({T, -T})
    table: Dict[tuple, Optional[int]] = {
        (p, q, t): None for p in range(n + 1) for q in range(n + 1) for t in twists
    }
    for t in twists:
        for q in range(n + 1):
            table[(0, q, t)] = line_bundle_dim(n, t, q)
            if t == 0:
                for p in range(n + 1):
                    table[(p, q, 0)] = 1 if p == q else 0
        if t < 0:
            for p in range(n):
                table[(p, 0, t)] = 0

    # 0 -> Omega^p(t) -> O(t-p)^C(n+1,p) -> Omega^{p-1}(t) -> 0, as a long exact sequence
    sequences = []
    for t in twists:
        for p in range(1, n + 1):
            mult = binomial(n + 1, p)
            seq = []
            for q in range(n + 1):
                seq.append((p, q, t))
                seq.append(mult * line_bundle_dim(n, t - p, q))
                seq.append((p - 1, q, t))
            sequences.append(seq)

    changed = True
    while changed:
        changed = False
        for seq in sequences:
            changed |= _solve_segment(seq, table)
        for (p, q, t), v in list(table.items()):
            dual = (n - p, n - q, -t)
            if v is not None and table[dual] is None:
                table[dual] = v
                changed = True
    return table


def euler_oracle_dim(n: int, p: int, t: int, q: int) -> Union[int, _Ambiguous]:
    """h^q(P^n, Omega^p(t)) from the Euler sequence, or ``AMBIGUOUS``.

    The chase only uses exactness, line bundle cohomology, Serre duality,
    the Hodge numbers of P^n and H^0(Omega^p(t)) = 0 for t < 0, p < n.
    It never guesses the rank of a connecting map.
    """
    _check_range(n, p, q)
    v = _euler_table(n, abs(t))[(p, q, t)]
    return AMBIGUOUS if v is None else v


# -- stability knowledge base ------------------------------------------------


class KnowledgeBaseError(ValueError):
    pass


def parse_stability_kb(text: str) -> Dict[int, StabilityFact]:
    kb: Dict[int, StabilityFact] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = {}
        for part in line.split(";"):
            key, sep, value = part.partition("=")
            if not sep:
                raise KnowledgeBaseError(f"line {lineno}: expected key=value, got {part.strip()!r}")
            fields[key.strip()] = value.strip()
        try:
            fact = StabilityFact(int(fields["dim"]), Strength(fields["strength"]), fields["citation"])
        except (KeyError, ValueError) as exc:
            raise KnowledgeBaseError(f"line {lineno}: {exc}") from None
        if fact.dim in kb:
            raise KnowledgeBaseError(f"line {lineno}: duplicate entry for dim {fact.dim}")
        kb[fact.dim] = fact
    return kb


def format_stability_kb(kb: Mapping[int, StabilityFact]) -> str:
    return "".join(
        f"dim={f.dim}; strength={f.strength.value}; citation={f.citation}\n"
        for f in sorted(kb.values(), key=lambda f: f.dim)
    )


@functools.lru_cache(maxsize=1)
def _default_kb_text() -> str:
    return resources.files("logcotangent.data").joinpath("stability.kb").read_text()


def default_kb() -> Dict[int, StabilityFact]:
    return parse_stability_kb(_default_kb_text())


def _as_kb(kb) -> Mapping[int, StabilityFact]:
    if kb is None:
        return default_kb()
    if isinstance(kb, Mapping):
        return kb
    return {f.dim: f for f in kb}


# -- vanishing predicates ----------------------------------------------------


def kan_h0_vanishes(dimY: int, a: int, t: int) -> TriBool:
    """H^0(Y, Omega^a_Y(t)) = 0 for t < 0 and a < dim Y (Kodaira-Akizuki-Nakano)."""
    if not 0 <= a <= dimY:
        raise ValueError(f"form degree {a} outside [0, {dimY}]")
    if t < 0 and a < dimY:
        return TriBool.HOLDS
    return TriBool.UNKNOWN


def fano_hodge_vanishes(space: VarietySpec, a: int) -> TriBool:
    """H^0(Y, Omega^a_Y) on a Fano: zero for a >= 1, constants for a = 0."""
    if not 0 <= a <= space.dim:
        raise ValueError(f"form degree {a} outside [0, {space.dim}]")
    return TriBool.HOLDS if a >= 1 else TriBool.FAILS


def stability_vanishing(space: VarietySpec, a: int, t: int, kb=None, *, sharp: bool = True) -> TriBool:
    """H^0(Y, Omega^a_Y(t)) = 0 from (semi)stability of Omega_Y.

    Semistable exterior powers give vanishing for t < a*s/n.  A stable
    cotangent bundle also kills the integral endpoint t = s/n when a = 1;
    ``sharp=False`` drops that endpoint and keeps only the strict bound.
    """
    if not 1 <= a < space.dim:
        raise ValueError(f"form degree {a} outside [1, {space.dim})")
    kb = _as_kb(kb)
    if space.dim == 2 or not space.picard_rank_one_known:
        return TriBool.UNKNOWN
    fact = kb.get(space.dim)
    if fact is None:
        return TriBool.UNKNOWN
    bound = rat(a * space.index, space.dim)
    if t < bound:
        return TriBool.HOLDS
    if sharp and fact.strength is Strength.STABLE and a == 1 and bound.denominator == 1 and t == bound:
        return TriBool.HOLDS
    return TriBool.UNKNOWN


def quadric_h0_vanishes(m: int, p: int, t: int) -> TriBool:
    """H^0(Q_m, Omega^p(t)) = 0 for t <= p (Snow), for m >= 3 and 1 <= p < m."""
    if m <= 2:
        raise ValueError("quadric surfaces have Picard rank two; use restriction from P^3")
    if not 1 <= p < m:
        raise ValueError(f"form degree {p} outside [1, {m})")
    return TriBool.HOLDS if t <= p else TriBool.UNKNOWN


def divisor_intrinsic_type(ambient: VarietySpec, k: int) -> VarietySpec:
    """Intrinsic type of a smooth irreducible divisor in |O(k)|, k < index."""
    if k < 1 or k >= ambient.index:
        raise ValueError(f"degree {k} divisor on {ambient} is not Fano (need 1 <= k < {ambient.index})")
    if ambient.dim < 2:
        raise ValueError("divisors are taken on varieties of dimension >= 2")
    m = ambient.dim - 1
    if ambient.kind is Kind.PROJECTIVE_SPACE and k == 1:
        return projective_space(m)
    if (ambient.kind is Kind.PROJECTIVE_SPACE and k == 2) or (ambient.kind is Kind.QUADRIC and k == 1):
        # a conic is a P^1
        return quadric(m) if m >= 2 else projective_space(1)
    return abstract_fano(m, ambient.index - k, m >= 3)


def standard_embedding(divisor: VarietySpec, ambient: VarietySpec, k: int):
    """(embedding variety, degree) used to restrict forms onto ``divisor``.

    Linear spaces and quadrics use their own embedding in projective space;
    anything else stays inside the ambient it was cut from.
    """
    if divisor.kind is Kind.PROJECTIVE_SPACE:
        return projective_space(divisor.dim + 1), 1
    if divisor.kind is Kind.QUADRIC:
        return projective_space(divisor.dim + 1), 2
    return ambient, k


def h0_vanishing_rule(space: VarietySpec, p: int, t: int, kb=None, *, order: Iterable[str] = None,
                      sharp: bool = True) -> Optional[str]:
    """Name of the first rule proving H^0(space, Omega^p(t)) = 0, or None."""
    if order is None:
        order = ("BottVanish", "SnowVanish", "StabilityVanish", "KAN", "FanoHodge")
    for rule in order:
        if rule == "BottVanish" and space.kind is Kind.PROJECTIVE_SPACE:
            if bott_dim(space.dim, p, t, 0) == 0:
                return rule
        elif rule == "SnowVanish" and space.kind is Kind.QUADRIC and space.dim >= 3 and 1 <= p < space.dim:
            if quadric_h0_vanishes(space.dim, p, t) is TriBool.HOLDS:
                return rule
        elif rule == "StabilityVanish" and 1 <= p < space.dim:
            if stability_vanishing(space, p, t, kb, sharp=sharp) is TriBool.HOLDS:
                return rule
        elif rule == "KAN":
            if kan_h0_vanishes(space.dim, p, t) is TriBool.HOLDS:
                return rule
        elif rule == "FanoHodge" and t == 0:
            if fano_hodge_vanishes(space, p) is TriBool.HOLDS:
                return rule
    return None


def restriction_vanishing(ambient: VarietySpec, k: int, q: int, c: int, kb=None) -> TriBool:
    """H^0(D, Omega^q_D(c)) = 0 for smooth D in |O_ambient(k)|, via surjective restriction.

    The restriction H^0(Omega^q_ambient(c)) -> H^0(Omega^q_D(c)) is onto
    for c < k and q < dim - 1, so vanishing upstairs pushes down.
    """
    if not 0 <= q < ambient.dim - 1:
        raise ValueError(f"restriction needs 0 <= q < dim - 1 = {ambient.dim - 1}, got q={q}")
    if c >= k:
        return TriBool.UNKNOWN
    return TriBool.HOLDS if h0_vanishing_rule(ambient, q, c, kb) else TriBool.UNKNOWN
