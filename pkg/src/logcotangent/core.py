"""Exact arithmetic and the shared vocabulary: varieties, divisors, log pairs.

Slopes are kept as the rational coefficient of ``deg O_X(1)^n``.  That
positive factor is never evaluated; only signs and comparisons matter.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

Rational = Fraction


def binomial(n: int, r: int) -> int:
    """C(n, r) for 0 <= r <= n, and 0 for any other (n, r)."""
    if r < 0 or n < 0 or r > n:
        return 0
    return math.comb(n, r)


def rat(num: int, den: int = 1) -> Rational:
    """Reduced rational with positive denominator."""
    if den == 0:
        raise ValueError("zero denominator")
    return Fraction(num, den)


class Kind(str, enum.Enum):
    PROJECTIVE_SPACE = "ProjectiveSpace"
    QUADRIC = "Quadric"
    ABSTRACT_FANO = "AbstractFano"


@dataclass(frozen=True)
class VarietySpec:
    """Intrinsic data of a smooth Fano variety with K_X = O_X(-index).

    ``h11`` is ``None`` when the Picard rank is not known.
    """

    kind: Kind
    dim: int
    index: int
    picard_rank_one_known: bool = True
    h11: Optional[int] = 1

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        if self.dim < 1:
            raise ValueError(f"dimension must be positive, got {self.dim}")
        if self.index < 1:
            raise ValueError(f"index must be positive, got {self.index}")
        if self.kind is Kind.PROJECTIVE_SPACE and self.index != self.dim + 1:
            raise ValueError("projective space P^n has index n + 1")
        if self.kind is Kind.QUADRIC:
            if self.dim < 2:
                raise ValueError("quadrics are taken of dimension >= 2")
            if self.index != self.dim:
                raise ValueError("a quadric Q_n has index n")
        if self.picard_rank_one_known and self.h11 != 1:
            raise ValueError("Picard rank one forces h11 = 1")
        if self.h11 is not None and self.h11 < 0:
            raise ValueError("h11 must be nonnegative")

    def __str__(self):
        if self.kind is Kind.PROJECTIVE_SPACE:
            return f"P{self.dim}"
        if self.kind is Kind.QUADRIC:
            return f"Q{self.dim}"
        return f"fano:{self.dim},{self.index}"

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "dim": self.dim,
            "index": self.index,
            "pic1": self.picard_rank_one_known,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "VarietySpec":
        kind = Kind(d["kind"])
        if kind is Kind.PROJECTIVE_SPACE:
            return projective_space(d["dim"])
        if kind is Kind.QUADRIC:
            return quadric(d["dim"])
        return abstract_fano(d["dim"], d["index"], d["pic1"])


def projective_space(n: int) -> VarietySpec:
    return VarietySpec(Kind.PROJECTIVE_SPACE, n, n + 1, True, 1)


def quadric(n: int) -> VarietySpec:
    # Q_2 = P^1 x P^1 has Picard rank two.
    if n == 2:
        return VarietySpec(Kind.QUADRIC, 2, 2, False, 2)
    return VarietySpec(Kind.QUADRIC, n, n, True, 1)


def abstract_fano(n: int, s: int, picard_rank_one_known: bool = True) -> VarietySpec:
    return VarietySpec(
        Kind.ABSTRACT_FANO, n, s, picard_rank_one_known,
        1 if picard_rank_one_known else None,
    )


def generic_variety(n: int, s: int) -> VarietySpec:
    """P^n when s = n+1, Q_n when s = n, otherwise an abstract Fano of index s."""
    if s == n + 1:
        return projective_space(n)
    if s == n and n >= 2:
        return quadric(n)
    return abstract_fano(n, s)


@dataclass(frozen=True)
class DivisorComponent:
    degree: int
    smooth: bool = True
    irreducible: bool = True

    def __post_init__(self):
        if self.degree < 1:
            raise ValueError(f"component degree must be >= 1, got {self.degree}")


@dataclass(frozen=True)
class LogPair:
    """An ambient variety with a boundary divisor D = sum of components D_i in |O(k_i)|."""

    ambient: VarietySpec
    components: tuple = field(default_factory=tuple)
    snc: bool = True

    def __post_init__(self):
        comps = tuple(
            c if isinstance(c, DivisorComponent) else DivisorComponent(int(c))
            for c in self.components
        )
        if not comps:
            raise ValueError("boundary divisor needs at least one component")
        object.__setattr__(self, "components", comps)

    @property
    def n(self) -> int:
        return self.ambient.dim

    @property
    def s(self) -> int:
        return self.ambient.index

    @property
    def r(self) -> int:
        return len(self.components)

    @property
    def degrees(self) -> tuple:
        return tuple(c.degree for c in self.components)

    @property
    def total_degree(self) -> int:
        return sum(self.degrees)

    @property
    def log_fano(self) -> bool:
        return self.s > self.total_degree

    @property
    def kd_ample_or_trivial(self) -> bool:
        return self.s <= self.total_degree

    def __str__(self):
        return f"({self.ambient}, D={'+'.join(str(k) for k in self.degrees)})"


def log_pair(ambient: VarietySpec, degrees: Sequence[int]) -> LogPair:
    return LogPair(ambient, tuple(DivisorComponent(k) for k in degrees))


class Strength(str, enum.Enum):
    STABLE = "stable"
    SEMISTABLE = "semistable"


@dataclass(frozen=True)
class StabilityFact:
    """(Semi)stability of the cotangent bundle of every Fano ``dim``-fold with Picard group Z."""

    dim: int
    strength: Strength
    citation: str
