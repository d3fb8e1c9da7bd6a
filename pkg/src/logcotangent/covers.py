"""Numerics of Kawamata covers pi: X -> Y branched along D = sum D_i, pi^* D_i = k_i D_i'.

The cover itself is never built; its Picard group can exceed Z, so only
the canonical twist, the log slope and the pulled-back verdict are tracked.
"""
from __future__ import annotations

from typing import Sequence

from .certify import (
    CaseRow,
    CertificateNode,
    Outcome,
    Rule,
    Status,
    Verdict,
    _check_pair,
    ample_or_trivial_verdict,
    destabilizing_candidates,
)
from .core import LogPair, Rational, rat


def _check_degrees(k_list):
    if any(k < 1 for k in k_list):
        raise ValueError(f"branch multiplicities must be >= 1, got {list(k_list)}")


def cover_canonical_twist(s: int, k_list: Sequence[int]) -> int:
    """c with K_X = pi^* O_Y(c), given K_Y = O_Y(-s)."""
    _check_degrees(k_list)
    return -s + sum(k - 1 for k in k_list)


def cover_log_slope(n: int, s: int, k_list: Sequence[int]) -> Rational:
    """Slope of Omega_X(log D') in units of (pi^* O_Y(1))^n.

    c_1(Omega_X) = pi^* O(c) and each D_i' has class pi^* O(1).
    """
    return rat(cover_canonical_twist(s, k_list) + len(k_list), n)


def cover_verdict(base: LogPair) -> Verdict:
    """Semistability of Omega_X(log D') w.r.t. pi^* O_Y(1), when K_Y + D is ample or trivial."""
    _check_pair(base)
    verdict = ample_or_trivial_verdict(base)
    if verdict is not None:
        base_cert = verdict.certificate
        root = CertificateNode(Rule.COVER_PULLBACK, dict(base_cert.inputs), (base_cert,))
        return Verdict(Outcome.SEMISTABLE, certificate=root)
    n, s, k = base.n, base.s, base.total_degree
    residual = tuple(CaseRow(n, s, k, a, t, Status.UNRESOLVED) for a, t in destabilizing_candidates(base))
    return Verdict(
        Outcome.UNKNOWN,
        residual=residual,
        note=f"K_Y + D is anti-ample (s={s} > k={k}); no transfer rule to the cover",
    )
