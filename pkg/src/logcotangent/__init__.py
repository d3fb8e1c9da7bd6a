"""Certified semistability checks for logarithmic cotangent bundles on Picard rank one pairs."""
from .certify import (
    CaseRow,
    CertificateNode,
    Outcome,
    Rule,
    Status,
    Verdict,
    Witness,
    ample_or_trivial_verdict,
    case_table,
    certify,
    cupping_injective,
    destabilizing_candidates,
    from_text,
    norimatsu_certificate,
    reducible_witness,
    replay,
    resolve_obligation,
    slope_log,
    theorem_crosscheck,
    to_text,
)
from .cohomology import (
    AMBIGUOUS,
    TriBool,
    bott_dim,
    divisor_intrinsic_type,
    euler_oracle_dim,
    fano_hodge_vanishes,
    kan_h0_vanishes,
    quadric_h0_vanishes,
    restriction_vanishing,
    stability_vanishing,
)
from .core import (
    DivisorComponent,
    LogPair,
    VarietySpec,
    abstract_fano,
    binomial,
    log_pair,
    projective_space,
    quadric,
    rat,
)
from .covers import cover_canonical_twist, cover_log_slope, cover_verdict

__version__ = "0.1.0"
