import threading

import pytest
from hypothesis import given, strategies as st

from logcotangent.cohomology import (
    AMBIGUOUS,
    KnowledgeBaseError,
    TriBool,
    bott_dim,
    default_kb,
    divisor_intrinsic_type,
    euler_oracle_dim,
    fano_hodge_vanishes,
    format_stability_kb,
    kan_h0_vanishes,
    parse_stability_kb,
    quadric_h0_vanishes,
    restriction_vanishing,
    stability_vanishing,
)
from logcotangent.core import Strength, abstract_fano, binomial, projective_space, quadric

H = TriBool.HOLDS
U = TriBool.UNKNOWN


def quadric_h0_omega1(m, t):
    """h^0(Q_m, Omega^1(t)) from the conormal and restriction sequences of Q_m in P^{m+1}.

    Valid for m >= 3: line bundles on Q_m have no middle cohomology and
    H^1(P^N, Omega^1(u)) is nonzero only at u = 0.
    """
    N = m + 1

    def h0_OQ(u):
        return binomial(N + u, N) - binomial(N + u - 2, N) if u >= 0 else 0

    restricted = bott_dim(N, 1, t, 0) - bott_dim(N, 1, t - 2, 0) + (1 if t == 2 else 0)
    return restricted - h0_OQ(t - 2)


@pytest.mark.parametrize("args, expected", [((3, 1, 1, 0), 0), ((2, 1, 2, 0), 3), ((4, 2, 0, 2), 1),
                                            ((3, 0, 0, 0), 1), ((3, 3, 0, 3), 1), ((2, 0, -3, 2), 1)])
def test_bott_examples(args, expected):
    assert bott_dim(*args) == expected


@pytest.mark.parametrize("args, expected", [((2, 0, 2, 0), 6), ((2, 2, 0, 2), 1), ((3, 2, 1, 0), 0),
                                            ((2, 1, 2, 0), 3)])
def test_oracle_examples(args, expected):
    assert euler_oracle_dim(*args) == expected


def test_bott_argument_errors():
    with pytest.raises(ValueError):
        bott_dim(2, 3, 0, 0)
    with pytest.raises(ValueError):
        euler_oracle_dim(2, 0, 0, -1)


def test_oracle_beyond_grid_still_closes():
    for n in (5, 6):
        for p in range(n + 1):
            for q in range(n + 1):
                for t in (-9, -1, 2, 9):
                    assert euler_oracle_dim(n, p, t, q) == bott_dim(n, p, t, q)


def test_oracle_cache_is_thread_safe():
    results = []

    def work():
        results.append([euler_oracle_dim(4, p, t, 0) for p in range(5) for t in range(-6, 7)])

    threads = [threading.Thread(target=work) for _ in range(8)]
    for th in threads:
        th.start()
    for th in threads:
        th.join()
    assert all(r == results[0] for r in results)
    assert AMBIGUOUS not in results[0]


@given(st.integers(1, 4), st.data())
def test_bott_serre_duality(n, data):
    p = data.draw(st.integers(0, n))
    q = data.draw(st.integers(0, n))
    t = data.draw(st.integers(-12, 12))
    assert bott_dim(n, p, t, q) == bott_dim(n, n - p, -t, n - q)


@pytest.mark.parametrize("args, expected", [((3, 1, -1), H), ((3, 1, 0), U), ((2, 2, -5), U), ((3, 0, -2), H)])
def test_kan(args, expected):
    assert kan_h0_vanishes(*args) is expected


def test_kan_is_sound_on_projective_space():
    for n in range(1, 7):
        for a in range(n + 1):
            for t in range(-8, 8):
                if kan_h0_vanishes(n, a, t) is H:
                    assert bott_dim(n, a, t, 0) == 0


def test_fano_hodge():
    assert fano_hodge_vanishes(abstract_fano(4, 2), 1) is H
    assert fano_hodge_vanishes(quadric(3), 0) is TriBool.FAILS
    assert fano_hodge_vanishes(projective_space(2), 2) is H
    assert bott_dim(2, 2, 0, 0) == 0


def test_stability_vanishing_examples():
    assert stability_vanishing(abstract_fano(3, 4), 2, 2) is H
    assert stability_vanishing(abstract_fano(2, 1, False), 1, 0) is U
    assert stability_vanishing(abstract_fano(5, 4), 2, 1) is H
    # stable cotangent bundle: endpoint t = s/n is covered in degree one only
    assert stability_vanishing(quadric(4), 1, 1) is H
    assert stability_vanishing(quadric(4), 1, 1, sharp=False) is U
    assert stability_vanishing(abstract_fano(6, 6), 1, 1) is U  # dim 6 only semistable
    assert stability_vanishing(abstract_fano(7, 3), 1, 0) is U  # no knowledge base entry
    with pytest.raises(ValueError):
        stability_vanishing(abstract_fano(3, 2), 3, 0)


def test_stability_vanishing_is_sound_on_projective_space():
    for n in range(3, 7):
        for a in range(1, n):
            for t in range(-3, n + 3):
                if stability_vanishing(projective_space(n), a, t) is H:
                    assert bott_dim(n, a, t, 0) == 0


@given(st.integers(3, 6), st.integers(1, 7), st.data())
def test_stability_vanishing_monotone(n, s, data):
    a = data.draw(st.integers(1, n - 1))
    t = data.draw(st.integers(-5, 10))
    space = abstract_fano(n, s)
    if stability_vanishing(space, a, t) is H:
        for u in range(t - 5, t):
            assert stability_vanishing(space, a, u) is H


@pytest.mark.parametrize("args, expected", [((3, 1, 1), H), ((5, 3, 3), H), ((3, 1, 2), U)])
def test_snow(args, expected):
    assert quadric_h0_vanishes(*args) is expected


def test_snow_rejects_surfaces():
    with pytest.raises(ValueError):
        quadric_h0_vanishes(2, 1, 1)


def test_snow_is_sound_in_degree_one():
    assert quadric_h0_omega1(3, 2) == 10
    for m in range(3, 8):
        for t in range(-3, 6):
            expected = quadric_h0_omega1(m, t)
            if quadric_h0_vanishes(m, 1, t) is H:
                assert expected == 0
            if t >= 2:
                assert expected > 0


def test_divisor_intrinsic_type():
    assert divisor_intrinsic_type(projective_space(3), 2) == quadric(2)
    assert divisor_intrinsic_type(quadric(3), 1) == quadric(2)
    assert divisor_intrinsic_type(projective_space(4), 3) == abstract_fano(3, 2)
    assert divisor_intrinsic_type(projective_space(2), 1) == projective_space(1)
    assert divisor_intrinsic_type(abstract_fano(3, 2), 1) == abstract_fano(2, 1, False)
    with pytest.raises(ValueError):
        divisor_intrinsic_type(projective_space(3), 4)


def test_restriction_vanishing():
    assert restriction_vanishing(projective_space(3), 2, 1, 1) is H
    assert restriction_vanishing(projective_space(3), 1, 1, 1) is U
    assert restriction_vanishing(projective_space(5), 2, 2, 1) is H
    assert bott_dim(5, 2, 1, 0) == 0
    with pytest.raises(ValueError):
        restriction_vanishing(projective_space(3), 2, 2, 1)


def test_default_kb():
    kb = default_kb()
    assert sorted(kb) == [3, 4, 5, 6]
    assert kb[6].strength is Strength.SEMISTABLE
    assert all(f.citation for f in kb.values())
    assert parse_stability_kb(format_stability_kb(kb)) == kb


@pytest.mark.parametrize("text", ["dim=3; strength=stable", "dim=3 strength=stable citation=x",
                                  "dim=3; strength=weird; citation=x",
                                  "dim=3; strength=stable; citation=x\ndim=3; strength=stable; citation=y"])
def test_kb_parse_errors(text):
    with pytest.raises(KnowledgeBaseError):
        parse_stability_kb(text)


def test_kb_extension_needs_no_code():
    kb = parse_stability_kb(format_stability_kb(default_kb()) + "dim=7; strength=semistable; citation=future\n")
    assert stability_vanishing(abstract_fano(7, 3), 1, 0, kb) is H
    assert stability_vanishing(abstract_fano(7, 3), 1, 0) is U


def test_point():
    for t in (-3, 0, 4):
        assert bott_dim(0, 0, t, 0) == 1
        assert euler_oracle_dim(0, 0, t, 0) == 1
