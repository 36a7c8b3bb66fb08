from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conic_xi.char_algebra import (
    CharFactor,
    ConfluentElementError,
    DimensionMismatchError,
    FactoredCharacter,
    HalfIntMonomial,
    PoleError,
    TorusElement,
    complete_homogeneous,
    complete_homogeneous_sequence,
    eval_factored,
    eval_monomial,
    expand_ladder,
    schur_bialternant,
)
from conic_xi.regularize import extrapolate_zero

M = HalfIntMonomial.from_exponents


def test_eval_monomial_direct_exponential():
    g = TorusElement([math.pi / 2, 0.0])
    assert eval_monomial(M(1.0, [1, 0]), g) == pytest.approx(1j)


def test_eval_monomial_half_integer_branch():
    g = TorusElement([math.pi, math.pi])
    val = eval_monomial(M(1.0, [Fraction(1, 2), Fraction(1, 2)]), g)
    assert val == pytest.approx(-1.0)


def test_eval_monomial_negative_exponent():
    g = TorusElement([math.pi / 3])
    assert eval_monomial(M(1.0, [-1]), g) == pytest.approx(np.exp(-1j * math.pi / 3))


def test_eval_monomial_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        eval_monomial(M(1.0, [1, 0]), TorusElement([1.0]))


def test_multiplicativity_on_random_pairs():
    rng = np.random.default_rng(11)
    for _ in range(1000):
        n = int(rng.integers(1, 4))
        g = TorusElement(rng.uniform(-8, 8, n))
        e1 = [Fraction(int(d), 2) for d in rng.integers(-6, 7, n)]
        e2 = [Fraction(int(d), 2) for d in rng.integers(-6, 7, n)]
        m1 = M(complex(rng.normal(), rng.normal()), e1)
        m2 = M(complex(rng.normal(), rng.normal()), e2)
        lhs = eval_monomial(m1 * m2, g)
        rhs = eval_monomial(m1, g) * eval_monomial(m2, g)
        assert lhs == pytest.approx(rhs, abs=1e-12, rel=1e-12)


def test_branch_consistency_under_exponent_shift():
    rng = np.random.default_rng(3)
    for _ in range(50):
        th = rng.uniform(-7, 7, 2)
        g = TorusElement(th)
        a = eval_monomial(M(1.0, [Fraction(1, 2), 1]), g)
        b = eval_monomial(M(1.0, [Fraction(5, 2), 1]), g)
        assert b / a == pytest.approx(np.exp(2j * th[0]), rel=1e-12)


def test_angle_shift_by_two_pi_flips_square_root():
    g = TorusElement([1.3])
    g_shift = TorusElement([1.3 + 2 * math.pi])
    half = M(1.0, [Fraction(1, 2)])
    assert eval_monomial(half, g_shift) == pytest.approx(-eval_monomial(half, g))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-7, 7), min_size=1, max_size=3),
       st.integers(-5, 5), st.integers(-5, 5))
def test_monomial_inverse_cancels(angles, d1, d2):
    g = TorusElement(angles)
    m = HalfIntMonomial(1.0 + 0j, tuple([d1] + [d2] * (len(angles) - 1)))
    assert eval_monomial(m, g) * eval_monomial(m.inverse(), g) == pytest.approx(1.0)


# ---------------------------------------------------------------------------
# symmetric functions
# ---------------------------------------------------------------------------


def test_complete_homogeneous_degree_zero():
    assert complete_homogeneous(0, TorusElement([0.4, 1.7])) == pytest.approx(1.0)


def test_complete_homogeneous_degree_two_expansion():
    g = TorusElement([0.9, 2.2])
    l1, l2 = np.exp(1j * 0.9), np.exp(1j * 2.2)
    assert complete_homogeneous(2, g) == pytest.approx(l1**2 + l1 * l2 + l2**2)


def test_generating_function_partial_sum():
    g = TorusElement([0.8, 2.9, 4.4])
    t = 0.9
    h = complete_homogeneous_sequence(200, g)
    partial = sum(h[a] * t**a for a in range(201))
    product = np.prod([1.0 / (1.0 - lam * t) for lam in g.eigenvalues()])
    assert abs(partial - product) < 1e-6


def test_generating_function_tail_bound_random_circle_points():
    rng = np.random.default_rng(5)
    for _ in range(20):
        n = int(rng.integers(1, 4))
        g = TorusElement(rng.uniform(0, 2 * math.pi, n))
        t = float(rng.uniform(0.05, 0.95))
        N = int(rng.integers(20, 120))
        h = complete_homogeneous_sequence(N, g)
        partial = sum(h[a] * t**a for a in range(N + 1))
        product = np.prod([1.0 / (1.0 - lam * t) for lam in g.eigenvalues()])
        C = float((N + 1 + n) ** (n - 1)) / math.factorial(n - 1) * (1 - t) ** -(n - 1)
        # roundoff floor: the analytic tail bound can underflow double noise
        floor = 1e-12 * (1 + abs(product))
        assert abs(partial - product) <= C * t ** (N + 1) / (1 - t) + floor


def test_schur_empty_weight_is_one():
    assert schur_bialternant([0, 0], TorusElement([0.7, 1.9])) == pytest.approx(1.0)


def test_schur_fundamental_weight():
    g = TorusElement([0.7, 1.9])
    lams = g.eigenvalues()
    assert schur_bialternant([1, 0], g) == pytest.approx(lams.sum())


def test_schur_matches_jacobi_trudi():
    g = TorusElement([0.5, 1.4, 3.3])
    w = [2, 1, 0]
    n = 3
    # oracle: determinant of the complete homogeneous matrix H_{w_i - i + j}
    h = complete_homogeneous_sequence(8, g)

    def H(k: int) -> complex:
        return 0.0 if k < 0 else h[k]

    mat = np.array([[H(w[i] - (i + 1) + (j + 1)) for j in range(n)] for i in range(n)])
    assert abs(schur_bialternant(w, g) - np.linalg.det(mat)) < 1e-10


def test_schur_symmetric_under_angle_permutation():
    rng = np.random.default_rng(8)
    w = [Fraction(5, 2), Fraction(1, 2), Fraction(-1, 2)]
    for _ in range(20):
        th = rng.uniform(0.2, 6.0, 3)
        vals = [schur_bialternant(w, TorusElement(th[list(p)]))
                for p in ([0, 1, 2], [1, 2, 0], [2, 0, 1], [1, 0, 2])]
        for v in vals[1:]:
            assert abs(v - vals[0]) < 1e-10


def test_schur_confluent_element_rejected():
    with pytest.raises(ConfluentElementError):
        schur_bialternant([1, 0], TorusElement([0.5, 0.5]))


def test_schur_weight_must_be_weakly_decreasing():
    with pytest.raises(ValueError):
        schur_bialternant([0, 1], TorusElement([0.5, 1.5]))


# ---------------------------------------------------------------------------
# factored characters
# ---------------------------------------------------------------------------


def _geometric(n: int = 1) -> FactoredCharacter:
    return FactoredCharacter(
        HalfIntMonomial.one(n),
        denominator=tuple(
            CharFactor(M(1.0, [1 if j == k else 0 for j in range(n)]), grading=Fraction(1))
            for k in range(n)
        ),
    )


def test_eval_factored_half_at_angle_pi():
    val = eval_factored(_geometric(), TorusElement([math.pi]), 0.0)
    assert val == pytest.approx(0.5)


def test_eval_factored_matches_determinant_form():
    th = [math.pi / 2, 2 * math.pi / 3]
    g = TorusElement(th)
    c = FactoredCharacter(
        M(1.0, [Fraction(1, 2), Fraction(1, 2)]),
        denominator=(CharFactor(M(1.0, [1, 0]), grading=Fraction(1)),
                     CharFactor(M(1.0, [0, 1]), grading=Fraction(1))),
    )
    lams = np.exp(1j * np.asarray(th))
    expected = np.exp(0.5j * sum(th)) / ((1 - lams[0]) * (1 - lams[1]))
    assert eval_factored(c, g, 0.0) == pytest.approx(expected, rel=1e-12)


def _quadric_char() -> FactoredCharacter:
    return FactoredCharacter(
        HalfIntMonomial.one(2),
        numerator=(CharFactor(M(1.0, [1, 1]), grading=Fraction(1), sign=+1),),
        denominator=(CharFactor(M(1.0, [2, 0]), grading=Fraction(2)),
                     CharFactor(M(1.0, [0, 2]), grading=Fraction(2))),
    )


def test_eval_factored_quadric_vs_damped_double_series():
    # (lam, mu) = (i, e^{i pi/3}); compare the closed form against the damped
    # truncated double sum extrapolated to s=0
    th = [math.pi / 2, math.pi / 3]
    g = TorusElement(th)
    c = _quadric_char()
    lam, mu = np.exp(1j * np.asarray(th))
    # smallest s chosen so the 400-term truncation stays below the target
    grid = [0.4, 0.2, 0.1, 0.05, 0.025]

    def truncated(s: float) -> complex:
        a = np.arange(400)
        sa = np.sum((lam**2 * math.exp(-2 * s)) ** a)
        sb = np.sum((mu**2 * math.exp(-2 * s)) ** a)
        return sa * sb * (1.0 + lam * mu * math.exp(-s))

    series_limit = extrapolate_zero([truncated(s) for s in grid], grid)
    closed = eval_factored(c, g, 0.0)
    assert abs(series_limit.value - closed) < 1e-5
    expected = (1 + lam * mu) / ((1 - lam**2) * (1 - mu**2))
    assert closed == pytest.approx(expected, rel=1e-12)


def test_eval_factored_pole_detected():
    with pytest.raises(PoleError):
        eval_factored(_geometric(), TorusElement([0.0]), 0.0)


def test_eval_factored_rejects_negative_s():
    with pytest.raises(ValueError):
        eval_factored(_geometric(), TorusElement([1.0]), -0.1)


def test_denominator_sign_flag_rejected():
    with pytest.raises(ValueError):
        FactoredCharacter(
            HalfIntMonomial.one(1),
            denominator=(CharFactor(M(1.0, [1]), grading=Fraction(1), sign=+1),),
        )


def test_expand_ladder_matches_damped_evaluation():
    g = TorusElement([1.1, 2.6])
    c = _quadric_char()
    delta, coeffs = expand_ladder(c, g, 3000)
    for s in (0.3, 0.08):
        w = np.arange(len(coeffs)) * float(delta)
        ladder_val = np.sum(coeffs * np.exp(-s * w))
        assert abs(ladder_val - eval_factored(c, g, s)) < 1e-9
