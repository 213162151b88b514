import cmath
import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conjcert.modular import (
    DELTAS,
    ModularError,
    dominance_check,
    j_invariant,
    m_matrix,
    q_minima,
    q_minima_symbolic,
    q_values_independent,
    tail_bound,
    theta2,
    theta_point,
)

# theta_3(0, e^{-2 pi})^2, the delta = 0 constant at M = i Id
THETA00_AT_I = 1.0074837203450846


def test_theta_at_identity_matches_jacobi_theta():
    M = ((1j, 0), (0, 1j))
    q = mpmath.exp(-2 * mpmath.pi)
    assert abs(theta2((0, 0), M).value - THETA00_AT_I) < 1e-13
    assert abs(THETA00_AT_I - float(mpmath.jtheta(3, 0, q) ** 2)) < 1e-15
    expected10 = float(mpmath.jtheta(2, 0, q) * mpmath.jtheta(3, 0, q))
    assert abs(theta2((1, 0), M).value - expected10) < 1e-13
    assert abs(theta2((1, 1), M).value - float(mpmath.jtheta(2, 0, q) ** 2)) < 1e-13


def test_theta_point_is_symmetric_in_swapped_coordinates():
    M = ((2j, 0.3j), (0.3j, 1.5j))
    N = ((1.5j, 0.3j), (0.3j, 2j))
    a, _ = theta_point(M)
    b, _ = theta_point(N)
    assert abs(a[1] - b[2]) < 1e-12 and abs(a[2] - b[1]) < 1e-12


@pytest.mark.parametrize("mu", [0.5, 1.0, 1.5, 2.0, 3.0])
@pytest.mark.parametrize("t", [complex(1 / 3, 3), complex(0.2, 2.5), complex(0.4, 1.5),
                               complex(0.1, 4.0), complex(0.45, 1.2)])
def test_tail_bound_sound_under_radius_doubling(mu, t):
    M = m_matrix(mu, t)
    assert M.positive_definite
    for delta in DELTAS:
        for R in (1, 2, 3):
            a = theta2(delta, M, radius=R)
            b = theta2(delta, M, radius=2 * R)
            assert abs(b.value - a.value) <= a.tail_bound


def test_tail_bound_decreases():
    bounds = [tail_bound(0.5, R) for R in range(1, 8)]
    assert all(x > y for x, y in zip(bounds, bounds[1:]))


def test_indefinite_matrix_rejected():
    with pytest.raises(ModularError):
        theta2((0, 0), ((1j, 2j), (2j, 1j)))


def test_j_at_special_points():
    assert abs(j_invariant(1j).value - 1) < 1e-10
    rho = cmath.exp(2j * math.pi / 3)
    assert abs(j_invariant(rho).value) < 1e-10


@settings(max_examples=25, deadline=None)
@given(st.floats(-0.5, 0.5), st.floats(0.9, 2.5))
def test_j_against_mpmath_and_modularity(x, y):
    tau = complex(x, y)
    v = j_invariant(tau)
    ref = complex(mpmath.kleinj(tau))
    assert abs(v.value - ref) <= max(1e-9 * abs(ref), 1e-9)
    assert abs(j_invariant(tau + 1).value - v.value) <= 1e-8 * max(1.0, abs(ref))
    assert abs(j_invariant(-1 / tau).value - v.value) <= 1e-6 * max(1.0, abs(ref))


def test_q_minima_at_sample_point():
    res = q_minima(Fraction(1, 3), Fraction(82, 9))
    assert all(m.matches for m in res.values())
    assert res[(1, 0)].value == Fraction(1, 6)  # t1 / 2
    assert [res[d].value for d in DELTAS] == [0, Fraction(1, 6), Fraction(35, 18), Fraction(35, 18)]


def brute_min(t1, q, delta, box=12):
    return min(2 * t1 * z1 * z1 + 2 * z1 * z2 + q * z2 * z2
               for n1 in range(-box, box + 1) for n2 in range(-box, box + 1)
               for z1, z2 in [(n1 + Fraction(delta[0], 2), n2 + Fraction(delta[1], 2))])


@settings(max_examples=15, deadline=None)
@given(st.fractions(Fraction(1, 10), Fraction(9, 20), max_denominator=20),
       st.fractions(Fraction(3), Fraction(12), max_denominator=10))
def test_q_minima_against_brute_force(t1, q):
    try:
        res = q_minima(t1, q)
    except ModularError:
        return  # ties between distinct minimizer pairs
    for delta in DELTAS:
        assert res[delta].value == brute_min(t1, q, delta)


def test_q_minima_symbolic_formulas():
    sym = q_minima_symbolic()
    t1, q = Fraction(1, 3), Fraction(82, 9)
    for delta, m in q_minima(t1, q).items():
        terms = sym[delta].polynomial_terms()
        value = sum(Fraction(c if not hasattr(c, "to_fraction") else c.to_fraction()) * t1 ** a * q ** b
                    for (a, b), c in terms.items())
        assert value == m.value
    assert q_values_independent()


def test_q_minima_rejects_indefinite_form():
    with pytest.raises(ModularError):
        q_minima(Fraction(1, 3), Fraction(1))


@pytest.mark.slow
def test_dominance_slopes():
    report = dominance_check(complex(1 / 3, 3), (5, 10))
    assert report.max_relative_error() < 0.05
