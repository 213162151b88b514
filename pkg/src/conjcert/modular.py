"""Numerics with explicit truncation bounds: the j-invariant (normalized so
that j(i) = 1), second-order theta constants of the matrices
M(mu, t) = (i mu / 2 t1) [[2 t1, 1], [1, |t|^2]], the exact minima of the
associated quadratic form, and the dominant-exponent slopes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath

from .field import RationalFunction
from .linalg import Matrix, rank

__all__ = [
    "ModularError",
    "JValue",
    "j_invariant",
    "ThetaMatrix",
    "m_matrix",
    "ThetaValue",
    "theta2",
    "theta_point",
    "QMinimum",
    "q_minima",
    "q_minima_symbolic",
    "q_values_independent",
    "dominance_check",
    "DELTAS",
]

DELTAS = [(0, 0), (1, 0), (0, 1), (1, 1)]


class ModularError(ValueError):
    pass


# ---------------------------------------------------------------------------
# j-invariant


@dataclass(frozen=True)
class JValue:
    value: complex
    error: float
    terms: int


def _sigma(n: int, k: int) -> int:
    total = 0
    d = 1
    while d * d <= n:
        if n % d == 0:
            total += d ** k
            e = n // d
            if e != d:
                total += e ** k
        d += 1
    return total


def _eisenstein_tail(k: int, nq: float, N: int) -> float:
    """Bound for sum_{n > N} sigma_k(n) |q|^n using sigma_k(n) <= zeta(k) n^k."""
    zk = float(mpmath.zeta(k))
    n = N + 1
    ratio = ((n + 1) / n) ** k * nq
    if ratio >= 1:
        return math.inf
    return zk * n ** k * nq ** n / (1 - ratio)


def j_invariant(tau: complex, terms: int | None = None, *, dps: int = 40) -> JValue:
    """j(tau)/1728 = E4^3 / (E4^3 - E6^2) from the Eisenstein q-expansions."""
    tau = complex(tau)
    if tau.imag <= 0:
        raise ModularError("tau must lie in the upper half plane")
    with mpmath.workdps(dps):
        q = mpmath.exp(2j * mpmath.pi * mpmath.mpc(tau.real, tau.imag))
        nq = float(abs(q))
        if terms is None:
            terms = 8
            while _eisenstein_tail(5, nq, terms) * 504 > 1e-30 and terms < 10_000:
                terms *= 2
        e4 = mpmath.mpf(1)
        e6 = mpmath.mpf(1)
        qn = mpmath.mpc(1)
        for n in range(1, terms + 1):
            qn *= q
            e4 += 240 * _sigma(n, 3) * qn
            e6 -= 504 * _sigma(n, 5) * qn
        d4 = 240 * _eisenstein_tail(3, nq, terms)
        d6 = 504 * _eisenstein_tail(5, nq, terms)
        den = e4 ** 3 - e6 ** 2
        if abs(den) == 0:
            raise ModularError("discriminant vanishes numerically")
        j = e4 ** 3 / den
        # first-order propagation, doubled for safety
        dj4 = abs(3 * e4 ** 2 / den - e4 ** 3 * 3 * e4 ** 2 / den ** 2)
        dj6 = abs(e4 ** 3 * 2 * e6 / den ** 2)
        err = 2 * float(dj4 * d4 + dj6 * d6) + float(abs(j)) * 2.0 ** (-3 * dps)
        return JValue(complex(j), err, terms)


# ---------------------------------------------------------------------------
# theta constants


@dataclass(frozen=True)
class ThetaMatrix:
    mu: complex
    t: complex
    entries: tuple[tuple[complex, complex], tuple[complex, complex]]
    det: complex
    margin: float  # smallest eigenvalue of Im(M)

    @property
    def positive_definite(self) -> bool:
        return self.margin > 0


def _sym_eigs(a: float, b: float, d: float) -> tuple[float, float]:
    tr, dt = a + d, a * d - b * b
    disc = math.sqrt(max(tr * tr / 4 - dt, 0.0))
    return tr / 2 - disc, tr / 2 + disc


def m_matrix(mu: complex, t: complex) -> ThetaMatrix:
    t = complex(t)
    t1 = t.real
    if t1 == 0:
        raise ModularError("t1 must be nonzero")
    q = abs(t) ** 2
    c = 1j * complex(mu) / (2 * t1)
    M = ((c * 2 * t1, c), (c, c * q))
    det = M[0][0] * M[1][1] - M[0][1] * M[1][0]
    lo, _ = _sym_eigs(M[0][0].imag, M[0][1].imag, M[1][1].imag)
    return ThetaMatrix(complex(mu), t, M, det, lo)


def _matrix_of(M) -> ThetaMatrix:
    if isinstance(M, ThetaMatrix):
        return M
    (a, b), (c, d) = M
    if abs(b - c) > 1e-14 * max(1.0, abs(b)):
        raise ModularError("matrix must be symmetric")
    lo, _ = _sym_eigs(complex(a).imag, complex(b).imag, complex(d).imag)
    return ThetaMatrix(float("nan"), complex("nan"), ((complex(a), complex(b)), (complex(b), complex(d))),
                       complex(a) * complex(d) - complex(b) ** 2, lo)


@dataclass(frozen=True)
class ThetaValue:
    delta: tuple[int, int]
    value: complex
    radius: int
    tail_bound: float


def tail_bound(lam: float, R: int) -> float:
    """Bound for the terms of a theta series outside the box max|n_i| <= R.

    A sup-norm shell k holds 8k lattice points, each with |n + delta/2| >=
    k - 1/2 and modulus at most exp(-2 pi lam |z|^2).
    """
    total = 0.0
    k = R + 1
    while True:
        term = 8 * k * math.exp(-2 * math.pi * lam * (k - 0.5) ** 2)
        # successive-term ratio, decreasing in k
        ratio = (k + 1) / k * math.exp(-2 * math.pi * lam * 2 * k)
        if ratio < 0.9:
            return total + term / (1 - ratio)
        total += term
        k += 1


def _theta_box(delta, M: ThetaMatrix, R: int, dps: int):
    (a, b), (_, d) = M.entries
    with mpmath.workdps(dps):
        A, B, D = (mpmath.mpc(x.real, x.imag) for x in (a, b, d))
        two_pi_i = 2j * mpmath.pi
        total = mpmath.mpc(0)
        for n1 in range(-R, R + 1):
            z1 = n1 + mpmath.mpf(delta[0]) / 2
            for n2 in range(-R, R + 1):
                z2 = n2 + mpmath.mpf(delta[1]) / 2
                total += mpmath.exp(two_pi_i * (A * z1 * z1 + 2 * B * z1 * z2 + D * z2 * z2))
        return total


def theta2(delta: Sequence[int], M, eps: float = 1e-12, *, max_radius: int = 400, dps: int = 30,
           radius: int | None = None) -> ThetaValue:
    """Sum over n in Z^2 of exp(2 pi i (n + delta/2)^T M (n + delta/2))."""
    delta = (int(delta[0]), int(delta[1]))
    if delta not in DELTAS:
        raise ModularError("delta must be a pair of bits")
    M = _matrix_of(M)
    if not M.positive_definite:
        raise ModularError("Im(M) is not positive definite")
    lam = M.margin
    if radius is None:
        R = 1
        while tail_bound(lam, R) > eps:
            R += 1
            if R > max_radius:
                raise ModularError("tolerance not reachable within the radius limit")
    else:
        R = radius
    val = _theta_box(delta, M, R, dps)
    return ThetaValue(delta, complex(val), R, tail_bound(lam, R))


def theta_point(M, eps: float = 1e-12, **kw) -> tuple[tuple[complex, ...], tuple[float, ...]]:
    """[T00 : T10 : T01 : T11] scaled so the largest coordinate is 1.

    Returns the coordinates and, per coordinate, the scaled tail bound.
    """
    vals = [theta2(d, M, eps, **kw) for d in DELTAS]
    big = max(vals, key=lambda v: abs(v.value))
    s = big.value
    return tuple(v.value / s for v in vals), tuple(v.tail_bound / abs(s) for v in vals)


# ---------------------------------------------------------------------------
# minima of Q(z) = 2 t1 z1^2 + 2 z1 z2 + q z2^2 over z in Z^2 + delta/2


@dataclass(frozen=True)
class QMinimum:
    delta: tuple[int, int]
    minimizer: tuple[Fraction, Fraction]
    value: Fraction
    expected_minimizer: tuple[Fraction, Fraction]
    expected_value: Fraction
    matches: bool


_H = Fraction(1, 2)
EXPECTED_MINIMIZERS = {
    (0, 0): (Fraction(0), Fraction(0)),
    (1, 0): (_H, Fraction(0)),
    (0, 1): (Fraction(-1), _H),
    (1, 1): (-_H, _H),
}
# value = c0 + c1 t1 + c2 q
EXPECTED_VALUES = {
    (0, 0): (Fraction(0), Fraction(0), Fraction(0)),
    (1, 0): (Fraction(0), _H, Fraction(0)),
    (0, 1): (Fraction(-1), Fraction(2), Fraction(1, 4)),
    (1, 1): (-_H, _H, Fraction(1, 4)),
}


def _Q(t1: Fraction, q: Fraction, z1: Fraction, z2: Fraction) -> Fraction:
    return 2 * t1 * z1 * z1 + 2 * z1 * z2 + q * z2 * z2


def q_minima(t1, q) -> dict[tuple[int, int], QMinimum]:
    """Exact minimizers by box search, compared with the expected list.

    ``t1`` and ``q = |t|^2`` are exact rationals (floats are converted
    exactly).  The box is large enough that nothing outside can compete.
    """
    t1, q = Fraction(t1), Fraction(q)
    if t1 <= 0 or 2 * t1 * q - 1 <= 0:
        raise ModularError("quadratic form is not positive definite")
    lam, _ = _sym_eigs(float(2 * t1), 1.0, float(q))
    lam *= 1 - 1e-9
    out = {}
    for delta in DELTAS:
        e = EXPECTED_MINIMIZERS[delta]
        ev = _Q(t1, q, *e)
        bound = math.isqrt(int(float(ev) / lam) + 1) + 2
        best: list[tuple[Fraction, tuple]] = []
        for n1 in range(-bound, bound + 1):
            for n2 in range(-bound, bound + 1):
                z = (n1 + Fraction(delta[0], 2), n2 + Fraction(delta[1], 2))
                best.append((_Q(t1, q, *z), z))
        best.sort()
        vmin = best[0][0]
        argmins = {z for v, z in best if v == vmin}
        z0 = max(argmins)
        unique = argmins == {z0, (-z0[0], -z0[1])}
        matches = unique and vmin == ev and (e in argmins)
        if not unique:
            raise ModularError(f"minimizer for delta={delta} is not unique up to sign")
        out[delta] = QMinimum(delta, e if e in argmins else z0, vmin, e, ev, matches)
    return out


def q_minima_symbolic() -> dict[tuple[int, int], RationalFunction]:
    """Q(n_delta) as exact elements of Q(t1, q)."""
    syms = ("t1", "q")
    t1 = RationalFunction.symbol("t1", syms)
    q = RationalFunction.symbol("q", syms)
    out = {}
    for delta, (z1, z2) in EXPECTED_MINIMIZERS.items():
        out[delta] = 2 * t1 * z1 * z1 + 2 * z1 * z2 * RationalFunction.constant(Fraction(1), syms) + q * z2 * z2
    return out


def q_values_independent() -> bool:
    """Q(n_10), Q(n_01), Q(n_11) have independent coordinates in the basis
    (1, t1, q), so they are Q-independent whenever 1, t1, q are."""
    rows = []
    sym = q_minima_symbolic()
    for delta in [(1, 0), (0, 1), (1, 1)]:
        terms = sym[delta].polynomial_terms()
        rows.append([terms.get((0, 0), 0), terms.get((1, 0), 0), terms.get((0, 1), 0)])
    rows = [[Fraction(x) if not hasattr(x, "to_fraction") else x.to_fraction() for x in r] for r in rows]
    return rank(Matrix(rows, 3)) == 3


# ---------------------------------------------------------------------------
# dominance of the minimal exponent


@dataclass
class DominanceRow:
    delta: tuple[int, int]
    s: float
    predicted_slope: float
    fitted_slope: float
    relative_error: float
    residual: float


@dataclass
class DominanceReport:
    t: complex
    rows: list[DominanceRow] = field(default_factory=list)

    def max_relative_error(self, skip_zero: bool = True) -> float:
        return max(r.relative_error for r in self.rows if not (skip_zero and r.predicted_slope == 0))


def _log_abs_theta(delta, s: float, t: complex, dps: int) -> float:
    M = m_matrix(s, t)
    v = theta2(delta, M, eps=1e-80, dps=dps, max_radius=60)
    return float(mpmath.log(abs(mpmath.mpc(v.value))))


def dominance_check(t: complex, s_values: Sequence[float] = (5, 10), *, h: float = 0.25,
                    dps: int = 60) -> DominanceReport:
    """Slope of log|Theta[delta](M(s, t))| in s against -(pi/t1) Q(n_delta).

    The slope is a central difference with step h; the residual is
    log|Theta| - (slope * s + log 2), the +log 2 accounting for the pair
    of minimizers +-n_delta (none for delta = 0).
    """
    t = complex(t)
    t1, q = t.real, abs(t) ** 2
    report = DominanceReport(t)
    for delta in DELTAS:
        c0, c1, c2 = EXPECTED_VALUES[delta]
        Qd = float(c0) + float(c1) * t1 + float(c2) * q
        pred = -math.pi / t1 * Qd
        for s in s_values:
            if m_matrix(s - h, t).margin <= 0:
                raise ModularError("sample matrix is not positive definite")
            lo = _log_abs_theta(delta, s - h, t, dps)
            hi = _log_abs_theta(delta, s + h, t, dps)
            mid = _log_abs_theta(delta, s, t, dps)
            slope = (hi - lo) / (2 * h)
            rel = abs(slope - pred) / abs(pred) if pred else abs(slope)
            offset = 0.0 if delta == (0, 0) else math.log(2)
            report.rows.append(DominanceRow(delta, s, pred, slope, rel, mid - (pred * s + offset)))
    return report
