"""Exact scalars: cyclotomic numbers and rational functions over them.

Two value types live here.  ``Cyclotomic`` is an element of Q(zeta_n) stored
as its residue modulo the n-th cyclotomic polynomial.  ``RationalFunction`` is
a quotient of multivariate polynomials in named real symbols whose
coefficients are cyclotomic; it is kept in lowest terms with a monic
denominator, so equality is decided by comparing representations.

Both types interoperate with ``int`` and ``Fraction``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import mpmath

__all__ = [
    "Cyclotomic",
    "RationalFunction",
    "FieldAutomorphism",
    "FieldError",
    "NumericValue",
    "cyclotomic_polynomial",
    "zeta",
    "embed",
    "apply_automorphism",
    "numeric_eval",
    "field_ops",
    "as_scalar",
    "scalar_order",
    "common_order",
    "is_zero",
    "format_scalar",
    "parse_scalar",
    "format_fraction",
]


class FieldError(ValueError):
    """Raised on invalid field operations (division by zero, bad orders)."""


# ---------------------------------------------------------------------------
# integer polynomial helpers (coefficient lists, low degree first)


def _divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


def _poly_divide_exact(num: list[int], den: Sequence[int]) -> list[int]:
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    lead = den[-1]
    for i in range(len(out) - 1, -1, -1):
        q, r = divmod(num[i + len(den) - 1], lead)
        if r:
            raise FieldError("inexact polynomial division")
        out[i] = q
        for j, d in enumerate(den):
            num[i + j] -= q * d
    if any(num[: len(den) - 1]):
        raise FieldError("inexact polynomial division")
    return out


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Coefficients of Phi_n, constant term first."""
    if n < 1:
        raise FieldError(f"order must be positive, got {n}")
    poly = [-1] + [0] * (n - 1) + [1]
    for d in _divisors(n)[:-1]:
        poly = _poly_divide_exact(poly, cyclotomic_polynomial(d))
    return tuple(poly)


@lru_cache(maxsize=None)
def _phi(n: int) -> int:
    return len(cyclotomic_polynomial(n)) - 1


@lru_cache(maxsize=None)
def _power_table(n: int) -> tuple[tuple[int, ...], ...]:
    """Row k holds zeta_n^k reduced modulo Phi_n, for 0 <= k < max(n, 2*phi)."""
    phi = _phi(n)
    cyc = cyclotomic_polynomial(n)
    rows: list[list[int]] = []
    cur = [0] * phi
    cur[0] = 1
    for _ in range(max(n, 2 * phi)):
        rows.append(cur)
        # multiply by x and reduce the overflow with x^phi = -sum cyc[i] x^i
        top = cur[-1]
        nxt = [0] + cur[:-1]
        if top:
            nxt = [a - top * c for a, c in zip(nxt, cyc[:-1])]
        cur = nxt
    return tuple(tuple(r) for r in rows)


def _mobius(n: int) -> int:
    result, p, m = 1, 2, n
    while p * p <= m:
        if m % p == 0:
            m //= p
            if m % p == 0:
                return 0
            result = -result
        p += 1
    if m > 1:
        result = -result
    return result


@lru_cache(maxsize=None)
def _traces(n: int) -> tuple[Fraction, ...]:
    # normalized trace of zeta_n^k, independent of the ambient cyclotomic field
    out = []
    for k in range(_phi(n)):
        d = n // math.gcd(n, k)
        out.append(Fraction(_mobius(d), _phi(d)))
    return tuple(out)


def format_fraction(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


# ---------------------------------------------------------------------------
# cyclotomic numbers


class Cyclotomic:
    """Element of Q(zeta_n) in the power basis reduced modulo Phi_n."""

    __slots__ = ("n", "c")

    def __init__(self, n: int, coeffs: Iterable = ()):
        if n < 1:
            raise FieldError(f"order must be positive, got {n}")
        phi = _phi(n)
        c = [Fraction(x) for x in coeffs]
        if len(c) > phi:
            c = _reduce(n, c)
        c += [Fraction(0)] * (phi - len(c))
        self.n = n
        self.c = tuple(c)

    @classmethod
    def rational(cls, value, n: int = 1) -> Cyclotomic:
        return cls(n, [Fraction(value)])

    @classmethod
    def zeta_power(cls, n: int, k: int) -> Cyclotomic:
        return cls(n, _power_table(n)[k % n])

    # -- predicates -------------------------------------------------------
    def __bool__(self) -> bool:
        return any(self.c)

    def is_rational(self) -> bool:
        return not any(self.c[1:])

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise FieldError("element is not rational")
        return self.c[0]

    # -- coercion ---------------------------------------------------------
    def _coerce(self, other) -> tuple[Cyclotomic, Cyclotomic] | None:
        if isinstance(other, Cyclotomic):
            if other.n == self.n:
                return self, other
            m = math.lcm(self.n, other.n)
            return embed(self, m), embed(other, m)
        if isinstance(other, (int, Fraction)):
            return self, Cyclotomic(self.n, [other])
        return None

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        return _make(a.n, tuple(x + y for x, y in zip(a.c, b.c)))

    __radd__ = __add__

    def __neg__(self) -> Cyclotomic:
        return _make(self.n, tuple(-x for x in self.c))

    def __sub__(self, other):
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        return _make(a.n, tuple(x - y for x, y in zip(a.c, b.c)))

    def __rsub__(self, other):
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        return _make(a.n, tuple(y - x for x, y in zip(a.c, b.c)))

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return _make(self.n, (Fraction(0),) * len(self.c))
            return _make(self.n, tuple(x * other for x in self.c))
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        if b.is_rational():
            s = b.c[0]
            return _make(a.n, tuple(x * s for x in a.c))
        if a.is_rational():
            s = a.c[0]
            return _make(a.n, tuple(x * s for x in b.c))
        phi = len(a.c)
        prod = [Fraction(0)] * (2 * phi - 1)
        for i, x in enumerate(a.c):
            if x:
                for j, y in enumerate(b.c):
                    if y:
                        prod[i + j] += x * y
        return _make(a.n, tuple(_reduce(a.n, prod)))

    __rmul__ = __mul__

    def inverse(self) -> Cyclotomic:
        if not self:
            raise FieldError("division by zero")
        if self.is_rational():
            return _make(self.n, (1 / self.c[0],) + self.c[1:])
        return _make(self.n, tuple(_poly_inverse_mod(list(self.c), self.n)))

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise FieldError("division by zero")
            return _make(self.n, tuple(x / other for x in self.c))
        if isinstance(other, Cyclotomic):
            return self * other.inverse()
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.inverse() * other
        return NotImplemented

    def __pow__(self, k: int) -> Cyclotomic:
        if k < 0:
            return self.inverse() ** (-k)
        result = Cyclotomic(self.n, [1])
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, RationalFunction):
            return other == self
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        return a.c == b.c

    def __hash__(self) -> int:
        if self.is_rational():
            return hash(self.c[0])
        tr = _traces(self.n)
        t1 = sum((x * t for x, t in zip(self.c, tr)), Fraction(0))
        return hash(("cyc", t1))

    # -- Galois -----------------------------------------------------------
    def galois(self, k: int) -> Cyclotomic:
        if math.gcd(k, self.n) != 1:
            raise FieldError(f"exponent {k} is not a unit modulo {self.n}")
        table = _power_table(self.n)
        out = [Fraction(0)] * len(self.c)
        for j, x in enumerate(self.c):
            if x:
                row = table[(j * k) % self.n]
                for i, r in enumerate(row):
                    if r:
                        out[i] += x * r
        return _make(self.n, tuple(out))

    def conjugate(self) -> Cyclotomic:
        return self.galois(self.n - 1)

    def complex_value(self, dps: int = 30) -> mpmath.mpc:
        with mpmath.workdps(dps):
            z = mpmath.exp(2j * mpmath.pi / self.n)
            total = mpmath.mpc(0)
            p = mpmath.mpc(1)
            for x in self.c:
                if x:
                    total += mpmath.mpf(x.numerator) / x.denominator * p
                p *= z
            return total

    def __complex__(self) -> complex:
        return complex(self.complex_value(20))

    def __repr__(self) -> str:
        if self.is_rational():
            return f"Cyclotomic({self.n}, {self.c[0]})"
        terms = [f"{x}*z{self.n}^{i}" for i, x in enumerate(self.c) if x]
        return " + ".join(terms)


def _make(n: int, c: tuple) -> Cyclotomic:
    obj = Cyclotomic.__new__(Cyclotomic)
    obj.n = n
    obj.c = c
    return obj


def _reduce(n: int, coeffs: Sequence[Fraction]) -> list[Fraction]:
    phi = _phi(n)
    table = _power_table(n)
    out = list(coeffs[:phi]) + [Fraction(0)] * max(0, phi - len(coeffs))
    for k in range(phi, len(coeffs)):
        x = coeffs[k]
        if x:
            row = table[k] if k < len(table) else table[k % n]
            for i, r in enumerate(row):
                if r:
                    out[i] += x * r
    return out


def _poly_inverse_mod(a: list[Fraction], n: int) -> list[Fraction]:
    # extended Euclid in Q[x] against Phi_n
    def trim(p):
        while p and p[-1] == 0:
            p.pop()
        return p

    def divmod_poly(u, v):
        u = list(u)
        q = [Fraction(0)] * max(1, len(u) - len(v) + 1)
        while len(trim(u)) >= len(v):
            shift = len(u) - len(v)
            f = u[-1] / v[-1]
            q[shift] = f
            for i, c in enumerate(v):
                u[i + shift] -= f * c
        return q, u

    def sub(p, q):
        m = max(len(p), len(q))
        p = p + [Fraction(0)] * (m - len(p))
        q = q + [Fraction(0)] * (m - len(q))
        return trim([x - y for x, y in zip(p, q)])

    def mul(p, q):
        if not p or not q:
            return []
        out = [Fraction(0)] * (len(p) + len(q) - 1)
        for i, x in enumerate(p):
            for j, y in enumerate(q):
                out[i + j] += x * y
        return out

    r0 = [Fraction(c) for c in cyclotomic_polynomial(n)]
    r1 = trim(list(a))
    s0, s1 = [], [Fraction(1)]
    while len(r1) > 1:
        q, r = divmod_poly(r0, r1)
        r0, r1 = r1, trim(r)
        s0, s1 = s1, sub(s0, mul(q, s1))
    inv = [x / r1[0] for x in s1]
    return _reduce(n, inv)


def zeta(n: int, k: int = 1) -> Cyclotomic:
    """The root of unity zeta_n^k."""
    return Cyclotomic.zeta_power(n, k)


def embed(x: Cyclotomic, m: int) -> Cyclotomic:
    """Image of x under zeta_n -> zeta_m^(m/n)."""
    if m % x.n:
        raise FieldError(f"order {x.n} does not divide {m}")
    if m == x.n:
        return x
    step = m // x.n
    out = [Fraction(0)] * (2 * _phi(m) + m)
    for j, c in enumerate(x.c):
        if c:
            out[j * step] += c
    return Cyclotomic(m, _reduce(m, out))


# ---------------------------------------------------------------------------
# multivariate polynomials with cyclotomic coefficients
#
# A polynomial is a dict mapping exponent tuples to nonzero Cyclotomic values
# of a common order.  Exponents may be negative only transiently.


Poly = dict


def _deglex_key(e: tuple[int, ...]) -> tuple:
    return (sum(e), e)


def _p_add(a: Poly, b: Poly, sign: int = 1) -> Poly:
    out = dict(a)
    for e, c in b.items():
        v = out.get(e)
        v = (c if sign > 0 else -c) if v is None else (v + c if sign > 0 else v - c)
        if v:
            out[e] = v
        else:
            out.pop(e, None)
    return out


def _p_mul(a: Poly, b: Poly) -> Poly:
    out: Poly = {}
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            e = tuple(x + y for x, y in zip(e1, e2))
            v = out.get(e)
            v = c1 * c2 if v is None else v + c1 * c2
            if v:
                out[e] = v
            else:
                out.pop(e, None)
    return out


def _p_scale(a: Poly, s) -> Poly:
    if not s:
        return {}
    return {e: c * s for e, c in a.items()}


def _p_lead(a: Poly) -> tuple[int, ...]:
    return max(a, key=_deglex_key)


def _p_divide_exact(a: Poly, b: Poly) -> Poly | None:
    """Return a/b when b divides a exactly, otherwise None."""
    if not b:
        raise FieldError("division by zero polynomial")
    rem = dict(a)
    quot: Poly = {}
    lb = _p_lead(b)
    cb = b[lb]
    while rem:
        la = _p_lead(rem)
        e = tuple(x - y for x, y in zip(la, lb))
        if min(e, default=0) < 0:
            return None
        coef = rem[la] / cb
        quot[e] = coef
        rem = _p_add(rem, _p_mul({e: coef}, b), -1)
    return quot


def _vars_used(a: Poly) -> set[int]:
    used = set()
    for e in a:
        used.update(i for i, x in enumerate(e) if x)
    return used


def _as_univariate(a: Poly, v: int) -> dict[int, Poly]:
    out: dict[int, Poly] = {}
    for e, c in a.items():
        d = e[v]
        rest = e[:v] + (0,) + e[v + 1:]
        out.setdefault(d, {})[rest] = c
    return out


def _from_univariate(u: dict[int, Poly], v: int) -> Poly:
    out: Poly = {}
    for d, p in u.items():
        for e, c in p.items():
            out[e[:v] + (d,) + e[v + 1:]] = c
    return out


def _p_monic(a: Poly) -> Poly:
    lc = a[_p_lead(a)]
    inv = lc.inverse()
    return {e: c * inv for e, c in a.items()}


def _p_gcd(a: Poly, b: Poly, nvars: int, order: int) -> Poly:
    """Monic gcd over Q(zeta_order)[x_1..x_nvars]."""
    one = {(0,) * nvars: Cyclotomic(order, [1])}
    if not a:
        return _p_monic(b) if b else one
    if not b:
        return _p_monic(a)
    used = _vars_used(a) | _vars_used(b)
    if not used:
        return one
    v = min(used)
    ua, ub = _as_univariate(a, v), _as_univariate(b, v)
    ca = _content(ua, nvars, order)
    cb = _content(ub, nvars, order)
    cont = _p_gcd(ca, cb, nvars, order)
    pa = _primitive(a, ca, v)
    pb = _primitive(b, cb, v)
    if max(_as_univariate(pa, v)) < max(_as_univariate(pb, v)):
        pa, pb = pb, pa
    while pb and max(_as_univariate(pb, v)) > 0:
        r = _prem(pa, pb, v)
        if not r:
            pa, pb = pb, {}
            break
        cr = _content(_as_univariate(r, v), nvars, order)
        pa, pb = pb, _primitive(r, cr, v)
    if pb:
        # pb is free of v: the primitive gcd is trivial
        g = one
    else:
        g = pa
    return _p_monic(_p_mul(cont, g))


def _content(u: dict[int, Poly], nvars: int, order: int) -> Poly:
    g: Poly = {}
    for p in u.values():
        g = _p_gcd(g, p, nvars, order) if g else _p_monic(p)
        if len(g) == 1 and not any(next(iter(g))):
            break
    return g


def _primitive(a: Poly, cont: Poly, v: int) -> Poly:
    q = _p_divide_exact(a, cont)
    assert q is not None
    return q


def _prem(a: Poly, b: Poly, v: int) -> Poly:
    ub = _as_univariate(b, v)
    db = max(ub)
    lb = ub[db]
    rem = a
    while rem:
        ur = _as_univariate(rem, v)
        dr = max(ur)
        if dr < db:
            break
        lr = ur[dr]
        shifted = {e[:v] + (e[v] + dr - db,) + e[v + 1:]: c for e, c in b.items()}
        rem = _p_add(_p_mul(rem, lb), _p_mul(lr, shifted), -1)
    return rem


# ---------------------------------------------------------------------------
# rational functions


def _symbol_names(symbols: Sequence[str]) -> tuple[str, ...]:
    names = tuple(symbols)
    if len(set(names)) != len(names):
        raise FieldError("duplicate symbol names")
    return names


class RationalFunction:
    """Quotient of polynomials in ordered real symbols over Q(zeta_n).

    Invariants: numerator and denominator are coprime, the denominator is
    monic for the degree-lexicographic order, and zero is ``0/1``.
    """

    __slots__ = ("n", "symbols", "num", "den")

    def __init__(self, n: int, symbols: Sequence[str], num: Poly, den: Poly | None = None, *, reduce: bool = True):
        self.n = n
        self.symbols = _symbol_names(symbols)
        k = len(self.symbols)
        one = {(0,) * k: Cyclotomic(n, [1])}
        num = {e: _lift(c, n) for e, c in num.items() if c}
        den = one if den is None else {e: _lift(c, n) for e, c in den.items() if c}
        if not den:
            raise FieldError("division by zero")
        if not num:
            self.num, self.den = {}, one
            return
        if reduce:
            g = _p_gcd(num, den, k, n)
            if not (len(g) == 1 and not any(next(iter(g)))):
                num = _p_divide_exact(num, g)
                den = _p_divide_exact(den, g)
            lc = den[_p_lead(den)]
            if lc != 1:
                inv = lc.inverse()
                num = {e: c * inv for e, c in num.items()}
                den = {e: c * inv for e, c in den.items()}
        self.num, self.den = num, den

    # -- constructors -----------------------------------------------------
    @classmethod
    def symbol(cls, name: str, symbols: Sequence[str], n: int = 1) -> RationalFunction:
        symbols = tuple(symbols)
        e = tuple(1 if s == name else 0 for s in symbols)
        if name not in symbols:
            raise FieldError(f"unknown symbol {name}")
        return cls(n, symbols, {e: Cyclotomic(n, [1])})

    @classmethod
    def constant(cls, value, symbols: Sequence[str], n: int | None = None) -> RationalFunction:
        value = as_scalar(value)
        order = value.n if n is None else n
        return cls(order, symbols, {(0,) * len(tuple(symbols)): _lift(value, order)})

    # -- coercion ---------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, RationalFunction):
            if other.symbols != self.symbols:
                raise FieldError(
                    f"incompatible symbol sets {self.symbols} and {other.symbols}")
            if other.n == self.n:
                return self, other
            m = math.lcm(self.n, other.n)
            return self.with_order(m), other.with_order(m)
        if isinstance(other, (int, Fraction, Cyclotomic)):
            other = as_scalar(other)
            m = math.lcm(self.n, other.n)
            a = self.with_order(m)
            return a, RationalFunction(m, self.symbols, {(0,) * len(self.symbols): embed(other, m)}, reduce=False)
        return None

    def with_order(self, m: int) -> RationalFunction:
        if m == self.n:
            return self
        return RationalFunction(m, self.symbols,
                                {e: embed(c, m) for e, c in self.num.items()},
                                {e: embed(c, m) for e, c in self.den.items()}, reduce=False)

    def with_symbols(self, symbols: Sequence[str]) -> RationalFunction:
        """Re-express over a larger (or reordered) symbol tuple."""
        symbols = _symbol_names(symbols)
        missing = [s for s in self.symbols if s not in symbols and self._uses(s)]
        if missing:
            raise FieldError(f"symbols {missing} not available")
        idx = [self.symbols.index(s) if s in self.symbols else None for s in symbols]

        def move(p):
            return {tuple(e[i] if i is not None else 0 for i in idx): c for e, c in p.items()}

        return RationalFunction(self.n, symbols, move(self.num), move(self.den), reduce=True)

    def _uses(self, name: str) -> bool:
        i = self.symbols.index(name)
        return any(e[i] for e in self.num) or any(e[i] for e in self.den)

    # -- predicates -------------------------------------------------------
    def __bool__(self) -> bool:
        return bool(self.num)

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.num) and all(not any(e) for e in self.den)

    def constant_value(self) -> Cyclotomic:
        if not self.is_constant():
            raise FieldError("element depends on symbols")
        if not self.num:
            return Cyclotomic(self.n)
        z = (0,) * len(self.symbols)
        return self.num[z] / self.den[z]

    def is_polynomial(self) -> bool:
        return len(self.den) == 1 and not any(next(iter(self.den)))

    def polynomial_terms(self) -> dict[tuple[int, ...], Cyclotomic]:
        """Terms of a polynomial (or monomial-denominator Laurent) element."""
        if len(self.den) != 1:
            raise FieldError("denominator is not a monomial")
        (de, dc), = self.den.items()
        inv = dc.inverse()
        return {tuple(x - y for x, y in zip(e, de)): c * inv for e, c in self.num.items()}

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        if a.den == b.den:
            return RationalFunction(a.n, a.symbols, _p_add(a.num, b.num), a.den)
        num = _p_add(_p_mul(a.num, b.den), _p_mul(b.num, a.den))
        return RationalFunction(a.n, a.symbols, num, _p_mul(a.den, b.den))

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(self.n, self.symbols, {e: -c for e, c in self.num.items()}, self.den, reduce=False)

    def __sub__(self, other):
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        return pair[0] + (-pair[1])

    def __rsub__(self, other):
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        return pair[1] + (-pair[0])

    def __mul__(self, other):
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        return RationalFunction(a.n, a.symbols, _p_mul(a.num, b.num), _p_mul(a.den, b.den))

    __rmul__ = __mul__

    def inverse(self) -> RationalFunction:
        if not self.num:
            raise FieldError("division by zero")
        return RationalFunction(self.n, self.symbols, self.den, self.num)

    def __truediv__(self, other):
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        return pair[0] * pair[1].inverse()

    def __rtruediv__(self, other):
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        return pair[1] * pair[0].inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = RationalFunction.constant(1, self.symbols, self.n)
        for _ in range(k):
            result = result * self
        return result

    def __eq__(self, other) -> bool:
        try:
            pair = self._coerce(other)
        except FieldError:
            return False
        if pair is None:
            return NotImplemented
        a, b = pair
        return a.num == b.num and a.den == b.den

    def __hash__(self) -> int:
        if self.is_constant():
            return hash(self.constant_value())
        return hash(("rf", self.symbols, len(self.num), len(self.den)))

    # -- automorphisms ----------------------------------------------------
    def galois(self, k: int, symbol_map: Mapping[str, str] | None = None) -> RationalFunction:
        idx = list(range(len(self.symbols)))
        if symbol_map:
            for i, s in enumerate(self.symbols):
                tgt = symbol_map.get(s, s)
                if tgt not in self.symbols:
                    raise FieldError(f"symbol {s} mapped outside the symbol set")
                idx[i] = self.symbols.index(tgt)
            if sorted(idx) != list(range(len(idx))):
                raise FieldError("symbol map is not a permutation")

        def move(p):
            out = {}
            for e, c in p.items():
                ne = [0] * len(e)
                for i, x in enumerate(e):
                    ne[idx[i]] += x
                out[tuple(ne)] = c.galois(k)
            return out

        return RationalFunction(self.n, self.symbols, move(self.num), move(self.den))

    def conjugate(self) -> RationalFunction:
        return self.galois(self.n - 1)

    def substitute(self, values: Mapping[str, object]) -> object:
        """Substitute scalars or rational functions for some symbols."""
        def ev(p):
            total = None
            for e, c in p.items():
                term = c
                for s, x in zip(self.symbols, e):
                    if x:
                        v = values.get(s)
                        if v is None:
                            v = RationalFunction.symbol(s, self.symbols, self.n)
                        term = term * (v ** x if x > 0 else (1 / v) ** (-x))
                total = term if total is None else total + term
            return total if total is not None else Cyclotomic(self.n)

        return ev(self.num) / ev(self.den)

    def __repr__(self) -> str:
        return f"RationalFunction({format_scalar(self)})"


def _lift(c, n: int) -> Cyclotomic:
    c = as_scalar(c)
    if c.n == n:
        return c
    return embed(c, n)


# ---------------------------------------------------------------------------
# generic helpers over all scalar kinds


def as_scalar(x) -> Cyclotomic:
    if isinstance(x, Cyclotomic):
        return x
    if isinstance(x, (int, Fraction)):
        return Cyclotomic(1, [x])
    if isinstance(x, RationalFunction):
        return x.constant_value()
    raise FieldError(f"not an exact scalar: {x!r}")


def scalar_order(x) -> int:
    if isinstance(x, (Cyclotomic, RationalFunction)):
        return x.n
    return 1


def common_order(values: Iterable) -> int:
    m = 1
    for v in values:
        m = math.lcm(m, scalar_order(v))
    return m


def is_zero(x) -> bool:
    return not x


@dataclass(frozen=True)
class FieldAutomorphism:
    """zeta_n -> zeta_n^k, with an optional permutation of symbols."""

    n: int
    k: int
    symbol_map: tuple[tuple[str, str], ...] = field(default=())

    def __post_init__(self):
        if math.gcd(self.k, self.n) != 1:
            raise FieldError(f"exponent {self.k} is not a unit modulo {self.n}")

    @classmethod
    def conjugation(cls, n: int) -> FieldAutomorphism:
        return cls(n, n - 1)

    @classmethod
    def identity(cls, n: int) -> FieldAutomorphism:
        return cls(n, 1)

    def exponent_for(self, m: int) -> int:
        """Exponent of the induced automorphism on a subfield Q(zeta_m)."""
        if self.n % m == 0:
            return self.k % m
        if m % self.n == 0:
            raise FieldError(f"automorphism of order {self.n} does not determine zeta_{m}")
        raise FieldError(f"incompatible orders {self.n} and {m}")

    def compose(self, other: FieldAutomorphism) -> FieldAutomorphism:
        """self after other."""
        if self.n != other.n:
            raise FieldError("orders differ")
        smap = dict(other.symbol_map)
        mine = dict(self.symbol_map)
        names = set(smap) | set(mine) | set(smap.values())
        composed = {s: mine.get(smap.get(s, s), smap.get(s, s)) for s in names}
        composed = tuple(sorted((a, b) for a, b in composed.items() if a != b))
        return FieldAutomorphism(self.n, (self.k * other.k) % self.n, composed)

    def __call__(self, x):
        return apply_automorphism(x, self)


def apply_automorphism(x, sigma: FieldAutomorphism):
    """Apply sigma to a scalar; rationals are fixed."""
    if isinstance(x, (int, Fraction)):
        return x
    if isinstance(x, Cyclotomic):
        if sigma.n % x.n == 0:
            return x.galois(sigma.k % x.n) if x.n > 1 else x
        m = math.lcm(sigma.n, x.n)
        raise FieldError(f"automorphism of order {sigma.n} cannot act on order {x.n} (needs {m})")
    if isinstance(x, RationalFunction):
        if sigma.n % x.n:
            raise FieldError(f"automorphism of order {sigma.n} cannot act on order {x.n}")
        smap = dict(sigma.symbol_map)
        for s in smap:
            if s not in x.symbols:
                raise FieldError(f"symbol {s} not present")
        k = sigma.k % x.n if x.n > 1 else 1
        return x.galois(k, smap)
    raise FieldError(f"cannot apply automorphism to {x!r}")


def field_ops(x, y, op: str):
    """Dispatch for the four basic operations."""
    if op == "add":
        return x + y
    if op == "mul":
        return x * y
    if op == "inv":
        if not x:
            raise FieldError("division by zero")
        return 1 / x if not isinstance(x, (Cyclotomic, RationalFunction)) else x.inverse()
    if op == "eq":
        return x == y
    raise FieldError(f"unknown operation {op}")


# ---------------------------------------------------------------------------
# numerics


@dataclass(frozen=True)
class NumericValue:
    value: complex
    error: float


def numeric_eval(x, assignments: Mapping[str, complex] | None = None, precision: int = 53) -> NumericValue:
    """Evaluate at zeta_n = exp(2 pi i/n) with an a-priori error bound.

    The working precision is ``precision + 32`` bits; the bound charges one
    unit in the last working place per term and per operation, scaled by the
    magnitudes involved, which dominates the rounding of the accumulated sum.
    """
    assignments = dict(assignments or {})
    work = precision + 32
    ulp = mpmath.mpf(2) ** (-work + 4)
    with mpmath.workprec(work):
        if isinstance(x, (int, Fraction)):
            v = mpmath.mpf(Fraction(x).numerator) / Fraction(x).denominator
            return NumericValue(complex(v), 0.0 if x == 0 or Fraction(x).denominator == 1 else float(abs(v) * ulp))
        if isinstance(x, Cyclotomic):
            val, err = _eval_cyc(x, ulp)
            return NumericValue(complex(val), float(err))
        if isinstance(x, RationalFunction):
            for s in x.symbols:
                if x._uses(s) and s not in assignments:
                    raise FieldError(f"symbol {s} is unassigned")
            nv, ne = _eval_poly(x.num, x.symbols, assignments, ulp)
            dv, de = _eval_poly(x.den, x.symbols, assignments, ulp)
            if abs(dv) <= de * 4 or abs(dv) == 0:
                raise FieldError("denominator numerically indistinguishable from zero")
            val = nv / dv
            err = (ne + abs(val) * de) / (abs(dv) - de) + abs(val) * ulp
            return NumericValue(complex(val), float(err))
    raise FieldError(f"cannot evaluate {x!r}")


def _eval_cyc(x: Cyclotomic, ulp):
    z = mpmath.exp(2j * mpmath.pi / x.n)
    total = mpmath.mpc(0)
    bound = mpmath.mpf(0)
    p = mpmath.mpc(1)
    for j, c in enumerate(x.c):
        if c:
            cv = mpmath.mpf(c.numerator) / c.denominator
            total += cv * p
            bound += abs(cv) * (j + 2)
        p *= z
    if not any(x.c):
        return total, mpmath.mpf(0)
    if x.is_rational() and x.c[0].denominator == 1:
        return total, mpmath.mpf(0)
    return total, bound * ulp


def _eval_poly(p: Poly, symbols, assignments, ulp):
    total = mpmath.mpc(0)
    err = mpmath.mpf(0)
    for e, c in p.items():
        cv, ce = _eval_cyc(c, ulp)
        mono = mpmath.mpc(1)
        deg = 0
        for s, k in zip(symbols, e):
            if k:
                mono *= mpmath.mpc(assignments[s]) ** k
                deg += abs(k)
        total += cv * mono
        err += ce * abs(mono) + abs(cv * mono) * ulp * (deg + 2)
    return total, err


# ---------------------------------------------------------------------------
# text serialization
#
#   constant:           <n>|c0,c1,...            (trailing zeros dropped)
#   rational function:  <n>|N(e1.e2:c0,c1;...)/D(...)
#
# coefficients are always written "p/q".


def _fmt_coeffs(c: Sequence[Fraction]) -> str:
    c = list(c)
    while len(c) > 1 and c[-1] == 0:
        c.pop()
    return ",".join(format_fraction(x) for x in c)


def _fmt_poly(p: Poly) -> str:
    items = sorted(p.items(), key=lambda kv: _deglex_key(kv[0]), reverse=True)
    return ";".join(f"{'.'.join(str(x) for x in e)}:{_fmt_coeffs(c.c)}" for e, c in items)


def format_scalar(x, order: int | None = None) -> str:
    """Serialize an exact scalar, optionally lifted to a given order."""
    if isinstance(x, RationalFunction):
        if order is not None and order != x.n:
            x = x.with_order(order)
        return f"{x.n}|N({_fmt_poly(x.num)})/D({_fmt_poly(x.den)})"
    if isinstance(x, (int, Fraction)) and order is None:
        return str(Fraction(x))
    c = as_scalar(x)
    if order is not None and order != c.n:
        c = embed(c, order)
    return f"{c.n}|{_fmt_coeffs(c.c)}"


def _parse_coeffs(text: str) -> list[Fraction]:
    return [Fraction(t) for t in text.split(",")] if text else [Fraction(0)]


def parse_scalar(text: str, symbols: Sequence[str] = ()):
    """Inverse of :func:`format_scalar`.

    Constants come back as ``Fraction`` when the order is 1 and as
    ``Cyclotomic`` otherwise.
    """
    if "|" not in text:
        return Fraction(text)
    order_text, _, body = text.partition("|")
    n = int(order_text)
    if body.startswith("N("):
        num_text, _, den_text = body.partition(")/D(")
        num_text = num_text[2:]
        den_text = den_text[:-1]

        def poly(t):
            out = {}
            if not t:
                return out
            for item in t.split(";"):
                e, _, cs = item.partition(":")
                exps = tuple(int(v) for v in e.split(".")) if e else ()
                out[exps] = Cyclotomic(n, _parse_coeffs(cs))
            return out

        num = poly(num_text)
        den = poly(den_text)
        k = len(next(iter(num or den)))
        syms = tuple(symbols)
        if len(syms) != k:
            raise FieldError("symbol count does not match serialized exponents")
        obj = RationalFunction.__new__(RationalFunction)
        obj.n, obj.symbols, obj.num, obj.den = n, syms, num, den
        return obj
    return Cyclotomic(n, _parse_coeffs(body))
