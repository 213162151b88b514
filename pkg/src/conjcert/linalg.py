"""Exact dense linear algebra over the scalars of :mod:`conjcert.field`.

Entries may be ``int``/``Fraction``, ``Cyclotomic`` or ``RationalFunction``;
everything is duck-typed on the field operations.  Pivots are always the
first nonzero entry in column order, so echelon forms are reproducible.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

from .field import zeta

__all__ = [
    "Matrix",
    "LinalgError",
    "rref",
    "kernel",
    "rank",
    "echelon_solve",
    "solve",
    "inverse",
    "eigenspace",
    "finite_order_spectrum",
    "joint_eigenspace",
    "span_rank",
    "same_span",
    "in_span",
    "coordinates_in",
    "intersect_spans",
]


class LinalgError(ValueError):
    pass


def _norm(x):
    if isinstance(x, int):
        return Fraction(x)
    return x


class Matrix:
    """Immutable dense matrix."""

    __slots__ = ("rows", "nrows", "ncols")

    def __init__(self, rows: Iterable[Iterable], ncols: int | None = None):
        data = tuple(tuple(_norm(x) for x in r) for r in rows)
        if ncols is None:
            ncols = len(data[0]) if data else 0
        for r in data:
            if len(r) != ncols:
                raise LinalgError("ragged matrix")
        self.rows = data
        self.nrows = len(data)
        self.ncols = ncols

    @classmethod
    def identity(cls, n: int) -> Matrix:
        return cls([[Fraction(int(i == j)) for j in range(n)] for i in range(n)], n)

    @classmethod
    def zeros(cls, r: int, c: int) -> Matrix:
        return cls([[Fraction(0)] * c for _ in range(r)], c)

    @classmethod
    def from_columns(cls, cols: Sequence[Sequence], nrows: int) -> Matrix:
        return cls([[c[i] for c in cols] for i in range(nrows)], len(cols))

    @classmethod
    def diagonal(cls, entries: Sequence) -> Matrix:
        n = len(entries)
        return cls([[entries[i] if i == j else Fraction(0) for j in range(n)] for i in range(n)], n)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def column(self, j: int) -> tuple:
        return tuple(r[j] for r in self.rows)

    def columns(self) -> list[tuple]:
        return [self.column(j) for j in range(self.ncols)]

    def transpose(self) -> Matrix:
        return Matrix(self.columns(), self.nrows)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and all(
            a == b for ra, rb in zip(self.rows, other.rows) for a, b in zip(ra, rb))

    def __hash__(self):
        return hash(self.shape)

    def __add__(self, other: Matrix) -> Matrix:
        self._same_shape(other)
        return Matrix([[a + b for a, b in zip(ra, rb)] for ra, rb in zip(self.rows, other.rows)], self.ncols)

    def __sub__(self, other: Matrix) -> Matrix:
        self._same_shape(other)
        return Matrix([[a - b for a, b in zip(ra, rb)] for ra, rb in zip(self.rows, other.rows)], self.ncols)

    def __neg__(self) -> Matrix:
        return Matrix([[-a for a in r] for r in self.rows], self.ncols)

    def scale(self, s) -> Matrix:
        return Matrix([[a * s for a in r] for r in self.rows], self.ncols)

    def _same_shape(self, other: Matrix):
        if self.shape != other.shape:
            raise LinalgError(f"shape mismatch {self.shape} vs {other.shape}")

    def __matmul__(self, other):
        if isinstance(other, Matrix):
            if self.ncols != other.nrows:
                raise LinalgError(f"shape mismatch {self.shape} @ {other.shape}")
            cols = other.columns()
            return Matrix([[_dot(r, c) for c in cols] for r in self.rows], other.ncols)
        vec = tuple(other)
        if len(vec) != self.ncols:
            raise LinalgError("vector length mismatch")
        return tuple(_dot(r, vec) for r in self.rows)

    def apply(self, vec: Sequence) -> tuple:
        return self @ vec

    def __pow__(self, k: int) -> Matrix:
        if self.nrows != self.ncols:
            raise LinalgError("power of a non-square matrix")
        if k < 0:
            return inverse(self) ** (-k)
        result = Matrix.identity(self.nrows)
        base = self
        while k:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result

    def is_identity(self) -> bool:
        return self.nrows == self.ncols and all(
            (x == 1) if i == j else (not x) for i, r in enumerate(self.rows) for j, x in enumerate(r))

    def is_zero(self) -> bool:
        return all(not x for r in self.rows for x in r)

    def map(self, fn) -> Matrix:
        return Matrix([[fn(x) for x in r] for r in self.rows], self.ncols)

    def stack(self, other: Matrix) -> Matrix:
        if self.ncols != other.ncols and self.nrows and other.nrows:
            raise LinalgError("column count mismatch")
        return Matrix(self.rows + other.rows, max(self.ncols, other.ncols))

    def __repr__(self) -> str:
        return f"Matrix({[list(r) for r in self.rows]!r})"


def _dot(a: Sequence, b: Sequence):
    total = Fraction(0)
    for x, y in zip(a, b):
        if x and y:
            total = total + x * y
    return total


# ---------------------------------------------------------------------------
# echelon forms


def _rref_rows(rows: list[list], ncols: int) -> tuple[list[list], list[int]]:
    rows = [list(r) for r in rows]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r >= len(rows):
            break
        p = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        piv = rows[r][c]
        if piv != 1:
            inv = 1 / piv
            rows[r] = [x * inv if x else x for x in rows[r]]
        for i in range(len(rows)):
            if i != r:
                f = rows[i][c]
                if f:
                    rows[i] = [x - f * y if y else x for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    return rows[:r], pivots


def rref(M: Matrix) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form with zero rows dropped, plus pivot columns."""
    rows, piv = _rref_rows([list(r) for r in M.rows], M.ncols)
    return Matrix(rows, M.ncols), piv


def rank(M: Matrix) -> int:
    return len(rref(M)[1])


def kernel(M: Matrix) -> list[tuple]:
    """Basis of the right null space; one vector per free column."""
    R, piv = rref(M)
    free = [c for c in range(M.ncols) if c not in set(piv)]
    basis = []
    for f in free:
        v = [Fraction(0)] * M.ncols
        v[f] = Fraction(1)
        for row, p in zip(R.rows, piv):
            if row[f]:
                v[p] = -row[f]
        basis.append(tuple(v))
    return basis


def echelon_solve(M: Matrix, mode: str):
    if mode == "rref":
        return rref(M)[0]
    if mode == "kernel":
        return Matrix.from_columns(kernel(M), M.ncols) if M.ncols else Matrix([])
    if mode == "rank":
        return rank(M)
    raise LinalgError(f"unknown mode {mode}")


def solve(M: Matrix, b: Sequence) -> tuple | None:
    """Some solution x of M x = b, or None when inconsistent."""
    aug = [list(r) + [bi] for r, bi in zip(M.rows, b)]
    rows, piv = _rref_rows(aug, M.ncols + 1)
    if piv and piv[-1] == M.ncols:
        return None
    x = [Fraction(0)] * M.ncols
    for row, p in zip(rows, piv):
        x[p] = row[-1]
    return tuple(x)


def inverse(M: Matrix) -> Matrix:
    n = M.nrows
    if n != M.ncols:
        raise LinalgError("inverse of a non-square matrix")
    aug = [list(r) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(M.rows)]
    rows, piv = _rref_rows(aug, 2 * n)
    if piv[:n] != list(range(n)) or len(piv) < n or any(p >= n for p in piv[:n]):
        raise LinalgError("matrix is singular")
    return Matrix([r[n:] for r in rows], n)


# ---------------------------------------------------------------------------
# spans, given as lists of vectors


def span_rank(vectors: Sequence[Sequence], dim: int) -> int:
    if not vectors:
        return 0
    return rank(Matrix(vectors, dim))


def same_span(a: Sequence[Sequence], b: Sequence[Sequence], dim: int) -> bool:
    ra, rb = span_rank(a, dim), span_rank(b, dim)
    return ra == rb == span_rank(list(a) + list(b), dim)


def in_span(v: Sequence, vectors: Sequence[Sequence], dim: int) -> bool:
    return span_rank(list(vectors) + [v], dim) == span_rank(vectors, dim)


def coordinates_in(v: Sequence, basis: Sequence[Sequence]) -> tuple | None:
    """Coefficients c with sum c_i basis_i = v, or None."""
    if not basis:
        return () if all(not x for x in v) else None
    M = Matrix.from_columns(basis, len(v))
    return solve(M, v)


def intersect_spans(a: Sequence[Sequence], b: Sequence[Sequence], dim: int) -> list[tuple]:
    """Basis of span(a) and span(b) intersected."""
    if not a or not b:
        return []
    M = Matrix.from_columns(list(a) + [tuple(-x for x in v) for v in b], dim)
    out = []
    for k in kernel(M):
        v = [Fraction(0)] * dim
        for c, vec in zip(k[: len(a)], a):
            if c:
                v = [x + c * y for x, y in zip(v, vec)]
        out.append(tuple(v))
    if not out:
        return []
    R, _ = rref(Matrix(out, dim))
    return [tuple(r) for r in R.rows]


# ---------------------------------------------------------------------------
# eigenspaces


def _shifted(M: Matrix, lam) -> Matrix:
    return Matrix([[x - lam if i == j else x for j, x in enumerate(r)] for i, r in enumerate(M.rows)], M.ncols)


def eigenspace(M: Matrix, lam) -> list[tuple]:
    if M.nrows != M.ncols:
        raise LinalgError("eigenspace of a non-square matrix")
    return kernel(_shifted(M, lam))


def finite_order_spectrum(M: Matrix, m: int) -> dict[int, int]:
    """Multiplicity of zeta_m^k for each k, after checking M^m = Id.

    Only exponents with nonzero multiplicity are returned.
    """
    if M.nrows != M.ncols:
        raise LinalgError("spectrum of a non-square matrix")
    if not (M ** m).is_identity():
        raise LinalgError("operator not of declared finite order")
    out: dict[int, int] = {}
    total = 0
    for k in range(m):
        lam = Fraction(1) if k == 0 else zeta(m, k)
        d = len(eigenspace(M, lam))
        if d:
            out[k] = d
            total += d
    if total != M.nrows:
        raise LinalgError("eigenspace dimensions do not sum to the matrix size")
    return out


def joint_eigenspace(Ms: Sequence[Matrix], lams: Sequence) -> list[tuple]:
    if len(Ms) != len(lams):
        raise LinalgError("one eigenvalue per operator required")
    if not Ms:
        raise LinalgError("no operators")
    n = Ms[0].nrows
    for A in Ms:
        if A.shape != (n, n):
            raise LinalgError("operators must be square of equal size")
    for i, A in enumerate(Ms):
        for B in Ms[i + 1:]:
            if not (A @ B == B @ A):
                raise LinalgError("operators do not commute")
    stacked = []
    for A, lam in zip(Ms, lams):
        stacked.extend(_shifted(A, lam).rows)
    return kernel(Matrix(stacked, n))
