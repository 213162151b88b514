"""Finite graded-commutative algebras with Hodge data.

A model has a fixed rational basis (the lattice), sparse structure
constants, a degree map on the top piece, and for every bidegree (p, q) a
spanning set of coordinate vectors.  Products may be supplied lazily by a
rule; :meth:`GradedAlgebraModel.materialize` turns them into a table.

Classes are sparse dicts ``{basis index: scalar}`` and may mix degrees.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from .field import (
    Cyclotomic,
    FieldAutomorphism,
    FieldError,
    RationalFunction,
    apply_automorphism,
    as_scalar,
    embed,
    zeta,
)
from .linalg import Matrix, coordinates_in, inverse, kernel, rank, rref, same_span

__all__ = [
    "AlgebraError",
    "TruncationError",
    "InvariantError",
    "InconclusiveError",
    "GradedAlgebraModel",
    "AlgebraMorphism",
    "FieldSpec",
    "cup",
    "tensor",
    "invariants",
    "subalgebra",
    "rescale_basis",
    "hodge_echelon",
    "degree_pairing",
    "k_rational_dim",
    "k_rational_lower_bound",
    "check_invariants",
    "conjugate_span",
    "induce_action",
    "class_to_sub",
]


class AlgebraError(ValueError):
    pass


class TruncationError(AlgebraError):
    pass


class InvariantError(AlgebraError):
    pass


class InconclusiveError(AlgebraError):
    """The FieldSpec does not cover an entry; no answer is guessed."""


Class = dict
ProductRule = Callable[[int, int], dict]


def _norm_scalar(x):
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, Cyclotomic) and x.n == 1:
        return x.c[0]
    return x


def _clean(d: dict) -> dict:
    return {k: _norm_scalar(v) for k, v in d.items() if v}


def _add_into(acc: dict, other: Mapping, scale=1) -> None:
    for k, v in other.items():
        w = v * scale if scale != 1 else v
        cur = acc.get(k)
        nv = w if cur is None else cur + w
        if nv:
            acc[k] = nv
        else:
            acc.pop(k, None)


class GradedAlgebraModel:
    """Graded-commutative algebra on a labelled basis.

    ``top`` is the real dimension 2n: products landing above it vanish.
    ``cap`` (default ``top``) is a truncation; a product landing in a degree
    ``cap < d <= top`` raises :class:`TruncationError`.
    """

    def __init__(
        self,
        labels: Sequence[str],
        degrees: Sequence[int],
        top: int,
        *,
        cap: int | None = None,
        products: Mapping[tuple[int, int], Mapping[int, object]] | None = None,
        rule: ProductRule | None = None,
        hodge: Mapping[tuple[int, int], Sequence[Sequence]] | None = None,
        degmap: Mapping[int, object] | None = None,
        order: int = 1,
        symbols: Sequence[str] = (),
        fieldspec: "FieldSpec | None" = None,
        actions: Mapping[str, "AlgebraMorphism"] | None = None,
        classes: Mapping[str, Class] | None = None,
        meta: Mapping[str, str] | None = None,
    ):
        if len(labels) != len(degrees):
            raise AlgebraError("labels and degrees differ in length")
        if len(set(labels)) != len(labels):
            raise AlgebraError("duplicate basis labels")
        self.labels = tuple(labels)
        self.degrees = tuple(int(d) for d in degrees)
        self.top = int(top)
        self.cap = self.top if cap is None else min(int(cap), self.top)
        self.index = {l: i for i, l in enumerate(self.labels)}
        self.by_degree: dict[int, list[int]] = {}
        for i, d in enumerate(self.degrees):
            self.by_degree.setdefault(d, []).append(i)
        self.position = {}
        for d, idx in self.by_degree.items():
            for p, i in enumerate(idx):
                self.position[i] = p
        self._table: dict[tuple[int, int], dict] = {}
        # the class labelled "1" in degree 0 acts as the unit implicitly
        u = self.index.get("1")
        self._unit = u if u is not None and self.degrees[u] == 0 else None
        if products:
            for (i, j), v in products.items():
                a, b = (i, j) if i <= j else (j, i)
                val = _clean(dict(v))
                if i > j:
                    s = self._swap_sign(i, j)
                    val = {k: c * s for k, c in val.items()}
                if self._unit not in (a, b):
                    self._table[(a, b)] = val
        self._rule = rule
        self._complete = rule is None
        self.hodge = {k: tuple(tuple(_norm_scalar(x) for x in v) for v in vs) for k, vs in (hodge or {}).items()}
        self.degmap = _clean(dict(degmap or {}))
        self.order = order
        self.symbols = tuple(symbols)
        self.fieldspec = fieldspec
        self.actions = dict(actions or {})
        self.classes = {k: _clean(dict(v)) for k, v in (classes or {}).items()}
        self.meta = dict(meta or {})

    # -- basic queries ---------------------------------------------------
    def __len__(self) -> int:
        return len(self.labels)

    def dim(self, k: int) -> int:
        return len(self.by_degree.get(k, ()))

    def betti(self) -> dict[int, int]:
        return {k: len(v) for k, v in sorted(self.by_degree.items())}

    def basis(self, k: int) -> list[int]:
        return list(self.by_degree.get(k, ()))

    @property
    def truncated(self) -> bool:
        return self.cap < self.top

    @property
    def unit(self) -> int:
        idx = self.by_degree.get(0, [])
        if len(idx) != 1:
            raise AlgebraError("model has no unique degree-0 class")
        return idx[0]

    def degree_of(self, x: Class) -> int:
        ds = {self.degrees[i] for i in x}
        if len(ds) != 1:
            raise AlgebraError("class is not homogeneous")
        return ds.pop()

    def element(self, spec) -> Class:
        """Build a class from a label, an index, or a {label: coeff} map."""
        if isinstance(spec, str):
            if spec in self.classes:
                return dict(self.classes[spec])
            return {self.index[spec]: Fraction(1)}
        if isinstance(spec, int):
            return {spec: Fraction(1)}
        out: dict = {}
        for k, v in spec.items():
            i = self.index[k] if isinstance(k, str) else k
            _add_into(out, {i: v})
        return out

    def vector(self, x: Class, k: int) -> tuple:
        zero = Fraction(0)
        for i in x:
            if self.degrees[i] != k:
                raise AlgebraError(f"class has components outside degree {k}")
        return tuple(x.get(i, zero) for i in self.by_degree.get(k, ()))

    def from_vector(self, k: int, vec: Sequence) -> Class:
        idx = self.by_degree.get(k, [])
        if len(vec) != len(idx):
            raise AlgebraError("vector length does not match degree dimension")
        return {i: v for i, v in zip(idx, vec) if v}

    # -- products ----------------------------------------------------------
    def _swap_sign(self, i: int, j: int) -> int:
        return -1 if (self.degrees[i] * self.degrees[j]) % 2 else 1

    def product(self, i: int, j: int) -> dict:
        d = self.degrees[i] + self.degrees[j]
        if d > self.top:
            return {}
        if d > self.cap:
            raise TruncationError(f"product lands in degree {d} above the cap {self.cap}")
        a, b = (i, j) if i <= j else (j, i)
        if self._unit is not None:
            if a == self._unit:
                return {b: Fraction(1)}
            if b == self._unit:
                return {a: Fraction(1)}
        val = self._table.get((a, b))
        if val is None:
            if self._rule is None:
                val = {}
            else:
                val = _clean(dict(self._rule(a, b)))
                self._table[(a, b)] = val
        if i > j and self._swap_sign(i, j) < 0:
            return {k: -c for k, c in val.items()}
        return val

    def cup(self, x: Class, y: Class) -> Class:
        out: dict = {}
        for i, a in x.items():
            for j, b in y.items():
                p = self.product(i, j)
                if p:
                    _add_into(out, p, a * b)
        return out

    def power(self, x: Class, k: int) -> Class:
        out = {self.unit: Fraction(1)}
        for _ in range(k):
            out = self.cup(out, x)
        return out

    def materialize(self) -> GradedAlgebraModel:
        """Evaluate every product within the cap and drop the rule."""
        if self._complete:
            return self
        n = len(self.labels)
        for i in range(n):
            for j in range(i, n):
                if self.degrees[i] + self.degrees[j] <= self.cap:
                    self.product(i, j)
        self._rule = None
        self._complete = True
        return self

    def product_table(self) -> dict[tuple[int, int], dict]:
        self.materialize()
        return {k: v for k, v in sorted(self._table.items()) if v}

    def evaluate(self, x: Class):
        """Degree map applied to the top-degree part of x."""
        if self.truncated:
            raise AlgebraError("truncated model has no degree map")
        total = Fraction(0)
        for i, c in x.items():
            if self.degrees[i] == self.top:
                w = self.degmap.get(i)
                if w:
                    total = total + c * w
        return total

    def with_updates(self, **kwargs) -> GradedAlgebraModel:
        """Copy with some attributes replaced (products are shared)."""
        new = GradedAlgebraModel.__new__(GradedAlgebraModel)
        new.__dict__.update(self.__dict__)
        new.actions = dict(self.actions)
        new.classes = dict(self.classes)
        new.meta = dict(self.meta)
        for k, v in kwargs.items():
            setattr(new, k, v)
        return new

    def __repr__(self) -> str:
        return f"GradedAlgebraModel(betti={self.betti()}, top={self.top}, cap={self.cap})"


def cup(A: GradedAlgebraModel, x: Class, y: Class) -> Class:
    return A.cup(x, y)


def degree_pairing(A: GradedAlgebraModel, x: Class, y: Class):
    if A.truncated:
        raise AlgebraError("truncated model without top degree")
    dx = A.degree_of(x) if x else None
    dy = A.degree_of(y) if y else None
    if dx is not None and dy is not None and dx + dy != A.top:
        raise AlgebraError(f"degrees {dx} + {dy} do not add up to {A.top}")
    return A.evaluate(A.cup(x, y))


# ---------------------------------------------------------------------------
# morphisms


class AlgebraMorphism:
    """Degree-preserving linear map given by one matrix per degree.

    ``mats[k]`` has shape (dim target_k, dim source_k); missing degrees map
    to zero.
    """

    def __init__(self, mats: Mapping[int, Matrix], *, ring_verified: bool = False, hodge_verified: bool = False):
        self.mats = dict(sorted(mats.items()))
        self.ring_verified = ring_verified
        self.hodge_verified = hodge_verified

    @classmethod
    def identity(cls, A: GradedAlgebraModel) -> AlgebraMorphism:
        return cls({k: Matrix.identity(A.dim(k)) for k in A.by_degree})

    @classmethod
    def from_images(cls, source: GradedAlgebraModel, target: GradedAlgebraModel,
                    images: Callable[[int], Class], degrees: Iterable[int] | None = None) -> AlgebraMorphism:
        mats = {}
        for k in (degrees if degrees is not None else source.by_degree):
            cols = [target.vector(images(i), k) if images(i) else (Fraction(0),) * target.dim(k)
                    for i in source.basis(k)]
            mats[k] = Matrix.from_columns(cols, target.dim(k)) if cols else Matrix([[]] * target.dim(k), 0)
        return cls(mats)

    def matrix(self, k: int) -> Matrix:
        return self.mats[k]

    def apply(self, A: GradedAlgebraModel, B: GradedAlgebraModel, x: Class) -> Class:
        out: dict = {}
        for k in sorted({A.degrees[i] for i in x}):
            part = {i: c for i, c in x.items() if A.degrees[i] == k}
            if k not in self.mats:
                continue
            img = self.mats[k] @ A.vector(part, k)
            _add_into(out, B.from_vector(k, img))
        return out

    def compose(self, other: AlgebraMorphism) -> AlgebraMorphism:
        """self after other."""
        mats = {k: self.mats[k] @ other.mats[k] for k in other.mats if k in self.mats}
        return AlgebraMorphism(mats)

    def inverse(self) -> AlgebraMorphism:
        return AlgebraMorphism({k: inverse(m) if m.nrows else m for k, m in self.mats.items()},
                               ring_verified=self.ring_verified, hodge_verified=self.hodge_verified)

    def power(self, e: int) -> AlgebraMorphism:
        return AlgebraMorphism({k: m ** e if m.nrows else m for k, m in self.mats.items()},
                               ring_verified=self.ring_verified, hodge_verified=self.hodge_verified)

    def is_identity(self) -> bool:
        return all(m.is_identity() for m in self.mats.values() if m.nrows)

    def __eq__(self, other) -> bool:
        if not isinstance(other, AlgebraMorphism):
            return NotImplemented
        return self.mats.keys() == other.mats.keys() and all(self.mats[k] == other.mats[k] for k in self.mats)

    def __hash__(self):
        return hash(tuple(self.mats))

    def order(self, limit: int = 64) -> int:
        cur = self
        for m in range(1, limit + 1):
            if cur.is_identity():
                return m
            cur = cur.compose(self)
        raise AlgebraError("morphism has no finite order within the limit")

    def verify_ring(self, A: GradedAlgebraModel, B: GradedAlgebraModel, *, max_degree: int | None = None,
                    sample: int | None = None, seed: int = 0) -> bool:
        """Check f(x y) = f(x) f(y) on basis pairs (all, or a seeded sample)."""
        limit = min(A.cap, B.cap) if max_degree is None else max_degree
        pairs = [(i, j) for i in range(len(A)) for j in range(i, len(A))
                 if A.degrees[i] + A.degrees[j] <= limit and A.degrees[i] in self.mats and A.degrees[j] in self.mats]
        if sample is not None and len(pairs) > sample:
            pairs = random.Random(seed).sample(pairs, sample)
        for i, j in pairs:
            if A.degrees[i] + A.degrees[j] not in self.mats:
                continue
            lhs = self.apply(A, B, A.product(i, j))
            rhs = B.cup(self.apply(A, B, {i: Fraction(1)}), self.apply(A, B, {j: Fraction(1)}))
            if not _class_eq(lhs, rhs):
                return False
        self.ring_verified = True
        return True

    def verify_hodge(self, A: GradedAlgebraModel, B: GradedAlgebraModel) -> bool:
        for (p, q), vecs in A.hodge.items():
            k = p + q
            if k not in self.mats or (p, q) not in B.hodge:
                continue
            target = B.hodge[(p, q)]
            for v in vecs:
                img = self.mats[k] @ v
                if any(img) and not _in_span(img, target, B.dim(k)):
                    return False
        self.hodge_verified = True
        return True


def _class_eq(x: Class, y: Class) -> bool:
    keys = set(x) | set(y)
    return all(x.get(k, 0) == y.get(k, 0) for k in keys)


def _in_span(v, vecs, dim) -> bool:
    if not vecs:
        return not any(v)
    return rank(Matrix(list(vecs) + [tuple(v)], dim)) == rank(Matrix(list(vecs), dim))


# ---------------------------------------------------------------------------
# constructions


def _wrap(label: str) -> str:
    return f"({label})" if "|" in label else label


def tensor(A: GradedAlgebraModel, B: GradedAlgebraModel, *, hodge_max_degree: int | None = None,
           meta: Mapping[str, str] | None = None) -> GradedAlgebraModel:
    """Kunneth product with Koszul signs.

    Basis order: by total degree, then by the degree of the left factor,
    then lexicographically by (left index, right index).
    """
    if A.symbols != B.symbols and A.symbols and B.symbols:
        raise AlgebraError("incompatible field presentations")
    pairs = sorted(
        ((a, b) for a in range(len(A)) for b in range(len(B))),
        key=lambda ab: (A.degrees[ab[0]] + B.degrees[ab[1]], A.degrees[ab[0]], ab[0], ab[1]),
    )
    labels = []
    for a, b in pairs:
        la, lb = A.labels[a], B.labels[b]
        labels.append("1" if la == lb == "1" else f"{_wrap(la)}|{_wrap(lb)}")
    degrees = [A.degrees[a] + B.degrees[b] for a, b in pairs]
    where = {ab: n for n, ab in enumerate(pairs)}
    top = A.top + B.top
    cap = top if not (A.truncated or B.truncated) else min(A.cap, B.cap)

    def rule(i: int, j: int) -> dict:
        a, b = pairs[i]
        c, d = pairs[j]
        sign = -1 if (B.degrees[b] * A.degrees[c]) % 2 else 1
        pa = A.product(a, c)
        if not pa:
            return {}
        pb = B.product(b, d)
        out = {}
        for k, x in pa.items():
            for l, y in pb.items():
                out[where[(k, l)]] = x * y * sign
        return out

    degmap = {}
    for (a, b), n in where.items():
        if a in A.degmap and b in B.degmap:
            degmap[n] = A.degmap[a] * B.degmap[b]

    # Hodge spans: tensor products of factor spans
    hodge: dict[tuple[int, int], list] = {}
    model = GradedAlgebraModel(labels, degrees, top, cap=cap, rule=rule, degmap=degmap,
                               order=math.lcm(A.order, B.order), symbols=A.symbols or B.symbols,
                               meta=meta)
    for (p1, q1), va in A.hodge.items():
        for (p2, q2), vb in B.hodge.items():
            k = p1 + q1 + p2 + q2
            if hodge_max_degree is not None and k > hodge_max_degree:
                continue
            ka, kb = p1 + q1, p2 + q2
            ia, ib = A.basis(ka), B.basis(kb)
            for x in va:
                for y in vb:
                    cls = {}
                    for s, xs in zip(ia, x):
                        if xs:
                            for t, yt in zip(ib, y):
                                if yt:
                                    cls[where[(s, t)]] = xs * yt
                    hodge.setdefault((p1 + p2, q1 + q2), []).append(model.vector(cls, k))
    model.hodge = {k: tuple(v) for k, v in sorted(hodge.items())}
    model._pairs = pairs
    model._where = where
    return model


def subalgebra(A: GradedAlgebraModel, bases: Mapping[int, Sequence[Sequence]], *,
               labels: Sequence[str] | None = None, degmap_factor=1,
               hodge: Mapping[tuple[int, int], Sequence[Sequence]] | None = None,
               meta: Mapping[str, str] | None = None) -> GradedAlgebraModel:
    """Subalgebra spanned by the given coordinate vectors (closed under cup).

    ``hodge`` gives spanning vectors in A's coordinates; they are rewritten
    in the new basis.  The degree map is A's times ``degmap_factor``.
    """
    degs = sorted(bases)
    vecs: list[tuple[int, tuple]] = [(k, tuple(v)) for k in degs for v in bases[k]]
    if labels is None:
        labels = []
        for n, (k, v) in enumerate(vecs):
            nz = [i for i, x in enumerate(v) if x]
            if len(nz) == 1 and v[nz[0]] == 1:
                labels.append(A.labels[A.basis(k)[nz[0]]])
            else:
                labels.append(f"v{k}_{n}")
    degrees = [k for k, _ in vecs]
    start = {}
    for n, (k, _) in enumerate(vecs):
        start.setdefault(k, n)
    # unit-vector bases allow projection instead of solving
    unit_pos = {}
    for k in degs:
        pos = []
        for v in bases[k]:
            nz = [i for i, x in enumerate(v) if x]
            if len(nz) == 1 and v[nz[0]] == 1:
                pos.append(nz[0])
            else:
                pos = None
                break
        unit_pos[k] = pos

    def coords(k: int, vec: Sequence) -> tuple:
        if k not in bases:
            if any(vec):
                raise AlgebraError(f"subspace is not closed: degree {k} missing")
            return ()
        pos = unit_pos[k]
        if pos is not None:
            sel = set(pos)
            if any(x for i, x in enumerate(vec) if i not in sel):
                raise AlgebraError("subspace is not closed under products")
            return tuple(vec[i] for i in pos)
        c = coordinates_in(vec, bases[k])
        if c is None:
            raise AlgebraError("subspace is not closed under products")
        return c

    def to_class(n: int) -> Class:
        k, v = vecs[n]
        return A.from_vector(k, v)

    def rule(i: int, j: int) -> dict:
        prod = A.cup(to_class(i), to_class(j))
        if not prod:
            return {}
        k = degrees[i] + degrees[j]
        c = coords(k, A.vector(prod, k))
        return {start[k] + m: x for m, x in enumerate(c) if x}

    degmap = {}
    if not A.truncated and A.top in bases:
        for n, (k, v) in enumerate(vecs):
            if k == A.top:
                val = A.evaluate(A.from_vector(k, v))
                if val:
                    degmap[n] = val * degmap_factor
    new_hodge = {}
    for (p, q), hv in (hodge or {}).items():
        new_hodge[(p, q)] = tuple(coords(p + q, v) for v in hv)
    sub = GradedAlgebraModel(labels, degrees, A.top, cap=A.cap, rule=rule, degmap=degmap,
                             hodge=new_hodge, order=A.order, symbols=A.symbols, meta=meta)
    sub._embedding = {k: [tuple(v) for v in bases[k]] for k in degs}
    sub._coords = coords
    return sub


def induce_action(sub: GradedAlgebraModel, f: AlgebraMorphism) -> AlgebraMorphism:
    """Restrict a morphism of the parent to a stable subalgebra."""
    mats = {}
    for k, vecs in sub._embedding.items():
        if k not in f.mats:
            continue
        cols = [sub._coords(k, f.mats[k] @ v) for v in vecs]
        mats[k] = Matrix.from_columns(cols, len(vecs))
    return AlgebraMorphism(mats, ring_verified=f.ring_verified, hodge_verified=f.hodge_verified)


def class_to_sub(sub: GradedAlgebraModel, parent: GradedAlgebraModel, x: Class) -> Class:
    out: dict = {}
    for k in sorted({parent.degrees[i] for i in x}):
        part = {i: c for i, c in x.items() if parent.degrees[i] == k}
        _add_into(out, sub.from_vector(k, sub._coords(k, parent.vector(part, k))))
    return out


def invariants(A: GradedAlgebraModel, action: AlgebraMorphism, m: int, *, factor=1,
               meta: Mapping[str, str] | None = None) -> GradedAlgebraModel:
    """Fixed subalgebra of a ring automorphism of order dividing m.

    Hodge spans are pushed through the averaging projector; the degree map
    is multiplied by ``factor`` (the quotient normalization).
    """
    if not action.power(m).is_identity():
        raise AlgebraError("action is not of the declared finite order")
    if not action.ring_verified and not action.verify_ring(A, A):
        raise AlgebraError("action is not a ring automorphism")
    bases = {}
    projectors = {}
    for k in sorted(A.by_degree):
        M = action.mats.get(k)
        if M is None:
            continue
        ker = kernel(M - Matrix.identity(M.nrows))
        if ker:
            bases[k] = ker
        P = Matrix.zeros(M.nrows, M.nrows)
        cur = Matrix.identity(M.nrows)
        for _ in range(m):
            P = P + cur
            cur = cur @ M
        projectors[k] = P.scale(Fraction(1, m))
    hodge = {}
    for (p, q), vecs in A.hodge.items():
        k = p + q
        if k not in bases:
            continue
        imgs = [projectors[k] @ v for v in vecs]
        imgs = [v for v in imgs if any(v)]
        if imgs:
            R, _ = rref(Matrix(imgs, A.dim(k)))
            hodge[(p, q)] = [tuple(r) for r in R.rows]
        else:
            hodge[(p, q)] = []
    return subalgebra(A, bases, degmap_factor=factor, hodge=hodge, meta=meta)


def rescale_basis(A: GradedAlgebraModel, scales: Mapping[str, object], *, relabel: Mapping[str, str] | None = None
                  ) -> GradedAlgebraModel:
    """New basis e'_i = s_i e_i for the listed labels; structure follows."""
    s = [Fraction(1)] * len(A)
    for lab, v in scales.items():
        s[A.index[lab]] = Fraction(v) if not isinstance(v, (Cyclotomic, RationalFunction)) else v
    old = A

    def rule(i: int, j: int) -> dict:
        p = old.product(i, j)
        return {k: c * s[i] * s[j] / s[k] for k, c in p.items()}

    hodge = {}
    for (p, q), vecs in A.hodge.items():
        idx = A.basis(p + q)
        hodge[(p, q)] = tuple(tuple(x / s[i] for x, i in zip(v, idx)) for v in vecs)
    degmap = {i: c * s[i] for i, c in A.degmap.items()}
    labels = [relabel.get(l, l) if relabel else l for l in A.labels]
    new = GradedAlgebraModel(labels, A.degrees, A.top, cap=A.cap, rule=rule, hodge=hodge, degmap=degmap,
                             order=A.order, symbols=A.symbols, fieldspec=A.fieldspec, meta=A.meta)
    for name, f in A.actions.items():
        mats = {}
        for k, M in f.mats.items():
            idx = A.basis(k)
            D = Matrix.diagonal([s[i] for i in idx])
            Dinv = Matrix.diagonal([1 / s[i] for i in idx])
            mats[k] = Dinv @ M @ D
        new.actions[name] = AlgebraMorphism(mats, ring_verified=f.ring_verified, hodge_verified=f.hodge_verified)
    for name, x in A.classes.items():
        new.classes[name] = {i: c / s[i] for i, c in x.items()}
    return new


# ---------------------------------------------------------------------------
# Hodge data


def hodge_echelon(A: GradedAlgebraModel, p: int, q: int) -> list[tuple]:
    """Reduced echelon basis of the (p, q) span, pivots first-nonzero."""
    if (p, q) not in A.hodge:
        raise AlgebraError(f"missing Hodge data for ({p},{q})")
    vecs = A.hodge[(p, q)]
    if not vecs:
        return []
    R, _ = rref(Matrix(vecs, A.dim(p + q)))
    return [tuple(r) for r in R.rows]


def conjugate_span(vecs: Sequence[Sequence], sigma: FieldAutomorphism) -> list[tuple]:
    return [tuple(apply_automorphism(x, sigma) if not isinstance(x, (int, Fraction)) else x for x in v)
            for v in vecs]


def _conj_sigma(A: GradedAlgebraModel) -> FieldAutomorphism:
    smap = ()
    if A.fieldspec is not None:
        smap = A.fieldspec.conjugation
    n = max(A.order, 1)
    return FieldAutomorphism(n, n - 1 if n > 2 else 1, smap)


def check_invariants(A: GradedAlgebraModel, *, assoc_sample: int | None = None, seed: int = 0,
                     max_degree: int | None = None) -> dict[str, bool]:
    """Run the structural checks; raise InvariantError on the first failure.

    ``assoc_sample`` bounds the number of basis triples checked (None: all).
    """
    report: dict[str, bool] = {}
    limit = A.cap if max_degree is None else min(A.cap, max_degree)
    n = len(A)
    idx = [i for i in range(n) if A.degrees[i] <= limit]
    # graded commutativity
    for i in idx:
        for j in idx:
            if i < j and A.degrees[i] + A.degrees[j] <= limit:
                lhs = A.product(i, j)
                rhs = A.product(j, i)
                s = A._swap_sign(i, j)
                if not _class_eq(lhs, {k: c * s for k, c in rhs.items()}):
                    raise InvariantError(f"graded commutativity fails for {A.labels[i]}, {A.labels[j]}")
    report["commutative"] = True
    # associativity
    triples = [(i, j, k) for i in idx for j in idx if j >= i for k in idx if k >= j
               and A.degrees[i] + A.degrees[j] + A.degrees[k] <= limit
               and A.degrees[i] and A.degrees[j] and A.degrees[k]]
    if assoc_sample is not None and len(triples) > assoc_sample:
        triples = random.Random(seed).sample(triples, assoc_sample)
    for i, j, k in triples:
        for a, b, c in {(i, j, k), (j, k, i), (k, i, j)}:
            lhs = A.cup(A.product(a, b), {c: Fraction(1)})
            rhs = A.cup({a: Fraction(1)}, A.product(b, c))
            if not _class_eq(lhs, rhs):
                raise InvariantError(f"associativity fails for {A.labels[a]}, {A.labels[b]}, {A.labels[c]}")
    report["associative"] = True
    # Hodge spans
    degs = sorted({p + q for p, q in A.hodge})
    sigma = _conj_sigma(A)
    for k in degs:
        if k > limit:
            continue
        allv = [v for (p, q), vs in A.hodge.items() if p + q == k for v in vs]
        if (rank(Matrix(allv, A.dim(k))) if allv else 0) != A.dim(k):
            raise InvariantError(f"Hodge spans do not fill degree {k}")
        for (p, q), vs in A.hodge.items():
            if p + q != k:
                continue
            other = A.hodge.get((q, p))
            if other is None:
                raise InvariantError(f"missing conjugate Hodge span ({q},{p})")
            if not same_span(conjugate_span(vs, sigma), other, A.dim(k)):
                raise InvariantError(f"conjugation does not map ({p},{q}) onto ({q},{p})")
    report["hodge"] = True
    # Poincare duality
    if not A.truncated:
        for k in sorted(A.by_degree):
            if k > A.top - k:
                continue
            bk, bl = A.basis(k), A.basis(A.top - k)
            if len(bk) != len(bl):
                raise InvariantError(f"Betti numbers b{k} and b{A.top - k} differ")
            M = Matrix([[A.evaluate(A.product(i, j)) for j in bl] for i in bk], len(bl))
            if rank(M) != len(bk):
                raise InvariantError(f"pairing degenerate in degree {k}")
        report["poincare"] = True
    return report


# ---------------------------------------------------------------------------
# field specifications and the K-rationality solver


Monomial = tuple[tuple[str, int], ...]


def parse_monomial(text: str) -> Monomial:
    text = text.strip()
    if text in ("", "1"):
        return ()
    out: dict[str, int] = {}
    for part in text.split("*"):
        name, _, e = part.partition("^")
        out[name.strip()] = out.get(name.strip(), 0) + (int(e) if e else 1)
    return tuple(sorted((k, v) for k, v in out.items() if v))


def format_monomial(m: Monomial) -> str:
    if not m:
        return "1"
    return "*".join(n if e == 1 else f"{n}^{e}" for n, e in m)


@dataclass
class FieldSpec:
    """Declared subfield K of the presentation field Q(zeta_n)(symbols).

    * ``fixing``: the exponents k whose automorphisms fix K ∩ Q(zeta_n);
      ``(1,)`` means K contains all of Q(zeta_n), all units means K ∩ Q(zeta_n) = Q.
    * ``in_k``: monomials declared to lie in K (K is a field, so their
      products and inverses do too).
    * ``families``: each family F declares {1} ∪ F linearly independent
      over K(zeta_n).
    * ``aliases``: named expressions treated as a single monomial.
    * ``relations``: a symbol equals sum_j kappa_j * monomial_j with fresh
      K-valued symbols kappa_j.
    * ``conjugation``: symbol swap induced by complex conjugation.
    """

    order: int
    fixing: tuple[int, ...] = (1,)
    in_k: list[Monomial] = field(default_factory=list)
    families: list[list[Monomial]] = field(default_factory=list)
    aliases: dict[str, object] = field(default_factory=dict)
    relations: list[tuple[str, list[tuple[Monomial, str]]]] = field(default_factory=list)
    conjugation: tuple[tuple[str, str], ...] = ()
    notes: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.fixing = tuple(sorted({k % self.order for k in self.fixing} | {1 % self.order}))
        for k in self.fixing:
            if math.gcd(k, self.order) != 1:
                raise AlgebraError(f"fixing exponent {k} is not a unit modulo {self.order}")
        # closure under composition
        group = set(self.fixing)
        changed = True
        while changed:
            changed = False
            for a in list(group):
                for b in list(group):
                    c = (a * b) % self.order
                    if c not in group:
                        group.add(c)
                        changed = True
        self.fixing = tuple(sorted(group))
        self.validate()

    def validate(self) -> None:
        targets = {t for t, _ in self.relations}
        fam = {m for f in self.families for m in f}
        for t in targets:
            if ((t, 1),) in fam:
                raise AlgebraError(f"{t} is both declared independent and subject to a relation")
        conj = dict(self.conjugation)
        for t in targets:
            c = conj.get(t, t)
            if c != t and c not in targets:
                raise AlgebraError(f"relation set not closed under conjugation ({t} -> {c})")

    def ledger(self) -> list[str]:
        """Human-readable list of every declaration (for certificates)."""
        out = [f"K cap Q(zeta_{self.order}) fixed by exponents {','.join(map(str, self.fixing))}"]
        out += [f"{format_monomial(m)} in K" for m in self.in_k]
        out += ["1, " + ", ".join(format_monomial(m) for m in f) + " independent over K" for f in self.families]
        out += [f"{name} := {_fmt_alias(v)}" for name, v in self.aliases.items()]
        for t, terms in self.relations:
            out.append(f"{t} = " + " + ".join(f"{k}*{format_monomial(m)}" for m, k in terms) + " with "
                       + ",".join(k for _, k in terms) + " in K")
        out += list(self.notes)
        return out

    # -- text form ------------------------------------------------------
    def dumps(self) -> str:
        from .field import format_scalar
        lines = [f"order {self.order}", "fixing " + ",".join(map(str, self.fixing))]
        lines += [f"in {format_monomial(m)}" for m in self.in_k]
        lines += ["indep " + " ".join(format_monomial(m) for m in f) for f in self.families]
        for name, v in self.aliases.items():
            lines.append(f"alias {name} {','.join(v.symbols) if isinstance(v, RationalFunction) else '-'} "
                         f"{format_scalar(v)}")
        for t, terms in self.relations:
            lines.append(f"rel {t} " + " ".join(f"{format_monomial(m)}:{k}" for m, k in terms))
        if self.conjugation:
            lines.append("conj " + " ".join(f"{a}:{b}" for a, b in self.conjugation))
        lines += [f"note {n}" for n in self.notes]
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> FieldSpec:
        from .field import parse_scalar
        order, fixing = None, (1,)
        in_k, fams, aliases, rels, conj, notes = [], [], {}, [], [], []
        for raw in text.splitlines():
            line = raw.split("#", 1)[0].strip() if not raw.startswith("note") else raw.strip()
            if not line:
                continue
            key, _, rest = line.partition(" ")
            if key == "order":
                order = int(rest)
            elif key == "fixing":
                fixing = tuple(int(x) for x in rest.split(","))
            elif key == "in":
                in_k.append(parse_monomial(rest))
            elif key == "indep":
                fams.append([parse_monomial(t) for t in rest.split()])
            elif key == "alias":
                name, syms, tok = rest.split(" ", 2)
                symbols = () if syms == "-" else tuple(syms.split(","))
                aliases[name] = parse_scalar(tok.strip(), symbols)
            elif key == "rel":
                t, *terms = rest.split()
                rels.append((t, [(parse_monomial(a), b) for a, b in (x.rsplit(":", 1) for x in terms)]))
            elif key == "conj":
                conj = [tuple(x.split(":")) for x in rest.split()]
            elif key == "note":
                notes.append(rest)
            else:
                raise AlgebraError(f"unknown FIELDSPEC line: {line}")
        if order is None:
            raise AlgebraError("FIELDSPEC without order")
        return cls(order, fixing, in_k, fams, aliases, rels, tuple(conj), notes)


def _fmt_alias(v) -> str:
    from .field import format_scalar
    return format_scalar(v)


def _hnf_member(target: Sequence[int], gens: Sequence[Sequence[int]]) -> bool:
    """Whether an integer vector lies in the Z-span of gens."""
    rows = [list(g) for g in gens if any(g)]
    n = len(target)
    basis: list[list[int]] = []
    # integer row reduction to echelon form (Hermite-style)
    col = 0
    while rows and col < n:
        nz = [r for r in rows if r[col]]
        zero = [r for r in rows if not r[col]]
        while len(nz) > 1:
            nz.sort(key=lambda r: abs(r[col]))
            piv = nz[0]
            rest = []
            for r in nz[1:]:
                q = r[col] // piv[col]
                r = [a - q * b for a, b in zip(r, piv)]
                (rest if r[col] else zero).append(r)
            nz = [piv] + rest
        if nz:
            basis.append(nz[0])
        rows = [r for r in zero if any(r)]
        col += 1
    t = list(target)
    for r in basis:
        c = next(i for i, x in enumerate(r) if x)
        if t[c] % r[c]:
            return False
        q = t[c] // r[c]
        t = [a - q * b for a, b in zip(t, r)]
    return not any(t)




def _k0_splitter(order: int, fixing: tuple[int, ...]):
    """Map c in Q(zeta_n) to coefficients (kappa_0..kappa_{d-1}) in K0 with
    c = sum kappa_l zeta^l, where K0 is the fixed field of ``fixing``."""
    key = (order, fixing)
    hit = _SPLIT_CACHE.get(key)
    if hit is not None:
        return hit
    d = len(fixing)
    one = Cyclotomic(order, [1])
    phi = len(one.c)
    orbit_sums = []
    for j in range(phi):
        z = zeta(order, j)
        orbit_sums.append(sum((z.galois(h) for h in fixing), Cyclotomic(order)).c)
    R, _ = rref(Matrix(orbit_sums, phi))
    k0_basis = [Cyclotomic(order, r) for r in R.rows]
    cols = []
    for l in range(d):
        zl = zeta(order, l)
        for e in k0_basis:
            cols.append((e * zl).c)
    B = Matrix.from_columns(cols, phi)
    Binv = inverse(B)

    def split(c: Cyclotomic) -> list[Cyclotomic]:
        c = c if c.n == order else embed(c, order)
        x = Binv @ c.c
        r = len(k0_basis)
        out = []
        for l in range(d):
            acc = Cyclotomic(order)
            for s, e in enumerate(k0_basis):
                if x[l * r + s]:
                    acc = acc + e * x[l * r + s]
            out.append(acc)
        return out

    _SPLIT_CACHE[key] = split
    return split


_SPLIT_CACHE: dict = {}


class _Expander:
    """Expand entries along the FieldSpec declarations."""

    def __init__(self, spec: FieldSpec, symbols: Sequence[str]):
        self.spec = spec
        self.symbols = tuple(symbols)
        self.kappas = tuple(k for _, terms in spec.relations for _, k in terms)
        self.ext = self.symbols + tuple(a for a in spec.aliases) + self.kappas
        self.names = self.symbols + tuple(spec.aliases)
        self.lattice = [self._vec(m) for m in spec.in_k]
        self.split = _k0_splitter(spec.order, spec.fixing)
        self.family_of: list[tuple[int, Monomial]] = []
        for fi, fam in enumerate(spec.families):
            for m in fam:
                self.family_of.append((fi, m))
        for t, _ in spec.relations:
            if t not in self.symbols:
                raise AlgebraError(f"relation target {t} is not a model symbol")

    def _vec(self, m: Monomial) -> tuple[int, ...]:
        d = dict(m)
        for n in d:
            if n not in self.names:
                raise AlgebraError(f"declaration uses unknown symbol {n}")
        return tuple(d.get(n, 0) for n in self.names)

    def _in_lattice(self, v: Sequence[int]) -> bool:
        if not any(v):
            return True
        return _hnf_member(v, self.lattice)

    def classify(self, v: tuple[int, ...]):
        """Slot for a monomial exponent vector over ``names`` and the
        in-K cofactor exponent."""
        if self._in_lattice(v):
            return "1", v
        for fi, m in self.family_of:
            f = self._vec(m)
            rest = tuple(a - b for a, b in zip(v, f))
            if self._in_lattice(rest):
                return (fi, m), rest
        return None, None

    def to_ext(self, x) -> RationalFunction:
        if isinstance(x, RationalFunction):
            if x.symbols != self.symbols:
                x = x.with_symbols(self.symbols)
            return x.with_order(math.lcm(x.n, self.spec.order)).with_symbols(self.ext)
        return RationalFunction.constant(as_scalar(x), self.ext, self.spec.order)

    def expand(self, x) -> dict:
        """slot -> RationalFunction over ``ext`` (K-valued factor times Q(zeta))."""
        if not x:
            return {}
        e = None
        if isinstance(x, RationalFunction) and not x.is_constant():
            for name, expr in self.spec.aliases.items():
                r = x / expr
                if r.is_constant():
                    e = {((name, 1),): r.constant_value()}
                    break
            if e is None:
                y = self.to_ext(x)
                if self.spec.relations:
                    subs = {}
                    for t, terms in self.spec.relations:
                        acc = RationalFunction.constant(0, self.ext, self.spec.order)
                        for m, k in terms:
                            term = RationalFunction.symbol(k, self.ext, self.spec.order)
                            for n, p in m:
                                term = term * RationalFunction.symbol(n, self.ext, self.spec.order) ** p
                            acc = acc + term
                        subs[t] = acc
                    y = y.substitute(subs)
                    if not isinstance(y, RationalFunction):
                        y = self.to_ext(y)
                try:
                    terms = y.polynomial_terms()
                except FieldError:
                    raise InconclusiveError("inconclusive presentation: entry is not a Laurent polynomial")
                e = {}
                for exp, c in terms.items():
                    mono = tuple((self.ext[i], p) for i, p in enumerate(exp) if p)
                    e[mono] = c
        else:
            c = x.constant_value() if isinstance(x, RationalFunction) else as_scalar(x)
            e = {(): c}
        out: dict = {}
        for mono, c in e.items():
            d = dict(mono)
            v = tuple(d.get(n, 0) for n in self.names)
            slot, cof = self.classify(v)
            if slot is None:
                raise InconclusiveError(f"inconclusive presentation: monomial {format_monomial(mono)} is undeclared")
            kexp = list(cof) + [d.get(k, 0) for k in self.kappas]
            # Laurent cofactor: negative exponents go to the denominator
            term = RationalFunction(self.spec.order, self.ext,
                                    {tuple(max(x, 0) for x in kexp):
                                     c if c.n == self.spec.order else embed(c, self.spec.order)},
                                    {tuple(max(-x, 0) for x in kexp): Cyclotomic(self.spec.order, [1])})
            out[slot] = out[slot] + term if slot in out else term
        return out

    def split_components(self, r: RationalFunction) -> list[RationalFunction]:
        """Write r = sum_l r_l zeta^l with r_l over K0."""
        d = len(self.spec.fixing)
        parts = [dict() for _ in range(d)]
        den = r.den
        for exp, c in r.num.items():
            for l, kap in enumerate(self.split(c)):
                if kap:
                    parts[l][exp] = kap
        return [RationalFunction(self.spec.order, self.ext, p, den) if p else
                RationalFunction.constant(0, self.ext, self.spec.order) for p in parts]


def _constraint_rows(rows: Sequence[Sequence], pivots: Sequence[int], ex: _Expander) -> list[list]:
    m = len(rows)
    ncols = len(rows[0]) if rows else 0
    constraints = []
    for c in range(ncols):
        if c in pivots:
            continue
        slots: dict = {}
        for i, row in enumerate(rows):
            for slot, val in ex.expand(row[c]).items():
                slots.setdefault(slot, [None] * m)[i] = val
        fams = {s[0] for s in slots if s != "1"}
        if len(fams) > 1:
            raise InconclusiveError("inconclusive presentation: monomials from different families share a coordinate")
        zero = RationalFunction.constant(0, ex.ext, ex.spec.order)
        for slot, vals in slots.items():
            comps = [ex.split_components(v) if v is not None else None for v in vals]
            for l in range(len(ex.spec.fixing)):
                if slot == "1" and l == 0:
                    continue
                row = [comp[l] if comp is not None else zero for comp in comps]
                if any(row):
                    constraints.append(row)
    return constraints


def k_rational_dim(A: GradedAlgebraModel, p: int, K: FieldSpec | None = None) -> int:
    """dim over K of H^{p,p} intersected with the K-span of the lattice."""
    K = K or A.fieldspec
    if K is None:
        raise AlgebraError("no FieldSpec supplied")
    if K.order % max(A.order, 1):
        raise AlgebraError(f"FieldSpec order {K.order} does not contain the model field order {A.order}")
    rows = hodge_echelon(A, p, p)
    if not rows:
        return 0
    _, pivots = rref(Matrix(rows, A.dim(2 * p)))
    ex = _Expander(K, A.symbols)
    cons = _constraint_rows(rows, pivots, ex)
    if not cons:
        return len(rows)
    return len(rows) - rank(Matrix(cons, len(rows)))


def k_rational_lower_bound(A: GradedAlgebraModel, p: int, K: FieldSpec | None = None,
                           vectors: Sequence[Sequence] | None = None) -> int:
    """Rank of the (p,p) spanning vectors all of whose coordinates are
    provably in K.  Entries the declarations cannot place in K are skipped,
    so the result is a lower bound."""
    K = K or A.fieldspec
    if K is None:
        raise AlgebraError("no FieldSpec supplied")
    vecs = A.hodge.get((p, p), ()) if vectors is None else vectors
    ex = _Expander(K, A.symbols)
    good = []
    for v in vecs:
        ok = True
        for x in v:
            if not x:
                continue
            try:
                slots = ex.expand(x)
            except InconclusiveError:
                ok = False
                break
            if set(slots) != {"1"} or any(ex.split_components(slots["1"])[1:]):
                ok = False
                break
        if ok and any(v):
            good.append(tuple(v))
    return rank(Matrix(good, A.dim(2 * p))) if good else 0
