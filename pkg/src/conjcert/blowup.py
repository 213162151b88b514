"""Cohomology of blow-ups along disjoint smooth centers.

For a center Z of codimension r with restriction i^*, the blow-up has basis

    H^*(X)  ⊕  ⊕_{k=0}^{r-2} j_*(h^k · H^*(Z))

and products

    π^*η ∪ j_*(α)       = j_*(i^*η · α)
    j_*(α) ∪ j_*(β)     = −j_*(h · α · β)            (same center; 0 across)
    h^r                 = −Σ_{k≥1} c_k(N) h^{r−k}     (on the exceptional divisor)
    j_*(h^{r−1} α)      = π^*(i_*α) − Σ_{k≥1} j_*(h^{r−1−k} c_k α)

where h = c_1(O_D(1)).  The Gysin map i_* comes from Poincaré duality on the
ambient model or is passed in explicitly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .algebra import (
    AlgebraError,
    AlgebraMorphism,
    Class,
    GradedAlgebraModel,
    _add_into,
)
from .linalg import Matrix, solve

__all__ = [
    "BlowupError",
    "Center",
    "BlowupData",
    "point_model",
    "projective_space",
    "exceptional_algebra",
    "blowup_algebra",
    "additive_betti",
]


class BlowupError(AlgebraError):
    pass


def point_model() -> GradedAlgebraModel:
    return GradedAlgebraModel(["1"], [0], 0, degmap={0: Fraction(1)}, hodge={(0, 0): [(Fraction(1),)]})


def projective_space(n: int, *, hyperplane: str = "H", cap: int | None = None) -> GradedAlgebraModel:
    """H^*(P^n) with basis H^k and deg(H^n) = 1."""
    labels = ["1"] + [hyperplane if k == 1 else f"{hyperplane}^{k}" for k in range(1, n + 1)]
    degrees = [2 * k for k in range(n + 1)]
    products = {(i, j): {i + j: Fraction(1)} for i in range(n + 1) for j in range(i, n + 1) if i + j <= n}
    hodge = {}
    for k in range(n + 1):
        hodge[(k, k)] = [(Fraction(1),)]
    return GradedAlgebraModel(labels, degrees, 2 * n, cap=cap, products=products, hodge=hodge,
                              degmap={n: Fraction(1)}, classes={hyperplane: {1: Fraction(1)}} if n else {},
                              meta={"kind": f"P{n}"})


@dataclass
class Center:
    """A smooth center: its model, i^*, codimension and normal Chern data.

    ``chern`` lists c_1..c_r as classes on the center (``None``: absent).
    ``gysin`` optionally overrides the Poincaré-duality Gysin map.
    """

    name: str
    model: GradedAlgebraModel
    restriction: AlgebraMorphism
    codim: int
    chern: Sequence[Class] | None = None
    gysin: Callable[[Class], Class] | None = None

    def __post_init__(self):
        if self.codim < 2:
            raise BlowupError("codimension must be at least 2")
        if self.chern is None and all(d == 0 for d in self.model.degrees):
            # over a point every positive-degree Chern class vanishes
            self.chern = [{} for _ in range(self.codim)]

    def chern_class(self, k: int) -> Class:
        if self.chern is None:
            raise BlowupError("normal bundle data required")
        return self.chern[k - 1] if k - 1 < len(self.chern) else {}


@dataclass
class BlowupData:
    ambient: GradedAlgebraModel
    centers: list[Center]
    cap: int | None = None
    verify_restrictions: bool = True
    meta: dict = field(default_factory=dict)


def exceptional_algebra(center: GradedAlgebraModel, r: int, chern: Sequence[Class] | None = None,
                        *, hyperplane: str = "h") -> GradedAlgebraModel:
    """H^*(P(N)) as the free H^*(Z)-module on 1, h, ..., h^{r-1}."""
    if r < 2:
        raise BlowupError("codimension must be at least 2")
    if chern is None and all(d == 0 for d in center.degrees):
        chern = [{} for _ in range(r)]
    n = len(center)
    pairs = sorted(((i, z) for i in range(r) for z in range(n)),
                   key=lambda iz: (center.degrees[iz[1]] + 2 * iz[0], iz[0], iz[1]))
    where = {p: k for k, p in enumerate(pairs)}
    labels = [center.labels[z] if i == 0 else f"{hyperplane}{i}.{center.labels[z]}" for i, z in pairs]
    degrees = [center.degrees[z] + 2 * i for i, z in pairs]
    top = center.top + 2 * (r - 1)

    def reduce(i: int, zc: Class) -> dict:
        out: dict = {}
        if not zc:
            return out
        if i < r:
            for z, c in zc.items():
                _add_into(out, {where[(i, z)]: c})
            return out
        if chern is None:
            raise BlowupError("normal bundle data required")
        for k in range(1, r + 1):
            ck = chern[k - 1] if k - 1 < len(chern) else {}
            if ck:
                _add_into(out, reduce(i - k, center.cup(ck, zc)), -1)
        return out

    def rule(a: int, b: int) -> dict:
        i, x = pairs[a]
        k, y = pairs[b]
        return reduce(i + k, center.product(x, y))

    degmap = {}
    for z, w in center.degmap.items():
        degmap[where[(r - 1, z)]] = w
    hodge = {}
    for (p, q), vecs in center.hodge.items():
        for i in range(r):
            d = p + q + 2 * i
            idx = [k for k, (ii, z) in enumerate(pairs) if degrees[k] == d]
            pos = {k: m for m, k in enumerate(idx)}
            for v in vecs:
                vec = [Fraction(0)] * len(idx)
                for z, c in zip(center.basis(p + q), v):
                    vec[pos[where[(i, z)]]] = c
                hodge.setdefault((p + i, q + i), []).append(tuple(vec))
    return GradedAlgebraModel(labels, degrees, top, rule=rule, degmap=degmap, hodge=hodge,
                              order=center.order, symbols=center.symbols,
                              classes={hyperplane: {where[(1, center.unit)]: Fraction(1)}} if center.dim(0) == 1 else {},
                              meta={"kind": "exceptional", "codim": str(r)})


class _Blowup:
    """Product rule and helpers shared by the built model."""

    def __init__(self, data: BlowupData):
        self.data = data
        A = data.ambient
        self.A = A
        self.nA = len(A)
        self.exc: list[tuple[int, int, int]] = []
        self.where: dict[tuple[int, int, int], int] = {}
        entries = []
        for ci, c in enumerate(data.centers):
            for i in range(c.codim - 1):
                for z in range(len(c.model)):
                    entries.append((c.model.degrees[z] + 2 * i + 2, ci, i, z))
        # ambient first, exceptional classes afterwards in center order
        for d, ci, i, z in entries:
            self.where[(ci, i, z)] = self.nA + len(self.exc)
            self.exc.append((ci, i, z))
        self._gysin_cache: dict = {}

    def label(self, ci: int, i: int, z: int) -> str:
        c = self.data.centers[ci]
        zl = c.model.labels[z]
        return c.name if (i == 0 and zl == "1") else f"{c.name}.h{i}.{zl}"

    def degree(self, ci: int, i: int, z: int) -> int:
        return self.data.centers[ci].model.degrees[z] + 2 * i + 2

    def restrict(self, ci: int, x: Class) -> Class:
        c = self.data.centers[ci]
        out: dict = {}
        for k in sorted({self.A.degrees[a] for a in x}):
            if k > c.model.top or k not in c.restriction.mats:
                continue
            part = {a: v for a, v in x.items() if self.A.degrees[a] == k}
            img = c.restriction.mats[k] @ self.A.vector(part, k)
            _add_into(out, c.model.from_vector(k, img))
        return out

    def gysin(self, ci: int, zc: Class) -> Class:
        c = self.data.centers[ci]
        if c.gysin is not None:
            return c.gysin(zc)
        out: dict = {}
        for z, v in zc.items():
            key = (ci, z)
            if key not in self._gysin_cache:
                self._gysin_cache[key] = self._gysin_basis(ci, z)
            _add_into(out, self._gysin_cache[key], v)
        return out

    def _gysin_basis(self, ci: int, z: int) -> Class:
        c = self.data.centers[ci]
        A, Z = self.A, c.model
        if A.truncated or Z.truncated:
            raise BlowupError("Gysin map needs untruncated ambient and center models")
        d = Z.degrees[z] + 2 * c.codim
        dual = A.top - d
        rows, rhs = [], []
        for eta in A.basis(dual):
            rows.append([A.evaluate(A.product(x, eta)) for x in A.basis(d)])
            rhs.append(Z.evaluate(Z.cup({z: Fraction(1)}, self.restrict(ci, {eta: Fraction(1)}))))
        if not A.basis(d):
            return {}
        sol = solve(Matrix(rows, A.dim(d)), rhs)
        if sol is None:
            raise BlowupError("Gysin map is not determined by duality")
        return A.from_vector(d, sol)

    def push(self, ci: int, i: int, zc: Class) -> dict:
        """j_*(h^i · zc) in blow-up basis coordinates."""
        out: dict = {}
        if not zc:
            return out
        c = self.data.centers[ci]
        r = c.codim
        if i <= r - 2:
            for z, v in zc.items():
                _add_into(out, {self.where[(ci, i, z)]: v})
            return out
        if i >= r:
            for k in range(1, r + 1):
                ck = c.chern_class(k)
                if ck:
                    _add_into(out, self.push(ci, i - k, c.model.cup(ck, zc)), -1)
            if c.chern is None:
                raise BlowupError("normal bundle data required")
            return out
        # i == r - 1
        _add_into(out, self.gysin(ci, zc))
        for k in range(1, r):
            ck = c.chern_class(k)
            if ck:
                _add_into(out, self.push(ci, r - 1 - k, c.model.cup(ck, zc)), -1)
        return out

    def rule(self, a: int, b: int) -> dict:
        nA = self.nA
        if a < nA and b < nA:
            return self.A.product(a, b)
        if a < nA or b < nA:
            amb, ex = (a, b) if a < nA else (b, a)
            ci, i, z = self.exc[ex - nA]
            c = self.data.centers[ci]
            eta = self.restrict(ci, {amb: Fraction(1)})
            if not eta:
                return {}
            return self.push(ci, i, c.model.cup(eta, {z: Fraction(1)}))
        ci, i, x = self.exc[a - nA]
        cj, k, y = self.exc[b - nA]
        if ci != cj:
            return {}
        c = self.data.centers[ci]
        prod = c.model.product(x, y)
        if not prod:
            return {}
        res = self.push(ci, i + k + 1, prod)
        return {key: -v for key, v in res.items()}


def blowup_algebra(data: BlowupData) -> GradedAlgebraModel:
    A = data.ambient
    for c in data.centers:
        if c.model.order != A.order and c.model.order != 1 and A.order != 1:
            raise BlowupError("center and ambient fields differ")
        if data.verify_restrictions and not c.restriction.ring_verified:
            if not c.restriction.verify_ring(A, c.model, max_degree=min(A.cap, c.model.cap)):
                raise BlowupError(f"restriction to {c.name} is not a ring morphism")
    B = _Blowup(data)
    labels = list(A.labels) + [B.label(*e) for e in B.exc]
    degrees = list(A.degrees) + [B.degree(*e) for e in B.exc]
    # sort into degree order, keeping ambient-then-exceptional within a degree
    order = sorted(range(len(labels)), key=lambda n: (degrees[n], n))
    inv = {old: new for new, old in enumerate(order)}
    cap = A.cap if data.cap is None else min(A.cap, data.cap)

    def rule(a: int, b: int) -> dict:
        res = B.rule(order[a], order[b])
        return {inv[k]: v for k, v in res.items()}

    new_labels = [labels[n] for n in order]
    new_degrees = [degrees[n] for n in order]
    degmap = {inv[i]: v for i, v in A.degmap.items()}
    model = GradedAlgebraModel(new_labels, new_degrees, A.top, cap=cap, rule=rule, degmap=degmap,
                               order=A.order, symbols=A.symbols,
                               meta={**A.meta, **data.meta, "kind": data.meta.get("kind", "blowup")})
    hodge: dict = {}
    for (p, q), vecs in A.hodge.items():
        k = p + q
        if k > cap:
            continue
        pos = {inv[i]: m for m, i in enumerate(A.basis(k))}
        for v in vecs:
            full = {}
            for i in model.basis(k):
                if i in pos and v[pos[i]]:
                    full[i] = v[pos[i]]
            hodge.setdefault((p, q), []).append(model.vector(full, k))
    for ci, c in enumerate(data.centers):
        for (p, q), vecs in c.model.hodge.items():
            for i in range(c.codim - 1):
                k = p + q + 2 * i + 2
                if k > cap:
                    continue
                for v in vecs:
                    full = {}
                    for z, x in zip(c.model.basis(p + q), v):
                        if x:
                            full[inv[B.where[(ci, i, z)]]] = x
                    hodge.setdefault((p + i + 1, q + i + 1), []).append(model.vector(full, k))
    model.hodge = {key: tuple(v) for key, v in sorted(hodge.items())}
    classes = dict(A.classes)
    classes = {name: {inv[i]: v for i, v in x.items()} for name, x in classes.items()}
    for ci, c in enumerate(data.centers):
        if c.model.dim(0) == 1:
            classes[c.name] = {inv[B.where[(ci, 0, c.model.unit)]]: Fraction(1)}
    model.classes = classes
    model._blowup = B
    model._blowup_order = (order, inv)
    return model


def exceptional_push(model: GradedAlgebraModel, center: int, power: int, zc: Class) -> Class:
    """j_*(h^power · zc) for a blow-up built by :func:`blowup_algebra`."""
    B: _Blowup = model._blowup
    order, inv = model._blowup_order
    res = B.push(center, power, zc)
    return {inv[k]: v for k, v in res.items()}


def pullback_class(model: GradedAlgebraModel, x: Class) -> Class:
    """π^* of an ambient class."""
    order, inv = model._blowup_order
    return {inv[k]: v for k, v in x.items()}


def additive_betti(data: BlowupData) -> dict[int, int]:
    out = dict(data.ambient.betti())
    for c in data.centers:
        for k, b in c.model.betti().items():
            for j in range(c.codim - 1):
                d = k + 2 * j + 2
                out[d] = out.get(d, 0) + b
    return dict(sorted(out.items()))


__all__ += ["exceptional_push", "pullback_class"]
