"""Concrete cohomology models: curves, abelian and Kummer surfaces, the
surfaces Y_g, the ambient blow-ups X_g, their sections T_{g,n}, the witness
blow-up W, and Galois conjugates of all of these.

Every model is a :class:`GradedAlgebraModel` on a rational lattice basis.
Named automorphisms live in ``model.actions`` (``eta``, ``iota``, ``f``,
``fp``) and distinguished classes in ``model.classes``.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Sequence

from .algebra import (
    AlgebraError,
    AlgebraMorphism,
    Class,
    GradedAlgebraModel,
    _add_into,
    induce_action,
    invariants,
    rescale_basis,
    tensor,
)
from .blowup import BlowupData, Center, blowup_algebra, point_model, projective_space
from .field import Cyclotomic, FieldAutomorphism, RationalFunction, apply_automorphism, format_scalar, zeta
from .linalg import Matrix, eigenspace

__all__ = [
    "VarietyError",
    "elliptic_model",
    "hyperelliptic_model",
    "fixed_point_permutation",
    "abelian_surface_model",
    "kummer_model",
    "surface_Y",
    "curve_product_class",
    "ambient_X",
    "tgn_model",
    "w_model",
    "conjugate_model",
    "torsion_points",
]


class VarietyError(AlgebraError):
    pass


ONE = Fraction(1)


def _conj(x):
    if isinstance(x, (Cyclotomic, RationalFunction)):
        return x.conjugate()
    return x


def _order_of(x) -> int:
    return x.n if isinstance(x, (Cyclotomic, RationalFunction)) else 1


def _is_i(x) -> bool:
    return isinstance(x, Cyclotomic) and x == zeta(4, 1)


# ---------------------------------------------------------------------------
# curves


def elliptic_model(tau, *, tau_bar=None, with_actions: bool | None = None) -> GradedAlgebraModel:
    """H^*(C/(Z + tau Z)) on the lattice basis a, b with deg(a b) = 1.

    ``tau="i"`` selects the square lattice and installs ``eta`` (order 4)
    and ``iota`` (= -1 on H^1).  For symbolic tau, ``tau_bar`` names the
    conjugate when it is not the entry-wise conjugate.
    """
    if isinstance(tau, str):
        if tau != "i":
            raise VarietyError(f"unknown named period {tau!r}")
        tau = zeta(4, 1)
    if isinstance(tau, (int, Fraction)) or (isinstance(tau, Cyclotomic) and tau.is_rational()):
        raise VarietyError("tau must have nonzero imaginary part")
    square = _is_i(tau)
    if with_actions is None:
        with_actions = square
    if with_actions and not square:
        raise VarietyError("the order-4 automorphism exists only for tau = i")
    tb = _conj(tau) if tau_bar is None else tau_bar
    symbols = tau.symbols if isinstance(tau, RationalFunction) else ()
    actions = {}
    if with_actions:
        z = Fraction(0)
        one = Matrix.identity(1)
        actions["eta"] = AlgebraMorphism({0: one, 1: Matrix([[z, ONE], [-ONE, z]]), 2: one}, ring_verified=True)
        actions["iota"] = AlgebraMorphism({0: one, 1: Matrix([[-ONE, z], [z, -ONE]]), 2: one}, ring_verified=True)
    return GradedAlgebraModel(
        ["1", "a", "b", "pt"], [0, 1, 1, 2], 2,
        products={(1, 2): {3: ONE}},
        hodge={(0, 0): [(ONE,)], (1, 0): [(ONE, tau)], (0, 1): [(ONE, tb)], (1, 1): [(ONE,)]},
        degmap={3: ONE}, order=max(_order_of(tau), _order_of(tb)), symbols=symbols, actions=actions,
        meta={"kind": "elliptic", "tau": format_scalar(tau)},
    )


def hyperelliptic_model(g: int) -> GradedAlgebraModel:
    """H^*(C_g) for y^2 = x^(2g+1) - 1.

    H^1 is Z[x]/(1 + x + ... + x^2g) on the power basis e_0..e_{2g-1}; the
    order-(2g+1) automorphism acts by multiplication with x.  The cup form is
    deg(e_a e_{a+1}) = -1, which makes H^{1,0} (eigenvalues zeta^1..zeta^g)
    positive for i * deg(w wbar).
    """
    if g < 1:
        raise VarietyError("genus must be at least 1")
    n = 2 * g
    m = 2 * g + 1
    labels = ["1"] + [f"e{a}" for a in range(n)] + ["pt"]
    degrees = [0] + [1] * n + [2]
    pt = n + 1
    products = {(1 + a, 2 + a): {pt: -ONE} for a in range(n - 1)}
    cols = []
    for a in range(n):
        col = [Fraction(0)] * n
        if a < n - 1:
            col[a + 1] = ONE
        else:
            col = [-ONE] * n
        cols.append(col)
    eta = Matrix.from_columns(cols, n)
    h10 = []
    for k in range(1, g + 1):
        h10.extend(eigenspace(eta, zeta(m, k)))
    h01 = [tuple(_conj(x) for x in v) for v in h10]
    one = Matrix.identity(1)
    actions = {
        "eta": AlgebraMorphism({0: one, 1: eta, 2: one}, ring_verified=True),
        "iota": AlgebraMorphism({0: one, 1: Matrix.identity(n).scale(-1), 2: one}, ring_verified=True),
    }
    return GradedAlgebraModel(
        labels, degrees, 2, products=products,
        hodge={(0, 0): [(ONE,)], (1, 0): h10, (0, 1): h01, (1, 1): [(ONE,)]},
        degmap={pt: ONE}, order=m, actions=actions,
        meta={"kind": "hyperelliptic", "genus": str(g),
              "fixed_points": ",".join(["inf"] + [f"P{k}" for k in range(m)])},
    )


def fixed_point_permutation(g: int) -> Matrix:
    """Permutation of the iota-fixed points [inf, P_0..P_2g] by eta: P_k -> P_(k+1)."""
    m = 2 * g + 1
    cols = [[ONE] + [Fraction(0)] * m]
    for k in range(m):
        col = [Fraction(0)] * (m + 1)
        col[1 + (k + 1) % m] = ONE
        cols.append(col)
    return Matrix.from_columns(cols, m + 1)


# ---------------------------------------------------------------------------
# abelian and Kummer surfaces


def _subset_label(S: Sequence[int]) -> str:
    return "".join(f"a{i}" for i in S) if S else "1"


def _merge_sign(S: Sequence[int], T: Sequence[int]) -> int:
    inversions = sum(1 for s in S for t in T if s > t)
    return -1 if inversions % 2 else 1


def _exterior_model(n: int, degree2_order: Sequence[tuple[int, ...]] | None, orientation, **kw) -> GradedAlgebraModel:
    subsets: list[tuple[int, ...]] = []
    for k in range(n + 1):
        layer = list(itertools.combinations(range(1, n + 1), k))
        if k == 2 and degree2_order is not None:
            layer = [tuple(s) for s in degree2_order]
        subsets.append(layer)
    flat = [S for layer in subsets for S in layer]
    where = {S: i for i, S in enumerate(flat)}
    products = {}
    for i, S in enumerate(flat):
        for j, T in enumerate(flat):
            if j < i or not S or not T or set(S) & set(T):
                continue
            U = tuple(sorted(S + T))
            products[(i, j)] = {where[U]: Fraction(_merge_sign(S, T))}
    return GradedAlgebraModel([_subset_label(S) for S in flat], [len(S) for S in flat], n,
                              products=products, degmap={where[tuple(range(1, n + 1))]: orientation}, **kw)


def _hodge_from_h1(A: GradedAlgebraModel, h10: Sequence[Sequence], h01: Sequence[Sequence]) -> dict:
    """Hodge spans of an algebra generated in degree 1 by wedge products."""
    one = {A.unit: ONE}
    c10 = [A.from_vector(1, v) for v in h10]
    c01 = [A.from_vector(1, v) for v in h01]
    out = {}
    top = max(A.degrees)
    for p in range(len(c10) + 1):
        for q in range(len(c01) + 1):
            if p + q > top:
                continue
            vecs = []
            for P in itertools.combinations(c10, p):
                for Q in itertools.combinations(c01, q):
                    x = one
                    for y in P + Q:
                        x = A.cup(x, y)
                    if x:
                        vecs.append(A.vector(x, p + q))
            out[(p, q)] = vecs
    return out


KUMMER_DEGREE2 = [(3, 4), (2, 4), (1, 4), (2, 3), (1, 3), (1, 2)]


def abelian_surface_model(symbols: Sequence[str] = ("mu", "t1", "q")) -> GradedAlgebraModel:
    """Dual torus with period data (mu, t1, q = |t|^2), everything real.

    Lattice: a1 = dx1, a2 = dx2, a3 = m (2 t1 dy1 + dy2), a4 = m (dy1 + q dy2)
    with m = mu / (2 t1); H^{1,0} = span(dx_j + i dy_j).  The orientation
    deg(a1 a2 a3 a4) = -1 makes (2,0)-classes pair positively with their
    conjugates.
    """
    mu_s, t_s, q_s = symbols
    syms = tuple(symbols)

    def S(name):
        return RationalFunction.symbol(name, syms, 4)

    mu, t1, q = S(mu_s), S(t_s), S(q_s)
    i = RationalFunction.constant(zeta(4, 1), syms, 4)
    one = RationalFunction.constant(ONE, syms, 4)
    zero = RationalFunction.constant(Fraction(0), syms, 4)
    D = mu * (2 * q * t1 - one)
    dz1 = (one, zero, 2 * i * q * t1 / D, -2 * i * t1 / D)
    dz2 = (zero, one, -2 * i * t1 / D, 4 * i * t1 * t1 / D)
    A = _exterior_model(4, KUMMER_DEGREE2, -ONE, order=4, symbols=syms,
                        meta={"kind": "abelian-surface", "parameters": ",".join(syms)})
    h10 = [dz1, dz2]
    h01 = [tuple(_conj(x) for x in v) for v in h10]
    A.hodge = {k: tuple(v) for k, v in _hodge_from_h1(A, h10, h01).items()}
    A.meta["det"] = format_scalar(-(mu * mu) * (2 * t1 * q - one) / (4 * t1 * t1))
    return A


def torsion_points(rank: int = 4) -> list[str]:
    """Names of the 2-torsion points of a real torus of the given rank."""
    return ["".join(bits) for bits in itertools.product("01", repeat=rank)]


def _point_centers(names: Sequence[str], ambient: GradedAlgebraModel) -> list[Center]:
    pt = point_model()
    res = AlgebraMorphism({0: Matrix.identity(1)}, ring_verified=True)
    return [Center(name, pt, res, codim=ambient.top // 2) for name in names]


def _sign_lift(B: GradedAlgebraModel, nA: int) -> AlgebraMorphism:
    """Lift of -1 (on odd degrees of the ambient) that fixes exceptional classes."""
    order, inv = B._blowup_order
    mats = {}
    for k in B.by_degree:
        diag = []
        for i in B.basis(k):
            ambient = order[i] < nA
            diag.append(Fraction(-1) if ambient and k % 2 else ONE)
        mats[k] = Matrix.diagonal(diag)
    return AlgebraMorphism(mats)


def kummer_model(abelian: GradedAlgebraModel | None = None) -> GradedAlgebraModel:
    """Kummer surface of an abelian surface model: blow up the 16 two-torsion
    points, keep the (-1)-invariants, and use D = 2E for the nodal curves."""
    A = abelian if abelian is not None else abelian_surface_model()
    names = [f"E{p}" for p in torsion_points(4)]
    B = blowup_algebra(BlowupData(A, _point_centers(names, A), verify_restrictions=False,
                                  meta={"kind": "kummer-cover"}))
    lift = _sign_lift(B, len(A))
    lift.ring_verified = True
    K = invariants(B, lift, 2, factor=Fraction(1, 2), meta={**A.meta, "kind": "kummer"})
    K = rescale_basis(K, {n: 2 for n in names}, relabel={n: "D" + n[1:] for n in names})
    K.meta = {**A.meta, "kind": "kummer"}
    return K.materialize()


# ---------------------------------------------------------------------------
# the surfaces Y_g


HALF_POINTS = ["0", "a", "b", "ab"]  # 0, 1/2, i/2, (1+i)/2 on C/(Z + iZ)


def _tensor_action(T: GradedAlgebraModel, A: GradedAlgebraModel, B: GradedAlgebraModel,
                   fa: AlgebraMorphism, fb: AlgebraMorphism) -> AlgebraMorphism:
    where = T._where

    def image(n: int) -> Class:
        a, b = T._pairs[n]
        ia = fa.apply(A, A, {a: ONE})
        ib = fb.apply(B, B, {b: ONE})
        out: dict = {}
        for x, cx in ia.items():
            for y, cy in ib.items():
                _add_into(out, {where[(x, y)]: cx * cy})
        return out

    return AlgebraMorphism.from_images(T, T, image)


def _blowup_action(Bl: GradedAlgebraModel, nA: int, ambient_action: AlgebraMorphism, A: GradedAlgebraModel,
                   center_perm: dict[str, str]) -> AlgebraMorphism:
    order, inv = Bl._blowup_order

    def image(n: int) -> Class:
        old = order[n]
        if old < nA:
            img = ambient_action.apply(A, A, {old: ONE})
            return {inv[k]: v for k, v in img.items()}
        lab = Bl.labels[n]
        return {Bl.index[center_perm.get(lab, lab)]: ONE}

    return AlgebraMorphism.from_images(Bl, Bl, image)


def surface_Y(g: int) -> GradedAlgebraModel:
    """Y_g: the blow-up of C_g x E_i at the 8g+8 fixed points of iota x iota,
    divided by iota.  Exceptional curves appear as D = 2E (self-pairing -2).

    Actions: ``f`` from eta_g x id and ``fp`` from id x eta_i.  Classes:
    ``F1`` (point x E), ``F2`` (C x point) and ``ish`` = m(F1 + F2) - sum E
    with m = 2g + 3, fixed by both actions.
    """
    if g < 1:
        raise VarietyError("genus must be at least 1")
    C = hyperelliptic_model(g)
    E = elliptic_model("i")
    T = tensor(C, E)
    m = 2 * g + 1
    cpts = ["inf"] + [str(k) for k in range(m)]
    names = [f"E{p}.{e}" for p in cpts for e in HALF_POINTS]
    Bl = blowup_algebra(BlowupData(T, _point_centers(names, T), verify_restrictions=False))
    nA = len(T)
    lift = _sign_lift(Bl, nA)
    lift.ring_verified = True
    ident_C = AlgebraMorphism.identity(C)
    ident_E = AlgebraMorphism.identity(E)
    f_T = _tensor_action(T, C, E, C.actions["eta"], ident_E)
    fp_T = _tensor_action(T, C, E, ident_C, E.actions["eta"])
    # pullback along P_k -> P_(k+1) sends E over P_k to E over P_(k-1)
    f_perm = {f"E{k}.{e}": f"E{(k - 1) % m}.{e}" for k in range(m) for e in HALF_POINTS}
    fp_perm = {f"E{p}.a": f"E{p}.b" for p in cpts}
    fp_perm.update({f"E{p}.b": f"E{p}.a" for p in cpts})
    f_Bl = _blowup_action(Bl, nA, f_T, T, f_perm)
    fp_Bl = _blowup_action(Bl, nA, fp_T, T, fp_perm)
    Y = invariants(Bl, lift, 2, factor=Fraction(1, 2))
    f_Y = induce_action(Y, f_Bl)
    fp_Y = induce_action(Y, fp_Bl)
    Y.actions = {"f": f_Y, "fp": fp_Y}
    Y = rescale_basis(Y, {n: 2 for n in names}, relabel={n: "D" + n[1:] for n in names})
    mult = 2 * g + 3
    F1 = {Y.index["pt|1"]: ONE}
    F2 = {Y.index["1|pt"]: ONE}
    ish = {Y.index["pt|1"]: Fraction(mult), Y.index["1|pt"]: Fraction(mult)}
    for n in names:
        ish[Y.index["D" + n[1:]]] = Fraction(-1, 2)
    Y.classes = {"F1": F1, "F2": F2, "ish": ish}
    Y.meta = {"kind": "Y", "genus": str(g), "field_order": str(4 * m)}
    Y.order = 4 * m
    Y.materialize()
    for f in Y.actions.values():
        f.ring_verified = True
    Y._curve = C
    Y._elliptic = E
    return Y


def curve_product_class(Y: GradedAlgebraModel, c_vec: Sequence, e_vec: Sequence) -> Class:
    """The class of x (in H^1(C_g)) times y (in H^1(E_i)) on Y_g."""
    C, E = Y._curve, Y._elliptic
    out: dict = {}
    for a, x in zip(C.basis(1), c_vec):
        for b, y in zip(E.basis(1), e_vec):
            if x and y:
                _add_into(out, {Y.index[f"{C.labels[a]}|{E.labels[b]}"]: x * y})
    return out


# ---------------------------------------------------------------------------
# X_g, T_{g,n} and W


def _epsilon(Y: GradedAlgebraModel, y: int):
    return ONE if y == Y.unit else Fraction(0)


def _ambient_restrictions(Y: GradedAlgebraModel, A: GradedAlgebraModel, YY: GradedAlgebraModel,
                          P: GradedAlgebraModel, cap: int) -> list[AlgebraMorphism]:
    ish = Y.classes["ish"]
    f, fp = Y.actions["f"], Y.actions["fp"]
    u = Y.unit
    powers = {0: {u: ONE}}

    def ish_power(k: int) -> Class:
        if k not in powers:
            powers[k] = Y.cup(ish_power(k - 1), ish)
        return powers[k]

    def pieces(n: int):
        yy, p = A._pairs[n]
        a, b = YY._pairs[yy]
        return a, b, p

    def z1(n):
        a, b, p = pieces(n)
        return {a: ONE} if b == u and p == 0 else {}

    def z2(n):
        a, b, p = pieces(n)
        return dict(Y.product(a, b)) if p == 0 else {}

    def graph(action):
        def z(n):
            a, b, p = pieces(n)
            if p != 0:
                return {}
            return Y.cup({a: ONE}, action.apply(Y, Y, {b: ONE}))
        return z

    def z5(n):
        a, b, p = pieces(n)
        if a != u or 2 * p + Y.degrees[b] > Y.top:
            return {}
        return Y.cup({b: ONE}, ish_power(p))

    degrees = [k for k in sorted(A.by_degree) if k <= min(cap, Y.top)]
    return [AlgebraMorphism.from_images(A, Y, fn, degrees)
            for fn in (z1, z2, graph(f), graph(fp), z5)]


def _ambient(g: int, N: int, cap: int, Y: GradedAlgebraModel | None = None) -> GradedAlgebraModel:
    Y = Y if Y is not None else surface_Y(g)
    YY = tensor(Y, Y, hodge_max_degree=2)
    P = projective_space(N, hyperplane="h")
    A = tensor(YY, P, hodge_max_degree=2)
    A.classes = {"h": {A.index["1|h"]: ONE}}
    rs = _ambient_restrictions(Y, A, YY, P, cap)
    r = (A.top - Y.top) // 2
    centers = [Center(f"D{k + 1}", Y, res, codim=r) for k, res in enumerate(rs)]
    for c in centers:
        c.restriction.ring_verified = True
    X = blowup_algebra(BlowupData(A, centers, cap=cap, verify_restrictions=False,
                                  meta={"kind": "X", "genus": str(g), "N": str(N)}))
    X.meta = {"kind": "X", "genus": str(g), "N": str(N), "field_order": str(Y.order)}
    X.order = Y.order
    X._Y, X._YY, X._P, X._ambient = Y, YY, P, A
    X._restrictions = rs
    return X


def ambient_X(g: int, N: int = 5, cap: int = 8, *, Y: GradedAlgebraModel | None = None) -> GradedAlgebraModel:
    """Blow-up of Y x Y x P^N along five disjoint copies of Y: the slice
    Y x y0 x w0, the diagonal, the graphs of f and fp, and y0 x (graph of
    the embedding by ish).  Exposes D1..D5 and h.

    Restriction maps are pullbacks along the embeddings, so they are ring
    morphisms by construction; tests check them on samples.
    """
    if N < 3:
        raise VarietyError("N must be at least 3")
    if cap < 8:
        raise VarietyError("cap must be at least 8")
    return _ambient(g, N, cap, Y)


def tgn_model(g: int, n: int = 4, *, N: int = 5, X: GradedAlgebraModel | None = None) -> GradedAlgebraModel:
    """Degree <= 4 part of X_g, recorded as a variety of complex dimension n.

    Lefschetz identifies H^k(T) with H^k(X) for k < n; for n = 4 only H^2
    (and the image of H^4) is meaningful, which is all that is stored.
    """
    if n < 4:
        raise VarietyError("dimension n must be at least 4")
    if n > N + 4:
        raise VarietyError("dimension exceeds dim X = N + 4")
    if X is None:
        X = _ambient(g, N, 4)
    keep = [i for i in range(len(X)) if X.degrees[i] <= 4]
    if keep != list(range(len(keep))):
        raise VarietyError("ambient basis is not sorted by degree")

    def rule(i: int, j: int) -> dict:
        return X.product(i, j)

    m = 2 * g + 1
    T = GradedAlgebraModel([X.labels[i] for i in keep], [X.degrees[i] for i in keep], 2 * n, cap=4, rule=rule,
                           hodge={k: v for k, v in X.hodge.items() if sum(k) <= 2}, order=X.order,
                           classes=dict(X.classes),
                           meta={"kind": "T", "genus": str(g), "n": str(n), "field_order": str(4 * m),
                                 "K_generator": f"zeta{4 * m}+zeta{4 * m}^-1"})
    T._X = X
    return T


def w_model(g: int, *, Z: GradedAlgebraModel | None = None, cap: int = 12,
            T: GradedAlgebraModel | None = None) -> GradedAlgebraModel:
    """W = blow-up of Zhat along T_{g,4}, where Zhat is Z blown up at a point
    and T sits in the exceptional projective space.

    Exposes ``H`` (pullback of the first exceptional divisor) and ``D``.
    """
    Z = Z if Z is not None else projective_space(10, hyperplane="L")
    dimZ = Z.top // 2
    if dimZ < 10:
        raise VarietyError("dim Z must be at least 10")
    if "H" in Z.classes or "D" in Z.classes:
        raise VarietyError("Z must not already define classes H or D")
    T = T if T is not None else tgn_model(g, 4)
    b2T, b4Z = T.dim(2), Z.dim(4)
    if not b2T > b4Z + 4:
        raise VarietyError(f"b2(T) = {b2T} must exceed b4(Z) + 4 = {b4Z + 4}")
    pt = point_model()
    Zhat = blowup_algebra(BlowupData(
        Z, [Center("H", pt, AlgebraMorphism({0: Matrix.identity(1)}, ring_verified=True), codim=dimZ)],
        meta={"kind": "Zhat"}))
    omega = T.classes["h"]
    omega_powers = {0: {T.unit: ONE}}
    for k in range(1, 3):
        omega_powers[k] = T.cup(omega_powers[k - 1], omega)
    order, inv = Zhat._blowup_order
    nZ = len(Z)

    def image(n: int) -> Class:
        if Zhat.degrees[n] == 0:
            return {T.unit: ONE}
        if order[n] < nZ:
            return {}
        lab = Zhat.labels[n]
        k = 0 if lab == "H" else int(lab.split(".")[1][1:])
        if k + 1 > 2:
            return {}
        return {i: -c for i, c in omega_powers[k + 1].items()}

    res = AlgebraMorphism.from_images(Zhat, T, image, [d for d in sorted(Zhat.by_degree) if d <= T.cap])
    if not res.verify_ring(Zhat, T, max_degree=T.cap):
        raise VarietyError("restriction to T is not a ring morphism")
    r = dimZ - 4
    W = blowup_algebra(BlowupData(Zhat, [Center("D", T, res, codim=r)], cap=cap, verify_restrictions=False,
                                  meta={"kind": "W"}))
    W.meta = {"kind": "W", "genus": str(g), "dimZ": str(dimZ), "field_order": T.meta["field_order"]}
    W.order = T.order
    W._Zhat, W._T, W._Z = Zhat, T, Z
    return W


# ---------------------------------------------------------------------------
# Galois conjugates


def _sigma_record(A: GradedAlgebraModel, sigma: FieldAutomorphism) -> FieldAutomorphism:
    prev = A.meta.get("sigma")
    if prev is None:
        return sigma
    n, k = (int(x) for x in prev.split(":"))
    if n != sigma.n:
        raise VarietyError("conjugating with automorphisms of different orders")
    return sigma.compose(FieldAutomorphism(n, k))


def conjugate_model(A: GradedAlgebraModel, sigma: FieldAutomorphism) -> GradedAlgebraModel:
    """Model of the sigma-conjugate variety on the same lattice.

    Models built over Q with named actions keep their Hodge spans (the
    conjugate variety is isomorphic to the original) and replace ``f`` by
    f^k' with sigma(zeta_(2g+1)) = zeta_(2g+1)^k' and ``fp`` by fp^e with
    sigma(i) = i^e.  Parametric models without actions get their Hodge
    spans conjugated entry-wise.
    """
    if sigma.n % max(A.order, 1):
        raise VarietyError(f"automorphism of order {sigma.n} does not act on Q(zeta_{A.order})")
    total = _sigma_record(A, sigma)
    meta = {**A.meta, "sigma": f"{total.n}:{total.k}"}
    if total.k % sigma.n == 1 and not total.symbol_map:
        meta.pop("sigma")
    new = A.with_updates(meta=meta)
    named = {"f", "fp"} & set(A.actions)
    if named:
        g = int(A.meta["genus"])
        m = 2 * g + 1
        actions = dict(A.actions)
        if "f" in actions:
            actions["f"] = A.actions["f"].power(sigma.k % m)
        if "fp" in actions:
            actions["fp"] = A.actions["fp"].power(sigma.k % 4)
        new.actions = actions
    else:
        new.hodge = {key: tuple(tuple(apply_automorphism(x, sigma) for x in v) for v in vecs)
                     for key, vecs in A.hodge.items()}
    return new
