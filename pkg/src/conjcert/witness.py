"""Obstruction witnesses and their certificates.

Each ``certify_*`` function rebuilds its models from a small parameter set,
computes the evidence, and returns a :class:`Certificate`.  Certificates are
flat ``key=value`` records; :func:`verify_certificate` recomputes one from its
parameters and compares the two texts line by line.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .algebra import (
    AlgebraError,
    Class,
    FieldSpec,
    GradedAlgebraModel,
    InconclusiveError,
    degree_pairing,
    k_rational_dim,
    k_rational_lower_bound,
    parse_monomial,
    tensor,
)
from .blowup import exceptional_push, pullback_class, projective_space
from .field import (
    Cyclotomic,
    FieldAutomorphism,
    RationalFunction,
    format_scalar,
    numeric_eval,
    zeta,
)
from .linalg import (
    Matrix,
    finite_order_spectrum,
    intersect_spans,
    joint_eigenspace,
    kernel,
    rank,
    same_span,
    solve,
    span_rank,
)
from .modelio import model_digest
from .varieties import (
    ambient_X,
    conjugate_model,
    curve_product_class,
    elliptic_model,
    kummer_model,
    surface_Y,
    tgn_model,
    w_model,
)

__all__ = [
    "WitnessError",
    "Certificate",
    "PreconditionError",
    "case_models",
    "certify_case",
    "kernel_structure",
    "KernelStructure",
    "g_endomorphism",
    "predicted_g",
    "h11_evidence",
    "certify_h11",
    "certify_h2",
    "select_g",
    "w_accounting",
    "certify_w",
    "certify",
    "verify_certificate",
    "dumps_certificate",
    "loads_certificate",
    "summary_lines",
]

ONE = Fraction(1)


class WitnessError(AlgebraError):
    pass


class PreconditionError(WitnessError):
    """A declared precondition does not hold; no verdict is produced."""


# ---------------------------------------------------------------------------
# certificates

HEADER = "OBSTRUCTION-CERTIFICATE 1"


@dataclass
class Certificate:
    scenario: str
    claim: str
    verdict: str
    reduction: str
    params: dict[str, str] = field(default_factory=dict)
    evidence: dict[str, str] = field(default_factory=dict)
    assumptions: list[str] = field(default_factory=list)
    models: dict[str, str] = field(default_factory=dict)

    @property
    def exit_code(self) -> int:
        return 0 if self.verdict in ("obstructed", "verified") else 2

    def items(self) -> list[tuple[str, str]]:
        out = [("scenario", self.scenario), ("claim", self.claim), ("verdict", self.verdict),
               ("reduction", self.reduction)]
        out += [(f"param.{k}", v) for k, v in self.params.items()]
        out += [(f"evidence.{k}", v) for k, v in self.evidence.items()]
        out += [(f"assumption.{i}", a) for i, a in enumerate(self.assumptions)]
        out += [(f"model.{k}", v) for k, v in self.models.items()]
        return out


def _check_value(key: str, value: str) -> None:
    if "\n" in value or "\n" in key or "=" in key:
        raise WitnessError(f"certificate entry {key!r} cannot be serialized")


def summary_lines(cert: Certificate) -> list[str]:
    """The flat key=value summary (one line per entry)."""
    out = []
    for k, v in cert.items():
        _check_value(k, v)
        out.append(f"{k}={v}")
    return out


def dumps_certificate(cert: Certificate) -> str:
    return "\n".join([HEADER, *summary_lines(cert), "END"]) + "\n"


def loads_certificate(text: str) -> Certificate:
    lines = text.splitlines()
    if not lines or lines[0] != HEADER:
        raise WitnessError("not a certificate file")
    if lines[-1] != "END":
        raise WitnessError("certificate without END marker")
    top: dict[str, str] = {}
    cert = Certificate("", "", "", "")
    for line in lines[1:-1]:
        key, sep, val = line.partition("=")
        if not sep:
            raise WitnessError(f"malformed certificate line: {line}")
        head, dot, rest = key.partition(".")
        if dot and head == "param":
            cert.params[rest] = val
        elif dot and head == "evidence":
            cert.evidence[rest] = val
        elif dot and head == "assumption":
            if int(rest) != len(cert.assumptions):
                raise WitnessError("assumptions out of order")
            cert.assumptions.append(val)
        elif dot and head == "model":
            cert.models[rest] = val
        elif key in ("scenario", "claim", "verdict", "reduction"):
            top[key] = val
        else:
            raise WitnessError(f"unknown certificate key {key}")
    for key in ("scenario", "claim", "verdict", "reduction"):
        if key not in top:
            raise WitnessError(f"certificate lacks {key}")
        setattr(cert, key, top[key])
    return cert


def verify_certificate(cert: Certificate) -> tuple[bool, list[str]]:
    """Recompute from the recorded parameters; return (ok, differing lines)."""
    params = dict(cert.params)
    fresh = certify(cert.scenario, **params)
    old, new = summary_lines(cert), summary_lines(fresh)
    diffs = [f"- {a}\n+ {b}" for a, b in zip(old, new) if a != b]
    if len(old) != len(new):
        diffs.append(f"entry count {len(old)} != {len(new)}")
    return not diffs, diffs


def _digest(A: GradedAlgebraModel) -> str:
    return "sha256:" + model_digest(A)


# ---------------------------------------------------------------------------
# K-rational (1,1) dimension scenarios

DIM_REDUCTION = ("a weak isomorphism respecting Hodge and K-structures preserves the K-dimension "
                 "of K-rational (p,p) classes")


def _rf(name: str, symbols: Sequence[str], n: int = 4) -> RationalFunction:
    return RationalFunction.symbol(name, symbols, n)


def _spec(in_k=(), families=(), aliases=None, relations=(), conjugation=(), notes=()) -> FieldSpec:
    return FieldSpec(4, (1,), [parse_monomial(m) for m in in_k],
                     [[parse_monomial(m) for m in fam] for fam in families], dict(aliases or {}),
                     [(t, [(parse_monomial(m), k) for m, k in terms]) for t, terms in relations],
                     tuple(conjugation), list(notes))


def elliptic_product(a_in_k_ratio: bool, a_in_k_product: bool) -> tuple[GradedAlgebraModel, FieldSpec]:
    """E_{ia} x E_{ib} with a/b and ab declared in K or independent over K."""
    S = ("a", "b")
    X = tensor(elliptic_model(zeta(4) * _rf("a", S)), elliptic_model(zeta(4) * _rf("b", S)))
    in_k, fams = [], []
    (in_k if a_in_k_ratio else fams).append("a*b^-1")
    (in_k if a_in_k_product else fams).append("a*b")
    return X, _spec(in_k, [[m] for m in fams if m not in in_k])


def case_models(case: int):
    """(X, K_X, X^sigma, K_sigma, exact_for_X) for the four scenarios."""
    if case == 1:
        S = ("lam",)
        X = tensor(elliptic_model(zeta(4) * _rf("lam", S)), elliptic_model("i", with_actions=False))
        S2 = ("mu",)
        Xs = tensor(elliptic_model(zeta(4) * _rf("mu", S2)), elliptic_model("i", with_actions=False))
        return X, _spec(["lam"]), Xs, _spec(families=[["mu"]]), True
    if case == 2:
        S = ("lam", "mu")
        lam, mu = _rf("lam", S), _rf("mu", S)
        X = tensor(elliptic_model(zeta(4) * lam * mu), elliptic_model(zeta(4) * mu))
        S2 = ("lamp", "mup")
        lp, mp = _rf("lamp", S2), _rf("mup", S2)
        Xs = tensor(elliptic_model(zeta(4) * lp * mp), elliptic_model(zeta(4) * mp))
        return (X, _spec(["lam"], [["lam*mu^2"]]), Xs, _spec(families=[["lamp"], ["lamp*mup^2"]]), True)
    if case == 3:
        S = ("tau", "taubar", "taup", "taupbar")
        conj = (("tau", "taubar"), ("taubar", "tau"), ("taup", "taupbar"), ("taupbar", "taup"))
        t, tb, tp, tpb = (_rf(n, S) for n in S)
        X = tensor(elliptic_model(t, tau_bar=tb), elliptic_model(tp, tau_bar=tpb))
        S2 = ("mu", "mup")
        Xs = tensor(elliptic_model(zeta(4) * _rf("mu", S2)), elliptic_model(zeta(4) * _rf("mup", S2)))
        return (X, _spec(["tau", "taupbar"], conjugation=conj), Xs,
                _spec(families=[["mu*mup"], ["mu*mup^-1"]]), False)
    if case == 4:
        Km = kummer_model()
        S = Km.symbols
        mu, t1, q = (_rf(n, S) for n in S)
        det = -mu ** 2 * (2 * t1 * q - 1) / (4 * t1 ** 2)
        k18 = _spec(families=[["t1"], ["det"]], aliases={"det": det},
                    relations=[("q", [("t1", "k1"), ("1", "k0")])])
        k17 = _spec(families=[["t1", "q"], ["det"]], aliases={"det": det})
        return Km, k18, Km, k17, True
    raise PreconditionError(f"unknown case {case}")


def certify_case(case: int | str) -> Certificate:
    case = int(case)
    X, K, Xs, Ks, exact = case_models(case)
    try:
        dX = k_rational_dim(X, 1, K) if exact else k_rational_lower_bound(X, 1, K)
        dS = k_rational_dim(Xs, 1, Ks)
    except InconclusiveError as exc:
        raise PreconditionError(str(exc)) from exc
    obstructed = dX > dS
    assumptions = [f"X: {a}" for a in K.ledger()] + [f"X^sigma: {a}" for a in Ks.ledger()]
    return Certificate(
        scenario=f"case{case}", claim="dim-mismatch-Hpp", verdict="obstructed" if obstructed else "none",
        reduction=DIM_REDUCTION, params={"case": str(case)},
        evidence={"p": "1", "dim_X": str(dX), "dim_X_bound": "exact" if exact else "lower",
                  "dim_X_sigma": str(dS), "dim_X_sigma_bound": "exact"},
        assumptions=assumptions, models={"X": _digest(X), "X_sigma": _digest(Xs)})


# ---------------------------------------------------------------------------
# kernels of D_i on H^2(Y x Y) inside X


def _yy_basis(X: GradedAlgebraModel) -> tuple[list[Class], list[Class]]:
    """X-classes beta (x) 1 and 1 (x) beta for beta over the H^2(Y) basis."""
    Y, YY, A, P = X._Y, X._YY, X._ambient, X._P
    u, pu = Y.unit, P.unit

    def lift(a: int, b: int) -> Class:
        return pullback_class(X, {A._where[(YY._where[(a, b)], pu)]: ONE})

    basis = Y.basis(2)
    return [lift(a, u) for a in basis], [lift(u, a) for a in basis]


def _cup_matrix(X: GradedAlgebraModel, c: Class, classes: Sequence[Class]) -> Matrix:
    k = X.degree_of(c) + 2
    cols = [X.vector(X.cup(c, x), k) for x in classes]
    return Matrix.from_columns(cols, X.dim(k))


def _graph(M: Matrix | None, b: int, sign=-1, left_zero=False, right_zero=False) -> list[tuple]:
    """Basis of {(M beta, sign*beta)} in H^2(Y) (+) H^2(Y)."""
    out = []
    for n in range(b):
        e = [Fraction(0)] * b
        e[n] = ONE
        if left_zero:
            out.append(tuple([Fraction(0)] * b + e))
        elif right_zero:
            out.append(tuple(e + [Fraction(0)] * b))
        else:
            out.append(tuple(list(M.apply(e) if M is not None else e) + [sign * x for x in e]))
    return out


@dataclass
class KernelStructure:
    genus: int
    b2: int
    kernels: list[list[tuple]]
    dims: list[int]
    matches_graph: list[bool]
    triple_dim: int
    f1_meets: dict[int, int]
    all_but_one: dict[int, int]
    direct_sum_ranks: list[int]
    direct_sum_total: int
    h_injective: bool
    alpha_kernel_dim: int
    h_cup_d_zero: list[bool]
    d_cross_zero: bool
    X: GradedAlgebraModel = field(repr=False)

    @property
    def ok(self) -> bool:
        return (all(d == self.b2 for d in self.dims) and all(self.matches_graph) and self.triple_dim > 0
                and not any(self.f1_meets.values()) and not any(self.all_but_one.values())
                and self.direct_sum_total == sum(self.direct_sum_ranks) and self.h_injective
                and self.alpha_kernel_dim < self.b2 and self.h_cup_d_zero == [True] * 4 + [False]
                and self.d_cross_zero)


def kernel_structure(g: int = 1, N: int = 5, *, X: GradedAlgebraModel | None = None,
                     seed: int = 0) -> KernelStructure:
    """Kernels F_i of x -> D_i x on H^2(Y x Y) and the surrounding rank facts."""
    X = X if X is not None else ambient_X(g, N)
    Y = X._Y
    b = Y.dim(2)
    left, right = _yy_basis(X)
    classes = left + right
    dim = 2 * b
    D = [{X.index[f"D{i}"]: ONE} for i in range(1, 6)]
    kernels = [kernel(_cup_matrix(X, d, classes)) for d in D]
    f2 = Y.actions["f"].matrix(2)
    fp2 = Y.actions["fp"].matrix(2)
    predicted = [_graph(None, b, left_zero=True), _graph(None, b), _graph(f2, b), _graph(fp2, b),
                 _graph(None, b, right_zero=True)]
    matches = [same_span(K, P, dim) for K, P in zip(kernels, predicted)]
    triple = intersect_spans(intersect_spans(kernels[1], kernels[2], dim), kernels[3], dim)
    f1_meets = {i + 1: len(intersect_spans(kernels[0], kernels[i], dim)) for i in (1, 2, 3)}
    all_but_one = {}
    for k in range(5):
        acc = None
        for j in range(5):
            if j == k:
                continue
            acc = kernels[j] if acc is None else intersect_spans(acc, kernels[j], dim)
        all_but_one[k + 1] = len(acc)
    # images of cup products on H^2(Y x Y) -> H^4(X)
    rng = random.Random(seed)
    alpha: Class = {}
    for x in classes:
        c = Fraction(rng.randint(-3, 3))
        if c:
            for i, v in x.items():
                alpha[i] = alpha.get(i, 0) + c * v
    h = pullback_class(X, X._ambient.classes["h"])
    mats = [_cup_matrix(X, alpha, classes), _cup_matrix(X, h, classes)] + [_cup_matrix(X, d, classes) for d in D]
    ranks = [rank(M) for M in mats]
    cols = [c for M in mats for c in M.columns()]
    total = span_rank(cols, X.dim(4))
    h_cup_zero = [not X.cup(h, d) for d in D]
    cross = all(not X.cup(D[j], D[k]) for j in range(5) for k in range(5) if j != k)
    return KernelStructure(g, b, kernels, [len(K) for K in kernels], matches, len(triple), f1_meets,
                           all_but_one, ranks, total, ranks[1] == dim, dim - ranks[0], h_cup_zero, cross, X)


def _component(v: Sequence, first: Sequence[Sequence], second: Sequence[Sequence]) -> tuple:
    """The part of v in span(first) for v in span(first) (+) span(second)."""
    n = len(v)
    M = Matrix.from_columns([*first, *second], n)
    c = solve(M, v)
    if c is None:
        raise WitnessError("vector outside the claimed direct sum")
    out = [Fraction(0)] * n
    for coef, u in zip(c[:len(first)], first):
        for i, x in enumerate(u):
            out[i] = out[i] + coef * x
    return tuple(out)


def g_endomorphism(ks: KernelStructure, j: int, k: int) -> Matrix:
    """Matrix on H^2(Y) of beta -> F1-part of the F5-part of (0, beta),
    taken along F5 (+) F_j and then F1 (+) F_k."""
    b = ks.b2
    F = ks.kernels
    cols = []
    for n in range(b):
        v = [Fraction(0)] * (2 * b)
        v[b + n] = ONE
        p5 = _component(v, F[4], F[j - 1])
        p1 = _component(p5, F[0], F[k - 1])
        if any(p1[:b]):
            raise WitnessError("F1 component has a nonzero left half")
        cols.append(p1[b:])
    return Matrix.from_columns(cols, b)


def predicted_g(Y: GradedAlgebraModel, j: int, k: int) -> Matrix:
    """P_k^{-1} P_j with P_2 = id, P_3 = f^*, P_4 = fp^*."""
    b = Y.dim(2)
    P = {2: Matrix.identity(b), 3: Y.actions["f"].matrix(2), 4: Y.actions["fp"].matrix(2)}
    from .linalg import inverse
    return inverse(P[k]) @ P[j]


# ---------------------------------------------------------------------------
# eigenvalue witnesses on Y_g

EIGEN_REDUCTION = ("a weak isomorphism intertwines f, fp with their conjugates and preserves "
                   "joint eigenvalues")
CONVENTION = ("exceptional classes normalized to self-pairing -2 and eigenvalue multiplicities are "
              "convention-dependent derived data; the signs used are convention-independent")
SIGN_REDUCTION = ("a weak isomorphism preserving ish scales the degree pairing by a positive square, "
                  "so the sign of deg(x xbar) on the joint eigenline is preserved")


def _eigen_exponent(M: Matrix, x: Sequence, n: int) -> int:
    """The k with M x = zeta_n^k x."""
    y = M.apply(x)
    for k in range(n):
        z = zeta(n, k)
        if all(a == z * c if c else not a for a, c in zip(y, x)):
            return k
    raise WitnessError("vector is not an eigenvector with a root of unity eigenvalue")


def _conj_vec(v: Sequence) -> tuple:
    return tuple(x.conjugate() if isinstance(x, Cyclotomic) else x for x in v)


@dataclass
class EigenData:
    g: int
    sigma_k: int
    order: int
    moves_zeta: bool
    moves_i: bool
    f_exponent: int
    fp_exponent: int
    dim_original_h11: int
    dim_twisted_h11: int
    dim_twisted_h2: int
    twisted_bidegree: str
    x_self: object
    y_self: object
    ish_square: Fraction
    spectrum_f: str
    spectrum_fp: str
    models: dict[str, str]


def _real_sign(x) -> int:
    v = numeric_eval(x, precision=200)
    re = complex(v.value).real if not isinstance(v.value, (int, float)) else float(v.value)
    if abs(re) <= float(v.error):
        raise WitnessError("sign could not be certified")
    return 1 if re > 0 else -1


def _spectrum_text(spec: dict[int, int]) -> str:
    return ",".join(f"{k}:{v}" for k, v in sorted(spec.items()))


def h11_evidence(g: int, sigma_k: int) -> EigenData:
    """Joint eigenspaces for x = omega (x) conj(omega') on Y_g and Y_g^sigma.

    omega spans the zeta_(2g+1) eigenline of H^{1,0}(C_g); omega' = (1, i)
    spans H^{1,0}(E_i)."""
    if g < 1:
        raise PreconditionError("genus must be at least 1")
    Y = surface_Y(g)
    n = Y.order
    if math.gcd(sigma_k, n) != 1:
        raise PreconditionError(f"sigma exponent {sigma_k} is not a unit modulo {n}")
    sigma = FieldAutomorphism(n, sigma_k % n)
    Ys = conjugate_model(Y, sigma)
    m = 2 * g + 1
    C, E = Y._curve, Y._elliptic
    omega = C.hodge[(1, 0)][0]
    omega_p = E.hodge[(1, 0)][0]
    x = curve_product_class(Y, omega, _conj_vec(omega_p))
    xv = Y.vector(x, 2)
    f2, fp2 = Y.actions["f"].matrix(2), Y.actions["fp"].matrix(2)
    ef, efp = _eigen_exponent(f2, xv, n), _eigen_exponent(fp2, xv, n)
    lam = (zeta(n, ef), zeta(n, efp))
    b = Y.dim(2)
    h11 = list(Y.hodge[(1, 1)])
    orig = intersect_spans(joint_eigenspace([f2, fp2], lam), h11, b)
    fs2, fps2 = Ys.actions["f"].matrix(2), Ys.actions["fp"].matrix(2)
    tw = joint_eigenspace([fs2, fps2], lam)
    tw11 = intersect_spans(tw, list(Ys.hodge[(1, 1)]), b)
    bideg = "-"
    if len(tw) == 1:
        for pq in ((2, 0), (1, 1), (0, 2)):
            if same_span(tw, intersect_spans(tw, list(Ys.hodge[pq]), b), b):
                bideg = f"{pq[0]},{pq[1]}"
    xbar = {i: (c.conjugate() if isinstance(c, Cyclotomic) else c) for i, c in x.items()}
    x_self = degree_pairing(Y, x, xbar)
    y_self = None
    if len(tw) == 1:
        y = Ys.from_vector(2, tw[0])
        ybar = {i: (c.conjugate() if isinstance(c, Cyclotomic) else c) for i, c in y.items()}
        y_self = degree_pairing(Ys, y, ybar)
    ish = Y.classes["ish"]
    ish2 = degree_pairing(Y, ish, ish)
    moves_zeta = sigma_k % m != 1
    moves_i = sigma_k % 4 != 1
    return EigenData(g, sigma_k % n, n, moves_zeta, moves_i, ef, efp, len(orig), len(tw11), len(tw), bideg,
                     x_self, y_self, Fraction(ish2) if not isinstance(ish2, Cyclotomic) else ish2.to_fraction(),
                     _spectrum_text(finite_order_spectrum(f2, n)), _spectrum_text(finite_order_spectrum(fp2, n)),
                     {"Y": _digest(Y), "Y_sigma": _digest(Ys)})


def _eigen_params(g, sigma_k) -> dict[str, str]:
    return {"g": str(int(g)), "sigma_k": str(int(sigma_k))}


def _precondition(e: EigenData) -> str:
    if not e.moves_zeta and not e.moves_i:
        return "trivial"
    if e.moves_zeta and e.moves_i:
        return "both"
    return "one"


def certify_h11(g: int | str, sigma_k: int | str) -> Certificate:
    g, sigma_k = int(g), int(sigma_k)
    e = h11_evidence(g, sigma_k)
    pre = _precondition(e)
    obstructed = pre == "one" and e.dim_original_h11 >= 1 and e.dim_twisted_h11 == 0
    assumptions = ["the weak isomorphism maps H^{1,1} onto H^{1,1}", CONVENTION,
                   "sigma moves exactly one of zeta_(2g+1) and i (verdict none otherwise)"]
    return Certificate(
        scenario="h11", claim="joint-eigenvalue-absence", verdict="obstructed" if obstructed else "none",
        reduction=EIGEN_REDUCTION, params=_eigen_params(g, sigma_k),
        evidence={"field_order": str(e.order), "sigma_exponent": str(e.sigma_k),
                  "sigma_moves_zeta": str(e.moves_zeta).lower(), "sigma_moves_i": str(e.moves_i).lower(),
                  "precondition": pre, "eigen_f_exponent": str(e.f_exponent),
                  "eigen_fp_exponent": str(e.fp_exponent), "dim_joint_h11": str(e.dim_original_h11),
                  "dim_twisted_h11": str(e.dim_twisted_h11), "spectrum_f_h2": e.spectrum_f,
                  "spectrum_fp_h2": e.spectrum_fp},
        assumptions=assumptions, models=e.models)


def certify_h2(g: int | str, sigma_k: int | str) -> Certificate:
    g, sigma_k = int(g), int(sigma_k)
    e = h11_evidence(g, sigma_k)
    pre = _precondition(e)
    sx = _real_sign(e.x_self)
    sy = _real_sign(e.y_self) if e.y_self is not None else 0
    si = 1 if e.ish_square > 0 else -1
    obstructed = (pre == "one" and e.dim_twisted_h2 == 1 and e.dim_original_h11 >= 1
                  and sx * sy < 0 and si > 0)
    assumptions = ["the weak isomorphism maps ish to a positive multiple of ish", CONVENTION,
                   "sigma moves exactly one of zeta_(2g+1) and i (verdict none otherwise)"]
    return Certificate(
        scenario="h2", claim="sign-contradiction", verdict="obstructed" if obstructed else "none",
        reduction=SIGN_REDUCTION, params=_eigen_params(g, sigma_k),
        evidence={"field_order": str(e.order), "sigma_exponent": str(e.sigma_k), "precondition": pre,
                  "eigen_f_exponent": str(e.f_exponent), "eigen_fp_exponent": str(e.fp_exponent),
                  "dim_joint_h11": str(e.dim_original_h11), "dim_twisted_h2": str(e.dim_twisted_h2),
                  "twisted_bidegree": e.twisted_bidegree,
                  "deg_x_xbar": format_scalar(e.x_self), "sign_x_xbar": str(sx),
                  "deg_y_ybar": format_scalar(e.y_self) if e.y_self is not None else "-",
                  "sign_y_ybar": str(sy), "deg_ish_squared": str(e.ish_square)},
        assumptions=assumptions, models=e.models)


# ---------------------------------------------------------------------------
# W accounting


def select_g(b4: int) -> int:
    """Smallest g >= 1 with b2(T_{g,4}) = 24g + 26 > b4 + 4."""
    if b4 < 0:
        raise PreconditionError("b4 must be non-negative")
    g = 1
    while 24 * g + 26 <= b4 + 4:
        g += 1
    return g


@dataclass
class WAccounting:
    g: int
    b2T: int
    b4Z: int
    b4W: int
    b2W: int
    b2Z: int
    h5d_zero: bool
    h6_nonzero: bool
    d_square: bool
    z_classes_vanish: bool
    hd_nonzero: bool
    chain_pairs: int
    chain_failures: int
    W: GradedAlgebraModel = field(repr=False)

    @property
    def betti_identity(self) -> bool:
        return self.b4W == self.b4Z + self.b2T + 2

    @property
    def ok(self) -> bool:
        return (self.betti_identity and self.b2W == self.b2Z + 2 and self.h5d_zero and self.h6_nonzero
                and self.d_square and self.z_classes_vanish and self.hd_nonzero and self.chain_failures == 0)


def _random_class(rng: random.Random, A: GradedAlgebraModel, k: int, terms: int = 3) -> Class:
    basis = A.basis(k)
    out: Class = {}
    for i in rng.sample(basis, min(terms, len(basis))):
        c = rng.choice([-3, -2, -1, 1, 2, 3])
        out[i] = Fraction(c)
    return out


def chain_values(W: GradedAlgebraModel, alpha: Class, beta: Class) -> list[Class]:
    """Five routes to D^3 j_*(alpha beta)."""
    T = W._T
    D = {W.index["D"]: ONE}

    def j(z: Class, power: int = 0) -> Class:
        return exceptional_push(W, 0, power, z)

    ab = T.cup(alpha, beta)
    D2 = W.cup(D, D)
    v1 = W.cup(W.cup(D2, D), j(ab))
    v2 = W.cup(W.cup(D2, j({T.unit: ONE})), j(ab))
    v3 = W.cup(W.cup(D, j(alpha)), W.cup(D, j(beta)))
    v4 = W.cup(W.cup(D2, j(alpha)), j(beta))
    v5 = {i: -c for i, c in j(ab, 3).items()}
    return [v1, v2, v3, v4, v5]


def w_accounting(g: int | None = None, *, Z: GradedAlgebraModel | None = None, n: int = 4,
                 pairs: int = 20, seed: int = 0) -> WAccounting:
    Z = Z if Z is not None else projective_space(10, hyperplane="L")
    b4Z = Z.dim(4)
    g = select_g(b4Z) if g is None else g
    T = tgn_model(g, n)
    W = w_model(g, Z=Z, T=T)
    H = {W.index["H"]: ONE}
    D = {W.index["D"]: ONE}
    h5d = W.cup(W.power(H, 5), D)
    h6 = W.power(H, 6)
    d2 = W.cup(D, D)
    jh = exceptional_push(W, 0, 1, {T.unit: ONE})
    d_square = d2 == {i: -c for i, c in jh.items()} and bool(d2)
    vanish = True
    for k in range(2, min(Z.top, 6) + 1, 2):
        for z in Z.basis(k):
            eta = pullback_class(W, pullback_class(W._Zhat, {z: ONE}))
            if W.cup(eta, H) or W.cup(eta, D):
                vanish = False
            for t in T.basis(0) + T.basis(2):
                if W.degree_of(eta) + T.degrees[t] + 2 <= W.cap and W.cup(eta, exceptional_push(W, 0, 0, {t: ONE})):
                    vanish = False
    rng = random.Random(seed)
    failures = 0
    for _ in range(pairs):
        da, db = rng.choice([(0, 2), (2, 0), (2, 2), (0, 0)])
        alpha = _random_class(rng, T, da)
        beta = _random_class(rng, T, db)
        vals = chain_values(W, alpha, beta)
        if any(v != vals[0] for v in vals[1:]):
            failures += 1
    return WAccounting(g, T.dim(2), b4Z, W.dim(4), W.dim(2), Z.dim(2), not h5d, bool(h6), d_square, vanish,
                       bool(W.cup(H, D)), pairs, failures, W)


W_REDUCTION = ("the exceptional divisor over T carries the Betti and product data that a "
               "Hodge-compatible weak isomorphism must preserve")


def certify_w(g: int | str | None = None, z: str | None = None, n: int | str = 4) -> Certificate:
    from .modelio import load_model
    Z = load_model(z) if z else None
    n = int(n)
    acc = w_accounting(None if g is None else int(g), Z=Z, n=n)
    params = {"n": str(n)}
    if g is not None:
        params["g"] = str(acc.g)
    if z:
        params["z"] = z
    models = {"T": _digest(acc.W._T)}
    if Z is not None:
        models["Z"] = _digest(Z)
    return Certificate(
        scenario="w", claim="betti-accounting", verdict="verified" if acc.ok else "failed",
        reduction=W_REDUCTION, params=params,
        evidence={"genus": str(acc.g), "b2_T": str(acc.b2T), "b4_Z": str(acc.b4Z), "b4_W": str(acc.b4W),
                  "betti_identity": str(acc.betti_identity).lower(), "b2_W": str(acc.b2W),
                  "H5_D_zero": str(acc.h5d_zero).lower(), "H6_nonzero": str(acc.h6_nonzero).lower(),
                  "D2_equals_minus_j_h": str(acc.d_square).lower(),
                  "Z_classes_vanish_on_H_D": str(acc.z_classes_vanish).lower(),
                  "H_D_nonzero": str(acc.hd_nonzero).lower(), "chain_pairs": str(acc.chain_pairs),
                  "chain_failures": str(acc.chain_failures)},
        assumptions=["T is stored in degrees <= 4; W products needing higher T degrees raise",
                     "g chosen as the least genus with 24g+26 > b4(Z)+4" if g is None else "g given"],
        models=models)


# ---------------------------------------------------------------------------
# dispatch

_KINDS: dict[str, Callable[..., Certificate]] = {
    "case1": lambda **kw: certify_case(1),
    "case2": lambda **kw: certify_case(2),
    "case3": lambda **kw: certify_case(3),
    "case4": lambda **kw: certify_case(4),
    "h11": lambda g=1, sigma_k=5, **kw: certify_h11(g, sigma_k),
    "h2": lambda g=1, sigma_k=5, **kw: certify_h2(g, sigma_k),
    "w": lambda g=None, z=None, n=4, **kw: certify_w(g, z, n),
}


def certify(kind: str, **params) -> Certificate:
    if kind.startswith("case") and kind[4:].isdigit():
        return certify_case(int(kind[4:]))
    if kind not in _KINDS:
        raise PreconditionError(f"unknown certificate kind {kind}")
    params = {k: v for k, v in params.items() if v is not None}
    return _KINDS[kind](**params)
