"""Command-line entry point ``conjcert``.

Output is ``key=value`` lines.  Exit codes: 0 certificate obstructed or
verified (or plain success), 2 verdict none, 3 precondition or declaration
error, 4 internal failure.
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction
from typing import Sequence

from . import modular
from .algebra import FieldSpec, InconclusiveError, InvariantError, k_rational_dim, k_rational_lower_bound
from .field import RationalFunction, zeta
from .modelio import dumps_model, load_model, model_digest
from .witness import (
    PreconditionError,
    WitnessError,
    certify,
    dumps_certificate,
    loads_certificate,
    select_g,
    summary_lines,
    verify_certificate,
)

EXIT_OK, EXIT_NONE, EXIT_PRECONDITION, EXIT_INTERNAL = 0, 2, 3, 4


def _emit(pairs, out=None) -> None:
    out = out or sys.stdout
    for k, v in pairs:
        print(f"{k}={v}", file=out)


def _fmt_complex(z: complex) -> tuple[str, str]:
    return repr(z.real), repr(z.imag)


# ---------------------------------------------------------------------------
# build


def _build(args):
    from . import varieties as V
    kind = args.kind
    if kind == "elliptic":
        syms = [s for s in (args.tau_symbols or "").split(",") if s]
        if not syms:
            A = V.elliptic_model("i")
        elif len(syms) == 1:
            A = V.elliptic_model(zeta(4) * RationalFunction.symbol(syms[0], tuple(syms), 4))
        elif len(syms) == 2:
            from .algebra import tensor
            S = tuple(syms)
            A = tensor(V.elliptic_model(zeta(4) * RationalFunction.symbol(S[0], S, 4)),
                       V.elliptic_model(zeta(4) * RationalFunction.symbol(S[1], S, 4)))
        else:
            raise PreconditionError("at most two period symbols")
    elif kind == "hyperelliptic":
        A = V.hyperelliptic_model(args.g)
    elif kind == "kummer":
        A = V.kummer_model()
    elif kind == "surface-y":
        A = V.surface_Y(args.g)
    elif kind == "ambient-x":
        A = V.ambient_X(args.g, args.n if args.n is not None else 5, args.cap or 8)
    elif kind == "t":
        A = V.tgn_model(args.g, args.n if args.n is not None else 4)
    elif kind == "w":
        Z = load_model(args.z) if args.z else None
        A = V.w_model(args.g, Z=Z, cap=args.cap or 6)
    else:  # pragma: no cover - argparse restricts choices
        raise PreconditionError(kind)
    text = dumps_model(A)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        betti = ",".join(f"{k}:{v}" for k, v in sorted(A.betti().items()))
        _emit([("model", kind), ("file", args.out), ("basis", len(A)), ("cap", A.cap), ("betti", betti),
               ("digest", "sha256:" + model_digest(A))])
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _dim_hpp(args):
    A = load_model(args.model)
    with open(args.fieldspec, encoding="utf-8") as fh:
        K = FieldSpec.loads(fh.read())
    if args.lower_bound:
        d, kind = k_rational_lower_bound(A, args.p, K), "lower"
    else:
        d, kind = k_rational_dim(A, args.p, K), "exact"
    _emit([("p", args.p), ("dim", d), ("bound", kind)] + [(f"assumption.{i}", a) for i, a in enumerate(K.ledger())])
    return EXIT_OK


# ---------------------------------------------------------------------------
# certificates


def _certify(args):
    params = {"g": args.g, "sigma_k": args.sigma_k, "n": args.n, "z": args.z}
    cert = certify(args.kind, **params)
    if args.out:
        if os.path.exists(args.out):
            raise PreconditionError(f"{args.out} exists; the certificate store is append-only")
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(dumps_certificate(cert))
        with open(args.out + ".kv", "w", encoding="utf-8") as fh:
            fh.write("\n".join(summary_lines(cert)) + "\n")
    print("\n".join(summary_lines(cert)))
    return cert.exit_code


def _verify(args):
    with open(args.certificate, encoding="utf-8") as fh:
        text = fh.read()
    cert = loads_certificate(text)
    if dumps_certificate(cert) != text:
        raise PreconditionError("certificate text is not in canonical form")
    ok, diffs = verify_certificate(cert)
    _emit([("certificate", args.certificate), ("scenario", cert.scenario), ("verdict", cert.verdict),
           ("recomputed", "identical" if ok else "differs")])
    for d in diffs:
        print(d, file=sys.stderr)
    if not ok:
        return EXIT_INTERNAL
    return cert.exit_code


def _select_g(args):
    g = select_g(args.b4)
    _emit([("b4", args.b4), ("g", g), ("b2_T", 24 * g + 26)])
    return EXIT_OK


# ---------------------------------------------------------------------------
# numerics


def _theta(args):
    t = complex(args.t_re, args.t_im)
    M = modular.m_matrix(args.mu, t)
    if not M.positive_definite:
        raise PreconditionError(f"-iM is not positive definite (margin {M.margin!r})")
    delta = tuple(int(x) for x in args.delta.split(","))
    v = modular.theta2(delta, M, args.eps)
    re, im = _fmt_complex(v.value)
    _emit([("delta", args.delta), ("value_re", re), ("value_im", im), ("radius", v.radius),
           ("tail_bound", repr(v.tail_bound)), ("det_re", repr(M.det.real)), ("det_im", repr(M.det.imag)),
           ("margin", repr(M.margin)), ("assumed_transcendental", "yes" if args.assume_transcendental else "no"),
           ("provenance", "lattice box sum, Gaussian shell tail bound")])
    return EXIT_OK


def _j(args):
    tau = complex(args.tau_re, args.tau_im)
    if tau.imag <= 0:
        raise PreconditionError("Im tau must be positive")
    v = modular.j_invariant(tau)
    re, im = _fmt_complex(v.value)
    _emit([("value_re", re), ("value_im", im), ("error", repr(v.error)), ("terms", v.terms),
           ("normalization", "j(i)=1"), ("provenance", "Eisenstein q-expansions E4, E6 with remainder bound")])
    return EXIT_OK


def _q_minima(args):
    t1, t2 = Fraction(args.t_re), Fraction(args.t_im)
    q = t1 * t1 + t2 * t2
    res = modular.q_minima(t1, q)
    pairs = [("t1", t1), ("q", q)]
    ok = True
    for delta, m in res.items():
        key = f"{delta[0]}{delta[1]}"
        pairs += [(f"minimizer_{key}", f"{m.minimizer[0]},{m.minimizer[1]}"), (f"value_{key}", m.value),
                  (f"matches_{key}", str(m.matches).lower())]
        ok = ok and m.matches
    _emit(pairs + [("provenance", "exact box search, unique up to sign")])
    return EXIT_OK if ok else EXIT_PRECONDITION


def _report(args):
    from .report import write_report
    path = write_report(args.out, quick=args.quick)
    _emit([("report", path)])
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="conjcert", description="Exact cohomology models and obstruction certificates.")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="write a model file")
    b.add_argument("kind", choices=["elliptic", "hyperelliptic", "kummer", "surface-y", "ambient-x", "t", "w"])
    b.add_argument("--g", type=int, default=1)
    b.add_argument("--n", type=int, default=None, help="N for ambient-x, n for t")
    b.add_argument("--cap", type=int, default=None)
    b.add_argument("--z", default=None, help="model file for Z (w only)")
    b.add_argument("--tau-symbols", default=None, help="elliptic: tau = i*a, or a,b for the product")
    b.add_argument("--out", default=None)
    b.set_defaults(func=_build)

    d = sub.add_parser("dim-hpp", help="K-dimension of K-rational (p,p) classes")
    d.add_argument("--model", required=True)
    d.add_argument("--p", type=int, required=True)
    d.add_argument("--fieldspec", required=True)
    d.add_argument("--lower-bound", action="store_true")
    d.set_defaults(func=_dim_hpp)

    c = sub.add_parser("certify", help="compute an obstruction certificate")
    c.add_argument("kind", choices=["case1", "case2", "case3", "case4", "h2", "h11", "w"])
    c.add_argument("--g", type=int, default=None)
    c.add_argument("--sigma-k", type=int, default=None)
    c.add_argument("--n", type=int, default=None)
    c.add_argument("--z", default=None)
    c.add_argument("--out", default=None)
    c.set_defaults(func=_certify)

    s = sub.add_parser("select-g", help="least genus with 24g+26 > b4+4")
    s.add_argument("--b4", type=int, required=True)
    s.set_defaults(func=_select_g)

    v = sub.add_parser("verify", help="recompute a certificate")
    v.add_argument("--certificate", required=True)
    v.set_defaults(func=_verify)

    t = sub.add_parser("theta", help="second-order theta constant of M(mu, t)")
    t.add_argument("--mu", type=float, required=True)
    t.add_argument("--t-re", type=float, required=True)
    t.add_argument("--t-im", type=float, required=True)
    t.add_argument("--delta", default="0,0")
    t.add_argument("--eps", type=float, default=1e-12)
    t.add_argument("--assume-transcendental", action="store_true")
    t.set_defaults(func=_theta)

    j = sub.add_parser("j", help="j-invariant normalized by j(i) = 1")
    j.add_argument("--tau-re", type=float, required=True)
    j.add_argument("--tau-im", type=float, required=True)
    j.set_defaults(func=_j)

    q = sub.add_parser("q-minima", help="exact minima of the quadratic form over shifted lattices")
    q.add_argument("--t-re", required=True, help="exact rational, e.g. 1/3")
    q.add_argument("--t-im", required=True)
    q.set_defaults(func=_q_minima)

    r = sub.add_parser("report", help="summary records plus figures")
    r.add_argument("--out", default="report")
    r.add_argument("--quick", action="store_true")
    r.set_defaults(func=_report)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InvariantError as exc:
        print(f"error=internal: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except (PreconditionError, InconclusiveError, modular.ModularError, FileNotFoundError, ValueError) as exc:
        if isinstance(exc, WitnessError) and not isinstance(exc, PreconditionError):
            print(f"error=internal: {exc}", file=sys.stderr)
            return EXIT_INTERNAL
        print(f"error=precondition: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except Exception as exc:  # noqa: BLE001
        print(f"error=internal: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
