"""Report path: tab-delimited records plus matplotlib figures in one directory."""

from __future__ import annotations

import cmath
import math
import os
from fractions import Fraction
from typing import Iterable

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from . import modular  # noqa: E402
from .linalg import finite_order_spectrum  # noqa: E402
from .varieties import surface_Y  # noqa: E402
from .witness import certify, select_g  # noqa: E402

T_SAMPLE = complex(1 / 3, 3)


def _row(name: str, **fields) -> str:
    return "\t".join([f"record={name}", *(f"{k}={v}" for k, v in fields.items())])


def _dominance_figure(path: str, s_values: Iterable[float]) -> list[str]:
    s_values = list(s_values)
    fig, ax = plt.subplots(figsize=(6, 4))
    rows = []
    t1 = T_SAMPLE.real
    q = abs(T_SAMPLE) ** 2
    for delta in modular.DELTAS:
        ys = [modular._log_abs_theta(delta, s, T_SAMPLE, 40) for s in s_values]
        c0, c1, c2 = modular.EXPECTED_VALUES[delta]
        slope = -math.pi / t1 * (float(c0) + float(c1) * t1 + float(c2) * q)
        offset = 0.0 if delta == (0, 0) else math.log(2)
        label = f"delta={delta[0]}{delta[1]}"
        # 01 and 11 coincide at this sample point, so give them distinct markers
        marker = {(0, 1): "s", (1, 1): "x"}.get(delta, "o")
        ax.plot(s_values, ys, marker, label=label, markersize=8 if marker == "s" else 6)
        ax.plot(s_values, [slope * s + offset for s in s_values], "-", color=ax.lines[-1].get_color(), alpha=0.6)
        rows.append(_row("dominance_line", delta=f"{delta[0]},{delta[1]}", predicted_slope=f"{slope:.6g}"))
    ax.set_xlabel("s")
    ax.set_ylabel("log |theta|")
    ax.set_title("theta constants of M(s, 1/3+3i) against predicted slopes")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return rows


def _spectra_figure(path: str, g: int) -> list[str]:
    Y = surface_Y(g)
    n = Y.order
    fig, axes = plt.subplots(1, 2, figsize=(8, 4))
    rows = []
    for ax, name in zip(axes, ("f", "fp")):
        spec = finite_order_spectrum(Y.actions[name].matrix(2), n)
        for k, mult in spec.items():
            z = cmath.exp(2j * math.pi * k / n)
            ax.scatter([z.real], [z.imag], s=30 * mult)
            ax.annotate(str(mult), (z.real, z.imag), textcoords="offset points", xytext=(6, 6), fontsize=8)
        circle = [cmath.exp(2j * math.pi * x / 200) for x in range(201)]
        ax.plot([c.real for c in circle], [c.imag for c in circle], lw=0.5, color="grey")
        ax.set_aspect("equal")
        ax.set_title(f"{name}^* on H^2(Y_{g}), multiplicities")
        rows.append(_row("spectrum", g=g, action=name, exponents_mod=n,
                         multiset=",".join(f"{k}:{m}" for k, m in sorted(spec.items()))))
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return rows


def _tail_figure(path: str) -> list[str]:
    M = modular.m_matrix(1.0, T_SAMPLE)
    radii = list(range(1, 7))
    bounds, changes = [], []
    for R in radii:
        a = modular.theta2((0, 0), M, radius=R)
        b = modular.theta2((0, 0), M, radius=2 * R)
        bounds.append(a.tail_bound)
        changes.append(max(abs(b.value - a.value), 1e-300))
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.semilogy(radii, bounds, "o-", label="tail bound at R")
    ax.semilogy(radii, changes, "s--", label="|value(2R) - value(R)|")
    ax.set_xlabel("truncation radius R")
    ax.set_title("theta truncation at M(1, 1/3+3i)")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return [_row("tail", radius=R, bound=f"{bd:.3e}", change=f"{ch:.3e}", sound=str(ch <= bd).lower())
            for R, bd, ch in zip(radii, bounds, changes)]


def write_report(out_dir: str, *, quick: bool = False) -> str:
    """Write summary.tsv and PNG figures into ``out_dir``; return the summary path."""
    os.makedirs(out_dir, exist_ok=True)
    rows = []
    j = modular.j_invariant(1j)
    rows.append(_row("j", tau="i", value=f"{j.value.real:.15g}", error=f"{j.error:.3e}"))
    rows.append(_row("select_g", b4=1, g=select_g(1)))
    for delta, m in modular.q_minima(Fraction(1, 3), Fraction(82, 9)).items():
        rows.append(_row("q_minimum", delta=f"{delta[0]},{delta[1]}", value=m.value,
                         matches=str(m.matches).lower()))
    kinds = ["case1", "case2", "case3", "case4"] + ([] if quick else ["h11", "h2"])
    for kind in kinds:
        cert = certify(kind, g=1, sigma_k=5)
        rows.append(_row("certificate", kind=kind, verdict=cert.verdict,
                         **{k: v for k, v in cert.evidence.items() if k.startswith("dim")}))
    s_values = [2, 4, 6] if quick else [2, 4, 6, 8, 10]
    rows += _dominance_figure(os.path.join(out_dir, "dominance.png"), s_values)
    rows += _spectra_figure(os.path.join(out_dir, "spectra.png"), 1)
    rows += _tail_figure(os.path.join(out_dir, "theta_tail.png"))
    rows += [_row("figure", file=f) for f in ("dominance.png", "spectra.png", "theta_tail.png")]
    path = os.path.join(out_dir, "summary.tsv")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(rows) + "\n")
    return path
