"""Line-oriented text format for graded algebra models.

Layout (one section header per line, counts make parsing strict)::

    GRADED-ALGEBRA-MODEL 1
    FIELD <order> <symbols, comma separated, or ->
    DEGREES <top> <cap>
    BASIS <n>
    <label> <degree>
    PRODUCTS <n>
    <label> <label> <label>=<scalar> ...
    HODGE <blocks>
    <p> <q> <rows>
    <scalar> ...
    DEGMAP <n>
    <label> <scalar>
    ACTIONS <n>
    <name> <degrees>
    <degree> <rows> <cols>
    <scalar> ...
    CLASSES <n>
    <name> <label>=<scalar> ...
    FIELDSPEC <lines>
    ...
    META <n>
    <key>=<value>
    END

Scalars use :func:`conjcert.field.format_scalar`.
"""

from __future__ import annotations

import hashlib
from typing import Iterator

from .algebra import AlgebraError, AlgebraMorphism, FieldSpec, GradedAlgebraModel
from .field import RationalFunction, format_scalar, parse_scalar
from .linalg import Matrix

__all__ = ["dumps_model", "loads_model", "save_model", "load_model", "model_digest", "models_identical"]

VERSION = "GRADED-ALGEBRA-MODEL 1"


def _tok(x, symbols) -> str:
    if isinstance(x, RationalFunction) and x.symbols != tuple(symbols):
        x = x.with_symbols(symbols)
    return format_scalar(x)


def dumps_model(A: GradedAlgebraModel) -> str:
    for lab in A.labels:
        if not lab or any(ch.isspace() for ch in lab) or "=" in lab:
            raise AlgebraError(f"label {lab!r} cannot be serialized")
    syms = A.symbols
    out = [VERSION, f"FIELD {A.order} {','.join(syms) if syms else '-'}", f"DEGREES {A.top} {A.cap}"]
    out.append(f"BASIS {len(A)}")
    out += [f"{l} {d}" for l, d in zip(A.labels, A.degrees)]
    table = A.product_table()
    out.append(f"PRODUCTS {len(table)}")
    for (i, j), val in table.items():
        terms = " ".join(f"{A.labels[k]}={_tok(c, syms)}" for k, c in sorted(val.items()))
        out.append(f"{A.labels[i]} {A.labels[j]} {terms}")
    out.append(f"HODGE {len(A.hodge)}")
    for (p, q), vecs in sorted(A.hodge.items()):
        out.append(f"{p} {q} {len(vecs)}")
        out += [" ".join(_tok(x, syms) for x in v) if v else "-" for v in vecs]
    out.append(f"DEGMAP {len(A.degmap)}")
    out += [f"{A.labels[i]} {_tok(c, syms)}" for i, c in sorted(A.degmap.items())]
    out.append(f"ACTIONS {len(A.actions)}")
    for name, f in sorted(A.actions.items()):
        out.append(f"{name} {len(f.mats)}")
        for k, M in f.mats.items():
            out.append(f"{k} {M.nrows} {M.ncols}")
            out += [" ".join(_tok(x, syms) for x in r) for r in M.rows]
    out.append(f"CLASSES {len(A.classes)}")
    for name, x in sorted(A.classes.items()):
        terms = " ".join(f"{A.labels[k]}={_tok(c, syms)}" for k, c in sorted(x.items()))
        out.append(f"{name} {terms}".rstrip())
    spec = A.fieldspec.dumps().splitlines() if A.fieldspec is not None else []
    out.append(f"FIELDSPEC {len(spec)}")
    out += spec
    out.append(f"META {len(A.meta)}")
    out += [f"{k}={v}" for k, v in sorted(A.meta.items())]
    out.append("END")
    return "\n".join(out) + "\n"


class _Lines:
    def __init__(self, text: str):
        self._it: Iterator[str] = iter(text.splitlines())
        self.lineno = 0

    def next(self) -> str:
        self.lineno += 1
        try:
            return next(self._it)
        except StopIteration:
            raise AlgebraError("unexpected end of model file") from None

    def header(self, name: str) -> list[str]:
        parts = self.next().split()
        if not parts or parts[0] != name:
            raise AlgebraError(f"line {self.lineno}: expected section {name}")
        return parts[1:]


def loads_model(text: str) -> GradedAlgebraModel:
    L = _Lines(text)
    if L.next().strip() != VERSION:
        raise AlgebraError("unsupported model format version")
    order_s, syms_s = L.header("FIELD")
    order = int(order_s)
    symbols = () if syms_s == "-" else tuple(syms_s.split(","))

    def sc(tok: str):
        return parse_scalar(tok, symbols)

    top_s, cap_s = L.header("DEGREES")
    (n_s,) = L.header("BASIS")
    labels, degrees = [], []
    for _ in range(int(n_s)):
        lab, d = L.next().split()
        labels.append(lab)
        degrees.append(int(d))
    index = {l: i for i, l in enumerate(labels)}
    (n_s,) = L.header("PRODUCTS")
    products = {}
    for _ in range(int(n_s)):
        a, b, *terms = L.next().split()
        val = {}
        for t in terms:
            lab, _, tok = t.partition("=")
            val[index[lab]] = sc(tok)
        products[(index[a], index[b])] = val
    (n_s,) = L.header("HODGE")
    hodge = {}
    for _ in range(int(n_s)):
        p, q, r = (int(x) for x in L.next().split())
        rows = []
        for _ in range(r):
            line = L.next()
            rows.append(() if line == "-" else tuple(sc(t) for t in line.split()))
        hodge[(p, q)] = rows
    (n_s,) = L.header("DEGMAP")
    degmap = {}
    for _ in range(int(n_s)):
        lab, tok = L.next().split()
        degmap[index[lab]] = sc(tok)
    (n_s,) = L.header("ACTIONS")
    actions = {}
    for _ in range(int(n_s)):
        name, nd = L.next().split()
        mats = {}
        for _ in range(int(nd)):
            k, r, c = (int(x) for x in L.next().split())
            rows = [[sc(t) for t in L.next().split()] for _ in range(r)]
            mats[k] = Matrix(rows, c)
        actions[name] = AlgebraMorphism(mats)
    (n_s,) = L.header("CLASSES")
    classes = {}
    for _ in range(int(n_s)):
        name, *terms = L.next().split()
        x = {}
        for t in terms:
            lab, _, tok = t.partition("=")
            x[index[lab]] = sc(tok)
        classes[name] = x
    (n_s,) = L.header("FIELDSPEC")
    spec_lines = [L.next() for _ in range(int(n_s))]
    fieldspec = FieldSpec.loads("\n".join(spec_lines)) if spec_lines else None
    (n_s,) = L.header("META")
    meta = {}
    for _ in range(int(n_s)):
        k, _, v = L.next().partition("=")
        meta[k] = v
    if L.next().strip() != "END":
        raise AlgebraError("missing END marker")
    A = GradedAlgebraModel(labels, degrees, int(top_s), cap=int(cap_s), products=products, hodge=hodge,
                           degmap=degmap, order=order, symbols=symbols, fieldspec=fieldspec,
                           actions=actions, classes=classes, meta=meta)
    return A


def save_model(A: GradedAlgebraModel, path) -> str:
    text = dumps_model(A)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
    return text


def load_model(path) -> GradedAlgebraModel:
    with open(path, encoding="utf-8") as fh:
        return loads_model(fh.read())


def model_digest(A: GradedAlgebraModel) -> str:
    return hashlib.sha256(dumps_model(A).encode()).hexdigest()


def _same_scalar(a, b) -> bool:
    return type(a) is type(b) and a == b and (
        not isinstance(a, RationalFunction) or (a.symbols == b.symbols and a.n == b.n))


def models_identical(A: GradedAlgebraModel, B: GradedAlgebraModel) -> bool:
    """Field-by-field equality of the in-memory representations, including
    scalar types."""
    if (A.labels, A.degrees, A.top, A.cap, A.order, A.symbols, A.meta) != \
            (B.labels, B.degrees, B.top, B.cap, B.order, B.symbols, B.meta):
        return False
    ta, tb = A.product_table(), B.product_table()
    if ta.keys() != tb.keys():
        return False
    for k in ta:
        if ta[k].keys() != tb[k].keys() or not all(_same_scalar(ta[k][i], tb[k][i]) for i in ta[k]):
            return False
    if A.hodge.keys() != B.hodge.keys():
        return False
    for k in A.hodge:
        va, vb = A.hodge[k], B.hodge[k]
        if len(va) != len(vb) or not all(_same_scalar(x, y) for u, v in zip(va, vb) for x, y in zip(u, v)):
            return False
    if A.degmap.keys() != B.degmap.keys() or not all(_same_scalar(A.degmap[i], B.degmap[i]) for i in A.degmap):
        return False
    if A.actions.keys() != B.actions.keys():
        return False
    for name in A.actions:
        fa, fb = A.actions[name].mats, B.actions[name].mats
        if fa.keys() != fb.keys():
            return False
        for k in fa:
            if fa[k].shape != fb[k].shape or not all(
                    _same_scalar(x, y) for ra, rb in zip(fa[k].rows, fb[k].rows) for x, y in zip(ra, rb)):
                return False
    if A.classes.keys() != B.classes.keys():
        return False
    for name in A.classes:
        xa, xb = A.classes[name], B.classes[name]
        if xa.keys() != xb.keys() or not all(_same_scalar(xa[i], xb[i]) for i in xa):
            return False
    sa = A.fieldspec.dumps() if A.fieldspec else None
    sb = B.fieldspec.dumps() if B.fieldspec else None
    return sa == sb
