from fractions import Fraction

import pytest

from conjcert.algebra import check_invariants
from conjcert.field import FieldAutomorphism
from conjcert.linalg import Matrix, finite_order_spectrum
from conjcert.varieties import (
    VarietyError,
    conjugate_model,
    elliptic_model,
    fixed_point_permutation,
    hyperelliptic_model,
    tgn_model,
)

ONE = Fraction(1)


@pytest.mark.parametrize("g", [1, 2, 3])
def test_hyperelliptic_curve(g):
    C = hyperelliptic_model(g)
    assert C.betti() == {0: 1, 1: 2 * g, 2: 1}
    assert check_invariants(C)["hodge"]
    eta = C.actions["eta"]
    assert eta.power(2 * g + 1).is_identity()
    # eta acts on H^1 with every nontrivial (2g+1)-th root of unity once
    spec = finite_order_spectrum(eta.matrix(1), 2 * g + 1)
    assert spec == {k: 1 for k in range(1, 2 * g + 1)}


def test_fixed_point_permutation_is_a_cycle():
    # infinity is fixed, the other 2g+1 points form one cycle
    P = fixed_point_permutation(2)
    assert len(P.rows) == 6 and P.rows[0][0] == 1
    Q = Matrix.identity(6)
    for _ in range(1, 5):
        Q = Q @ P
        assert Q != Matrix.identity(6)
    assert Q @ P == Matrix.identity(6)


def test_kummer(kummer):
    assert kummer.betti() == {0: 1, 2: 22, 4: 1}
    assert len(kummer.hodge[(1, 1)]) == 20
    for label in ("D0000", "D1011"):
        D = {kummer.index[label]: ONE}
        assert kummer.evaluate(kummer.cup(D, D)) == -2
    assert not kummer.cup({kummer.index["D0000"]: ONE}, {kummer.index["D0001"]: ONE})


@pytest.mark.parametrize("fixture,g,ish2", [("Y1", 1, 17), ("Y2", 2, 37)])
def test_surface_y(request, fixture, g, ish2):
    Y = request.getfixturevalue(fixture)
    assert Y.dim(2) == 12 * g + 10
    ish = Y.classes["ish"]
    assert Y.evaluate(Y.cup(ish, ish)) == ish2
    f, fp = Y.actions["f"], Y.actions["fp"]
    assert f.power(2 * g + 1).is_identity()
    assert fp.power(4).is_identity()
    assert f.compose(fp) == fp.compose(f)
    for act in (f, fp):
        assert act.apply(Y, Y, ish) == ish
    F1, F2 = Y.classes["F1"], Y.classes["F2"]
    # classes pulled back from the double cover, so the degree halves
    assert Y.evaluate(Y.cup(F1, F2)) == Fraction(1, 2)
    assert not Y.cup(F1, F1)
    D = {Y.index["Dinf.0"]: ONE}
    assert Y.evaluate(Y.cup(D, D)) == -2


def test_surface_y_structure(Y1):
    report = check_invariants(Y1)
    assert all(report.values())


@pytest.mark.parametrize("g", [1, 2])
def test_tgn_betti(g):
    assert tgn_model(g).dim(2) == 24 * g + 26


def test_tgn_rejects_small_dimension():
    with pytest.raises(VarietyError):
        tgn_model(1, 3)


def test_conjugate_model_twists_actions(Y1):
    sigma = FieldAutomorphism(12, 5)
    Ys = conjugate_model(Y1, sigma)
    assert Ys.actions["f"] == Y1.actions["f"].power(2)
    assert Ys.actions["fp"] == Y1.actions["fp"]
    back = conjugate_model(Ys, sigma)
    assert back.actions["f"] == Y1.actions["f"]
    assert "sigma" not in back.meta


def test_conjugate_elliptic_curve_swaps_hodge_spans():
    E = elliptic_model("i")
    Ec = conjugate_model(E, FieldAutomorphism(4, 3))
    assert list(Ec.hodge[(1, 0)]) == list(E.hodge[(0, 1)])
    assert Ec.cup({1: ONE}, {2: ONE}) == E.cup({1: ONE}, {2: ONE})
