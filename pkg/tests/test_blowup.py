from fractions import Fraction

import pytest

from conjcert.algebra import AlgebraMorphism, check_invariants
from conjcert.blowup import (
    BlowupData,
    BlowupError,
    Center,
    additive_betti,
    blowup_algebra,
    exceptional_push,
    point_model,
    projective_space,
)
from conjcert.linalg import Matrix

ONE = Fraction(1)


def point_blowup(n):
    P = projective_space(n)
    c = Center("E", point_model(), AlgebraMorphism({0: Matrix.identity(1)}, ring_verified=True), codim=n)
    return P, blowup_algebra(BlowupData(P, [c]))


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_point_blowup_top_power(n):
    _, B = point_blowup(n)
    E = {B.index["E"]: ONE}
    # E^n = (-1)^(n-1) on the blow-up of a point in P^n
    assert B.evaluate(B.power(E, n)) == (-1) ** (n - 1)
    H = {B.index["H"]: ONE}
    assert not B.cup(H, E)
    assert check_invariants(B)["poincare"]


def test_point_blowup_betti_additive():
    P = projective_space(4)
    c = Center("E", point_model(), AlgebraMorphism({0: Matrix.identity(1)}, ring_verified=True), codim=4)
    data = BlowupData(P, [c])
    assert blowup_algebra(data).betti() == additive_betti(data) == {0: 1, 2: 2, 4: 2, 6: 2, 8: 1}


def line_blowup():
    P3 = projective_space(3)
    L = projective_space(1, hyperplane="p")
    res = AlgebraMorphism.from_images(P3, L, lambda n: {n: ONE} if P3.degrees[n] <= 2 else {}, [0, 2, 4, 6])
    pt = {L.index["p"]: ONE}
    c = Center("E", L, res, codim=2, chern=[{k: 2 * v for k, v in pt.items()}, {}])
    return blowup_algebra(BlowupData(P3, [c]))


def test_line_in_p3():
    B = line_blowup()
    H = {B.index["H"]: ONE}
    E = {B.index["E"]: ONE}
    HE = {**H, **{k: -v for k, v in E.items()}}
    # proper transforms of planes through the line form a base-point-free pencil
    assert not B.power(HE, 2)
    assert B.evaluate(B.cup(H, B.power(E, 2))) == -1
    assert B.evaluate(B.power(E, 3)) == -2
    assert check_invariants(B)["associative"]


def test_exceptional_square():
    _, B = point_blowup(3)
    E = {B.index["E"]: ONE}
    assert B.cup(E, E) == {k: -v for k, v in exceptional_push(B, 0, 1, {0: ONE}).items()}


def test_codimension_one_rejected():
    with pytest.raises(BlowupError):
        Center("E", point_model(), AlgebraMorphism({0: Matrix.identity(1)}), codim=1)


def test_bad_restriction_rejected():
    P3 = projective_space(3)
    L = projective_space(1, hyperplane="p")
    # sends H to 0 but H^0 to 2: not unital
    res = AlgebraMorphism.from_images(P3, L, lambda n: {0: Fraction(2)} if n == 0 else {}, [0, 2])
    with pytest.raises(BlowupError):
        blowup_algebra(BlowupData(P3, [Center("E", L, res, codim=2, chern=[{}, {}])]))
