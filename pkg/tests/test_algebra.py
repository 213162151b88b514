from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conjcert.algebra import (
    AlgebraError,
    AlgebraMorphism,
    FieldSpec,
    InconclusiveError,
    check_invariants,
    degree_pairing,
    invariants,
    k_rational_dim,
    k_rational_lower_bound,
    parse_monomial,
    tensor,
)
from conjcert.field import RationalFunction, zeta
from conjcert.varieties import elliptic_model, hyperelliptic_model
from conjcert.witness import elliptic_product


@pytest.fixture(scope="module")
def EE():
    E = elliptic_model("i")
    return tensor(E, E)


def random_class(draw, A, k):
    return {i: Fraction(draw(st.integers(-3, 3))) for i in A.basis(k)}


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_tensor_associative_and_graded_commutative(EE, data):
    degs = [data.draw(st.sampled_from([1, 2])) for _ in range(3)]
    x, y, z = (random_class(data.draw, EE, d) for d in degs)
    assert EE.cup(EE.cup(x, y), z) == EE.cup(x, EE.cup(y, z))
    sign = -1 if degs[0] * degs[1] % 2 else 1
    assert EE.cup(x, y) == {i: sign * c for i, c in EE.cup(y, x).items()}


def test_product_of_curves_invariants():
    T = tensor(hyperelliptic_model(1), elliptic_model("i"))
    report = check_invariants(T)
    assert report == {"commutative": True, "associative": True, "hodge": True, "poincare": True}
    assert T.betti() == {0: 1, 1: 4, 2: 6, 3: 4, 4: 1}


def test_actions_are_ring_morphisms():
    E = elliptic_model("i")
    eta = E.actions["eta"]
    assert eta.verify_ring(E, E)
    assert eta.power(4).is_identity()
    assert eta.power(2) == E.actions["iota"]
    assert eta.compose(eta.inverse()).is_identity()


def test_invariant_subalgebra_of_sign_involution():
    E = elliptic_model("i")
    T = tensor(E, E)
    iota = AlgebraMorphism.from_images(
        T, T, lambda n: {n: Fraction((-1) ** T.degrees[n])}, sorted(T.by_degree))
    S = invariants(T, iota, 2)
    assert S.betti() == {0: 1, 2: 6, 4: 1}


def test_degree_pairing_of_elliptic_hodge_classes():
    E = elliptic_model("i")
    w = E.from_vector(1, E.hodge[(1, 0)][0])
    wb = E.from_vector(1, E.hodge[(0, 1)][0])
    # (a + i b)(a - i b) = -2i ab
    assert degree_pairing(E, w, wb) == -2 * zeta(4)


@pytest.mark.parametrize("ratio_in_k,product_in_k,expected", [
    (False, False, 2), (True, False, 3), (False, True, 3), (True, True, 4)])
def test_elliptic_product_table(ratio_in_k, product_in_k, expected):
    X, K = elliptic_product(ratio_in_k, product_in_k)
    assert k_rational_dim(X, 1, K) == expected
    assert k_rational_lower_bound(X, 1, K) <= expected


def test_undeclared_symbol_is_inconclusive():
    X, _ = elliptic_product(False, False)
    with pytest.raises(InconclusiveError):
        k_rational_dim(X, 1, FieldSpec(4, (1,)))


def test_fieldspec_text_round_trip():
    S = ("mu", "t1", "q")
    mu, t1, q = (RationalFunction.symbol(s, S, 4) for s in S)
    K = FieldSpec(4, (1,), [parse_monomial("mu")], [[parse_monomial("t1")], [parse_monomial("det")]],
                  {"det": mu * mu / t1}, [("q", [(parse_monomial("t1"), "k1"), (parse_monomial("1"), "k0")])],
                  (("q", "q"),), ["sample note"])
    again = FieldSpec.loads(K.dumps())
    assert again.dumps() == K.dumps()
    assert again.ledger() == K.ledger()


def test_fieldspec_rejects_contradictory_declarations():
    with pytest.raises(AlgebraError):
        FieldSpec(4, (1,), [], [[parse_monomial("q")]], {}, [("q", [(parse_monomial("t1"), "k1")])])


@given(st.integers(2, 30))
def test_fieldspec_fixing_group_is_closed(n):
    units = [k for k in range(1, n) if __import__("math").gcd(k, n) == 1]
    K = FieldSpec(n, tuple(units[:2]))
    for a in K.fixing:
        for b in K.fixing:
            assert (a * b) % n in K.fixing
