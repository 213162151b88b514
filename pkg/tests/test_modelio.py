import pytest

from conjcert.algebra import AlgebraError
from conjcert.blowup import projective_space
from conjcert.field import RationalFunction, zeta
from conjcert.modelio import dumps_model, load_model, loads_model, model_digest, models_identical, save_model
from conjcert.varieties import abelian_surface_model, elliptic_model, hyperelliptic_model, tgn_model
from conjcert.witness import case_models, elliptic_product

BUILDERS = {
    "elliptic": lambda: elliptic_model("i"),
    "elliptic-symbolic": lambda: elliptic_model(zeta(4) * RationalFunction.symbol("a", ("a",), 4)),
    "hyperelliptic": lambda: hyperelliptic_model(2),
    "abelian": abelian_surface_model,
    "projective": lambda: projective_space(10, hyperplane="L"),
    "elliptic-product": lambda: elliptic_product(True, False)[0],
    "case3": lambda: case_models(3)[0],
}


@pytest.mark.parametrize("name", sorted(BUILDERS))
def test_round_trip_is_identical(name):
    A = BUILDERS[name]()
    text = dumps_model(A)
    B = loads_model(text)
    assert models_identical(A, B)
    assert dumps_model(B) == text


def test_round_trip_surfaces(Y1, kummer):
    for A in (Y1, kummer):
        assert models_identical(A, loads_model(dumps_model(A)))


def test_round_trip_t_model():
    T = tgn_model(1)
    assert models_identical(T, loads_model(dumps_model(T)))


def test_file_round_trip(tmp_path):
    A = hyperelliptic_model(1)
    path = tmp_path / "c1.model"
    save_model(A, path)
    assert model_digest(load_model(path)) == model_digest(A)


def test_identity_detects_changes():
    A = hyperelliptic_model(1)
    B = loads_model(dumps_model(A))
    B.meta["note"] = "x"
    assert not models_identical(A, B)


@pytest.mark.parametrize("mutate", [
    lambda t: t.replace("GRADED-ALGEBRA-MODEL 1", "GRADED-ALGEBRA-MODEL 9"),
    lambda t: t.replace("END", ""),
    lambda t: t.replace("BASIS 6", "BASIS 7"),
])
def test_malformed_text_rejected(mutate):
    text = dumps_model(hyperelliptic_model(2))
    assert "BASIS 6" in text
    with pytest.raises(AlgebraError):
        loads_model(mutate(text))
