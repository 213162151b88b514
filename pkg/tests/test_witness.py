from fractions import Fraction

import pytest

from conjcert.linalg import Matrix
from conjcert.witness import (
    PreconditionError,
    WitnessError,
    certify,
    chain_values,
    dumps_certificate,
    g_endomorphism,
    h11_evidence,
    loads_certificate,
    predicted_g,
    select_g,
    summary_lines,
    verify_certificate,
    w_accounting,
)


@pytest.mark.parametrize("b4,g", [(0, 1), (1, 1), (45, 1), (46, 2), (50, 2), (69, 2), (70, 3)])
def test_select_g(b4, g):
    assert select_g(b4) == g
    assert 24 * g + 26 > b4 + 4
    assert g == 1 or 24 * (g - 1) + 26 <= b4 + 4


def test_select_g_rejects_negative():
    with pytest.raises(PreconditionError):
        select_g(-1)


@pytest.mark.parametrize("case,dims", [(1, (4, 2)), (2, (3, 2)), (3, (3, 2)), (4, (18, 17))])
def test_case_certificates(case, dims):
    cert = certify(f"case{case}")
    assert cert.verdict == "obstructed"
    assert (int(cert.evidence["dim_X"]), int(cert.evidence["dim_X_sigma"])) == dims
    assert cert.assumptions


def test_case3_reports_lower_bound():
    cert = certify("case3")
    assert cert.evidence["dim_X_bound"] == "lower"
    assert cert.evidence["dim_X_sigma_bound"] == "exact"


def test_eigen_data_for_genus_one():
    e = h11_evidence(1, 5)
    assert (e.order, e.f_exponent, e.fp_exponent) == (12, 4, 9)
    assert (e.dim_original_h11, e.dim_twisted_h11) == (1, 0)
    assert e.ish_square == 17


@pytest.mark.parametrize("kind", ["h11", "h2"])
@pytest.mark.parametrize("sigma_k,verdict,pre", [(5, "obstructed", "one"), (7, "obstructed", "one"),
                                                  (1, "none", "trivial"), (11, "none", "both")])
def test_eigen_certificates(kind, sigma_k, verdict, pre):
    cert = certify(kind, g=1, sigma_k=sigma_k)
    assert cert.verdict == verdict
    assert cert.evidence["precondition"] == pre
    assert cert.exit_code == (0 if verdict == "obstructed" else 2)


def test_h2_sign_pattern():
    cert = certify("h2", g=1, sigma_k=5)
    assert cert.evidence["twisted_bidegree"] == "0,2"
    assert (cert.evidence["sign_x_xbar"], cert.evidence["sign_y_ybar"]) == ("-1", "1")
    assert cert.evidence["deg_ish_squared"] == "17"
    assert certify("h2", g=1, sigma_k=7).evidence["twisted_bidegree"] == "2,0"


def test_certificate_text_round_trip():
    cert = certify("h11", g=1, sigma_k=5)
    text = dumps_certificate(cert)
    again = loads_certificate(text)
    assert again == cert
    assert dumps_certificate(again) == text
    ok, diffs = verify_certificate(again)
    assert ok and not diffs


def test_verify_detects_tampering():
    cert = certify("case1")
    cert.evidence["dim_X"] = "5"
    ok, diffs = verify_certificate(cert)
    assert not ok and any("dim_X" in d for d in diffs)


def test_summary_lines_are_key_value():
    for line in summary_lines(certify("case2")):
        key, _, value = line.partition("=")
        assert key and value and "\n" not in value


@pytest.mark.parametrize("text", ["", "OBSTRUCTION-CERTIFICATE 1\nscenario=case1\n", "nonsense\nEND\n"])
def test_malformed_certificate_rejected(text):
    with pytest.raises(WitnessError):
        loads_certificate(text)


def test_unknown_kind_rejected():
    with pytest.raises(PreconditionError):
        certify("h3")


def test_kernel_structure_genus_one(ks1):
    assert ks1.ok
    assert ks1.dims == [22] * 5
    assert ks1.direct_sum_total == 198
    assert ks1.h_cup_d_zero == [True, True, True, True, False]


@pytest.mark.parametrize("fixture", ["ks1", "ks2"])
def test_g_endomorphisms_match_pullbacks(request, fixture):
    ks = request.getfixturevalue(fixture)
    Y = ks.X._Y
    for j in (2, 3, 4):
        for k in (2, 3, 4):
            assert g_endomorphism(ks, j, k) == predicted_g(Y, j, k)


def test_predicted_g_is_a_cocycle(Y1):
    for j in (2, 3, 4):
        assert predicted_g(Y1, j, j) == Matrix.identity(Y1.dim(2))
        for k in (2, 3, 4):
            for m in (2, 3, 4):
                assert predicted_g(Y1, k, m) @ predicted_g(Y1, j, k) == predicted_g(Y1, j, m)


@pytest.fixture(scope="module")
def acc():
    return w_accounting()


def test_w_accounting(acc):
    assert acc.ok
    assert (acc.g, acc.b2T, acc.b4Z, acc.b4W, acc.b2W) == (1, 50, 1, 53, 3)
    assert acc.chain_pairs == 20 and acc.chain_failures == 0


def test_chain_routes_agree_on_unit(acc):
    T = acc.W._T
    one = {T.unit: Fraction(1)}
    vals = chain_values(acc.W, one, one)
    assert vals[0] and all(v == vals[0] for v in vals)


def test_w_certificate_verifies():
    cert = certify("w")
    assert cert.verdict == "verified"
    ok, _ = verify_certificate(loads_certificate(dumps_certificate(cert)))
    assert ok
