import pytest

from conjcert.cli import main
from conjcert.witness import dumps_certificate, loads_certificate


def kv(text):
    return dict(line.split("=", 1) for line in text.strip().splitlines() if "=" in line)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, kv(out.out), out.err


def test_select_g(capsys):
    code, out, _ = run(capsys, "select-g", "--b4", "50")
    assert code == 0 and out["g"] == "2" and out["b2_T"] == "74"


def test_build_then_dim_hpp(capsys, tmp_path):
    model = tmp_path / "kummer.model"
    code, out, _ = run(capsys, "build", "kummer", "--out", str(model))
    assert code == 0 and out["betti"] == "0:1,2:22,4:1"
    from conjcert.witness import case_models
    _, K18, _, K17, _ = case_models(4)
    for spec, expected in ((K17, "17"), (K18, "18")):
        path = tmp_path / f"k{expected}.fieldspec"
        path.write_text(spec.dumps())
        code, out, _ = run(capsys, "dim-hpp", "--model", str(model), "--p", "1", "--fieldspec", str(path))
        assert code == 0 and out["dim"] == expected and out["bound"] == "exact"


def test_dim_hpp_undeclared_symbols_exit_3(capsys, tmp_path):
    model = tmp_path / "e.model"
    run(capsys, "build", "elliptic", "--tau-symbols", "a,b", "--out", str(model))
    spec = tmp_path / "empty.fieldspec"
    from conjcert.algebra import FieldSpec
    spec.write_text(FieldSpec(4, (1,)).dumps())
    code, _, err = run(capsys, "dim-hpp", "--model", str(model), "--p", "1", "--fieldspec", str(spec))
    assert code == 3 and "precondition" in err


def test_certify_store_and_verify(capsys, tmp_path):
    path = tmp_path / "h11.cert"
    code, out, _ = run(capsys, "certify", "h11", "--g", "1", "--sigma-k", "5", "--out", str(path))
    assert code == 0 and out["verdict"] == "obstructed"
    assert (tmp_path / "h11.cert.kv").exists()
    code, _, _ = run(capsys, "certify", "h11", "--g", "1", "--sigma-k", "5", "--out", str(path))
    assert code == 3  # append-only
    code, out, _ = run(capsys, "verify", "--certificate", str(path))
    assert code == 0 and out["recomputed"] == "identical"


def test_verify_tampered_certificate(capsys, tmp_path):
    path = tmp_path / "c.cert"
    run(capsys, "certify", "case1", "--out", str(path))
    cert = loads_certificate(path.read_text())
    cert.evidence["dim_X_sigma"] = "4"
    path.write_text(dumps_certificate(cert))
    code, out, err = run(capsys, "verify", "--certificate", str(path))
    assert code == 4 and out["recomputed"] == "differs" and "dim_X_sigma" in err


def test_certify_none_exit_2(capsys):
    code, out, _ = run(capsys, "certify", "h2", "--g", "1", "--sigma-k", "1")
    assert code == 2 and out["verdict"] == "none"


def test_theta_and_j(capsys):
    code, out, _ = run(capsys, "theta", "--mu", "1", "--t-re", "0.3333333333333333", "--t-im", "3")
    assert code == 0 and float(out["margin"]) > 0
    code, out, _ = run(capsys, "theta", "--mu", "1", "--t-re", "0.1", "--t-im", "0.1")
    assert code == 3
    code, out, _ = run(capsys, "j", "--tau-re", "0", "--tau-im", "1")
    assert code == 0 and abs(float(out["value_re"]) - 1) < 1e-10
    code, _, _ = run(capsys, "j", "--tau-re", "0", "--tau-im", "-1")
    assert code == 3


def test_q_minima(capsys):
    code, out, _ = run(capsys, "q-minima", "--t-re", "1/3", "--t-im", "3")
    assert code == 0
    assert out["value_10"] == "1/6" and out["minimizer_10"] == "1/2,0"
    assert all(out[f"matches_{d}"] == "true" for d in ("00", "10", "01", "11"))


def test_report_writes_figures(capsys, tmp_path):
    code, out, _ = run(capsys, "report", "--out", str(tmp_path / "r"), "--quick")
    assert code == 0
    for name in ("dominance.png", "spectra.png", "theta_tail.png", "summary.tsv"):
        assert (tmp_path / "r" / name).stat().st_size > 0
    rows = (tmp_path / "r" / "summary.tsv").read_text().splitlines()
    assert all(r.startswith("record=") for r in rows)
    assert not any("sound=false" in r for r in rows)


def test_bad_arguments_exit_usage():
    with pytest.raises(SystemExit):
        main(["certify", "nope"])
