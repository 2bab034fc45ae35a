import json
import math
import re
import subprocess
import sys

import pytest

from selbergxi import cli


def run(*argv):
    return cli.main(list(argv))


def read_rows(path):
    lines = path.read_text().splitlines()
    return lines[0].split(","), [line.split(",") for line in lines[1:]]


def test_constants_zeta(tmp_path, capsys):
    assert run("constants", "--builtin", "zeta") == 0
    c = json.loads(capsys.readouterr().out)["constants"]
    assert c["a"] == pytest.approx(math.pi, abs=1e-12) and c["b"] == 2.25
    assert c["B"]["re"] == pytest.approx(-4 * math.pi ** 2)
    assert c["B"]["log_abs"] == pytest.approx(math.log(4 * math.pi ** 2))


def test_constants_chi4(capsys):
    assert run("constants", "--builtin", "chi4") == 0
    c = json.loads(capsys.readouterr().out)["constants"]
    assert c["a"] == pytest.approx(math.pi / 4) and c["b"] == pytest.approx(0.75)


def test_malformed_config(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"m": 0, "epsilon": [1, 0], "Q": "one", "factors": [], "coefficients": {"builtin": "zeta"}}))
    assert run("constants", "--config", str(bad)) == 2
    assert "Q" in capsys.readouterr().err
    bad.write_text("{not json")
    assert run("constants", "--config", str(bad)) == 2


def test_invalid_data_reports_violations(tmp_path, capsys):
    cfg = tmp_path / "l.json"
    cfg.write_text(json.dumps({"m": 0, "epsilon": [1, 0], "Q": 1.0, "factors": [{"lambda": -1, "mu": [0, 0]}],
                               "coefficients": {"list": [2, 1]}}))
    assert run("constants", "--config", str(cfg)) == 2
    err = capsys.readouterr().err
    assert "lambda must be positive" in err and "a_1 must equal 1" in err


def test_ftcheck_default(tmp_path):
    out = tmp_path / "ft.csv"
    assert run("ftcheck", "--out", str(out)) == 0
    head, rows = read_rows(out)
    assert head == ["T", "oracle_log_abs", "oracle_phase", "asym_log_abs", "asym_phase", "rel_error"]
    errs = [float(r[-1]) for r in rows]
    for e0, e1 in zip(errs, errs[1:]):
        assert e1 / e0 == pytest.approx(math.exp(-2), rel=0.5)


def test_ftcheck_single_gamma_exact(tmp_path):
    out = tmp_path / "ft1.csv"
    assert run("ftcheck", "--lambdas", "1", "--alphas", "1", "--out", str(out)) == 0
    _, rows = read_rows(out)
    assert all(float(r[-1]) < 1e-12 for r in rows)


def test_ftcheck_impossible_tolerance(capsys):
    assert run("ftcheck", "--tol", "1e-30") == 3
    assert "quadrature nonconvergence" in capsys.readouterr().err


def test_ftcheck_violation_exit_4(tmp_path):
    # at T ~ 0 the error is not yet in its asymptotic regime
    assert run("ftcheck", "--T=-4,-2,0", "--out", str(tmp_path / "x.csv")) == 4


def test_derive_grid_and_format(tmp_path):
    out = tmp_path / "d.csv"
    assert run("derive", "--builtin", "zeta", "--n", "50", "--grid", "129", "--out", str(out)) == 0
    head, rows = read_rows(out)
    assert head == ["z", "D_n", "cos_z_theta"] and len(rows) == 129
    num = re.compile(r"^-?\d\.\d{16}e[+-]\d\d$")
    assert all(num.match(v) for r in rows for v in r)
    dev = max(abs(float(r[1]) - float(r[2])) for r in rows)
    assert dev < 0.45


def test_derive_multiple_n_files(tmp_path):
    out = tmp_path / "curve.csv"
    assert run("derive", "--n", "0,50", "--zmin", "0", "--zmax", "16", "--grid", "65", "--out", str(out)) == 0
    assert (tmp_path / "curve_n0.csv").exists() and (tmp_path / "curve_n50.csv").exists()
    _, rows = read_rows(tmp_path / "curve_n0.csv")
    # the Xi curve: Xi_F(0) = -0.99424... at the left end
    assert float(rows[0][1]) == pytest.approx(-0.994241556, rel=1e-8)


def test_derive_empty_n():
    assert run("derive", "--n", "") == 2
    assert run("derive", "--n", "-3") == 2


def test_converge_exit_codes(tmp_path, capsys):
    out = tmp_path / "c.csv"
    code = run("converge", "--out", str(out))
    head, rows = read_rows(out)
    assert head == ["n", "w_n", "C_n", "log10_abs_An", "sup_error", "err_at_0"]
    assert [r[0] for r in rows] == ["25", "50", "100", "200", "400"]
    slope = float(capsys.readouterr().err.split("fitted_slope=")[1].split()[0])
    assert code == (0 if -2.6 <= slope <= -1.4 else 4)
    assert run("converge", "--n", "50") == 0


def test_converge_w_n_smaller_for_larger_a(tmp_path):
    run("converge", "--builtin", "zeta", "--n", "25,400", "--out", str(tmp_path / "z.csv"))
    run("converge", "--builtin", "delta", "--n", "25,400", "--out", str(tmp_path / "d.csv"))
    wz = [float(r[1]) for r in read_rows(tmp_path / "z.csv")[1]]
    wd = [float(r[1]) for r in read_rows(tmp_path / "d.csv")[1]]
    assert all(d < z for d, z in zip(wd, wz))


def test_zeros(tmp_path):
    out = tmp_path / "z.csv"
    assert run("zeros", "--n", "400", "--out", str(out)) == 0
    head, rows = read_rows(out)
    assert head == ["n", "index", "zero", "spacing", "rel_dev_from_pi"]
    assert len(rows) == 3
    assert all(float(r[4]) < 0.1 for r in rows[1:])
    assert run("zeros", "--zmin", "2", "--zmax", "2") == 2
    assert run("zeros", "--n", "400", "--zmin", "0.1", "--zmax", "0.3", "--out", str(out)) == 4


def test_kernel_dump(tmp_path):
    out = tmp_path / "k.csv"
    assert run("kernel", "--builtin", "zeta", "--kernel", "theta", "--grid", "5", "--out", str(out)) == 0
    head, rows = read_rows(out)
    assert head == ["x", "log_abs", "phase", "variant"] and rows[0][3] == "zeta_theta"
    assert run("kernel", "--builtin", "chi4", "--kernel", "theta") == 2


@pytest.mark.parametrize("argv", [
    ["derive", "--n", "25,50", "--grid", "33"],
    ["converge", "--n", "25,50", "--grid", "17"],
    ["zeros", "--n", "100"],
    ["ftcheck", "--T", "8,9"],
])
def test_dump_config_round_trip(tmp_path, argv):
    cfg = tmp_path / "run.json"
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    code_a = run(*argv, "--dump-config", str(cfg), "--out", str(a))
    code_b = run(argv[0], "--config", str(cfg), "--out", str(b))
    assert code_a == code_b
    outs = sorted(tmp_path.glob("a*.csv"))
    for pa in outs:
        pb = tmp_path / pa.name.replace("a", "b", 1)
        assert pa.read_bytes() == pb.read_bytes()
    # a rerun is bitwise identical too
    run(*argv, "--out", str(tmp_path / "c.csv"))
    for pa in outs:
        assert pa.read_bytes() == (tmp_path / pa.name.replace("a", "c", 1)).read_bytes()


def test_config_accepts_lfunction_json(tmp_path, capsys):
    from selbergxi.selberg_core import builtin, data_to_dict
    path = tmp_path / "delta.json"
    path.write_text(json.dumps(data_to_dict(builtin("delta"))))
    assert run("constants", "--config", str(path)) == 0
    c = json.loads(capsys.readouterr().out)["constants"]
    assert c["a"] == pytest.approx(2 * math.pi) and c["b"] == pytest.approx(6.0)


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "selbergxi", "constants", "--builtin", "delta"],
                         capture_output=True, text=True, check=True)
    assert json.loads(res.stdout)["constants"]["Lambda"] == 1.0
