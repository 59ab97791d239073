import json
import subprocess
import sys

import jsonschema
import pytest

from orbconv.cli import main
from orbconv.io import load_schema


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def validate(command, text):
    payload = json.loads(text)
    jsonschema.validate(payload, load_schema(command))
    return payload


def test_describe(capsys):
    code, out, _ = run(capsys, "describe", "--family", "real-hyperbolic", "--n", "2")
    assert code == 0
    d = validate("describe", out)
    assert d["rank"] == 1 and d["dim"] == 2
    assert d["config"]["command"] == "describe"


def test_describe_complex(capsys):
    code, out, _ = run(capsys, "describe", "--family", "complex-hyperbolic", "--m", "3")
    d = validate("describe", out)
    assert (d["dim"], d["m_alpha"], d["m_2alpha"]) == (6, 4, 1)


@pytest.mark.parametrize("argv", [
    ["describe", "--family", "real-hyperbolic", "--n", "1"],
    ["describe", "--family", "bogus"],
    ["l2", "--n", "2"],
    ["l2", "--t", "1,x"],
    ["density", "--t", "1,1"],
    ["simulate", "--t", "1", "--N", "0"],
    ["simulate", "--t", "1", "--seed", "-3"],
    ["spherical", "--t", "1", "--format", "xml"],
    ["nonsense"],
])
def test_invalid_arguments_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and err


def test_density_k_refused_below_threshold(capsys):
    code, _, err = run(capsys, "density", "--t", "1,1,1", "--k", "1", "--grid", "0.5")
    assert code == 2 and "r >= dim + k + 1" in err


def test_budget_exit_3(capsys, monkeypatch):
    import orbconv.cli as cli

    real = cli._quad
    monkeypatch.setattr(cli, "_quad", lambda cfg: real(cfg).with_(k_order=16, k_order_max=32))
    code, _, err = run(capsys, "spherical", "--t", "4", "--lambda", "30")
    assert code == 3 and "budget" in err


def test_spherical_json_and_csv(capsys):
    code, out, _ = run(capsys, "spherical", "--t", "1", "--lambda-max", "5",
                       "--lambda-points", "11")
    d = validate("spherical", out)
    assert len(d["lambda"]) == 11 and d["phi_re"][0] == pytest.approx(0.9408621592, rel=1e-9)
    code, out, _ = run(capsys, "spherical", "--t", "1", "--lambda", "0,1", "--format", "csv")
    lines = out.splitlines()
    assert lines[0].startswith("# config: ")
    assert lines[1] == "lambda,phi_re,phi_im,plancherel_weight"
    assert len(lines) == 4


def test_l2_finite(capsys):
    code, out, _ = run(capsys, "l2", "--family", "real-hyperbolic", "--n", "2", "--t", "1,1,1")
    d = validate("l2", out)
    assert code == 0 and d["verdict"] == "finite"
    assert d["regularity"] == {"l2_threshold_met": True, "ck_max": 0}


def test_l2_divergent(capsys):
    code, out, _ = run(capsys, "l2", "--t", "1,1")
    d = validate("l2", out)
    assert d["verdict"] == "divergent" and d["value"] is None


def test_density_csv_columns(capsys, tmp_path):
    out_file = tmp_path / "d.csv"
    code, _, _ = run(capsys, "density", "--t", "1,1,1", "--grid", "0.5,1.5,2.5",
                     "--format", "csv", "--out", str(out_file))
    lines = out_file.read_text().splitlines()
    assert code == 0
    assert lines[1] == "t,rho,jacobian"
    t, rho, jac = map(float, lines[2].split(","))
    assert t == 0.5 and rho > 0 and jac == pytest.approx(2 * __import__("math").sinh(0.5))


def test_density_json(capsys):
    code, out, _ = run(capsys, "density", "--t", "1,1,1", "--grid-points", "5")
    d = validate("density", out)
    assert d["t"] == [0.0, 0.75, 1.5, 2.25, 3.0]


def test_simulate_r1(capsys):
    code, out, _ = run(capsys, "simulate", "--t", "1", "--N", "1000", "--seed", "7", "--samples")
    d = validate("simulate", out)
    assert len(d["samples"]) == 1000 and set(d["samples"]) == {1.0}


def test_simulate_histogram(capsys):
    code, out, _ = run(capsys, "simulate", "--t", "1,1,1", "--N", "5000", "--bins", "20")
    d = validate("simulate", out)
    assert sum(d["counts"]) == 5000 and len(d["bin_edges"]) == 21


def test_simulate_byte_identical(tmp_path):
    files = []
    for i in range(2):
        f = tmp_path / f"s{i}.csv"
        assert main(["simulate", "--t", "1,0.5,0.8", "--N", "3000", "--seed", "99",
                     "--format", "csv", "--out", str(f)]) == 0
        files.append(f.read_bytes())
    assert files[0] == files[1]
    assert b"bin_center,density_estimate,count" in files[0]


def test_config_precedence(capsys, tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"n": 3, "t": "1,1,1,1", "seed": 5}))
    code, out, _ = run(capsys, "l2", "--config", str(cfg))
    d = json.loads(out)
    assert d["n"] == 3 and d["config"]["seed"] == 5
    code, out, _ = run(capsys, "l2", "--config", str(cfg), "--n", "2")
    d = json.loads(out)
    assert d["n"] == 2 and d["config"]["n"] == 2 and d["config"]["t"] == "1,1,1,1"
    cfg.write_text(json.dumps({"bogus": 1}))
    assert main(["l2", "--config", str(cfg)]) == 2


def test_verify_subset(capsys):
    code, out, err = run(capsys, "verify", "--only", "3,10")
    d = validate("verify", out)
    assert code == 0 and d["passed"]
    assert "criterion  3" in err and "criterion 10" in err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "orbconv", "describe", "--n", "4"],
                          capture_output=True, text=True, check=True)
    assert json.loads(proc.stdout)["dim"] == 4
    proc = subprocess.run([sys.executable, "-m", "orbconv", "describe", "--n", "1"],
                          capture_output=True, text=True)
    assert proc.returncode == 2


def test_schemas_are_valid():
    for name in ("describe", "spherical", "l2", "density", "simulate", "verify"):
        jsonschema.Draft202012Validator.check_schema(load_schema(name))
