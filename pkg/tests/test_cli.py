import json

import numpy as np
import pytest
from click.testing import CliRunner

from hitchin_acs.acs import I0, J_I0, INTEGRABLE_J, omega_of, sample, validate
from hitchin_acs.cli import main
from hitchin_acs.exterior import basis_form
from hitchin_acs.liealg import mc_differential


@pytest.fixture
def runner():
    return CliRunner()


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj) if not isinstance(obj, str) else obj)
    return str(p)


def test_classify_standard_form(runner, tmp_path):
    f = write(tmp_path, "psi.json", mc_differential(omega_of(I0)).to_json())
    res = runner.invoke(main, ["classify", f])
    assert res.exit_code == 0, res.output
    out = json.loads(res.stdout)
    assert out["orbit"] == "O1"
    assert out["tau"] == pytest.approx(-3.0)
    assert np.abs(np.array(out["J"]) - J_I0).max() < 1e-14


def test_classify_split_form(runner, tmp_path):
    f = write(tmp_path, "psi.json", (basis_form(1, 2, 3) + basis_form(4, 5, 6)).to_json())
    out = json.loads(runner.invoke(main, ["classify", f]).stdout)
    assert out == {"tau": 1.0, "orbit": "O2"}


@pytest.mark.parametrize("content", ["not json", '{"degree": 3, "coeffs": [1, 2]}',
                                     '{"degree": 2, "coeffs": [0,0,0,0,0,0,0,0,0,0,0,0,0,0,0]}', "{}"])
def test_classify_malformed(runner, tmp_path, content):
    f = write(tmp_path, "psi.json", content)
    assert runner.invoke(main, ["classify", f]).exit_code == 2


def test_classify_missing_file(runner, tmp_path):
    assert runner.invoke(main, ["classify", str(tmp_path / "nope.json")]).exit_code == 2


def test_pipeline_standard(runner, tmp_path):
    f = write(tmp_path, "I.json", validate(I0).to_json())
    res = runner.invoke(main, ["pipeline", f])
    assert res.exit_code == 0, res.output
    out = json.loads(res.stdout)
    assert out["det_B"]["ok"] and out["amplification"]["ok"]
    assert out["final_vs_J_I0"] < 1e-12
    assert out["nk_defect"] < 1e-12
    assert out["nk_mu"] == pytest.approx(np.sqrt(3) / 2)


def test_pipeline_seed(runner):
    res = runner.invoke(main, ["pipeline", "--seed", "3"])
    assert res.exit_code == 0, res.output
    out = json.loads(res.stdout)
    assert out["x"] < 0.75
    assert out["projection_residual"] < 1e-9 and out["nk_defect"] < 1e-9


def test_pipeline_outside_domain(runner, tmp_path):
    I = sample(2, x_range=(0.8, 0.85))
    f = write(tmp_path, "I.json", I.to_json())
    res = runner.invoke(main, ["pipeline", f])
    assert res.exit_code == 3
    assert "3/4" in res.stderr


def test_pipeline_wrong_orientation_is_input_error(runner, tmp_path):
    I = validate(INTEGRABLE_J, require_positive=False)
    f = write(tmp_path, "I.json", I.to_json())
    assert runner.invoke(main, ["pipeline", f]).exit_code == 2


def test_pipeline_needs_input(runner):
    assert runner.invoke(main, ["pipeline"]).exit_code == 2


@pytest.mark.parametrize("t", ["1", "0.6", "0.9"])
def test_curvature_by_t(runner, t):
    res = runner.invoke(main, ["curvature", "--t", t])
    assert res.exit_code == 0, res.output
    out = json.loads(res.stdout)
    assert out["max_discrepancy"] < 1e-9
    assert out["scalar_oracle"] == pytest.approx(out["scalar_closed_form"], abs=1e-9)


@pytest.mark.parametrize("t", ["0.5", "0.4", "1.2"])
def test_curvature_domain(runner, t):
    assert runner.invoke(main, ["curvature", "--t", t]).exit_code == 3


def test_curvature_from_file(runner, tmp_path):
    f = write(tmp_path, "I.json", sample(7, require_AO_minus=True).to_json())
    res = runner.invoke(main, ["curvature", f])
    assert res.exit_code == 0, res.output
    assert json.loads(res.stdout)["max_discrepancy"] < 1e-9


def test_verify_small(runner, tmp_path):
    out = tmp_path / "r.csv"
    res = runner.invoke(main, ["verify", "--samples", "20", "--out", str(out)])
    assert res.exit_code == 0, res.output
    summary = json.loads(res.stdout)
    assert summary["passed"] and summary["samples"] == 20
    lines = out.read_text().splitlines()
    assert lines[0].split(",")[0] == "sample_index" and len(lines) == 21


def test_verify_reports_failure(runner):
    res = runner.invoke(main, ["verify", "--samples", "5", "--tol", "1e-30"])
    assert res.exit_code == 1
    assert "check" in res.stderr and "failed" in res.stderr


def test_verify_per_check_tolerance(runner):
    res = runner.invoke(main, ["verify", "--samples", "5", "--tol-tau_formula", "1e-30"])
    assert res.exit_code == 1
    assert "tau_formula" in res.stderr


def test_verify_rejects_bad_tolerance(runner):
    assert runner.invoke(main, ["verify", "--samples", "2", "--tol", "-1"]).exit_code == 2
    assert runner.invoke(main, ["verify", "--samples", "0"]).exit_code == 2


def test_verify_is_reproducible(runner, tmp_path):
    a, b, c = (tmp_path / n for n in ("a.csv", "b.csv", "c.csv"))
    runner.invoke(main, ["verify", "--samples", "30", "--seed", "9", "--out", str(a)])
    runner.invoke(main, ["verify", "--samples", "30", "--seed", "9", "--out", str(b)])
    runner.invoke(main, ["verify", "--samples", "30", "--seed", "9", "--workers", "2", "--out", str(c)])
    assert a.read_bytes() == b.read_bytes() == c.read_bytes()


def test_verify_json_rows(runner, tmp_path):
    out = tmp_path / "r.json"
    res = runner.invoke(main, ["verify", "--samples", "10", "--format", "json", "--out", str(out)])
    assert res.exit_code == 0
    rows = json.loads(out.read_text())
    assert [r["sample_index"] for r in rows] == list(range(10))
    assert 0.70 < rows[9]["x"] < 0.75
