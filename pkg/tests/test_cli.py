"""Command-line interface: exit codes, output contracts, determinism."""
import json
import math

import numpy as np
import pytest

from expolevy import dump_model, JumpTerm, LevyModel
from expolevy.cli import run

from _fixtures import DUFRESNE, FIXTURES


@pytest.fixture()
def model_file(tmp_path):
    def write(model, name="m.json"):
        p = tmp_path / name
        dump_model(model, p)
        return str(p)
    return write


def _stderr_json(capsys):
    err = capsys.readouterr().err.strip().splitlines()
    return json.loads(err[-1])


def test_full_check_on_closed_form_model(model_file, capsys):
    path = model_file(DUFRESNE[0])
    rc = run(["check", "--model", path, "--q", "0", "--out", "json"])
    out = capsys.readouterr().out
    assert rc == 0
    rep = json.loads(out)
    assert rep["functional_equation"]["pass"]
    assert rep["factorization"]["pass"]
    assert rep["normalization"]["pass"]
    assert rep["series_vs_inversion"]["pass"]
    assert rep["monte_carlo"]["all_pass"]


def test_roots_rejects_q_zero_with_positive_mean(model_file, capsys):
    m = LevyModel(0.3, 0.5, (JumpTerm(3.0, (2.0,)),),
                  (JumpTerm(2.1, (1.5,)),))
    rc = run(["roots", "--model", model_file(m), "--q", "0"])
    assert rc == 1
    diag = _stderr_json(capsys)
    assert diag["exit_code"] == 1
    assert "q = 0" in diag["message"]


def test_density_names_failed_assumption(model_file, capsys):
    # integer negative-side decay rate: the gamma-vector construction
    # degenerates, the tool must refuse and say which check failed
    m = LevyModel(0.4, 0.0, (JumpTerm(3.0, (1.0,)),),
                  (JumpTerm(2.0, (1.0,)),))
    rc = run(["density", "--model", model_file(m), "--q", "1",
              "--grid", "0.5:2:3"])
    assert rc == 1
    assert "A.2" in _stderr_json(capsys)["message"]


def test_missing_argument_is_usage_error(model_file, capsys):
    rc = run(["density", "--model", model_file(FIXTURES["kou"][0])])
    assert rc == 3
    assert _stderr_json(capsys)["exit_code"] == 3


def test_bad_grid_spec(model_file, capsys):
    rc = run(["density", "--model", model_file(FIXTURES["kou"][0]),
              "--q", "2.2", "--grid", "1:2:3:oops"])
    assert rc == 3
    assert "grid" in _stderr_json(capsys)["message"]


def test_unreadable_model_file(capsys):
    rc = run(["roots", "--model", "/nonexistent/x.json", "--q", "1"])
    assert rc == 3


def test_invalid_model_rejected(model_file, capsys):
    m = LevyModel(-1.0, 0.0, (JumpTerm(3.0, (1.0,)),), ())
    rc = run(["validate", "--model", model_file(m)])
    out = json.loads(capsys.readouterr().out)
    assert rc == 1
    assert out["valid"] is False
    assert any("sigma" in v for v in out["violations"])


def test_validate_accepts_fixture(model_file, capsys):
    rc = run(["validate", "--model", model_file(FIXTURES["cpair"][0])])
    out = json.loads(capsys.readouterr().out)
    assert rc == 0
    assert out["valid"] is True


def test_forced_series_failure_is_numerical_exit(model_file, capsys):
    rc = run(["density", "--model", model_file(FIXTURES["kou"][0]),
              "--q", "2.2", "--grid", "0.001:0.002:3", "--method", "series"])
    assert rc == 2
    assert _stderr_json(capsys)["error"] == "ConvergenceError"


def test_default_density_grid_succeeds(model_file, capsys):
    # with no --grid the tool picks quantile-based points; the automatic
    # branch choice must keep every row healthy
    rc = run(["density", "--model", model_file(FIXTURES["kou"][0]),
              "--q", "2.2", "--out", "csv"])
    out = capsys.readouterr().out
    assert rc == 0
    rows = [ln for ln in out.splitlines() if ln and ln[0].isdigit()]
    assert len(rows) >= 16
    assert all(ln.split(",")[3] in ("convergent", "quadrature",
                                    "extrapolated") for ln in rows)


def test_csv_output_is_deterministic(model_file, capsys):
    args = ["density", "--model", model_file(FIXTURES["mult2"][0]),
            "--q", "1.7", "--grid", "1:40:12:log", "--out", "csv"]
    assert run(args) == 0
    first = capsys.readouterr().out
    assert run(args) == 0
    second = capsys.readouterr().out
    assert first == second


def test_json_mirrors_csv(model_file, capsys):
    base = ["cdf", "--model", model_file(FIXTURES["kou"][0]), "--q", "2.2",
            "--grid", "0.5:4:4"]
    assert run(base + ["--out", "csv"]) == 0
    csv_out = capsys.readouterr().out
    assert run(base + ["--out", "json"]) == 0
    js = json.loads(capsys.readouterr().out)
    data_lines = [ln for ln in csv_out.splitlines()[2:] if ln]
    assert len(js["rows"]) == len(data_lines)
    for row, line in zip(js["rows"], data_lines):
        assert row["value"] == float(line.split(",")[1])


def test_floats_printed_at_full_precision(model_file, capsys):
    rc = run(["moment", "--model", model_file(FIXTURES["kou"][0]),
              "--q", "2.2", "--n", "1"])
    out = capsys.readouterr().out
    assert rc == 0
    val = float(out.splitlines()[-1].split(",")[1])
    # 17 significant digits round-trip exactly
    assert math.isclose(val, 0.4994801876695144, rel_tol=1e-11)


def test_roots_output_counts(model_file, capsys):
    rc = run(["roots", "--model", model_file(FIXTURES["mult2"][0]),
              "--q", "1.7", "--out", "json"])
    assert rc == 0
    js = json.loads(capsys.readouterr().out)
    assert len(js["zeta"]) == 3
    assert len(js["zeta_hat"]) == 2
    assert js["counts"]["law_holds"] is True


def test_mellin_values(model_file, capsys):
    rc = run(["mellin", "--model", model_file(FIXTURES["kou"][0]),
              "--q", "2.2", "--s", "0.5,1.5"])
    out = capsys.readouterr().out
    assert rc == 0
    vals = [float(ln.split(",")[2]) for ln in out.splitlines()
            if ln and not ln.startswith(("re_s", "{"))]
    assert vals[0] == pytest.approx(2.638162726159141, rel=1e-11)
    assert vals[1] == pytest.approx(0.608494305959911, rel=1e-11)


def test_price_command(model_file, capsys):
    rc = run(["price", "--model", model_file(FIXTURES["kou"][0]),
              "--q", "2.2", "--strikes", "1.0"])
    out = capsys.readouterr().out
    assert rc == 0
    val = float([ln for ln in out.splitlines() if ln[0].isdigit()][0]
                .split(",")[1])
    assert val == pytest.approx(0.09843884181980788, rel=1e-7)


def test_simulate_writes_samples(model_file, tmp_path, capsys):
    out_npy = str(tmp_path / "s.npy")
    rc = run(["simulate", "--model", model_file(FIXTURES["kou"][0]),
              "--q", "2.2", "--paths", "400", "--seed", "11",
              "--samples-out", out_npy])
    assert rc == 0
    s = np.load(out_npy)
    assert s.shape == (400,)
    assert np.all(s > 0)
