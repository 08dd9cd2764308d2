import csv
import io
import json

import pytest

from hetcache import cli
from hetcache.exceptions import SolverDiverged


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def rows_of(text):
    return list(csv.DictReader(io.StringIO(text)))


def write_config(tmp_path, data, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data), "utf-8")
    return str(path)


def test_analyze_defaults(capsys):
    code, out, err = run(["analyze"], capsys)
    assert code == 0
    rows = rows_of(out)
    assert len(rows) == 1
    assert list(rows[0]) == list(cli.CSV_COLUMNS)
    assert rows[0]["n_states"] == "420"
    assert float(rows[0]["residual"]) <= 1e-10
    assert float(rows[0]["g_hu"]) > 0 and float(rows[0]["epb"]) > 0
    assert "420 states" in err and "residual" in err


def test_output_is_byte_stable(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    argv = ["simulate", "--replications", "2", "--horizon", "120", "--seed", "5"]
    assert run(argv + ["--output", str(a)], capsys)[0] == 0
    assert run(argv + ["--output", str(b)], capsys)[0] == 0
    assert a.read_bytes() == b.read_bytes()
    rows = rows_of(a.read_text("utf-8"))
    assert [r["row"] for r in rows] == ["replication", "replication", "mean"]
    assert [r["seed"] for r in rows] == ["5", "6", "5"]
    assert rows[-1]["g_hu_ci95"] != ""
    assert len({r["config_hash"] for r in rows}) == 1


@pytest.mark.parametrize("data", [{"mode_weights": [0.5, 0.6, -0.1]}, {"d_max": 300},
                                  {"lambda_hu": "fast"}, {"unknown": 1}, [1, 2]])
def test_invalid_config_exit_code(tmp_path, capsys, data):
    code, out, err = run(["analyze", "--config", write_config(tmp_path, data)], capsys)
    assert code == 2 and out == ""
    assert "error" in err


def test_d_max_error_names_field(tmp_path, capsys):
    _, _, err = run(["analyze", "--config", write_config(tmp_path, {"d_max": 300})], capsys)
    assert "d_max" in err and "252" in err


def test_malformed_json_exit_code(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text("{", "utf-8")
    assert run(["analyze", "--config", str(path)], capsys)[0] == 2
    assert run(["sweep", "--sweep-param", "lambda_hu", "--sweep-values", "[1,"], capsys)[0] == 2


def test_solver_failure_exit_code(monkeypatch, capsys):
    def fail(*args, **kwargs):
        raise SolverDiverged("forced")
    monkeypatch.setattr("hetcache.model.solve_on_reachable", fail)
    code, _, err = run(["analyze"], capsys)
    assert code == 3 and "forced" in err


def test_sweep_lambda_hu_goodput_nondecreasing(capsys):
    code, out, _ = run(["sweep", "--sweep-param", "lambda_hu", "--sweep-values",
                        "0.4,2.4,4.8,8,12"], capsys)
    assert code == 0
    g = [float(r["g_hu"]) for r in rows_of(out)]
    assert g == sorted(g)


def test_sweep_lambda_pu_goodput_nonincreasing(capsys):
    _, out, _ = run(["sweep", "--sweep-param", "lambda_pu", "--sweep-values",
                     "[0.015, 0.06, 0.12, 0.18]"], capsys)
    g = [float(r["g_hu"]) for r in rows_of(out)]
    assert g == sorted(g, reverse=True)


def test_sweep_device_weight_lowers_epb(tmp_path, capsys):
    cfg = write_config(tmp_path, {"mode_weights": [0.75, 0.25, 0.0]})
    _, out, _ = run(["sweep", "--config", cfg, "--sweep-param", "r_dev", "--sweep-values",
                     "0,0.2,0.25"], capsys)
    rows = rows_of(out)
    assert [float(r["sweep_value"]) for r in rows] == [0, 0.2, 0.25]
    epb = [float(r["epb"]) for r in rows]
    assert epb[0] > epb[1] > epb[2]


def test_sweep_with_simulation_and_workers(capsys):
    argv = ["sweep", "--sweep-param", "lambda_hu", "--sweep-values", "1,2", "--simulate",
            "--replications", "1", "--horizon", "80"]
    _, serial, _ = run(argv, capsys)
    _, parallel, _ = run(argv + ["--jobs", "2"], capsys)
    assert serial == parallel
    assert [r["row"] for r in rows_of(serial)] == ["analytic", "replication", "mean"] * 2


def test_sweep_rejects_bad_requests(capsys):
    assert run(["sweep"], capsys)[0] == 2
    assert run(["sweep", "--sweep-param", "nope", "--sweep-values", "1"], capsys)[0] == 2
    assert run(["sweep", "--sweep-param", "r_dev", "--sweep-values", "0.9"], capsys)[0] == 2


def test_device_weight_zero_ignores_overlay(tmp_path, capsys):
    base = {"mode_weights": [0.5, 0.5, 0.0]}
    _, a, _ = run(["analyze", "--config", write_config(tmp_path, base, "a.json")], capsys)
    _, b, _ = run(["analyze", "--config",
                   write_config(tmp_path, dict(base, overlay=False), "b.json")], capsys)
    ra, rb = rows_of(a)[0], rows_of(b)[0]
    for col in ("g_hu", "epb", "p_drop_bs", "lambda_eff_d2d"):
        assert float(ra[col]) == pytest.approx(float(rb[col]), rel=1e-8, abs=1e-15)
