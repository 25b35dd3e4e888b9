"""Experiment CLI: config parsing/validation, the four subcommands, file
formats, exit codes, and run-to-run determinism."""
from __future__ import annotations

import csv
import json
import os

import numpy as np
import pytest

from mimkit import (
    DRIFT_THRESHOLD,
    ConfigError,
    ConvergenceRow,
    emit_summary,
    main,
    parse_config,
    run_convergence_study,
)


def _write_config(tmp_path, name="config.json", **overrides):
    data = {
        "problem": "wave",
        "domain": [0.0, 1.0],
        "n_cells": 32,
        "k": 4,
        "schemes": ["rk4", "pefrl", "lf"],
        "cfl": 0.5,
        "t_end": 0.5,
        "output_dir": str(tmp_path / "out"),
    }
    data.update(overrides)
    data = {key: value for key, value in data.items() if value is not None}
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


# ---------------------------------------------------------------------------
# Config parsing
# ---------------------------------------------------------------------------


def test_parse_shipped_configs():
    wave = parse_config("configs/wave_energy.json")
    assert wave.problem == "wave"
    assert wave.domain == (-30.0, 30.0)
    assert wave.n_cells == 600 and wave.k == 4
    assert wave.cfl == 0.5 and wave.dt is None and wave.t_end == 24.0
    assert len(wave.schemes) == 7

    sw = parse_config("configs/shallow_water_energy.json")
    assert sw.problem == "shallow_water"
    assert sw.cfl == 0.25 and sw.t_end == 10.0
    assert sw.ic_offset == 1.0 and sw.d0 == 1.0 and sw.g == 1.0

    conv = parse_config("configs/wave_convergence.json")
    assert conv.domain == (0.0, 1.0) and conv.cfl == 0.5


def test_parse_config_key_aliases(tmp_path):
    path = _write_config(tmp_path, order=4, k=None)
    assert parse_config(path).k == 4


@pytest.mark.parametrize("overrides,fragment", [
    ({"problem": "heat"}, "problem"),
    ({"n_cells": None}, "n_cells"),
    ({"t_end": -1.0}, "t_end"),
    ({"k": 3}, "'k'"),
    ({"n_cells": 6}, "2k"),
    ({"dt": 0.01}, "mutually exclusive"),
    ({"schemes": ["euler"]}, "scheme"),
    ({"domain": [1.0, 0.0]}, "domain"),
    ({"mystery_key": 1}, "unknown config key"),
    ({"ic_offset": 0.5}, "offset"),
])
def test_parse_config_rejects_bad_values(tmp_path, overrides, fragment):
    path = _write_config(tmp_path, **overrides)
    with pytest.raises(ConfigError, match=fragment):
        parse_config(path)


def test_parse_config_missing_file_and_bad_json(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        parse_config(str(tmp_path / "nope.json"))
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError, match="invalid JSON"):
        parse_config(str(bad))
    arr = tmp_path / "arr.json"
    arr.write_text("[1, 2]")
    with pytest.raises(ConfigError, match="flat JSON object"):
        parse_config(str(arr))


def test_config_error_is_value_error(tmp_path):
    assert issubclass(ConfigError, ValueError)


# ---------------------------------------------------------------------------
# energy subcommand
# ---------------------------------------------------------------------------


def test_energy_end_to_end(tmp_path, capsys):
    path = _write_config(tmp_path)
    assert main(["energy", path]) == 0
    out = capsys.readouterr().out
    out_dir = tmp_path / "out"
    for scheme in ("RK4", "PEFRL", "Leapfrog"):
        csv_path = out_dir / f"energy_{scheme}.csv"
        assert csv_path.exists()
        assert str(csv_path) in out
        rows = list(csv.reader(csv_path.read_text().splitlines()))
        assert rows[0] == ["t", "H", "rel_drift"]
        times = np.array([float(r[0]) for r in rows[1:]])
        drifts = np.array([float(r[2]) for r in rows[1:]])
        assert times[0] == 0.0 and times[-1] == pytest.approx(0.5, abs=1e-12)
        assert np.all(np.diff(times) > 0)
        assert drifts[0] == 0.0

    summary = json.loads((out_dir / "summary.json").read_text())
    assert summary["experiment"] == "energy"
    assert summary["drift_threshold"] == DRIFT_THRESHOLD == 1e-3
    assert summary["failures"] == []
    assert set(summary["schemes"]) == {"RK4", "PEFRL", "Leapfrog"}
    for entry in summary["schemes"].values():
        assert isinstance(entry["within_drift_threshold"], bool)


def test_energy_relaxation_csv_has_gamma_column(tmp_path):
    path = _write_config(tmp_path, schemes=["rrk_bisection"], n_cells=128,
                         t_end=0.2, ic_width=0.03)
    assert main(["energy", path]) == 0
    rows = (tmp_path / "out" / "energy_RRK_bisection.csv").read_text().splitlines()
    assert rows[0] == "t,H,rel_drift,gamma"
    first = rows[1].split(",")
    assert first[3] == ""  # no step has happened at t = 0
    assert float(rows[2].split(",")[3]) == pytest.approx(1.0, abs=1e-3)


def test_energy_isolates_failing_scheme(tmp_path, capsys):
    """A numerical blowup in one scheme exits 3 but still writes the other
    schemes' traces and records the error in summary.json.  (ForestRuth's
    large negative substep is unstable here: the resting depth d0 + offset
    doubles the true characteristic speed relative to the declared
    sqrt(g*d0), and the bump sharpens into a bore.)"""
    path = _write_config(tmp_path, problem="shallow_water", domain=None,
                         n_cells=128, schemes=["rk4", "fr"], t_end=15.0,
                         ic_offset=1.0, ic_width=1.0, ic_amplitude=0.1)
    assert main(["energy", path]) == 3
    err = capsys.readouterr().err
    assert "numerical failure" in err and "ForestRuth" in err
    assert "non-positive total depth" in err
    out_dir = tmp_path / "out"
    assert (out_dir / "energy_RK4.csv").exists()
    assert not (out_dir / "energy_ForestRuth.csv").exists()
    summary = json.loads((out_dir / "summary.json").read_text())
    assert summary["schemes"]["ForestRuth"]["status"] == "failed"
    assert "step" in summary["schemes"]["ForestRuth"]["error"]
    assert summary["schemes"]["RK4"]["within_drift_threshold"] is True
    assert len(summary["failures"]) == 1


def test_energy_values_round_trip_17_digits(tmp_path):
    path = _write_config(tmp_path, schemes=["pefrl"], t_end=0.25)
    assert main(["energy", path]) == 0
    rows = (tmp_path / "out" / "energy_PEFRL.csv").read_text().splitlines()[1:]
    h_values = [float(r.split(",")[1]) for r in rows]
    # re-formatting at 17 significant digits reproduces the file exactly
    for row, h_val in zip(rows, h_values):
        assert f"{h_val:.17g}" == row.split(",")[1]


def test_energy_runs_are_byte_identical(tmp_path):
    path_a = _write_config(tmp_path, name="a.json",
                           output_dir=str(tmp_path / "out_a"))
    path_b = _write_config(tmp_path, name="b.json",
                           output_dir=str(tmp_path / "out_b"))
    assert main(["energy", path_a]) == 0
    assert main(["energy", path_b]) == 0
    for scheme in ("RK4", "PEFRL", "Leapfrog"):
        a = (tmp_path / "out_a" / f"energy_{scheme}.csv").read_bytes()
        b = (tmp_path / "out_b" / f"energy_{scheme}.csv").read_bytes()
        assert a == b


def test_energy_config_error_exit_code(tmp_path, capsys):
    path = _write_config(tmp_path, k=3)
    assert main(["energy", path]) == 2
    assert "config error" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# converge subcommand
# ---------------------------------------------------------------------------


def test_converge_end_to_end(tmp_path):
    path = _write_config(tmp_path, schemes=["rk4", "lf"], t_end=0.5)
    assert main(["converge", path, "--n", "16,32,64"]) == 0
    rows = list(csv.DictReader(
        (tmp_path / "out" / "convergence.csv").read_text().splitlines()))
    assert list(rows[0]) == ["scheme", "n_cells", "h", "error", "observed_order",
                             "rhs_evals"]
    by_scheme = {}
    for row in rows:
        by_scheme.setdefault(row["scheme"], []).append(row)
    assert set(by_scheme) == {"RK4", "Leapfrog"}
    for scheme, entries in by_scheme.items():
        assert [int(r["n_cells"]) for r in entries] == [16, 32, 64]
        assert entries[0]["observed_order"] == ""
        errors = [float(r["error"]) for r in entries]
        assert errors[0] > errors[1] > errors[2]
        expected = 2.0 if scheme == "Leapfrog" else 4.0
        for r in entries[1:]:
            assert float(r["observed_order"]) == pytest.approx(expected, abs=0.4)
        assert all(int(r["rhs_evals"]) > 0 for r in entries)


def test_converge_continues_past_failing_scheme(tmp_path, capsys):
    path = _write_config(tmp_path, schemes=["rrk_analytic", "rk4"], t_end=0.8)
    assert main(["converge", path, "--n", "16,32"]) == 3
    assert "numerical failure" in capsys.readouterr().err
    rows = list(csv.DictReader(
        (tmp_path / "out" / "convergence.csv").read_text().splitlines()))
    assert {row["scheme"] for row in rows} == {"RK4"}


def test_run_convergence_study_returns_rows_and_failures(tmp_path):
    config = parse_config(_write_config(tmp_path, schemes=["rk4"], t_end=0.5))
    rows, failures = run_convergence_study(config, [16, 32])
    assert failures == []
    assert all(isinstance(row, ConvergenceRow) for row in rows)
    assert rows[0].observed_order is None
    assert rows[1].observed_order == pytest.approx(4.0, abs=0.4)


@pytest.mark.parametrize("overrides,argv_n", [
    ({"problem": "shallow_water", "ic_offset": 1.0}, "16,32"),  # wave only
    ({"domain": [0.0, 2.0]}, "16,32"),                          # unit domain only
    ({"cfl": None, "dt": 0.01}, "16,32"),                       # cfl required
    ({}, "16"),                                                 # two refinements
    ({}, "32,16"),                                              # increasing
    ({}, "4,8"),                                                # n >= 2k
])
def test_converge_validation_exit_code(tmp_path, capsys, overrides, argv_n):
    path = _write_config(tmp_path, **overrides)
    assert main(["converge", path, "--n", argv_n]) == 2
    assert "config error" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# bench subcommand
# ---------------------------------------------------------------------------


def test_bench_end_to_end(tmp_path):
    path = _write_config(tmp_path, schemes=["rk4", "lf"], t_end=0.2)
    assert main(["bench", path, "--repeats", "3"]) == 0
    rows = list(csv.DictReader(
        (tmp_path / "out" / "timing.csv").read_text().splitlines()))
    assert list(rows[0]) == ["scheme", "median_seconds", "rhs_evals",
                             "seconds_per_rhs"]
    assert [row["scheme"] for row in rows] == ["RK4", "Leapfrog"]
    for row in rows:
        assert float(row["median_seconds"]) > 0.0
        assert float(row["seconds_per_rhs"]) > 0.0
    # same step count, so the work ratio is exactly the per-step eval ratio
    assert int(rows[0]["rhs_evals"]) == 4 * int(rows[1]["rhs_evals"])


# ---------------------------------------------------------------------------
# dump-ops subcommand
# ---------------------------------------------------------------------------


def test_dump_ops_end_to_end(capsys):
    assert main(["dump-ops", "--order", "2", "--cells", "8"]) == 0
    out = capsys.readouterr().out
    for name, shape in [("D", "(8x9)"), ("G", "(9x10)"), ("D_hat", "(10x9)"),
                        ("Q", "(10x10)"), ("P", "(9x9)"), ("B_hat", "(10x9)"),
                        ("L", "(10x10)"), ("I_D", "(10x9)"), ("I_G", "(9x10)")]:
        assert f"# operator {name} {shape}" in out
    for line in out.splitlines():
        if line.startswith("#"):
            continue
        r, c, v = line.split()
        int(r), int(c), float(v)  # triples parse

    assert main(["dump-ops", "--order", "2", "--cells", "8"]) == 0
    assert capsys.readouterr().out == out  # deterministic


def test_dump_ops_rejects_bad_order(capsys):
    assert main(["dump-ops", "--order", "3", "--cells", "8"]) == 2
    assert "config error" in capsys.readouterr().err
    assert main(["dump-ops", "--order", "4", "--cells", "4"]) == 2


def test_dump_ops_accepts_domain(capsys):
    assert main(["dump-ops", "--order", "2", "--cells", "8",
                 "--domain", "0,2"]) == 0
    capsys.readouterr()


# ---------------------------------------------------------------------------
# misc
# ---------------------------------------------------------------------------


def test_unknown_subcommand_is_usage_error():
    with pytest.raises(SystemExit):
        main(["frobnicate"])


def test_emit_summary_requires_records():
    with pytest.raises(ValueError, match="at least one record"):
        emit_summary([])


def test_output_dir_created_if_missing(tmp_path):
    nested = tmp_path / "deep" / "nested" / "dir"
    path = _write_config(tmp_path, schemes=["lf"], t_end=0.1,
                         output_dir=str(nested))
    assert main(["energy", path]) == 0
    assert (nested / "energy_Leapfrog.csv").exists()
