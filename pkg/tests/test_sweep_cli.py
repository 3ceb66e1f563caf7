import csv
import json

import numpy as np
import pytest

from vacuum_engines import presets, qubit_chain, sweep, validate
from vacuum_engines.cli import main
from vacuum_engines.errors import ConfigError


def write(tmp_path, doc, name="c.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return path


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_two_qubit_log_sweep():
    cfg = sweep.parse_config(
        {"model": "two_qubit", "parameters": {"gamma": {"start": 1e-2, "stop": 1e2, "steps": 101, "scale": "log"}}}
    )
    result = sweep.run_sweep(cfg)
    assert len(result.rows) == 101
    etas = [r["efficiency"] for r in result.rows]
    assert np.all(np.diff(etas) < 0)
    assert result.rows[0]["gamma"] == pytest.approx(1e-2)


@pytest.mark.parametrize(
    "doc,field",
    [
        ({"model": "nope", "parameters": {"g": [1]}}, "model"),
        ({"model": "two_qubit", "parameters": {"gamma": {"start": 1, "stop": 2, "steps": 0}}}, "parameters.gamma.steps"),
        ({"model": "two_qubit", "parameters": {"gamma": []}}, "parameters.gamma"),
        ({"model": "chain_ff", "parameters": {"g": [1.0]}}, "parameters.n"),
        ({"model": "chain_ff", "parameters": {"n": [3.5], "g": [1.0]}}, "parameters.n"),
        ({"model": "two_qubit", "parameters": {"gamma": [1]}, "output": {"format": "xml"}}, "output.format"),
        ({"model": "two_qubit", "parameters": {"gamma": {"start": 0, "stop": 1, "steps": 3, "scale": "log"}}},
         "parameters.gamma"),
        ({"model": "two_qubit", "parameters": {"beta": [1]}}, "parameters.beta"),
        ({"model": "two_qubit", "parameters": {"gamma": [1]}, "parallelism": 0}, "parallelism"),
    ],
)
def test_config_errors_name_the_field(doc, field):
    with pytest.raises(ConfigError) as info:
        sweep.parse_config(doc)
    assert info.value.field == field


def test_rows_ordered_lexicographically_and_errors_captured():
    cfg = sweep.parse_config({"model": "chain_ff", "parameters": {"n": [2, 3], "g": [0.0, 1.0]}})
    rows = sweep.run_sweep(cfg).rows
    assert [(r["g"], r["n"]) for r in rows] == [(0.0, 2), (0.0, 3), (1.0, 2), (1.0, 3)]
    assert rows[0]["error"].startswith("DelegationNotice")
    assert rows[1]["error"] == "" and rows[1]["efficiency"] is None


def test_csv_round_trip_and_empty_efficiency():
    text = sweep.table_to_csv(["a", "efficiency"], [{"a": 0.1 + 0.2, "efficiency": None}])
    line = text.splitlines()[1]
    value, eta = line.split(",")
    assert float(value) == 0.1 + 0.2
    assert eta == ""


@pytest.mark.parametrize("model,params", [
    ("two_osc", {"k0": [1.0], "g": [0.0, 1.0]}),
    ("network", {"n": [3], "k0": [1.0], "g": [0.5]}),
    ("chain_osc", {"n": [3, 10]}),
    ("lattice", {"m_side": [4], "dim": [1, 2, 3]}),
    ("chain_exact", {"n": [4], "g": [1.0]}),
    ("open_chain", {"n": [4], "g": [0.05]}),
    ("dynamics", {"gamma": [1.0], "delta": [0.0, 0.2], "gamma_m": [5.0], "spectral_density": [0.01]}),
])
def test_every_model_runs(model, params):
    rows = sweep.run_sweep(sweep.parse_config({"model": model, "parameters": params})).rows
    assert rows
    assert any(r["error"] == "" for r in rows)


def test_dynamics_sweep_records_degenerate_point():
    cfg = sweep.parse_config({"model": "dynamics", "parameters": {
        "gamma": [1.0], "delta": [0.0, 0.3], "gamma_m": [5.0], "spectral_density": [0.01]}})
    rows = sweep.run_sweep(cfg).rows
    assert rows[0]["error"].startswith("DegenerateRelaxation")
    assert rows[1]["power"] > 0


def test_parallel_output_identical(tmp_path):
    doc = {"model": "chain_ff", "parameters": {"g": {"start": 0, "stop": 3, "steps": 13}, "n": [3, 4, 7]}}
    cfg = write(tmp_path, doc)
    assert main(["sweep", "--config", str(cfg), "--output", str(tmp_path / "a.csv")]) == 0
    assert main(["--jobs", "3", "sweep", "--config", str(cfg), "--output", str(tmp_path / "b.csv")]) == 0
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    manifest = json.loads((tmp_path / "a.csv.manifest.json").read_text())
    assert manifest["parameters"]["model"] == "chain_ff"
    assert "package_version" in manifest


def test_sweep_json_output(tmp_path):
    cfg = write(tmp_path, {"model": "two_osc", "parameters": {"k0": [1.0], "g": [0.0, 1.0]}})
    out = tmp_path / "o.json"
    assert main(["sweep", "--config", str(cfg), "--format", "json", "--output", str(out)]) == 0
    data = json.loads(out.read_text())
    assert data["rows"][0]["efficiency"] is None
    assert data["rows"][1]["work"] == pytest.approx(0.0575, abs=1e-4)


def test_cli_exit_codes(tmp_path, capsys):
    assert main(["two-qubit", "--omega-a", "1.2", "--omega-b", "0.8", "--g", "2"]) == 0
    assert "work" in capsys.readouterr().out
    assert main(["two-qubit", "--omega-a", "0.8", "--omega-b", "1.2", "--g", "2"]) == 1
    with pytest.raises(SystemExit) as info:
        main(["chain", "--g", "1"])
    assert info.value.code == 1
    bad = write(tmp_path, {"model": "chain_ff"})
    assert main(["sweep", "--config", str(bad)]) == 1
    assert main(["sweep", "--config", str(tmp_path / "missing.json")]) == 1


def test_cli_model_commands(tmp_path, capsys):
    k = tmp_path / "k.json"
    k.write_text(json.dumps([[2.0, -1.0], [-1.0, 2.0]]))
    for argv in (
        ["chain", "--n", "6", "--g", "2"],
        ["chain", "--n", "4", "--g", "2", "--method", "exact", "--samples", "1000", "--seed", "1"],
        ["open-chain", "--n", "4", "--g", "0.05", "--regime", "weak"],
        ["oscillator", "--two", "--k0", "1", "--g", "1"],
        ["oscillator", "--two", "--k0", "1", "--g", "1", "--n-max", "4"],
        ["oscillator", "--chain", "10"],
        ["oscillator", "--matrix", str(k)],
        ["lattice", "--m-side", "5", "--dim", "2"],
        ["dynamics", "--omega-a", "1.2", "--omega-b", "0.8", "--g", "2", "--g-m", "10", "--spectral-density", "0.01"],
        ["dynamics", "--omega-a", "0.5", "--omega-b", "0.5", "--g", "10", "--g-m", "50", "--trajectory", "50"],
    ):
        assert main(argv) == 0, argv
    out = capsys.readouterr().out
    assert "work_per_oscillator" in out and "p111" in out


def test_cli_json_format(capsys):
    assert main(["--format", "json", "chain", "--n", "3", "--g", "0"]) == 0
    row = json.loads(capsys.readouterr().out)["rows"][0]
    assert row["efficiency"] is None


@pytest.mark.parametrize("name", ["fig3", "fig4", "figA6", "figA7"])
def test_presets_write_files(tmp_path, name):
    assert main(["preset", name, "--output", str(tmp_path)]) == 0
    assert (tmp_path / f"{name}.csv").exists()
    assert (tmp_path / f"{name}.csv.manifest.json").exists()


def test_fig3_preset_weak_limit():
    _, rows, _ = presets.fig3()
    assert rows[0]["efficiency"] == pytest.approx(0.5, abs=1e-4)
    assert [r["gamma"] for r in rows] == sorted(r["gamma"] for r in rows)


def test_figA6_peak_near_measurement_time():
    _, rows, params = presets.figA6()
    assert presets.peak_time_from_rows(rows) == pytest.approx(params["t_m"], rel=0.1)


def test_fig8_preset_shape():
    _, rows, _ = presets.fig8(caps={1: 200, 2: 30, 3: 10})
    d1 = [r["work_per_oscillator"] for r in rows if r["dim"] == 1]
    assert np.all(np.diff(d1) > 0)
    for dim in (2, 3):
        w = [r["work_per_oscillator"] for r in rows if r["dim"] == dim]
        steps = np.diff(w)
        assert steps[-1] < steps[0]


def test_fig5_preset_small():
    _, rows, _ = presets.fig5(n_min=3, n_max=5, g_max=1.0, g_step=0.5)
    assert len(rows) == 9


def test_unknown_preset():
    with pytest.raises(KeyError):
        presets.run_preset("fig99", ".")


def test_validate_quick_passes(tmp_path):
    out = tmp_path / "report.json"
    assert main(["validate", "--output", str(out)]) == 0
    report = json.loads(out.read_text())
    assert report["passed"] and report["level"] == "quick"
    assert {s["name"] for s in report["suites"]} == set(validate.SUITES)


def test_validate_catches_sign_error_in_bogoliubov_rotation(monkeypatch, tmp_path):
    original = qubit_chain._rotation

    def mutated(omega, g, p):
        u2, v2, omega_p = original(omega, g, p)
        return u2, -v2, omega_p

    monkeypatch.setattr(qubit_chain, "_rotation", mutated)
    report = validate.run_validation("quick", suites=["free_fermions_vs_exact"])
    assert not report["passed"]
    assert main(["validate", "--output", str(tmp_path / "r.json")]) == 2
