import json
import os

from qnphase.cli import main


def write_config(tmp_path, name="cli.json", **overrides):
    data = {
        "schema_version": 1,
        "name": "cli-scenario",
        "figure": "fig4",
        "resource": {"family": "noon", "n_excitations": 1},
        "q_nodes": 2,
        "plan": {"t_final": 3.0},
        "shot_model": {"kind": "gaussian", "xi": 1e-3},
        "sweep": {"axis": "xi", "grid": [1e-3, 1e-2]},
        "master_seed": 4,
        "n_test": 30,
        "n_validation": 30,
        "n_realizations": 2,
    }
    data.update(overrides)
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


def test_validate_exits_zero(capsys):
    assert main(["validate"]) == 0
    out = capsys.readouterr().out
    assert "[PASS]" in out
    assert "[FAIL]" not in out


def test_run_writes_results(tmp_path, capsys):
    config = write_config(tmp_path)
    code = main(["run", config, "--out-dir", str(tmp_path / "res")])
    assert code == 0
    rows = open(tmp_path / "res" / "cli-scenario" / "rows.csv").read().splitlines()
    assert len(rows) == 1 + 2 * 2  # header + grid points x realizations


def test_missing_field_exits_two_with_json_error(tmp_path, capsys):
    path = tmp_path / "broken.json"
    data = json.loads(open(write_config(tmp_path)).read())
    del data["plan"]
    path.write_text(json.dumps(data))
    code = main(["run", str(path), "--out-dir", str(tmp_path / "res")])
    assert code == 2
    err = json.loads(capsys.readouterr().err)
    assert err["error"]["type"] == "config"
    assert err["error"]["field"] == "plan"


def test_sweep_requires_grid(tmp_path, capsys):
    config = write_config(tmp_path, sweep={"axis": "xi", "grid": [1e-3]})
    code = main(["sweep", config, "--out-dir", str(tmp_path / "res")])
    assert code == 2
    err = json.loads(capsys.readouterr().err)
    assert "grid" in err["error"]["field"]


def test_sweep_emits_row_per_grid_point_and_realization(tmp_path):
    config = write_config(tmp_path)
    assert main(["sweep", config, "--out-dir", str(tmp_path / "res")]) == 0
    rows = open(tmp_path / "res" / "cli-scenario" / "rows.csv").read().splitlines()
    assert len(rows) == 1 + 4


def test_overwrite_protection(tmp_path, capsys):
    config = write_config(tmp_path)
    out = str(tmp_path / "res")
    assert main(["run", config, "--out-dir", out]) == 0
    assert main(["run", config, "--out-dir", out]) == 1
    err = json.loads(capsys.readouterr().err)
    assert err["error"]["type"] == "runtime"
    assert main(["run", config, "--out-dir", out, "--overwrite"]) == 0


def test_seed_override_changes_rows(tmp_path):
    config = write_config(tmp_path)
    main(["run", config, "--out-dir", str(tmp_path / "a")])
    main(["run", config, "--out-dir", str(tmp_path / "b"), "--seed", "123"])
    rows_a = open(tmp_path / "a" / "cli-scenario" / "rows.csv").read()
    rows_b = open(tmp_path / "b" / "cli-scenario" / "rows.csv").read()
    assert rows_a != rows_b


def test_desk_scale_caps_realizations(tmp_path):
    config = write_config(tmp_path, n_realizations=25, sweep={"axis": "xi", "grid": [1e-3]})
    main(["run", config, "--out-dir", str(tmp_path / "res")])
    rows = open(tmp_path / "res" / "cli-scenario" / "rows.csv").read().splitlines()
    assert len(rows) == 1 + 20  # capped at desk scale


def test_paper_scale_keeps_realizations(tmp_path):
    config = write_config(
        tmp_path, n_realizations=22, sweep={"axis": "xi", "grid": [1e-3]},
        n_test=20, n_validation=20,
    )
    main(["run", config, "--out-dir", str(tmp_path / "res"), "--paper-scale"])
    rows = open(tmp_path / "res" / "cli-scenario" / "rows.csv").read().splitlines()
    assert len(rows) == 1 + 22


def test_export_figure_data_subcommand(tmp_path):
    config = write_config(tmp_path)
    main(["run", config, "--out-dir", str(tmp_path / "res")])
    code = main([
        "export-figure-data", str(tmp_path / "res"), "fig4",
        "--out-dir", str(tmp_path / "export"),
    ])
    assert code == 0
    assert os.path.isfile(tmp_path / "export" / "fig4" / "errors.csv")
    assert os.path.isfile(tmp_path / "export" / "fig4" / "meta.json")


def test_export_unknown_figure_id(tmp_path, capsys):
    code = main(["export-figure-data", str(tmp_path), "fig99", "--out-dir", str(tmp_path)])
    assert code == 2


def test_qcr_search_subcommand(tmp_path, capsys):
    config = write_config(
        tmp_path,
        shot_model={"kind": "bernoulli", "m_shots": 500},
        sweep={"axis": "N", "grid": [1]},
        theta_policy="highest_slope",
    )
    code = main(["qcr-search", config, "--out-dir", str(tmp_path / "res")])
    assert code == 0
    out = capsys.readouterr().out
    assert "bound=" in out
    assert os.path.isfile(tmp_path / "res" / "cli-scenario" / "qcr.csv")


def test_threads_env_fallback(tmp_path, monkeypatch):
    config = write_config(tmp_path, sweep={"axis": "xi", "grid": [1e-3]})
    monkeypatch.setenv("QNPHASE_THREADS", "2")
    assert main(["run", config, "--out-dir", str(tmp_path / "res")]) == 0
    monkeypatch.setenv("QNPHASE_THREADS", "zebra")
    assert main(["run", config, "--out-dir", str(tmp_path / "res2")]) == 2
