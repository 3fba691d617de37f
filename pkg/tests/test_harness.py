import json
import os

import numpy as np
import pytest

from qnphase.config import ScenarioConfig, SweepSpec
from qnphase.evolution import NoiseConfig
from qnphase.export import export_figure_data
from qnphase.harness import ROW_COLUMNS, run_qcr_search, run_scenario
from qnphase.measurement import ShotModel
from qnphase.network import CouplingType, NetworkRealization
from qnphase.resources import ResourceSpec


def small_config(**overrides):
    base = dict(
        name="small",
        resource=ResourceSpec("noon", 1),
        q_nodes=2,
        coupling_type=CouplingType.ENERGY_PRESERVING,
        noise=NoiseConfig(),
        t_final=4.0,
        shot=ShotModel.gaussian(1e-3),
        sweep=SweepSpec("xi", (1e-3,)),
        master_seed=11,
        n_train=10,
        n_test=40,
        n_validation=40,
        n_realizations=3,
    )
    base.update(overrides)
    return ScenarioConfig(**base)


def test_run_scenario_row_schema():
    result = run_scenario(small_config())
    assert len(result.rows) == 3
    for row in result.rows:
        assert set(row) == set(ROW_COLUMNS)
        assert row["axis"] == "xi"
        assert np.isfinite(row["err_random"])
        assert np.isfinite(row["err_slope"])
        assert row["dphi_std"] == pytest.approx(row["err_slope"] * np.sqrt(40))
    assert len(result.aggregates) == 1
    agg = result.aggregates[0]
    assert agg["n_realizations"] == 3
    assert agg["mean_err_random"] == pytest.approx(
        np.mean([r["err_random"] for r in result.rows])
    )


def test_noise_free_scenario_has_negligible_error():
    result = run_scenario(small_config(shot=ShotModel.gaussian(0.0), sweep=SweepSpec("xi", (0.0,))))
    for row in result.rows:
        assert row["err_random"] < 1e-6
        assert row["err_slope"] < 1e-6


def test_rerun_is_bitwise_identical(tmp_path):
    cfg = small_config(record_samples=True, signal_scan=16)
    a = run_scenario(cfg)
    b = run_scenario(cfg)
    dir_a = a.write(str(tmp_path / "a"))
    dir_b = b.write(str(tmp_path / "b"))
    for name in ("rows.csv", "samples.csv", "signal.csv"):
        assert (open(os.path.join(dir_a, name)).read()
                == open(os.path.join(dir_b, name)).read())


def test_thread_count_does_not_change_results():
    cfg = small_config(sweep=SweepSpec("xi", (1e-3, 1e-2)), n_realizations=2)
    seq = run_scenario(cfg, threads=1)
    par = run_scenario(cfg, threads=2)
    for row_a, row_b in zip(seq.rows, par.rows):
        assert row_a == row_b


def test_networks_shared_across_grid_points():
    cfg = small_config(sweep=SweepSpec("xi", (1e-3, 1e-2)), n_realizations=2)
    result = run_scenario(cfg)
    seeds = {}
    for row in result.rows:
        seeds.setdefault(row["realization"], set()).add(row["network_seed"])
    for values in seeds.values():
        assert len(values) == 1


def test_n_sweep_changes_resource_degree():
    cfg = small_config(sweep=SweepSpec("N", (1, 2)), n_realizations=2)
    result = run_scenario(cfg)
    by_grid = {g: [r for r in result.rows if r["grid_index"] == g] for g in (0, 1)}
    assert all(r["n_excitations"] == 1 for r in by_grid[0])
    assert all(r["n_excitations"] == 2 for r in by_grid[1])


def test_gamma_sweep_patches_channel():
    cfg = small_config(
        sweep=SweepSpec("gamma", (0.0, 0.05), channel="dephasing"),
        n_realizations=1,
        t_final=2.0,
    )
    result = run_scenario(cfg)
    errs = [r["err_slope"] for r in result.rows]
    assert len(errs) == 2
    assert all(np.isfinite(e) for e in errs)


def test_time_sweep_evaluates_at_grid_times():
    cfg = small_config(sweep=SweepSpec("t", (2.0, 4.0)), n_realizations=2)
    result = run_scenario(cfg)
    assert {r["axis_value"] for r in result.rows} == {2.0, 4.0}


def test_lambda_sweep_uses_fixed_values():
    cfg = small_config(sweep=SweepSpec("lambda", (1e-8, 1e-2)), n_realizations=1)
    result = run_scenario(cfg)
    for row in result.rows:
        assert row["lambda_random"] == row["axis_value"]
        assert row["lambda_slope"] == row["axis_value"]


def test_n_train_sweep():
    cfg = small_config(sweep=SweepSpec("n_train", (4, 10)), n_realizations=1)
    result = run_scenario(cfg)
    assert len(result.rows) == 2


def test_window_integrated_features():
    cfg = small_config(window=(3.0, 4.0))
    result = run_scenario(cfg)
    assert all(np.isfinite(r["err_random"]) for r in result.rows)


def test_theta_policy_zero_skips_slope_branch():
    result = run_scenario(small_config(theta_policy="zero"))
    for row in result.rows:
        assert np.isfinite(row["err_random"])
        assert np.isnan(row["err_slope"])


def test_xi_sweep_requires_gaussian_model():
    cfg = small_config(shot=ShotModel.bernoulli(100))
    with pytest.raises(ValueError, match="gaussian"):
        run_scenario(cfg)


def test_result_write_and_overwrite(tmp_path):
    result = run_scenario(small_config(n_realizations=1))
    target = result.write(str(tmp_path))
    assert os.path.isfile(os.path.join(target, "result.json"))
    with pytest.raises(FileExistsError):
        result.write(str(tmp_path))
    result.write(str(tmp_path), overwrite=True)
    manifest = json.load(open(os.path.join(target, "result.json")))
    assert manifest["config"]["name"] == "small"
    assert manifest["config_hash"]
    assert manifest["files"]["rows"] == "rows.csv"
    header = open(os.path.join(target, "rows.csv")).readline().strip()
    assert header == ",".join(ROW_COLUMNS)


def test_qcr_search_entries_and_best_realization(tmp_path):
    cfg = small_config(
        shot=ShotModel.bernoulli(2000),
        sweep=SweepSpec("N", (1, 2)),
        n_realizations=4,
        theta_policy="highest_slope",
    )
    search = run_qcr_search(cfg)
    assert len(search.entries) == 2
    for entry, n in zip(search.entries, (1, 2)):
        assert entry["qcr_bound"] == pytest.approx(1.0 / (np.sqrt(2000) * n))
        assert entry["dphi_min"] <= entry["dphi_ave"]
    target = search.write(str(tmp_path))
    assert os.path.isfile(os.path.join(target, "qcr.csv"))
    best = NetworkRealization.from_json(
        open(os.path.join(target, "best_realization_grid0.json")).read()
    )
    assert best.q_nodes == 2


def test_qcr_search_requires_bernoulli():
    with pytest.raises(ValueError, match="bernoulli"):
        run_qcr_search(small_config())


def test_export_figure_data(tmp_path):
    out = tmp_path / "results"
    for n in (1, 2):
        cfg = small_config(
            name=f"figx-n{n}",
            resource=ResourceSpec("noon", n),
            sweep=SweepSpec("xi", (1e-3, 1e-2)),
            n_realizations=2,
        )
        cfg = ScenarioConfig(**{**cfg.__dict__, "figure": "fig4"})
        run_scenario(cfg).write(str(out))
    target = export_figure_data(str(out), "fig4", str(tmp_path / "export"))
    errors = open(os.path.join(target, "errors.csv")).read().splitlines()
    assert errors[0].startswith("scenario,family")
    assert len(errors) == 1 + 4  # two scenarios x two grid points
    ratios = open(os.path.join(target, "ratios.csv")).read().splitlines()
    assert len(ratios) == 1 + 2  # N=2 vs N=1 at two grid points
    meta = json.load(open(os.path.join(target, "meta.json")))
    assert meta["figure"] == "fig4"
    assert meta["n_values"] == [1, 2]
    assert meta["guides"]["qcr"] == "1/(sqrt(M)*N)"


def test_export_requires_matching_results(tmp_path):
    os.makedirs(tmp_path / "empty", exist_ok=True)
    with pytest.raises(FileNotFoundError):
        export_figure_data(str(tmp_path / "empty"), "fig4", str(tmp_path / "out"))


def test_error_nondecreasing_in_noise_strength():
    # compact version of the noise-degradation property
    cfg = small_config(
        t_final=6.0,
        sweep=SweepSpec("gamma", (1e-3, 3e-2, 0.3), channel="decay"),
        n_realizations=6,
        theta_policy="highest_slope",
    )
    result = run_scenario(cfg, threads=2)
    means = [a["mean_err_slope"] for a in result.aggregates]
    assert means[-1] > means[0]
    violations = sum(1 for a, b in zip(means, means[1:]) if b < a)
    assert violations <= 1


def test_error_nonincreasing_in_training_size():
    cfg = small_config(
        sweep=SweepSpec("n_train", (3, 6, 12, 24)),
        n_realizations=6,
        theta_policy="zero",
    )
    result = run_scenario(cfg)
    means = [a["mean_err_random"] for a in result.aggregates]
    assert means[-1] < means[0]
    violations = sum(1 for a, b in zip(means, means[1:]) if b > a)
    assert violations <= 1
