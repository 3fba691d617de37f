"""Assemble tidy per-figure CSVs from scenario result directories.

The exporter is the contract between the harness and the plotting frontend:
``errors.csv`` (per grid point aggregates), ``ratios.csv`` (degree-N errors
against the matched N=1 scenario), plus pass-through ``samples.csv`` /
``signal.csv`` / ``qcr.csv`` and a ``meta.json`` carrying the parameters that
guide lines are computed from (never the line values themselves).
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

import numpy as np

from .harness import write_csv
from .resources import ResourceSpec, coherence, make_resource

__all__ = ["FIGURE_IDS", "export_figure_data"]

FIGURE_IDS = tuple(f"fig{i}" for i in range(2, 10))

ERROR_COLUMNS = [
    "scenario", "family", "coupling", "n_excitations", "q_nodes", "axis", "channel",
    "axis_value", "err_random", "err_slope", "dphi_std_mean", "dphi_std_min",
]
RATIO_COLUMNS = [
    "family", "coupling", "q_nodes", "n_excitations", "axis", "channel", "axis_value",
    "eta_random", "eta_slope",
]
DEPHASING_COLUMNS = ["p", "n_excitations", "err_random", "err_slope", "coherence"]


@dataclass(frozen=True)
class _LoadedResult:
    directory: str
    manifest: dict

    @property
    def config(self) -> dict:
        return self.manifest["config"]

    @property
    def aggregates(self) -> list[dict]:
        return self.manifest["aggregates"]

    def file(self, key: str) -> str | None:
        name = self.manifest.get("files", {}).get(key)
        return os.path.join(self.directory, name) if name else None


def _load_results(in_dir: str, figure_id: str) -> list[_LoadedResult]:
    found = []
    for entry in sorted(os.listdir(in_dir)):
        manifest_path = os.path.join(in_dir, entry, "result.json")
        if not os.path.isfile(manifest_path):
            continue
        with open(manifest_path, "r", encoding="utf-8") as fh:
            manifest = json.load(fh)
        if manifest.get("config", {}).get("figure") == figure_id:
            found.append(_LoadedResult(os.path.join(in_dir, entry), manifest))
    return found


def _partner_key(config: dict) -> tuple:
    """Everything a ratio comparison must share, except the excitation degree."""
    sweep = config["sweep"]
    return (
        config["resource"]["family"],
        config["coupling_type"],
        config["q_nodes"],
        config["feature_map"],
        sweep["axis"],
        tuple(sweep["grid"]),
        sweep.get("channel"),
        tuple(config["plan"]["window"]) if config["plan"].get("window") else None,
    )


def _read_csv_rows(path: str) -> tuple[list[str], list[list[str]]]:
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln for ln in fh.read().splitlines() if ln]
    header = lines[0].split(",")
    return header, [ln.split(",") for ln in lines[1:]]


def export_figure_data(in_dir: str, figure_id: str, out_dir: str, overwrite: bool = False) -> str:
    if figure_id not in FIGURE_IDS:
        raise ValueError(f"unknown figure id {figure_id!r} (expected one of {FIGURE_IDS})")
    results = _load_results(in_dir, figure_id)
    if not results:
        raise FileNotFoundError(f"no results tagged {figure_id!r} under {in_dir}")

    target = os.path.join(out_dir, figure_id)
    os.makedirs(target, exist_ok=True)
    meta_path = os.path.join(target, "meta.json")
    if os.path.exists(meta_path) and not overwrite:
        raise FileExistsError(f"{meta_path} exists (pass overwrite to replace)")

    error_rows = []
    for res in results:
        cfg = res.config
        for agg in res.aggregates:
            error_rows.append([
                cfg["name"], cfg["resource"]["family"], cfg["coupling_type"],
                cfg["resource"]["n_excitations"], cfg["q_nodes"],
                agg["axis"], cfg["sweep"].get("channel") or "",
                agg["axis_value"],
                agg["mean_err_random"], agg["mean_err_slope"],
                agg["mean_dphi_std"], agg["min_dphi_std"],
            ])
    write_csv(os.path.join(target, "errors.csv"), ERROR_COLUMNS, error_rows)

    ratio_rows = []
    by_partner: dict[tuple, dict[int, _LoadedResult]] = {}
    for res in results:
        if res.config["sweep"]["axis"] == "N":
            continue
        by_partner.setdefault(_partner_key(res.config), {})[res.config["resource"]["n_excitations"]] = res
    for key, group in sorted(by_partner.items(), key=lambda kv: str(kv[0])):
        base = group.get(1)
        if base is None:
            continue
        for n, res in sorted(group.items()):
            if n == 1:
                continue
            cfg = res.config
            for agg_1, agg_n in zip(base.aggregates, res.aggregates):
                def ratio(field):
                    num, den = agg_1[field], agg_n[field]
                    if num is None or den is None or not np.isfinite(num) or not np.isfinite(den) or den == 0:
                        return float("nan")
                    return num / den
                ratio_rows.append([
                    cfg["resource"]["family"], cfg["coupling_type"], cfg["q_nodes"], n,
                    agg_n["axis"], cfg["sweep"].get("channel") or "",
                    agg_n["axis_value"],
                    ratio("mean_err_random"), ratio("mean_err_slope"),
                ])

    # N-axis ratio curves (ratios against the N=1 grid point of the same scenario)
    for res in results:
        cfg = res.config
        if cfg["sweep"]["axis"] != "N":
            continue
        base = next((a for a in res.aggregates if int(a["axis_value"]) == 1), None)
        if base is None:
            continue
        for agg in res.aggregates:
            n = int(agg["axis_value"])
            if n == 1:
                continue
            def ratio(field):
                num, den = base[field], agg[field]
                if num is None or den is None or not np.isfinite(num) or not np.isfinite(den) or den == 0:
                    return float("nan")
                return num / den
            ratio_rows.append([
                cfg["resource"]["family"], cfg["coupling_type"], cfg["q_nodes"], n,
                "N", "", agg["axis_value"], ratio("mean_err_random"), ratio("mean_err_slope"),
            ])
    if ratio_rows:
        write_csv(os.path.join(target, "ratios.csv"), RATIO_COLUMNS, ratio_rows)

    dephasing_rows = []
    for res in results:
        cfg = res.config
        if cfg["sweep"]["axis"] != "p":
            continue
        n = cfg["resource"]["n_excitations"]
        for agg in res.aggregates:
            p = float(agg["axis_value"])
            rho = make_resource(ResourceSpec(cfg["resource"]["family"], n, p), n + 1)
            dephasing_rows.append([p, n, agg["mean_err_random"], agg["mean_err_slope"], coherence(rho)])
    if dephasing_rows:
        write_csv(os.path.join(target, "dephasing.csv"), DEPHASING_COLUMNS, dephasing_rows)

    for passthrough, out_name in (("samples", "samples.csv"), ("signal", "signal.csv")):
        merged_header: list[str] | None = None
        merged: list[list[str]] = []
        for res in results:
            path = res.file(passthrough)
            if path is None:
                continue
            header, rows = _read_csv_rows(path)
            n = res.config["resource"]["n_excitations"]
            header = ["scenario", "n_excitations"] + header
            rows = [[res.config["name"], str(n)] + row for row in rows]
            merged_header = header
            merged.extend(rows)
        if merged:
            write_csv(os.path.join(target, out_name), merged_header, merged)

    qcr_header: list[str] | None = None
    qcr_rows: list[list[str]] = []
    for res in results:
        path = os.path.join(res.directory, "qcr.csv")
        if os.path.isfile(path):
            header, rows = _read_csv_rows(path)
            qcr_header = header
            qcr_rows.extend(rows)
    if qcr_rows:
        write_csv(os.path.join(target, "qcr.csv"), qcr_header, qcr_rows)

    m_shots = sorted({
        res.config["shot_model"]["m_shots"]
        for res in results
        if res.config["shot_model"]["kind"] == "bernoulli"
    })
    meta = {
        "figure": figure_id,
        "scenarios": [res.config["name"] for res in results],
        "n_values": sorted({res.config["resource"]["n_excitations"] for res in results}
                           | {int(v) for res in results if res.config["sweep"]["axis"] == "N"
                              for v in res.config["sweep"]["grid"]}),
        "q_values": sorted({res.config["q_nodes"] for res in results}),
        "m_shots": m_shots[0] if m_shots else None,
        "guides": {"sql": "sqrt(N)", "hl": "N", "qcr": "1/(sqrt(M)*N)"},
    }
    with open(meta_path, "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2)
    return target
