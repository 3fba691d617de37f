"""Versioned JSON scenario schema: parsing, validation and hashing.

Every scenario carries exactly one sweep axis; plain runs use a single-point
grid. Config errors carry the offending field path for machine-readable
reporting.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

from .evolution import DEFAULT_CASCADE_STEP, DEFAULT_STEP, NoiseConfig
from .measurement import ShotModel
from .network import CouplingType
from .readout import FEATURE_KINDS, default_lambda_grid
from .resources import RESOURCE_FAMILIES, ResourceSpec

__all__ = [
    "SCHEMA_VERSION",
    "SWEEP_AXES",
    "ConfigError",
    "SweepSpec",
    "LambdaPolicy",
    "ScenarioConfig",
    "parse_scenario",
    "load_config_file",
    "config_hash",
]

SCHEMA_VERSION = 1
SWEEP_AXES = ("xi", "gamma", "p", "Q", "N", "t", "lambda", "n_train")
NOISE_CHANNELS = ("decay", "dephasing", "depolarizing")
THETA_POLICIES = ("both", "zero", "highest_slope")


class ConfigError(ValueError):
    """Schema violation; ``field`` holds the dotted path of the offending entry."""

    def __init__(self, field_path: str, message: str):
        self.field = field_path
        super().__init__(f"{field_path}: {message}")


@dataclass(frozen=True)
class SweepSpec:
    axis: str
    grid: tuple[float, ...]
    channel: str | None = None  # which noise rate a "gamma" sweep drives

    def __post_init__(self) -> None:
        if self.axis not in SWEEP_AXES:
            raise ConfigError("sweep.axis", f"must be one of {SWEEP_AXES}, got {self.axis!r}")
        if not self.grid:
            raise ConfigError("sweep.grid", "grid must not be empty")
        if self.axis == "gamma" and self.channel not in NOISE_CHANNELS:
            raise ConfigError("sweep.channel", f"gamma sweeps need a channel from {NOISE_CHANNELS}")
        object.__setattr__(self, "grid", tuple(float(v) for v in self.grid))


@dataclass(frozen=True)
class LambdaPolicy:
    """Either a fixed ridge parameter or held-out selection over a grid."""

    kind: str
    value: float | None = None
    grid: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if self.kind == "fixed":
            if self.value is None or self.value <= 0:
                raise ConfigError("lambda_policy.value", "fixed policy needs a positive value")
        elif self.kind == "select":
            grid = tuple(float(v) for v in (self.grid if self.grid is not None else default_lambda_grid()))
            if len(grid) < 3:
                raise ConfigError("lambda_policy.grid", "selection grid needs at least three points")
            object.__setattr__(self, "grid", grid)
        else:
            raise ConfigError("lambda_policy.kind", f"must be 'fixed' or 'select', got {self.kind!r}")

    def to_dict(self) -> dict:
        if self.kind == "fixed":
            return {"kind": "fixed", "value": self.value}
        return {"kind": "select", "grid": list(self.grid)}


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    resource: ResourceSpec
    q_nodes: int
    coupling_type: CouplingType
    noise: NoiseConfig
    t_final: float
    shot: ShotModel
    sweep: SweepSpec
    master_seed: int
    n_steps: int | None = None
    record_stride: int = 1
    window: tuple[float, float] | None = None
    n_train: int = 10
    n_test: int = 100
    n_validation: int = 100
    n_realizations: int = 50
    lambda_policy: LambdaPolicy = field(default_factory=lambda: LambdaPolicy("select"))
    theta_policy: str = "both"
    feature_map: str = "linear"
    cascade_decay: float = 1.0
    figure: str | None = None
    record_samples: bool = False
    signal_scan: int | None = None

    def __post_init__(self) -> None:
        if self.q_nodes < 1:
            raise ConfigError("q_nodes", "need at least one node")
        if self.t_final <= 0:
            raise ConfigError("t_final", "must be positive")
        if self.n_train < 1:
            raise ConfigError("n_train", "must be >= 1")
        if self.n_test < 2:
            raise ConfigError("n_test", "must be >= 2")
        if self.n_validation < 2:
            raise ConfigError("n_validation", "must be >= 2")
        if self.n_realizations < 1:
            raise ConfigError("n_realizations", "must be >= 1")
        if self.theta_policy not in THETA_POLICIES:
            raise ConfigError("theta_policy", f"must be one of {THETA_POLICIES}")
        if self.feature_map not in FEATURE_KINDS:
            raise ConfigError("feature_map", f"must be one of {FEATURE_KINDS}")
        if self.sweep.axis == "t" and self.window is not None:
            raise ConfigError("sweep.axis", "time sweeps are incompatible with an integration window")
        if self.window is not None:
            ta, tb = self.window
            if not (0.0 <= ta < tb <= self.t_final + 1e-12):
                raise ConfigError("window", f"[{ta}, {tb}] not inside [0, {self.t_final}]")
            object.__setattr__(self, "window", (float(ta), float(tb)))

    @property
    def resolved_n_steps(self) -> int:
        if self.n_steps is not None:
            return self.n_steps
        dt = DEFAULT_CASCADE_STEP if self.coupling_type is CouplingType.CASCADING else DEFAULT_STEP
        return max(1, round(self.t_final / dt))

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "name": self.name,
            "figure": self.figure,
            "resource": {
                "family": self.resource.family,
                "n_excitations": self.resource.n_excitations,
                "dephase_p": self.resource.dephase_p,
            },
            "q_nodes": self.q_nodes,
            "coupling_type": self.coupling_type.value,
            "noise": {
                "decay": self.noise.decay,
                "dephasing": self.noise.dephasing,
                "depolarizing": self.noise.depolarizing,
            },
            "plan": {
                "t_final": self.t_final,
                "n_steps": self.n_steps,
                "record_stride": self.record_stride,
                "window": list(self.window) if self.window else None,
            },
            "shot_model": self.shot.to_dict(),
            "n_train": self.n_train,
            "n_test": self.n_test,
            "n_validation": self.n_validation,
            "n_realizations": self.n_realizations,
            "lambda_policy": self.lambda_policy.to_dict(),
            "theta_policy": self.theta_policy,
            "feature_map": self.feature_map,
            "cascade_decay": self.cascade_decay,
            "master_seed": self.master_seed,
            "sweep": {
                "axis": self.sweep.axis,
                "grid": list(self.sweep.grid),
                "channel": self.sweep.channel,
            },
            "record_samples": self.record_samples,
            "signal_scan": self.signal_scan,
        }


def _require(data: dict, key: str, path: str):
    if key not in data:
        raise ConfigError(f"{path}{key}", "missing required field")
    return data[key]


def _get_number(data: dict, key: str, path: str, default=None, required: bool = False):
    if key not in data:
        if required:
            raise ConfigError(f"{path}{key}", "missing required field")
        return default
    value = data[key]
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ConfigError(f"{path}{key}", f"expected a number, got {type(value).__name__}")
    return value


def parse_scenario(data: dict, path: str = "") -> ScenarioConfig:
    if not isinstance(data, dict):
        raise ConfigError(path or "<root>", "scenario must be a JSON object")
    version = _get_number(data, "schema_version", path, required=True)
    if int(version) != SCHEMA_VERSION:
        raise ConfigError(f"{path}schema_version", f"unsupported version {version} (expected {SCHEMA_VERSION})")

    res = _require(data, "resource", path)
    if not isinstance(res, dict):
        raise ConfigError(f"{path}resource", "must be an object")
    family = _require(res, "family", f"{path}resource.")
    if family not in RESOURCE_FAMILIES:
        raise ConfigError(f"{path}resource.family", f"must be one of {RESOURCE_FAMILIES}")
    try:
        resource = ResourceSpec(
            family=family,
            n_excitations=int(_get_number(res, "n_excitations", f"{path}resource.", required=True)),
            dephase_p=float(_get_number(res, "dephase_p", f"{path}resource.", default=1.0)),
        )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"{path}resource", str(exc)) from exc

    coupling_raw = data.get("coupling_type", "energy_preserving")
    try:
        coupling = CouplingType(coupling_raw)
    except ValueError as exc:
        raise ConfigError(f"{path}coupling_type", f"unknown coupling type {coupling_raw!r}") from exc

    noise_raw = data.get("noise", {})
    if not isinstance(noise_raw, dict):
        raise ConfigError(f"{path}noise", "must be an object")
    unknown = set(noise_raw) - set(NOISE_CHANNELS)
    if unknown:
        raise ConfigError(f"{path}noise.{sorted(unknown)[0]}", "unknown noise channel")
    try:
        noise = NoiseConfig(
            decay=float(noise_raw.get("decay", 0.0)),
            dephasing=float(noise_raw.get("dephasing", 0.0)),
            depolarizing=float(noise_raw.get("depolarizing", 0.0)),
        )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"{path}noise", str(exc)) from exc

    plan_raw = _require(data, "plan", path)
    if not isinstance(plan_raw, dict):
        raise ConfigError(f"{path}plan", "must be an object")
    t_final = float(_get_number(plan_raw, "t_final", f"{path}plan.", required=True))
    n_steps_raw = plan_raw.get("n_steps")
    n_steps = None if n_steps_raw is None else int(n_steps_raw)
    window_raw = plan_raw.get("window")
    window = None
    if window_raw is not None:
        if not (isinstance(window_raw, (list, tuple)) and len(window_raw) == 2):
            raise ConfigError(f"{path}plan.window", "must be a [t_a, t_b] pair")
        window = (float(window_raw[0]), float(window_raw[1]))

    shot_raw = _require(data, "shot_model", path)
    if not isinstance(shot_raw, dict):
        raise ConfigError(f"{path}shot_model", "must be an object")
    kind = _require(shot_raw, "kind", f"{path}shot_model.")
    try:
        if kind == "gaussian":
            shot = ShotModel.gaussian(float(_get_number(shot_raw, "xi", f"{path}shot_model.", required=True)))
        elif kind == "bernoulli":
            shot = ShotModel.bernoulli(int(_get_number(shot_raw, "m_shots", f"{path}shot_model.", required=True)))
        else:
            raise ConfigError(f"{path}shot_model.kind", f"must be 'gaussian' or 'bernoulli', got {kind!r}")
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"{path}shot_model", str(exc)) from exc

    lam_raw = data.get("lambda_policy", {"kind": "select"})
    if not isinstance(lam_raw, dict):
        raise ConfigError(f"{path}lambda_policy", "must be an object")
    lam_kind = lam_raw.get("kind", "select")
    lambda_policy = LambdaPolicy(
        kind=lam_kind,
        value=lam_raw.get("value"),
        grid=tuple(lam_raw["grid"]) if lam_raw.get("grid") is not None else None,
    )

    sweep_raw = _require(data, "sweep", path)
    if not isinstance(sweep_raw, dict):
        raise ConfigError(f"{path}sweep", "must be an object")
    sweep = SweepSpec(
        axis=_require(sweep_raw, "axis", f"{path}sweep."),
        grid=tuple(_require(sweep_raw, "grid", f"{path}sweep.")),
        channel=sweep_raw.get("channel"),
    )

    signal_scan = data.get("signal_scan")
    return ScenarioConfig(
        name=str(data.get("name", "scenario")),
        figure=data.get("figure"),
        resource=resource,
        q_nodes=int(_get_number(data, "q_nodes", path, required=True)),
        coupling_type=coupling,
        noise=noise,
        t_final=t_final,
        n_steps=n_steps,
        record_stride=int(_get_number(plan_raw, "record_stride", f"{path}plan.", default=1)),
        window=window,
        shot=shot,
        sweep=sweep,
        master_seed=int(_get_number(data, "master_seed", path, required=True)),
        n_train=int(_get_number(data, "n_train", path, default=10)),
        n_test=int(_get_number(data, "n_test", path, default=100)),
        n_validation=int(_get_number(data, "n_validation", path, default=100)),
        n_realizations=int(_get_number(data, "n_realizations", path, default=50)),
        lambda_policy=lambda_policy,
        theta_policy=str(data.get("theta_policy", "both")),
        feature_map=str(data.get("feature_map", "linear")),
        cascade_decay=float(_get_number(data, "cascade_decay", path, default=1.0)),
        record_samples=bool(data.get("record_samples", False)),
        signal_scan=None if signal_scan is None else int(signal_scan),
    )


def load_config_file(path: str) -> list[ScenarioConfig]:
    """A config file holds one scenario object or {"scenarios": [...]}."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError("<file>", f"invalid JSON: {exc}") from exc
    if isinstance(data, dict) and "scenarios" in data:
        entries = data["scenarios"]
        if not isinstance(entries, list) or not entries:
            raise ConfigError("scenarios", "must be a non-empty list")
        return [parse_scenario(entry, path=f"scenarios[{i}].") for i, entry in enumerate(entries)]
    return [parse_scenario(data)]


def config_hash(config: ScenarioConfig) -> str:
    canonical = json.dumps(config.to_dict(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()
