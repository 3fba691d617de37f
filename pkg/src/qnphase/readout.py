"""Trained linear output layer: ridge regression on node-occupation features,
target-signal construction and phase retrieval."""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .metrics import phase_error

__all__ = [
    "FeatureMap",
    "TrainingSet",
    "EvaluationSet",
    "ReadoutModel",
    "TrainingError",
    "target_signal",
    "build_training_set",
    "train",
    "predict",
    "retrieve_phase",
    "estimate_phases",
    "select_lambda",
    "default_lambda_grid",
]

FEATURE_KINDS = ("linear", "polynomial_products")


class TrainingError(RuntimeError):
    """The regularized normal equations could not be solved."""


@dataclass(frozen=True)
class FeatureMap:
    """Feature construction from mean occupations; feature 0 is the constant 1.

    "linear" uses (1, <n_1>..<n_Q>); "polynomial_products" appends all pairwise
    products and the product of all means, without needing extra measurements.
    """

    kind: str = "linear"

    def __post_init__(self) -> None:
        if self.kind not in FEATURE_KINDS:
            raise ValueError(f"unknown feature map {self.kind!r}")

    def n_features(self, q_nodes: int) -> int:
        if self.kind == "linear":
            return 1 + q_nodes
        return 1 + q_nodes + q_nodes * (q_nodes - 1) // 2 + (1 if q_nodes >= 3 else 0)

    def rows(self, means: np.ndarray) -> np.ndarray:
        means = np.atleast_2d(np.asarray(means, dtype=float))
        n, q = means.shape
        cols = [np.ones((n, 1)), means]
        if self.kind == "polynomial_products":
            cols.append(np.column_stack([means[:, i] * means[:, j] for i, j in combinations(range(q), 2)]))
            if q >= 3:
                cols.append(np.prod(means, axis=1, keepdims=True))
        return np.hstack(cols)


def target_signal(phi: np.ndarray | float, n_excitations: int, theta: float = 0.0) -> np.ndarray | float:
    """Ideal output (1 - cos(N(phi + theta))) / 2, in [0, 1]."""
    return 0.5 * (1.0 - np.cos(n_excitations * (np.asarray(phi) + theta)))


@dataclass(frozen=True, eq=False)
class TrainingSet:
    """Aligned phases, feature rows (with constant column) and targets."""

    phases: np.ndarray
    features: np.ndarray
    targets: np.ndarray
    n_excitations: int
    theta: float
    feature_map: FeatureMap

    def __post_init__(self) -> None:
        if len(self.phases) != self.features.shape[0] or len(self.phases) != len(self.targets):
            raise ValueError("phases, feature rows and targets must be aligned")


@dataclass(frozen=True, eq=False)
class EvaluationSet:
    """Held-out phases with (noisy) feature rows for model assessment."""

    phases: np.ndarray
    features: np.ndarray


def build_training_set(
    phases: np.ndarray,
    means: np.ndarray,
    n_excitations: int,
    theta: float = 0.0,
    feature_map: FeatureMap = FeatureMap("linear"),
) -> TrainingSet:
    phases = np.asarray(phases, dtype=float)
    rows = feature_map.rows(means)
    targets = target_signal(phases, n_excitations, theta)
    return TrainingSet(phases, rows, targets, n_excitations, theta, feature_map)


@dataclass(frozen=True, eq=False)
class ReadoutModel:
    """Trained coefficients; immutable after training."""

    alpha: np.ndarray
    ridge_lambda: float
    theta: float
    n_excitations: int
    feature_map: FeatureMap

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha.tolist(),
            "ridge_lambda": float(self.ridge_lambda),
            "theta": float(self.theta),
            "n_excitations": int(self.n_excitations),
            "feature_map": self.feature_map.kind,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, data: dict) -> "ReadoutModel":
        return cls(
            alpha=np.asarray(data["alpha"], dtype=float),
            ridge_lambda=float(data["ridge_lambda"]),
            theta=float(data["theta"]),
            n_excitations=int(data["n_excitations"]),
            feature_map=FeatureMap(data["feature_map"]),
        )

    @classmethod
    def from_json(cls, text: str) -> "ReadoutModel":
        return cls.from_dict(json.loads(text))


def train(training_set: TrainingSet, ridge_lambda: float) -> ReadoutModel:
    """Solve (X^T X + lambda 1) alpha = X^T Y (the intercept is regularized too)."""
    if ridge_lambda < 0:
        raise ValueError("ridge parameter must be nonnegative")
    x = training_set.features
    gram = x.T @ x + ridge_lambda * np.eye(x.shape[1])
    try:
        alpha = np.linalg.solve(gram, x.T @ training_set.targets)
    except np.linalg.LinAlgError as exc:
        raise TrainingError(f"normal equations are singular at lambda={ridge_lambda!r}") from exc
    if not np.all(np.isfinite(alpha)):
        raise TrainingError(f"non-finite coefficients at lambda={ridge_lambda!r}")
    return ReadoutModel(
        alpha=alpha,
        ridge_lambda=float(ridge_lambda),
        theta=training_set.theta,
        n_excitations=training_set.n_excitations,
        feature_map=training_set.feature_map,
    )


def predict(model: ReadoutModel, features: np.ndarray) -> np.ndarray | float:
    """Estimated signal alpha . features; scalar for a single row, no clamping."""
    features = np.asarray(features, dtype=float)
    single = features.ndim == 1
    rows = np.atleast_2d(features)
    if rows.shape[1] != len(model.alpha):
        raise ValueError(f"expected {len(model.alpha)} features, got {rows.shape[1]}")
    out = rows @ model.alpha
    return float(out[0]) if single else out


def retrieve_phase(i_est: np.ndarray | float, n_excitations: int) -> np.ndarray | float:
    """arccos(1 - 2 I)/N with out-of-range signals clamped to 0 and pi/N."""
    arg = np.clip(1.0 - 2.0 * np.asarray(i_est, dtype=float), -1.0, 1.0)
    out = np.arccos(arg) / n_excitations
    return float(out) if out.ndim == 0 else out


def estimate_phases(model: ReadoutModel, means: np.ndarray) -> np.ndarray:
    """Full pipeline: features -> signal -> retrieved phase, shift removed."""
    rows = model.feature_map.rows(means)
    signal = np.atleast_1d(predict(model, rows))
    return retrieve_phase(signal, model.n_excitations) - model.theta


def default_lambda_grid() -> np.ndarray:
    return np.logspace(-10.0, 1.0, 23)


def select_lambda(
    training_set: TrainingSet,
    validation: EvaluationSet,
    lambda_grid: np.ndarray | None = None,
) -> tuple[float, np.ndarray]:
    """Pick the grid point minimizing the held-out phase-estimation error.

    Returns (lambda_min, error curve over the grid).
    """
    grid = default_lambda_grid() if lambda_grid is None else np.asarray(lambda_grid, dtype=float)
    if len(grid) < 3:
        raise ValueError("lambda grid needs at least three points")
    errors = np.empty(len(grid))
    for i, lam in enumerate(grid):
        model = train(training_set, lam)
        signal = np.atleast_1d(predict(model, validation.features))
        est = retrieve_phase(signal, model.n_excitations) - model.theta
        errors[i] = phase_error(validation.phases, est).error
    return float(grid[int(np.argmin(errors))]), errors
