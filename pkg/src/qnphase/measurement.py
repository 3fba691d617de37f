"""Finite-statistics models for the measured node occupations.

Two shot models: additive Gaussian error with standard deviation xi/2 on each
mean, and the repetition model where M uniform draws are thresholded against
the ideal occupation and averaged.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "ShotModel",
    "sample_gaussian",
    "sample_bernoulli",
    "sample_bernoulli_array",
]

_BERNOULLI_CHUNK = 4_000_000  # max uniforms drawn per block


@dataclass(frozen=True)
class ShotModel:
    """Exactly one of xi (Gaussian) or m_shots (repetition model) is active."""

    kind: str
    xi: float | None = None
    m_shots: int | None = None

    def __post_init__(self) -> None:
        if self.kind == "gaussian":
            if self.xi is None or self.m_shots is not None:
                raise ValueError("gaussian shot model takes xi only")
            if self.xi < 0:
                raise ValueError("xi must be nonnegative")
        elif self.kind == "bernoulli":
            if self.m_shots is None or self.xi is not None:
                raise ValueError("bernoulli shot model takes m_shots only")
            if self.m_shots < 1:
                raise ValueError("m_shots must be >= 1")
        else:
            raise ValueError(f"unknown shot model kind {self.kind!r}")

    @classmethod
    def gaussian(cls, xi: float) -> "ShotModel":
        return cls("gaussian", xi=float(xi))

    @classmethod
    def bernoulli(cls, m_shots: int) -> "ShotModel":
        return cls("bernoulli", m_shots=int(m_shots))

    def sample(self, means: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        if self.kind == "gaussian":
            return sample_gaussian(means, self.xi, rng)
        return sample_bernoulli_array(means, self.m_shots, rng)

    def to_dict(self) -> dict:
        if self.kind == "gaussian":
            return {"kind": "gaussian", "xi": self.xi}
        return {"kind": "bernoulli", "m_shots": self.m_shots}


def sample_gaussian(means: np.ndarray, xi: float, rng: np.random.Generator) -> np.ndarray:
    """Perturb each mean by independent N(0, (xi/2)^2) noise; no clamping."""
    if xi < 0:
        raise ValueError("xi must be nonnegative")
    means = np.asarray(means, dtype=float)
    if xi == 0.0:
        return means.copy()
    return means + rng.normal(0.0, xi / 2.0, size=means.shape)


def _check_unit_interval(means: np.ndarray) -> np.ndarray:
    means = np.asarray(means, dtype=float)
    if means.min() < -1e-9 or means.max() > 1.0 + 1e-9:
        raise ValueError(f"occupations must lie in [0, 1], got range [{means.min()}, {means.max()}]")
    return np.clip(means, 0.0, 1.0)


def sample_bernoulli(mean_ideal: float, m_shots: int, rng: np.random.Generator) -> float:
    """Average of M binary outcomes, 1 when a uniform draw falls below the mean."""
    if m_shots < 1:
        raise ValueError("m_shots must be >= 1")
    mean = float(_check_unit_interval(np.asarray([mean_ideal]))[0])
    draws = rng.random(m_shots)
    return float(np.mean(draws < mean))


def sample_bernoulli_array(means: np.ndarray, m_shots: int, rng: np.random.Generator) -> np.ndarray:
    """Vectorized repetition sampling; one independent M-draw block per entry."""
    if m_shots < 1:
        raise ValueError("m_shots must be >= 1")
    means = _check_unit_interval(means)
    flat = means.reshape(-1)
    out = np.empty_like(flat)
    per_block = max(1, _BERNOULLI_CHUNK // m_shots)
    for start in range(0, flat.size, per_block):
        stop = min(start + per_block, flat.size)
        draws = rng.random((stop - start, m_shots))
        out[start:stop] = np.mean(draws < flat[start:stop, None], axis=1)
    return out.reshape(means.shape)
