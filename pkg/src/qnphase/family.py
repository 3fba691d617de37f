"""Exact phase-parameterized dynamics from a few component evolutions.

Encoding conjugates the input state by exp(i phi n2), which multiplies each
matrix element by exp(i phi (m2 - m2')). Grouping elements by that ladder
difference f writes the encoded state as rho(phi) = B_0 + sum_f e^{i f phi} B_f
+ h.c.; every propagation map here (unitary conjugation, noise channels, the
cascading generator) is linear and Hermiticity-preserving, so the node
occupations for any phi follow from evolving the handful of components once:

    <n_j>(phi, t) = c_{0 j}(t) + sum_{f>0} 2 Re[e^{i f phi} c_{f j}(t)].

Noise-free coherent dynamics is evaluated in the eigenbasis of H without
stepping; otherwise the components are stepped with the same kernels used by
``evolve`` / ``evolve_cascading``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .evolution import (
    LEAKAGE_TOL,
    EvolutionPlan,
    NoiseConfig,
    _CascadeOps,
    _input_top_level_weights,
    apply_noise_step,
    hermitian_propagator,
)
from .hilbert import DensityMatrix, HilbertSpace, node_occupation_weights
from .network import CouplingType, NetworkRealization, build_hamiltonian
from .resources import embed_input_state

__all__ = [
    "PhaseFamily",
    "input_phase_family",
    "family_state",
    "FamilyOccupations",
    "evolve_phase_family",
]


@dataclass(frozen=True, eq=False)
class PhaseFamily:
    """Input-state components grouped by the n2 ladder difference (f >= 0)."""

    space: HilbertSpace
    freqs: tuple[int, ...]
    components: np.ndarray  # (F, dim, dim); components[i] collects difference freqs[i]

    @property
    def n_components(self) -> int:
        return len(self.freqs)


def input_phase_family(space: HilbertSpace, rho_input: DensityMatrix) -> PhaseFamily:
    """Decompose an input state (tensored with ground-state nodes) by phase frequency."""
    full = embed_input_state(space, rho_input).matrix
    n2 = space.occupation_table[:, 1]
    diff = n2[:, None] - n2[None, :]
    present = np.unique(diff[np.abs(full) > 1e-15])
    freqs = [0] + sorted(int(f) for f in present if f > 0)
    components = np.stack([np.where(diff == f, full, 0.0) for f in freqs])
    return PhaseFamily(space, tuple(freqs), components)


def family_state(family: PhaseFamily, phi: float) -> np.ndarray:
    """Reassemble the encoded state rho(phi) from the components."""
    out = family.components[0].copy()
    for f, comp in zip(family.freqs[1:], family.components[1:]):
        term = np.exp(1j * f * phi) * comp
        out += term + term.conj().T
    return out


@dataclass(frozen=True, eq=False)
class FamilyOccupations:
    """Per-frequency node-occupation coefficients on an evaluation time grid."""

    times: np.ndarray
    freqs: tuple[int, ...]
    coef: np.ndarray  # (F, T, Q) complex
    window: tuple[float, float] | None = None
    window_coef: np.ndarray | None = None  # (F, Q)

    def _point_coef(self, time_index: int | None, integrated: bool) -> np.ndarray:
        if integrated:
            if self.window_coef is None:
                raise ValueError("no integration window was evaluated")
            return self.window_coef
        idx = -1 if time_index is None else time_index
        return self.coef[:, idx, :]

    def means(
        self,
        phis: np.ndarray | float,
        time_index: int | None = None,
        integrated: bool = False,
    ) -> np.ndarray:
        """Node occupations for each phase; shape (len(phis), Q)."""
        c = self._point_coef(time_index, integrated)
        phis = np.atleast_1d(np.asarray(phis, dtype=float))
        out = np.broadcast_to(c[0].real, (len(phis), c.shape[1])).copy()
        for f, cf in zip(self.freqs[1:], c[1:]):
            out += 2.0 * np.real(np.exp(1j * np.outer(phis, [f])) * cf[None, :])
        return out

    def time_index_of(self, t: float) -> int:
        idx = np.flatnonzero(np.abs(self.times - t) < 1e-9)
        if len(idx) == 0:
            raise ValueError(f"time {t} is not on the evaluation grid")
        return int(idx[0])


def _eval_grid(plan: EvolutionPlan, eval_times: np.ndarray | None) -> np.ndarray:
    if eval_times is None:
        times = plan.recorded_times
    else:
        times = np.sort(np.unique(np.asarray(eval_times, dtype=float)))
    if plan.window is not None:
        ta, tb = plan.window
        stride_times = plan.recorded_times
        in_window = stride_times[(stride_times >= ta - 1e-9) & (stride_times <= tb + 1e-9)]
        times = np.sort(np.unique(np.concatenate([times, in_window])))
    steps = times / plan.dt
    if np.max(np.abs(steps - np.round(steps))) > 1e-6:
        raise ValueError("evaluation times must lie on the stepping grid")
    if times.min() < -1e-12 or times.max() > plan.t_final + 1e-9:
        raise ValueError("evaluation times must lie inside [0, t_final]")
    return times


def _window_average(times: np.ndarray, coef: np.ndarray, window: tuple[float, float]) -> np.ndarray:
    ta, tb = window
    mask = (times >= ta - 1e-9) & (times <= tb + 1e-9)
    if mask.sum() < 2:
        raise ValueError("integration window must contain at least two grid times")
    return np.trapezoid(coef[:, mask, :], times[mask], axis=1) / (tb - ta)


def _leakage_bound(coef_top: np.ndarray) -> float:
    """Upper bound on the top-Fock-level population over all phases and times."""
    return float(np.max(coef_top[0].real + 2.0 * np.sum(np.abs(coef_top[1:]), axis=0)))


def evolve_phase_family(
    family: PhaseFamily,
    realization: NetworkRealization,
    noise: NoiseConfig,
    plan: EvolutionPlan,
    eval_times: np.ndarray | None = None,
) -> FamilyOccupations:
    """Evolve the components and record occupation coefficients at the grid times."""
    space = family.space
    times = _eval_grid(plan, eval_times)
    occ_w = node_occupation_weights(space)
    cascading = realization.coupling_type is CouplingType.CASCADING
    check_leakage = realization.coupling_type is CouplingType.ULTRA_STRONG
    top_w = _input_top_level_weights(space) if check_leakage else None

    if not cascading and not noise.any:
        coef, top_coef = _eigenbasis_coefficients(
            family, realization, space, times, occ_w, top_w
        )
    else:
        coef, top_coef = _stepped_coefficients(
            family, realization, noise, plan, space, times, occ_w, top_w
        )

    if check_leakage:
        leak = _leakage_bound(top_coef)
        if leak > LEAKAGE_TOL:
            warnings.warn(
                f"input-mode truncation leakage bound {leak:.3e} exceeds {LEAKAGE_TOL:.0e}; "
                "increase the bosonic truncation",
                RuntimeWarning,
                stacklevel=2,
            )

    window_coef = None
    if plan.window is not None:
        window_coef = _window_average(times, coef, plan.window)
    return FamilyOccupations(times, family.freqs, coef, plan.window, window_coef)


def _eigenbasis_coefficients(
    family: PhaseFamily,
    realization: NetworkRealization,
    space: HilbertSpace,
    times: np.ndarray,
    occ_w: np.ndarray,
    top_w: np.ndarray | None,
) -> tuple[np.ndarray, np.ndarray | None]:
    """Closed-form coefficients c(t) = sum_ab G[a,b] e^{-i(E_a - E_b) t}."""
    h = build_hamiltonian(realization, space).matrix
    evals, vecs = np.linalg.eigh(h)
    phases = np.exp(-1j * np.outer(evals, times))  # (dim, T)
    weights = [occ_w[j] for j in range(occ_w.shape[0])]
    if top_w is not None:
        weights.append(top_w)
    obs_eig = [vecs.conj().T @ (w[:, None] * vecs) for w in weights]

    n_obs = len(weights)
    coef = np.empty((family.n_components, len(times), n_obs), dtype=complex)
    for i, comp in enumerate(family.components):
        comp_eig = vecs.conj().T @ comp @ vecs
        for k, obs in enumerate(obs_eig):
            g = obs.T * comp_eig
            coef[i, :, k] = np.sum(phases * (g @ phases.conj()), axis=0)
    if top_w is not None:
        return coef[:, :, :-1], coef[:, :, -1:]
    return coef, None


def _stepped_coefficients(
    family: PhaseFamily,
    realization: NetworkRealization,
    noise: NoiseConfig,
    plan: EvolutionPlan,
    space: HilbertSpace,
    times: np.ndarray,
    occ_w: np.ndarray,
    top_w: np.ndarray | None,
) -> tuple[np.ndarray, np.ndarray | None]:
    """Step all components in lockstep with the production kernels."""
    dt = plan.dt
    cascading = realization.coupling_type is CouplingType.CASCADING
    if cascading:
        ops = _CascadeOps(realization, space)
    else:
        noise.validate_step(dt)
        h = build_hamiltonian(realization, space).matrix
        u = hermitian_propagator(h, dt)
        udag = u.conj().T

    record_steps = np.round(times / dt).astype(int)
    last_step = int(record_steps.max())
    by_step = {int(s): i for i, s in enumerate(record_steps)}

    comps = family.components.astype(complex).copy()
    coef = np.empty((family.n_components, len(times), occ_w.shape[0]), dtype=complex)
    top_coef = np.empty((family.n_components, len(times)), dtype=complex) if top_w is not None else None

    def record(step: int) -> None:
        idx = by_step.get(step)
        if idx is None:
            return
        diag = np.diagonal(comps, axis1=-2, axis2=-1)  # (F, dim)
        coef[:, idx, :] = diag @ occ_w.T
        if top_coef is not None:
            top_coef[:, idx] = diag @ top_w

    record(0)
    for step in range(1, last_step + 1):
        if cascading:
            stacked = comps
            rhs = np.empty_like(stacked)
            for i in range(stacked.shape[0]):
                rhs[i] = ops.rhs(stacked[i])
            comps = comps + dt * rhs
        else:
            comps = u[None] @ comps @ udag[None]
            comps = apply_noise_step(comps, space, noise, dt)
        record(step)
    if top_coef is not None:
        return coef, top_coef[:, :, None]
    return coef, None
