"""Density-matrix propagation: split unitary/noise stepping (decay, dephasing,
depolarizing on the nodes) and first-order cascading master-equation stepping.

Channel maps act per node, composed sequentially over nodes, and are applied in
the fixed order decay -> dephasing -> depolarizing after each unitary step.
All maps are linear, so the kernels also accept batched (non-Hermitian)
matrices of shape (..., dim, dim); this is what the phase-family fast path
relies on.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .hilbert import (
    HERMITICITY_TOL,
    DensityMatrix,
    HilbertSpace,
    Operator,
    annihilation,
    node_occupation_weights,
)
from .network import (
    CouplingType,
    NetworkRealization,
    build_hamiltonian,
    node_hamiltonian,
)

__all__ = [
    "DEFAULT_STEP",
    "DEFAULT_CASCADE_STEP",
    "ChannelBoundError",
    "PositivityError",
    "NoiseConfig",
    "EvolutionPlan",
    "default_plan",
    "Trajectory",
    "hermitian_propagator",
    "unitary_step",
    "decay_map",
    "dephasing_map",
    "depolarizing_map",
    "apply_decay",
    "apply_dephasing",
    "apply_depolarizing",
    "evolve",
    "evolve_cascading",
    "integrate_occupations",
]

DEFAULT_STEP = 0.01
DEFAULT_CASCADE_STEP = 0.005
POSITIVITY_FLOOR = -1e-8
# Euler introduces transient negativity that is O(dt) (measured up to ~1e-3 at
# the default cascading step); the floor scales with dt and only catches
# genuine blowup, which grows exponentially past any fixed bound.
CASCADE_POSITIVITY_PER_DT = 2.0
POSITIVITY_CHECK_EVERY = 10
CASCADE_TRACE_TOL = 1e-6
LEAKAGE_TOL = 1e-6
OCCUPATION_TOL = 1e-9


class ChannelBoundError(ValueError):
    """A noise rate-step product left its channel validity range."""


class PositivityError(RuntimeError):
    """The propagated state developed a negative eigenvalue beyond tolerance."""


@dataclass(frozen=True)
class NoiseConfig:
    """Uniform per-node channel strengths, in units of hbar*Omega."""

    decay: float = 0.0
    dephasing: float = 0.0
    depolarizing: float = 0.0

    def __post_init__(self) -> None:
        for name in ("decay", "dephasing", "depolarizing"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} rate must be nonnegative")

    @property
    def any(self) -> bool:
        return self.decay > 0 or self.dephasing > 0 or self.depolarizing > 0

    def validate_step(self, dt: float) -> None:
        if not 0.0 <= self.decay * dt <= 1.0:
            raise ChannelBoundError(f"decay * dt = {self.decay * dt} outside [0, 1]")
        if not 0.0 <= self.dephasing * dt / 2.0 <= 1.0:
            raise ChannelBoundError(f"dephasing * dt / 2 = {self.dephasing * dt / 2} outside [0, 1]")
        if not 0.0 <= self.depolarizing * dt <= 1.0:
            raise ChannelBoundError(f"depolarizing * dt = {self.depolarizing * dt} outside [0, 1]")


@dataclass(frozen=True)
class EvolutionPlan:
    """Stepping grid, recording stride and optional integration window (times in 1/Omega)."""

    t_final: float
    n_steps: int
    record_stride: int = 1
    window: tuple[float, float] | None = None

    def __post_init__(self) -> None:
        if self.t_final <= 0:
            raise ValueError("final time must be positive")
        if self.n_steps < 1:
            raise ValueError("need at least one step")
        if self.record_stride < 1:
            raise ValueError("record stride must be >= 1")
        if self.window is not None:
            ta, tb = self.window
            if not (0.0 <= ta < tb <= self.t_final + 1e-12):
                raise ValueError(f"window {self.window} not inside [0, {self.t_final}]")
            object.__setattr__(self, "window", (float(ta), float(tb)))

    @property
    def dt(self) -> float:
        return self.t_final / self.n_steps

    @property
    def recorded_times(self) -> np.ndarray:
        steps = np.arange(0, self.n_steps + 1, self.record_stride)
        if steps[-1] != self.n_steps:
            steps = np.append(steps, self.n_steps)
        return steps * self.dt


def default_plan(
    t_final: float,
    coupling_type: CouplingType = CouplingType.ENERGY_PRESERVING,
    record_stride: int = 1,
    window: tuple[float, float] | None = None,
    n_steps: int | None = None,
) -> EvolutionPlan:
    """Plan with the default step (0.01/Omega, 0.005/Omega for cascading)."""
    if n_steps is None:
        dt = DEFAULT_CASCADE_STEP if coupling_type is CouplingType.CASCADING else DEFAULT_STEP
        n_steps = max(1, round(t_final / dt))
    return EvolutionPlan(t_final, n_steps, record_stride, window)


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Recorded node occupations over time plus the final state."""

    times: np.ndarray
    mean_occupations: np.ndarray
    final_state: DensityMatrix
    integrated_occupations: np.ndarray | None = None

    def occupations_at(self, t: float) -> np.ndarray:
        idx = np.flatnonzero(np.abs(self.times - t) < 1e-9)
        if len(idx) == 0:
            raise ValueError(f"time {t} was not recorded")
        return self.mean_occupations[idx[0]]

    def to_csv(self, path_or_buffer) -> None:
        q = self.mean_occupations.shape[1]
        header = "time," + ",".join(f"n_{j + 1}" for j in range(q))
        rows = [header]
        for t, occ in zip(self.times, self.mean_occupations):
            rows.append(",".join(f"{v:.17g}" for v in (t, *occ)))
        text = "\n".join(rows) + "\n"
        if isinstance(path_or_buffer, (str, bytes)) or hasattr(path_or_buffer, "__fspath__"):
            with open(path_or_buffer, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            path_or_buffer.write(text)


# --------------------------------------------------------------------------
# unitary step
# --------------------------------------------------------------------------

_PROPAGATOR_CACHE: dict[tuple[bytes, float], np.ndarray] = {}
_PROPAGATOR_CACHE_MAX = 8


def hermitian_propagator(h_matrix: np.ndarray, dt: float) -> np.ndarray:
    """exp(-i H dt) via Hermitian eigendecomposition."""
    evals, vecs = np.linalg.eigh(h_matrix)
    return (vecs * np.exp(-1j * evals * dt)) @ vecs.conj().T


def _cached_propagator(h_matrix: np.ndarray, dt: float) -> np.ndarray:
    key = (h_matrix.tobytes(), float(dt))
    u = _PROPAGATOR_CACHE.get(key)
    if u is None:
        u = hermitian_propagator(h_matrix, dt)
        if len(_PROPAGATOR_CACHE) >= _PROPAGATOR_CACHE_MAX:
            _PROPAGATOR_CACHE.pop(next(iter(_PROPAGATOR_CACHE)))
        _PROPAGATOR_CACHE[key] = u
    return u


def unitary_step(rho: DensityMatrix, hamiltonian: Operator, dt: float) -> DensityMatrix:
    h = hamiltonian.matrix
    if np.max(np.abs(h - h.conj().T)) > HERMITICITY_TOL:
        raise ValueError("Hamiltonian is not Hermitian")
    u = _cached_propagator(h, dt)
    return DensityMatrix(rho.space, u @ rho.matrix @ u.conj().T, eig_floor=rho.eig_floor)


# --------------------------------------------------------------------------
# noise channels (per-node kernels on (..., dim, dim) matrices)
# --------------------------------------------------------------------------


def _mode_factorization(space: HilbertSpace, mode_index: int) -> tuple[int, int, int]:
    levels = space.levels
    pre = int(np.prod(levels[:mode_index], dtype=np.int64)) if mode_index else 1
    post = int(np.prod(levels[mode_index + 1 :], dtype=np.int64)) if mode_index + 1 < len(levels) else 1
    return pre, levels[mode_index], post


def _for_each_node(mat: np.ndarray, space: HilbertSpace, kernel) -> np.ndarray:
    out = mat
    dim = space.dim
    lead = mat.shape[:-2]
    for mode in space.node_modes:
        pre, lv, post = _mode_factorization(space, mode)
        r = out.reshape(lead + (pre, lv, post, pre, lv, post))
        out = kernel(r).reshape(lead + (dim, dim))
    return out


def decay_map(mat: np.ndarray, space: HilbertSpace, weight: float) -> np.ndarray:
    """Amplitude-decay Kraus pair with gamma*dt = weight, applied to every node."""
    if weight == 0.0:
        return mat
    k1 = np.array([1.0, np.sqrt(1.0 - weight)])

    def kernel(r: np.ndarray) -> np.ndarray:
        out = r * k1.reshape(1, 2, 1, 1, 1, 1) * k1.reshape(1, 1, 1, 1, 2, 1)
        out[..., :, 0, :, :, 0, :] += weight * r[..., :, 1, :, :, 1, :]
        return out

    return _for_each_node(mat, space, kernel)


def dephasing_map(mat: np.ndarray, space: HilbertSpace, weight: float) -> np.ndarray:
    """(1-w) rho + w sz rho sz per node, with w = gamma*dt/2."""
    if weight == 0.0:
        return mat
    off = 1.0 - 2.0 * weight
    f = np.array([[1.0, off], [off, 1.0]])

    def kernel(r: np.ndarray) -> np.ndarray:
        return r * f.reshape(1, 2, 1, 1, 2, 1)

    return _for_each_node(mat, space, kernel)


def depolarizing_map(mat: np.ndarray, space: HilbertSpace, weight: float) -> np.ndarray:
    """(1-w) rho + (w/3) sum_v sv rho sv per node, with w = gamma*dt."""
    if weight == 0.0:
        return mat
    s = np.array([[1.0, -1.0], [-1.0, 1.0]]).reshape(1, 2, 1, 1, 2, 1)

    def kernel(r: np.ndarray) -> np.ndarray:
        flip = r[..., :, ::-1, :, :, ::-1, :]
        return (1.0 - weight) * r + (weight / 3.0) * (flip + flip * s + r * s)

    return _for_each_node(mat, space, kernel)


def _channel_weight(gamma: float, dt: float, divisor: float, label: str) -> float:
    if gamma < 0:
        raise ChannelBoundError(f"{label} rate must be nonnegative")
    w = gamma * dt / divisor
    if not 0.0 <= w <= 1.0:
        raise ChannelBoundError(f"{label} weight {w} outside [0, 1]")
    return w


def apply_decay(rho: DensityMatrix, gamma_decay: float, dt: float) -> DensityMatrix:
    w = _channel_weight(gamma_decay, dt, 1.0, "decay")
    return DensityMatrix(rho.space, decay_map(rho.matrix, rho.space, w), eig_floor=rho.eig_floor)


def apply_dephasing(rho: DensityMatrix, gamma_dephasing: float, dt: float) -> DensityMatrix:
    w = _channel_weight(gamma_dephasing, dt, 2.0, "dephasing")
    return DensityMatrix(rho.space, dephasing_map(rho.matrix, rho.space, w), eig_floor=rho.eig_floor)


def apply_depolarizing(rho: DensityMatrix, gamma_depolarizing: float, dt: float) -> DensityMatrix:
    w = _channel_weight(gamma_depolarizing, dt, 1.0, "depolarizing")
    return DensityMatrix(rho.space, depolarizing_map(rho.matrix, rho.space, w), eig_floor=rho.eig_floor)


def apply_noise_step(mat: np.ndarray, space: HilbertSpace, noise: NoiseConfig, dt: float) -> np.ndarray:
    """Fixed channel order: decay, dephasing, depolarizing."""
    if noise.decay > 0:
        mat = decay_map(mat, space, noise.decay * dt)
    if noise.dephasing > 0:
        mat = dephasing_map(mat, space, noise.dephasing * dt / 2.0)
    if noise.depolarizing > 0:
        mat = depolarizing_map(mat, space, noise.depolarizing * dt)
    return mat


# --------------------------------------------------------------------------
# trajectory helpers
# --------------------------------------------------------------------------


def _input_top_level_weights(space: HilbertSpace) -> np.ndarray:
    """Diagonal projector weights for 'either input mode at its top Fock level'."""
    table = space.occupation_table
    top0 = table[:, 0] == space.levels[0] - 1
    top1 = table[:, 1] == space.levels[1] - 1
    return (top0 | top1).astype(float)


def _check_occupations(occ: np.ndarray, tol: float = OCCUPATION_TOL) -> np.ndarray:
    if occ.min() < -tol or occ.max() > 1.0 + tol:
        raise PositivityError(f"node occupation left [0, 1]: range [{occ.min()}, {occ.max()}]")
    return np.clip(occ, 0.0, 1.0)


def _warn_leakage(max_top: float) -> None:
    if max_top > LEAKAGE_TOL:
        warnings.warn(
            f"input-mode truncation leakage {max_top:.3e} exceeds {LEAKAGE_TOL:.0e}; "
            "increase the bosonic truncation",
            RuntimeWarning,
            stacklevel=3,
        )


def evolve(
    rho0: DensityMatrix,
    realization: NetworkRealization,
    noise: NoiseConfig,
    plan: EvolutionPlan,
) -> Trajectory:
    """Split stepping: unitary exp(-iH dt) followed by the noise channels."""
    if realization.coupling_type is CouplingType.CASCADING:
        raise ValueError("use evolve_cascading for cascading realizations")
    space = rho0.space
    dt = plan.dt
    noise.validate_step(dt)
    h = build_hamiltonian(realization, space).matrix
    u = hermitian_propagator(h, dt)
    udag = u.conj().T
    occ_w = node_occupation_weights(space)
    check_leakage = realization.coupling_type is CouplingType.ULTRA_STRONG
    top_w = _input_top_level_weights(space) if check_leakage else None

    rho = rho0.matrix.copy()
    diag = np.real(np.diagonal(rho))
    times = [0.0]
    occupations = [occ_w @ diag]
    max_top = float(top_w @ diag) if check_leakage else 0.0

    for step in range(1, plan.n_steps + 1):
        rho = u @ rho @ udag
        rho = apply_noise_step(rho, space, noise, dt)
        if step % POSITIVITY_CHECK_EVERY == 0 or step == plan.n_steps:
            min_eig = float(np.linalg.eigvalsh(rho)[0])
            if min_eig < POSITIVITY_FLOOR:
                raise PositivityError(f"negative eigenvalue {min_eig:.3e} at step {step}")
        if step % plan.record_stride == 0 or step == plan.n_steps:
            diag = np.real(np.diagonal(rho))
            times.append(step * dt)
            occupations.append(occ_w @ diag)
            if check_leakage:
                max_top = max(max_top, float(top_w @ diag))

    if check_leakage:
        _warn_leakage(max_top)
    times_arr = np.asarray(times)
    occ_arr = _check_occupations(np.asarray(occupations))
    final = DensityMatrix(space, rho, eig_floor=POSITIVITY_FLOOR)
    integrated = None
    if plan.window is not None:
        integrated = _integrate(times_arr, occ_arr, plan.window)
    return Trajectory(times_arr, occ_arr, final, integrated)


def cascading_generator(
    realization: NetworkRealization, space: HilbertSpace
) -> "_CascadeOps":
    return _CascadeOps(realization, space)


class _CascadeOps:
    """Precomputed operators for the cascading master-equation right-hand side."""

    def __init__(self, realization: NetworkRealization, space: HilbertSpace):
        if realization.cascade_decay <= 0:
            raise ValueError("cascading evolution needs a positive node decay rate")
        self.space = space
        self.gamma = float(realization.cascade_decay)
        self.h = node_hamiltonian(realization, space).matrix
        q = realization.q_nodes
        self.b = [annihilation(space, 2 + j).matrix for j in range(q)]
        self.nb = [bj.conj().T @ bj for bj in self.b]
        self.a = [annihilation(space, k).matrix for k in range(2)]
        self.na = [ak.conj().T @ ak for ak in self.a]
        w = realization.input_weights
        self.big_b = [sum(w[j, k] * self.b[j] for j in range(q)) for k in range(2)]
        self.bdag_a = [self.big_b[k].conj().T @ self.a[k] for k in range(2)]
        self.chi = [float(np.sum(w[:, k] ** 2)) / self.gamma for k in range(2)]

    def rhs(self, rho: np.ndarray) -> np.ndarray:
        """d rho = -i[H, rho] + node decay + directional coupling + input decay."""
        out = -1j * (self.h @ rho - rho @ self.h)
        half_g = 0.5 * self.gamma
        for bj, nj in zip(self.b, self.nb):
            out += half_g * (2.0 * (bj @ rho) @ bj.conj().T - nj @ rho - rho @ nj)
        for k in range(2):
            a_rho = self.a[k] @ rho
            out += a_rho @ self.big_b[k].conj().T - self.bdag_a[k] @ rho
            out += (self.big_b[k] @ rho) @ self.a[k].conj().T - rho @ self.bdag_a[k].conj().T
            half_chi = 0.5 * self.chi[k]
            if half_chi:
                out += half_chi * (2.0 * a_rho @ self.a[k].conj().T - self.na[k] @ rho - rho @ self.na[k])
        return out


def evolve_cascading(
    rho0: DensityMatrix,
    realization: NetworkRealization,
    plan: EvolutionPlan,
) -> Trajectory:
    """First-order (Euler) stepping of the cascading master equation."""
    if realization.coupling_type is not CouplingType.CASCADING:
        raise ValueError("realization is not of cascading type")
    space = rho0.space
    ops = _CascadeOps(realization, space)
    dt = plan.dt
    eig_floor = -CASCADE_POSITIVITY_PER_DT * dt
    occ_w = node_occupation_weights(space)

    rho = rho0.matrix.copy()
    times = [0.0]
    occupations = [occ_w @ np.real(np.diagonal(rho))]

    for step in range(1, plan.n_steps + 1):
        rho = rho + dt * ops.rhs(rho)
        if step % POSITIVITY_CHECK_EVERY == 0 or step == plan.n_steps:
            drift = abs(np.trace(rho).real - 1.0)
            if drift > CASCADE_TRACE_TOL:
                raise PositivityError(f"trace drift {drift:.3e} at step {step}; reduce the step size")
            min_eig = float(np.linalg.eigvalsh(rho)[0])
            if min_eig < eig_floor:
                raise PositivityError(f"negative eigenvalue {min_eig:.3e} at step {step}; reduce the step size")
        if step % plan.record_stride == 0 or step == plan.n_steps:
            times.append(step * dt)
            occupations.append(occ_w @ np.real(np.diagonal(rho)))

    times_arr = np.asarray(times)
    occ_arr = _check_occupations(np.asarray(occupations), tol=-eig_floor)
    rho = 0.5 * (rho + rho.conj().T)
    rho = rho / np.trace(rho).real
    final = DensityMatrix(space, rho, eig_floor=eig_floor)
    integrated = None
    if plan.window is not None:
        integrated = _integrate(times_arr, occ_arr, plan.window)
    return Trajectory(times_arr, occ_arr, final, integrated)


def _integrate(times: np.ndarray, occupations: np.ndarray, window: tuple[float, float]) -> np.ndarray:
    ta, tb = window
    i0 = np.flatnonzero(np.abs(times - ta) < 1e-9)
    i1 = np.flatnonzero(np.abs(times - tb) < 1e-9)
    if len(i0) == 0 or len(i1) == 0:
        raise ValueError(f"window [{ta}, {tb}] endpoints are not on the recorded time grid")
    sl = slice(i0[0], i1[0] + 1)
    if i1[0] <= i0[0]:
        raise ValueError("window must span at least one recording stride")
    return np.trapezoid(occupations[sl], times[sl], axis=0) / (tb - ta)


def integrate_occupations(trajectory: Trajectory, window: tuple[float, float]) -> np.ndarray:
    """Trapezoidal time average (1/T) int <n_j> dt over the window."""
    return _integrate(trajectory.times, trajectory.mean_occupations, window)
