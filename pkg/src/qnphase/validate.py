"""Fast invariant suite behind the CLI ``validate`` subcommand."""

from __future__ import annotations

import numpy as np

from .evolution import (
    NoiseConfig,
    EvolutionPlan,
    apply_decay,
    apply_dephasing,
    apply_depolarizing,
    evolve,
    hermitian_propagator,
)
from .hilbert import (
    DensityMatrix,
    HilbertSpace,
    basis_ket,
    density_from_ket,
    qubit,
    standard_space,
)
from .network import (
    CouplingType,
    NetworkRealization,
    build_hamiltonian,
    sample_realization,
    total_excitation_operator,
)
from .readout import retrieve_phase, target_signal
from .resources import ResourceSpec, make_resource, qfi

__all__ = ["run_invariant_suite"]


def _random_density(space: HilbertSpace, rng: np.random.Generator) -> DensityMatrix:
    dim = space.dim
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    mat = a @ a.conj().T
    return DensityMatrix(space, mat / np.trace(mat).real)


def _check_channels() -> tuple[bool, str]:
    rng = np.random.default_rng(11)
    space = HilbertSpace((qubit(), qubit()))
    worst = 0.0
    for _ in range(50):
        rho = _random_density(space, rng)
        dt = rng.uniform(0.001, 0.02)
        for apply_fn, gamma in (
            (apply_decay, rng.uniform(0.0, 1.0 / dt)),
            (apply_dephasing, rng.uniform(0.0, 2.0 / dt)),
            (apply_depolarizing, rng.uniform(0.0, 1.0 / dt)),
        ):
            out = apply_fn(rho, gamma, dt)
            worst = max(worst, abs(np.trace(out.matrix).real - 1.0))
            worst = max(worst, max(0.0, -float(np.linalg.eigvalsh(out.matrix)[0])))
    return worst < 1e-10, f"worst trace/positivity deviation {worst:.2e}"


def _check_conservation() -> tuple[bool, str]:
    worst = 0.0
    for seed in range(10):
        realization = sample_realization(3, CouplingType.ENERGY_PRESERVING, seed)
        space = standard_space(3, 3)
        h = build_hamiltonian(realization, space).matrix
        n_tot = total_excitation_operator(space).matrix
        worst = max(worst, float(np.max(np.abs(h @ n_tot - n_tot @ h))))
    return worst < 1e-12, f"worst commutator entry {worst:.2e}"


def _check_rabi() -> tuple[bool, str]:
    realization = NetworkRealization(
        q_nodes=1,
        energies=np.zeros(1),
        couplings=np.zeros((1, 1)),
        input_weights=np.array([[1.0, 0.0]]),
        coupling_type=CouplingType.ENERGY_PRESERVING,
    )
    space = standard_space(1, 2)
    rho0 = density_from_ket(space, basis_ket(space, (1, 0, 0)))
    plan = EvolutionPlan(t_final=3.0, n_steps=300)
    traj = evolve(rho0, realization, NoiseConfig(), plan)
    expected = np.sin(traj.times) ** 2
    worst = float(np.max(np.abs(traj.mean_occupations[:, 0] - expected)))
    return worst < 1e-8, f"max deviation from sin^2 {worst:.2e}"


def _check_stepping_vs_exponential() -> tuple[bool, str]:
    realization = sample_realization(2, CouplingType.ENERGY_PRESERVING, 5)
    space = standard_space(2, 2)
    rho0 = density_from_ket(space, basis_ket(space, (1, 0, 0, 0)))
    plan = EvolutionPlan(t_final=4.0, n_steps=400)
    traj = evolve(rho0, realization, NoiseConfig(), plan)
    h = build_hamiltonian(realization, space).matrix
    u = hermitian_propagator(h, plan.t_final)
    direct = u @ rho0.matrix @ u.conj().T
    worst = float(np.max(np.abs(traj.final_state.matrix - direct)))
    return worst < 1e-8, f"max state deviation {worst:.2e}"


def _check_qfi() -> tuple[bool, str]:
    worst = 0.0
    for n in (1, 2, 3):
        for family in ("noon", "classical"):
            rho = make_resource(ResourceSpec(family, n), n + 1)
            worst = max(worst, abs(qfi(rho) - n * n))
    return worst < 1e-9, f"worst |F_q - N^2| = {worst:.2e}"


def _check_retrieval() -> tuple[bool, str]:
    phis = np.linspace(0.0, np.pi / 3, 50)
    worst = float(np.max(np.abs(retrieve_phase(target_signal(phis, 3), 3) - phis)))
    return worst < 1e-12, f"max retrieval deviation {worst:.2e}"


def _check_determinism() -> tuple[bool, str]:
    a = sample_realization(4, CouplingType.ENERGY_PRESERVING, 123)
    b = sample_realization(4, CouplingType.ENERGY_PRESERVING, 123)
    same = (
        np.array_equal(a.energies, b.energies)
        and np.array_equal(a.couplings, b.couplings)
        and np.array_equal(a.input_weights, b.input_weights)
    )
    return same, "identical draws for identical seeds" if same else "draws differed"


def run_invariant_suite() -> list[tuple[str, bool, str]]:
    """Run the quick invariant checks; returns (name, passed, detail) triples."""
    checks = [
        ("channel-trace-positivity", _check_channels),
        ("ep-excitation-conservation", _check_conservation),
        ("rabi-oracle", _check_rabi),
        ("stepping-vs-exponential", _check_stepping_vs_exponential),
        ("qfi-exactness", _check_qfi),
        ("retrieval-identity", _check_retrieval),
        ("sampler-determinism", _check_determinism),
    ]
    results = []
    for name, fn in checks:
        try:
            ok, detail = fn()
        except Exception as exc:  # surface the failure, keep the suite running
            ok, detail = False, f"raised {type(exc).__name__}: {exc}"
        results.append((name, ok, detail))
    return results
