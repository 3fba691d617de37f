"""Phase-encoded two-mode input states and their information diagnostics.

The phase generator is the number operator of input mode 2: encoding conjugates
a state by exp(i phi n2), so an N-excitation two-mode superposition picks up the
N-fold phase that drives super-resolution.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hilbert import (
    DensityMatrix,
    HilbertSpace,
    Operator,
    basis_ket,
    boson,
    density_from_ket,
    number_operator,
)

__all__ = [
    "RESOURCE_FAMILIES",
    "ResourceSpec",
    "input_space",
    "make_resource",
    "embed_input_state",
    "encode_phase",
    "dephase_fock",
    "von_neumann_entropy",
    "coherence",
    "negativity",
    "qfi",
]

RESOURCE_FAMILIES = ("noon", "classical", "max_entangled")
QFI_EIGENVALUE_CUTOFF = 1e-12


@dataclass(frozen=True)
class ResourceSpec:
    """Input-state family, excitation degree and Fock-basis dephasing level."""

    family: str
    n_excitations: int
    dephase_p: float = 1.0

    def __post_init__(self) -> None:
        if self.family not in RESOURCE_FAMILIES:
            raise ValueError(f"unknown resource family {self.family!r}")
        if self.n_excitations < 1:
            raise ValueError("excitation degree must be >= 1")
        if not 0.0 <= self.dephase_p <= 1.0:
            raise ValueError("dephasing coefficient must lie in [0, 1]")


def input_space(levels: int) -> HilbertSpace:
    return HilbertSpace((boson(levels), boson(levels)))


def make_resource(spec: ResourceSpec, levels: int) -> DensityMatrix:
    """Build the input state on the two-mode space with the given truncation."""
    n = spec.n_excitations
    if n >= levels:
        raise ValueError(f"excitation degree {n} does not fit a {levels}-level truncation")
    space = input_space(levels)
    if spec.family == "noon":
        ket = (basis_ket(space, (n, 0)) - basis_ket(space, (0, n))) / np.sqrt(2.0)
        rho = density_from_ket(space, ket)
    elif spec.family == "classical":
        psi = (basis_ket(space, (n, 0)) - basis_ket(space, (0, n))) / np.sqrt(2.0)
        psi_tilde = (basis_ket(space, (0, 0)) - basis_ket(space, (n, n))) / np.sqrt(2.0)
        rho = DensityMatrix(
            space, 0.5 * np.outer(psi, psi.conj()) + 0.5 * np.outer(psi_tilde, psi_tilde.conj())
        )
    else:  # maximally entangled: equal superposition of all N-excitation splittings
        ket = sum(basis_ket(space, (n - k, k)) for k in range(n + 1)) / np.sqrt(n + 1.0)
        rho = density_from_ket(space, ket)
    if spec.dephase_p < 1.0:
        rho = dephase_fock(rho, spec.dephase_p)
    return rho


def embed_input_state(space: HilbertSpace, rho_input: DensityMatrix) -> DensityMatrix:
    """Tensor an input state with all network nodes in the ground state."""
    if space.modes[:2] != rho_input.space.modes:
        raise ValueError("input-state modes do not match the first two modes of the target space")
    nodes_dim = space.dim // rho_input.space.dim
    ground = np.zeros((nodes_dim, nodes_dim), dtype=complex)
    ground[0, 0] = 1.0
    return DensityMatrix(space, np.kron(rho_input.matrix, ground))


def _phase_generator_diagonal(space: HilbertSpace) -> np.ndarray:
    if space.n_modes < 2:
        raise ValueError("phase encoding needs at least two modes")
    return space.mode_occupations(1)


def encode_phase(state: DensityMatrix, phi: float) -> DensityMatrix:
    """Conjugate by exp(i phi n2); trace and spectrum are untouched."""
    phases = np.exp(1j * phi * _phase_generator_diagonal(state.space))
    mat = phases[:, None] * state.matrix * phases.conj()[None, :]
    return DensityMatrix(state.space, mat, eig_floor=state.eig_floor)


def dephase_fock(rho: DensityMatrix, p: float) -> DensityMatrix:
    """Scale all Fock-basis off-diagonal elements by p in [0, 1]."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("dephasing coefficient must lie in [0, 1]")
    mat = p * rho.matrix.copy()
    diag = np.diagonal(rho.matrix)
    np.fill_diagonal(mat, diag)
    return DensityMatrix(rho.space, mat, eig_floor=rho.eig_floor)


def von_neumann_entropy(matrix: np.ndarray) -> float:
    evals = np.linalg.eigvalsh(matrix)
    evals = evals[evals > 1e-15]
    return float(-np.sum(evals * np.log(evals)))


def coherence(rho: DensityMatrix) -> float:
    """Relative entropy of coherence, S(diag(rho)) - S(rho), in nats."""
    diag = np.diag(np.diagonal(rho.matrix).real)
    value = von_neumann_entropy(diag) - von_neumann_entropy(rho.matrix)
    return max(0.0, value)


def negativity(rho: DensityMatrix) -> float:
    """Entanglement negativity across the input-mode bipartition 1:2."""
    if rho.space.n_modes != 2:
        raise ValueError("negativity is defined here for two-mode input states only")
    d1, d2 = rho.space.levels
    pt = rho.matrix.reshape(d1, d2, d1, d2).transpose(0, 3, 2, 1).reshape(rho.space.dim, rho.space.dim)
    evals = np.linalg.eigvalsh(pt)
    return float(-np.sum(evals[evals < 0.0]))


def qfi(rho: DensityMatrix, generator: Operator | np.ndarray | None = None) -> float:
    """Quantum Fisher information of rho for the phase generator (default n2).

    Uses the spectral form F = sum_{ij} 2 (l_i - l_j)^2 |<i|G|j>|^2 / (l_i + l_j)
    restricted to eigenvalue pairs with l_i + l_j above a fixed cutoff; for pure
    states this reduces to 4 Var(G).
    """
    if generator is None:
        g = number_operator(rho.space, 1).matrix
    elif isinstance(generator, Operator):
        g = generator.matrix
    else:
        g = np.asarray(generator, dtype=complex)
    evals, vecs = np.linalg.eigh(rho.matrix)
    g_eig = vecs.conj().T @ g @ vecs
    lam_sum = evals[:, None] + evals[None, :]
    lam_diff = evals[:, None] - evals[None, :]
    mask = lam_sum > QFI_EIGENVALUE_CUTOFF
    terms = np.zeros_like(lam_sum)
    np.divide(2.0 * lam_diff**2, lam_sum, out=terms, where=mask)
    return float(np.sum(terms * np.abs(g_eig) ** 2))
