"""Random network realizations and Hamiltonians for the three coupling types."""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .hilbert import (
    HERMITICITY_TOL,
    HilbertSpace,
    Operator,
    annihilation,
)

__all__ = [
    "CouplingType",
    "NetworkRealization",
    "boson_truncation",
    "sample_realization",
    "node_hamiltonian",
    "build_hamiltonian",
    "total_excitation_operator",
]


class CouplingType(str, Enum):
    ENERGY_PRESERVING = "energy_preserving"
    ULTRA_STRONG = "ultra_strong"
    CASCADING = "cascading"


def boson_truncation(n_excitations: int, coupling_type: CouplingType) -> int:
    """Input-mode truncation: N+1 levels when the total excitation cannot grow,
    N+3 for the non-conserving ultra-strong coupling (leakage is checked at
    evolution time)."""
    if n_excitations < 1:
        raise ValueError("excitation degree must be >= 1")
    if coupling_type is CouplingType.ULTRA_STRONG:
        return n_excitations + 3
    return n_excitations + 1


@dataclass(frozen=True, eq=False)
class NetworkRealization:
    """One draw of the network parameters, in units of hbar*Omega."""

    q_nodes: int
    energies: np.ndarray
    couplings: np.ndarray
    input_weights: np.ndarray
    coupling_type: CouplingType
    cascade_decay: float = 1.0
    seed: int | None = None

    def __post_init__(self) -> None:
        q = int(self.q_nodes)
        if q < 1:
            raise ValueError("need at least one node")
        e = np.asarray(self.energies, dtype=float).reshape(q)
        c = np.asarray(self.couplings, dtype=float).reshape(q, q)
        w = np.asarray(self.input_weights, dtype=float).reshape(q, 2)
        if np.max(np.abs(c - c.T)) > 1e-12:
            raise ValueError("node couplings must be symmetric")
        if np.max(np.abs(np.diag(c))) > 0:
            raise ValueError("diagonal node couplings are unused and must be zero")
        for name, arr in (("energies", e), ("couplings", c), ("input_weights", w)):
            if arr.min() < 0.0 or arr.max() > 1.0:
                raise ValueError(f"{name} entries must lie in [0, 1]")
        if self.cascade_decay < 0:
            raise ValueError("cascade decay rate must be nonnegative")
        for name, arr in (("q_nodes", q), ("energies", e), ("couplings", c), ("input_weights", w)):
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "coupling_type", CouplingType(self.coupling_type))

    def to_dict(self) -> dict:
        return {
            "q_nodes": int(self.q_nodes),
            "energies": self.energies.tolist(),
            "couplings": self.couplings.tolist(),
            "input_weights": self.input_weights.tolist(),
            "coupling_type": self.coupling_type.value,
            "cascade_decay": float(self.cascade_decay),
            "seed": None if self.seed is None else int(self.seed),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "NetworkRealization":
        return cls(
            q_nodes=data["q_nodes"],
            energies=np.asarray(data["energies"], dtype=float),
            couplings=np.asarray(data["couplings"], dtype=float),
            input_weights=np.asarray(data["input_weights"], dtype=float),
            coupling_type=CouplingType(data["coupling_type"]),
            cascade_decay=float(data.get("cascade_decay", 1.0)),
            seed=data.get("seed"),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "NetworkRealization":
        return cls.from_dict(json.loads(text))


def sample_realization(
    q_nodes: int,
    coupling_type: CouplingType,
    seed: int,
    cascade_decay: float = 1.0,
) -> NetworkRealization:
    """Draw (e_j, c_jj', w_jk) uniformly on [0, 1).

    Draw order is fixed for reproducibility: energies, then the strict upper
    triangle of the couplings (row-major, mirrored), then the Q x 2 weights.
    """
    if q_nodes < 1:
        raise ValueError("need at least one node")
    rng = np.random.default_rng(seed)
    energies = rng.uniform(size=q_nodes)
    couplings = np.zeros((q_nodes, q_nodes))
    iu = np.triu_indices(q_nodes, k=1)
    couplings[iu] = rng.uniform(size=len(iu[0]))
    couplings = couplings + couplings.T
    weights = rng.uniform(size=(q_nodes, 2))
    return NetworkRealization(
        q_nodes=q_nodes,
        energies=energies,
        couplings=couplings,
        input_weights=weights,
        coupling_type=CouplingType(coupling_type),
        cascade_decay=cascade_decay,
        seed=int(seed),
    )


def _check_space(realization: NetworkRealization, space: HilbertSpace) -> None:
    q = realization.q_nodes
    if space.n_modes != q + 2:
        raise ValueError(f"space has {space.n_modes} modes, expected {q + 2} (2 inputs + Q nodes)")
    if any(m.kind != "boson" for m in space.modes[:2]):
        raise ValueError("the first two modes must be bosonic inputs")
    if any(m.kind != "qubit" for m in space.modes[2:]):
        raise ValueError("modes after the inputs must be two-level nodes")


def node_hamiltonian(realization: NetworkRealization, space: HilbertSpace) -> Operator:
    """Node energies plus node-node exchange, without any input coupling."""
    _check_space(realization, space)
    q = realization.q_nodes
    b = [annihilation(space, 2 + j).matrix for j in range(q)]
    h = np.zeros((space.dim, space.dim), dtype=complex)
    for j in range(q):
        h += realization.energies[j] * (b[j].conj().T @ b[j])
    for j in range(q):
        for jp in range(j + 1, q):
            c = realization.couplings[j, jp]
            if c != 0.0:
                hop = b[j].conj().T @ b[jp]
                h += c * (hop + hop.conj().T)
    return Operator(space, h)


def build_hamiltonian(realization: NetworkRealization, space: HilbertSpace) -> Operator:
    """Full Hamiltonian for the coherent coupling types (Eq.-of-motion units hbar=Omega=1).

    Cascading realizations carry no input-coupling Hamiltonian term; their
    node-only part is available via :func:`node_hamiltonian`.
    """
    if realization.coupling_type is CouplingType.CASCADING:
        raise ValueError(
            "cascading coupling is dissipative; use node_hamiltonian / evolve_cascading"
        )
    h = node_hamiltonian(realization, space).matrix
    q = realization.q_nodes
    a = [annihilation(space, k).matrix for k in range(2)]
    b = [annihilation(space, 2 + j).matrix for j in range(q)]
    for j in range(q):
        for k in range(2):
            w = realization.input_weights[j, k]
            if w == 0.0:
                continue
            exchange = a[k].conj().T @ b[j]
            h += w * (exchange + exchange.conj().T)
            if realization.coupling_type is CouplingType.ULTRA_STRONG:
                counter = a[k] @ b[j]
                h += w * (counter + counter.conj().T)
    herm = np.max(np.abs(h - h.conj().T))
    if herm > HERMITICITY_TOL:
        raise AssertionError(f"built Hamiltonian is not Hermitian ({herm:.3e})")
    return Operator(space, h)


def total_excitation_operator(space: HilbertSpace) -> Operator:
    """Total excitation number over all modes (diagonal in the product basis)."""
    total = space.occupation_table.sum(axis=1).astype(float)
    return Operator(space, np.diag(total).astype(complex))
