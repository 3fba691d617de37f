"""Composite Hilbert spaces for two bosonic input modes coupled to qubit nodes.

Mode order is fixed as [input 1, input 2, node 1 .. node Q]; all serialization
and operator embedding follows this order. Everything is dense complex128.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, reduce
from typing import Sequence

import numpy as np

__all__ = [
    "HERMITICITY_TOL",
    "TRACE_TOL",
    "EIG_FLOOR",
    "ModeSpec",
    "boson",
    "qubit",
    "HilbertSpace",
    "standard_space",
    "Operator",
    "DensityMatrix",
    "density_from_ket",
    "embed_operator",
    "annihilation",
    "creation",
    "number_operator",
    "basis_ket",
    "pauli",
    "node_occupation_weights",
]

HERMITICITY_TOL = 1e-12
TRACE_TOL = 1e-10
EIG_FLOOR = -1e-9


@dataclass(frozen=True)
class ModeSpec:
    """One tensor factor: a truncated boson or a two-level node."""

    kind: str
    levels: int

    def __post_init__(self) -> None:
        if self.kind not in ("boson", "qubit"):
            raise ValueError(f"unknown mode kind {self.kind!r}")
        if self.levels < 2:
            raise ValueError("a mode needs at least two levels")
        if self.kind == "qubit" and self.levels != 2:
            raise ValueError("qubit modes must have exactly two levels")


def boson(levels: int) -> ModeSpec:
    return ModeSpec("boson", int(levels))


def qubit() -> ModeSpec:
    return ModeSpec("qubit", 2)


@dataclass(frozen=True)
class HilbertSpace:
    """Ordered tensor product of modes; immutable after construction."""

    modes: tuple[ModeSpec, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "modes", tuple(self.modes))
        if not self.modes:
            raise ValueError("space needs at least one mode")

    @property
    def n_modes(self) -> int:
        return len(self.modes)

    @cached_property
    def levels(self) -> tuple[int, ...]:
        return tuple(m.levels for m in self.modes)

    @cached_property
    def dim(self) -> int:
        return int(np.prod(self.levels))

    @cached_property
    def occupation_table(self) -> np.ndarray:
        """(dim, n_modes) int array with the occupation of each mode per basis index."""
        idx = np.unravel_index(np.arange(self.dim), self.levels)
        table = np.stack(idx, axis=1)
        table.setflags(write=False)
        return table

    @cached_property
    def node_modes(self) -> tuple[int, ...]:
        """Global indices of the two-level network nodes."""
        return tuple(i for i, m in enumerate(self.modes) if m.kind == "qubit")

    def check_mode(self, mode_index: int) -> int:
        if not 0 <= mode_index < self.n_modes:
            raise IndexError(f"mode index {mode_index} out of range for {self.n_modes} modes")
        return mode_index

    def mode_occupations(self, mode_index: int) -> np.ndarray:
        """Diagonal of the number operator of one mode, as a float vector."""
        self.check_mode(mode_index)
        return self.occupation_table[:, mode_index].astype(float)


def standard_space(q_nodes: int, boson_levels: int) -> HilbertSpace:
    """Two truncated input modes followed by Q two-level nodes."""
    if q_nodes < 1:
        raise ValueError("need at least one network node")
    return HilbertSpace((boson(boson_levels), boson(boson_levels)) + (qubit(),) * q_nodes)


@dataclass(frozen=True, eq=False)
class Operator:
    """Dense operator attached to its space."""

    space: HilbertSpace
    matrix: np.ndarray

    def __post_init__(self) -> None:
        mat = np.asarray(self.matrix, dtype=complex)
        if mat.shape != (self.space.dim, self.space.dim):
            raise ValueError(f"matrix shape {mat.shape} does not match space dim {self.space.dim}")
        object.__setattr__(self, "matrix", mat)

    def dag(self) -> "Operator":
        return Operator(self.space, self.matrix.conj().T)

    def expectation(self, state: "DensityMatrix | np.ndarray") -> complex:
        rho = state.matrix if isinstance(state, DensityMatrix) else np.asarray(state)
        return complex(np.trace(self.matrix @ rho))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Validated density matrix: Hermitian, unit trace, positive to tolerance.

    ``eig_floor`` may be relaxed by long first-order dissipative integrations.
    """

    space: HilbertSpace
    matrix: np.ndarray
    eig_floor: float = field(default=EIG_FLOOR, compare=False)

    def __post_init__(self) -> None:
        mat = np.asarray(self.matrix, dtype=complex)
        if mat.shape != (self.space.dim, self.space.dim):
            raise ValueError(f"matrix shape {mat.shape} does not match space dim {self.space.dim}")
        herm = np.max(np.abs(mat - mat.conj().T))
        if herm > HERMITICITY_TOL:
            raise ValueError(f"density matrix not Hermitian (max deviation {herm:.3e})")
        tr = np.trace(mat).real
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValueError(f"density matrix trace {tr!r} != 1")
        min_eig = float(np.linalg.eigvalsh(mat)[0])
        if min_eig < self.eig_floor:
            raise ValueError(f"density matrix has negative eigenvalue {min_eig:.3e}")
        object.__setattr__(self, "matrix", mat)

    def purity(self) -> float:
        return float(np.trace(self.matrix @ self.matrix).real)


def density_from_ket(space: HilbertSpace, ket: np.ndarray) -> DensityMatrix:
    vec = np.asarray(ket, dtype=complex).reshape(-1)
    if vec.shape[0] != space.dim:
        raise ValueError("ket length does not match space dimension")
    norm = np.linalg.norm(vec)
    if abs(norm - 1.0) > 1e-10:
        raise ValueError(f"ket is not normalized (norm {norm!r})")
    return DensityMatrix(space, np.outer(vec, vec.conj()))


def embed_operator(space: HilbertSpace, mode_index: int, local: np.ndarray) -> np.ndarray:
    """Tensor a single-mode matrix with identities on all other modes."""
    space.check_mode(mode_index)
    local = np.asarray(local, dtype=complex)
    levels = space.modes[mode_index].levels
    if local.shape != (levels, levels):
        raise ValueError(f"local matrix shape {local.shape} does not match mode levels {levels}")
    factors = [np.eye(m.levels, dtype=complex) for m in space.modes]
    factors[mode_index] = local
    return reduce(np.kron, factors)


def annihilation(space: HilbertSpace, mode_index: int) -> Operator:
    """Lowering operator of one mode, embedded in the full space."""
    space.check_mode(mode_index)
    levels = space.modes[mode_index].levels
    local = np.diag(np.sqrt(np.arange(1, levels, dtype=float)), 1).astype(complex)
    return Operator(space, embed_operator(space, mode_index, local))


def creation(space: HilbertSpace, mode_index: int) -> Operator:
    return annihilation(space, mode_index).dag()


def number_operator(space: HilbertSpace, mode_index: int) -> Operator:
    """a†a of one mode (built exactly as the product of the ladder operators)."""
    a = annihilation(space, mode_index).matrix
    return Operator(space, a.conj().T @ a)


def basis_ket(space: HilbertSpace, occupations: Sequence[int]) -> np.ndarray:
    """Unit product basis vector |occupations>."""
    occs = tuple(int(o) for o in occupations)
    if len(occs) != space.n_modes:
        raise ValueError(f"expected {space.n_modes} occupations, got {len(occs)}")
    for occ, mode in zip(occs, space.modes):
        if not 0 <= occ < mode.levels:
            raise ValueError(f"occupation {occ} exceeds truncation of a {mode.levels}-level mode")
    ket = np.zeros(space.dim, dtype=complex)
    ket[np.ravel_multi_index(occs, space.levels)] = 1.0
    return ket


_PAULI = {
    "x": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    "y": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    "z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
}


def pauli(space: HilbertSpace, node_index: int, axis: str) -> Operator:
    """Embedded Pauli matrix on a two-level node (global mode index)."""
    space.check_mode(node_index)
    if space.modes[node_index].kind != "qubit":
        raise ValueError(f"mode {node_index} is not a two-level node")
    if axis not in _PAULI:
        raise ValueError(f"axis must be one of x, y, z (got {axis!r})")
    return Operator(space, embed_operator(space, node_index, _PAULI[axis]))


def node_occupation_weights(space: HilbertSpace) -> np.ndarray:
    """(Q, dim) diagonal weights of the node number operators.

    Number operators are diagonal in the product basis, so node occupations of a
    state are these weights dotted with the state's diagonal.
    """
    if not space.node_modes:
        raise ValueError("space has no two-level nodes")
    return np.stack([space.mode_occupations(i) for i in space.node_modes])
