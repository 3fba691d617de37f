import numpy as np
import pytest

from qnphase.hilbert import basis_ket, standard_space
from qnphase.network import (
    CouplingType,
    NetworkRealization,
    boson_truncation,
    build_hamiltonian,
    node_hamiltonian,
    sample_realization,
    total_excitation_operator,
)


def rabi_realization(weight=1.0):
    return NetworkRealization(
        q_nodes=1,
        energies=np.zeros(1),
        couplings=np.zeros((1, 1)),
        input_weights=np.array([[weight, 0.0]]),
        coupling_type=CouplingType.ENERGY_PRESERVING,
    )


def test_same_seed_identical_realization():
    a = sample_realization(4, CouplingType.ENERGY_PRESERVING, 99)
    b = sample_realization(4, CouplingType.ENERGY_PRESERVING, 99)
    assert np.array_equal(a.energies, b.energies)
    assert np.array_equal(a.couplings, b.couplings)
    assert np.array_equal(a.input_weights, b.input_weights)
    c = sample_realization(4, CouplingType.ENERGY_PRESERVING, 100)
    assert not np.array_equal(a.energies, c.energies)


def test_sampled_entries_uniform_mean():
    # law-of-large-numbers check on ~1e4 sampled entries
    values = []
    for seed in range(600):
        r = sample_realization(4, CouplingType.ENERGY_PRESERVING, seed)
        values.extend(r.energies)
        values.extend(r.couplings[np.triu_indices(4, 1)])
        values.extend(r.input_weights.ravel())
    values = np.asarray(values)
    assert len(values) > 10_000
    assert 0.48 <= values.mean() <= 0.52
    assert values.min() >= 0.0 and values.max() <= 1.0


def test_single_node_realization_shapes():
    r = sample_realization(1, CouplingType.ENERGY_PRESERVING, 0)
    assert r.couplings.shape == (1, 1) and r.couplings[0, 0] == 0.0
    assert r.input_weights.shape == (1, 2)


def test_couplings_symmetric():
    r = sample_realization(5, CouplingType.CASCADING, 7)
    assert np.array_equal(r.couplings, r.couplings.T)
    assert np.all(np.diag(r.couplings) == 0.0)


def test_realization_validation():
    with pytest.raises(ValueError, match="symmetric"):
        NetworkRealization(2, np.zeros(2), np.array([[0.0, 0.3], [0.4, 0.0]]),
                           np.zeros((2, 2)), CouplingType.ENERGY_PRESERVING)
    with pytest.raises(ValueError, match=r"\[0, 1\]"):
        NetworkRealization(1, np.array([1.5]), np.zeros((1, 1)),
                           np.zeros((1, 2)), CouplingType.ENERGY_PRESERVING)


def test_json_round_trip():
    r = sample_realization(3, CouplingType.CASCADING, 17, cascade_decay=0.8)
    back = NetworkRealization.from_json(r.to_json())
    assert back.q_nodes == 3
    assert back.coupling_type is CouplingType.CASCADING
    assert back.cascade_decay == pytest.approx(0.8)
    assert back.seed == 17
    assert np.array_equal(back.energies, r.energies)
    assert np.array_equal(back.couplings, r.couplings)
    assert np.array_equal(back.input_weights, r.input_weights)


@pytest.mark.parametrize("coupling,levels", [
    (CouplingType.ENERGY_PRESERVING, 3),
    (CouplingType.CASCADING, 3),
    (CouplingType.ULTRA_STRONG, 5),
])
def test_boson_truncation(coupling, levels):
    assert boson_truncation(2, coupling) == levels


@pytest.mark.parametrize("seed", range(20))
def test_hamiltonian_hermitian_and_ep_conserving(seed):
    q = 2 + seed % 3
    r = sample_realization(q, CouplingType.ENERGY_PRESERVING, seed)
    space = standard_space(q, 3)
    h = build_hamiltonian(r, space).matrix
    assert np.max(np.abs(h - h.conj().T)) < 1e-12
    n_tot = total_excitation_operator(space).matrix
    assert np.max(np.abs(h @ n_tot - n_tot @ h)) < 1e-12


def test_ultra_strong_breaks_conservation():
    r = sample_realization(2, CouplingType.ULTRA_STRONG, 4)
    space = standard_space(2, 4)
    h = build_hamiltonian(r, space).matrix
    n_tot = total_excitation_operator(space).matrix
    assert np.max(np.abs(h @ n_tot - n_tot @ h)) > 1e-6


def test_ultra_strong_equals_ep_when_inputs_decoupled():
    base = sample_realization(3, CouplingType.ENERGY_PRESERVING, 8)
    space = standard_space(3, 3)
    kwargs = dict(q_nodes=3, energies=base.energies, couplings=base.couplings,
                  input_weights=np.zeros((3, 2)))
    h_ep = build_hamiltonian(
        NetworkRealization(coupling_type=CouplingType.ENERGY_PRESERVING, **kwargs), space
    ).matrix
    h_us = build_hamiltonian(
        NetworkRealization(coupling_type=CouplingType.ULTRA_STRONG, **kwargs), space
    ).matrix
    assert np.array_equal(h_ep, h_us)


def test_cascading_has_no_full_hamiltonian():
    r = sample_realization(2, CouplingType.CASCADING, 1)
    space = standard_space(2, 2)
    with pytest.raises(ValueError, match="cascading"):
        build_hamiltonian(r, space)
    h = node_hamiltonian(r, space).matrix
    assert np.max(np.abs(h - h.conj().T)) < 1e-12


def test_space_realization_mismatch():
    r = sample_realization(3, CouplingType.ENERGY_PRESERVING, 2)
    with pytest.raises(ValueError, match="modes"):
        build_hamiltonian(r, standard_space(2, 3))


def test_rabi_oscillation_against_analytic_two_level_oracle():
    # resonant exchange between input 1 and a single node: <n>(t) = sin^2(w t)
    weight = 1.0
    r = rabi_realization(weight)
    space = standard_space(1, 2)
    h = build_hamiltonian(r, space).matrix
    evals, vecs = np.linalg.eigh(h)
    ket0 = basis_ket(space, (1, 0, 0))
    n_node = np.diag(space.mode_occupations(2)).astype(complex)
    for t in np.linspace(0.0, 6.0, 25):
        u = (vecs * np.exp(-1j * evals * t)) @ vecs.conj().T
        ket = u @ ket0
        occ = (ket.conj() @ n_node @ ket).real
        assert occ == pytest.approx(np.sin(weight * t) ** 2, abs=1e-10)


def test_coupling_scale_time_rescale_leaves_unitary_unchanged():
    r = sample_realization(2, CouplingType.ENERGY_PRESERVING, 12)
    space = standard_space(2, 2)
    h = build_hamiltonian(r, space).matrix
    scale = 0.37
    scaled = NetworkRealization(
        q_nodes=2,
        energies=scale * r.energies,
        couplings=scale * r.couplings,
        input_weights=scale * r.input_weights,
        coupling_type=CouplingType.ENERGY_PRESERVING,
    )
    h_scaled = build_hamiltonian(scaled, space).matrix
    assert np.allclose(h_scaled, scale * h, atol=1e-14)
    t = 2.0
    evals, vecs = np.linalg.eigh(h)
    u = (vecs * np.exp(-1j * evals * t)) @ vecs.conj().T
    evals_s, vecs_s = np.linalg.eigh(h_scaled)
    u_s = (vecs_s * np.exp(-1j * evals_s * (t / scale))) @ vecs_s.conj().T
    assert np.allclose(u, u_s, atol=1e-10)


def test_total_excitation_is_diagonal_sum():
    space = standard_space(2, 3)
    n_tot = total_excitation_operator(space).matrix
    assert np.allclose(n_tot, np.diag(space.occupation_table.sum(axis=1)), atol=0)
