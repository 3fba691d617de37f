import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qnphase.hilbert import basis_ket, number_operator, standard_space
from qnphase.resources import (
    ResourceSpec,
    coherence,
    dephase_fock,
    embed_input_state,
    encode_phase,
    input_space,
    make_resource,
    negativity,
    qfi,
)


def noon(n, levels=None):
    return make_resource(ResourceSpec("noon", n), levels or n + 1)


def classical(n, p=1.0, levels=None):
    return make_resource(ResourceSpec("classical", n, p), levels or n + 1)


def test_resource_spec_validation():
    with pytest.raises(ValueError):
        ResourceSpec("bell", 1)
    with pytest.raises(ValueError):
        ResourceSpec("noon", 0)
    with pytest.raises(ValueError):
        ResourceSpec("noon", 1, dephase_p=1.2)
    with pytest.raises(ValueError, match="truncation"):
        make_resource(ResourceSpec("noon", 3), 3)


def test_noon_single_excitation_occupations():
    rho = noon(1)
    space = rho.space
    for mode in (0, 1):
        n = number_operator(space, mode).matrix
        assert np.trace(n @ rho.matrix).real == pytest.approx(0.5, abs=1e-12)
    assert np.linalg.matrix_rank(rho.matrix, tol=1e-10) == 1


def test_classical_state_matches_plus_minus_mixture():
    # the mixture of |+-><+-| and |-+><-+| built literally must coincide
    for n in (1, 2, 3):
        space = input_space(n + 1)
        zero = np.zeros(n + 1)
        zero[0] = 1.0
        top = np.zeros(n + 1)
        top[n] = 1.0
        plus = (zero + top) / np.sqrt(2.0)
        minus = (zero - top) / np.sqrt(2.0)
        pm = np.kron(plus, minus)
        mp = np.kron(minus, plus)
        expected = 0.5 * np.outer(pm, pm) + 0.5 * np.outer(mp, mp)
        assert np.max(np.abs(classical(n).matrix - expected)) < 1e-12


def test_classical_state_rank_two_half_half():
    evals = np.linalg.eigvalsh(classical(2).matrix)
    top = np.sort(evals)[-2:]
    assert np.allclose(top, [0.5, 0.5], atol=1e-12)
    assert np.sum(evals > 1e-10) == 2


def test_max_entangled_amplitudes():
    rho = make_resource(ResourceSpec("max_entangled", 2), 3)
    space = rho.space
    kets = [basis_ket(space, occ) for occ in ((2, 0), (1, 1), (0, 2))]
    for a in kets:
        for b in kets:
            assert (a.conj() @ rho.matrix @ b) == pytest.approx(1.0 / 3.0, abs=1e-12)
    assert np.trace(rho.matrix).real == pytest.approx(1.0)


def test_encode_phase_identity_at_zero():
    rho = noon(2)
    assert np.array_equal(encode_phase(rho, 0.0).matrix, rho.matrix)


def test_encode_phase_accumulates_n_fold():
    n = 2
    rho = encode_phase(noon(n), np.pi / 2)
    space = rho.space
    k_n0 = basis_ket(space, (n, 0))
    k_0n = basis_ket(space, (0, n))
    off = k_n0.conj() @ rho.matrix @ k_0n
    # amplitude -1/2 times exp(-i N phi) = exp(-i pi) = -1
    assert off == pytest.approx(0.5, abs=1e-12)


def test_encode_phase_preserves_spectrum():
    rho = classical(2)
    for phi in (0.3, 1.7, 5.0):
        out = encode_phase(rho, phi)
        assert np.allclose(
            np.linalg.eigvalsh(out.matrix), np.linalg.eigvalsh(rho.matrix), atol=1e-12
        )


@settings(max_examples=40, deadline=None)
@given(phi1=st.floats(-3.0, 3.0), phi2=st.floats(-3.0, 3.0))
def test_encode_phase_is_additive(phi1, phi2):
    rho = noon(2)
    double = encode_phase(encode_phase(rho, phi1), phi2)
    single = encode_phase(rho, phi1 + phi2)
    assert np.max(np.abs(double.matrix - single.matrix)) < 1e-12


def test_dephase_identity_and_full():
    rho = classical(2)
    assert np.array_equal(dephase_fock(rho, 1.0).matrix, rho.matrix)
    full = dephase_fock(rho, 0.0)
    off = full.matrix - np.diag(np.diagonal(full.matrix))
    assert np.max(np.abs(off)) == 0.0
    with pytest.raises(ValueError):
        dephase_fock(rho, 1.5)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_dephase_positivity_over_grid(n):
    for p in np.linspace(0.0, 1.0, 11):
        rho = classical(n, p=p)
        assert np.linalg.eigvalsh(rho.matrix)[0] >= -1e-12


def test_dephased_encoding_commutes_with_dephasing():
    rho = classical(2)
    phi = 0.8
    a = dephase_fock(encode_phase(rho, phi), 0.4)
    b = encode_phase(dephase_fock(rho, 0.4), phi)
    assert np.max(np.abs(a.matrix - b.matrix)) < 1e-14


def test_coherence_zero_for_diagonal():
    rho = classical(2, p=0.0)
    assert coherence(rho) == pytest.approx(0.0, abs=1e-12)


def test_coherence_of_undephased_classical_state_is_ln2():
    # rank-2 mixture entropy ln 2 vs diagonal entropy ln 4
    for n in (1, 2, 4):
        assert coherence(classical(n)) == pytest.approx(np.log(2.0), abs=1e-9)


def test_coherence_monotone_in_p():
    values = [coherence(classical(2, p=p)) for p in (1.0, 0.8, 0.6, 0.4, 0.2, 0.0)]
    assert all(b <= a + 1e-12 for a, b in zip(values, values[1:]))


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_classical_states_are_separable_by_negativity(n):
    assert negativity(classical(n)) == pytest.approx(0.0, abs=1e-12)


def test_noon_negativity_is_half():
    # partial transpose of the Bell-like two-mode state
    assert negativity(noon(1)) == pytest.approx(0.5, abs=1e-12)


def test_product_state_negativity_zero():
    space = input_space(2)
    rho = make_resource(ResourceSpec("noon", 1), 2)
    vac = np.outer(basis_ket(space, (0, 0)), basis_ket(space, (0, 0)).conj())
    from qnphase.hilbert import DensityMatrix

    assert negativity(DensityMatrix(space, vac)) == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_qfi_equals_n_squared(n):
    assert qfi(noon(n)) == pytest.approx(n * n, abs=1e-10)
    assert qfi(classical(n)) == pytest.approx(n * n, abs=1e-10)


def test_qfi_vacuum_is_zero():
    space = input_space(2)
    from qnphase.hilbert import DensityMatrix

    vac = np.outer(basis_ket(space, (0, 0)), basis_ket(space, (0, 0)).conj())
    assert qfi(DensityMatrix(space, vac)) == pytest.approx(0.0, abs=1e-12)


def test_qfi_pure_state_matches_four_variance():
    # dual route: spectral formula vs 4 Var(G) for a pure state
    rho = make_resource(ResourceSpec("max_entangled", 2), 3)
    g = number_operator(rho.space, 1).matrix
    mean = np.trace(g @ rho.matrix).real
    mean_sq = np.trace(g @ g @ rho.matrix).real
    assert qfi(rho) == pytest.approx(4.0 * (mean_sq - mean**2), abs=1e-10)


def test_qfi_invariant_under_encoding():
    rho = classical(3)
    base = qfi(rho)
    for phi in (0.4, 2.2):
        assert qfi(encode_phase(rho, phi)) == pytest.approx(base, abs=1e-9)


def test_embed_input_state_puts_nodes_in_ground():
    rho_in = noon(2)
    space = standard_space(3, 3)
    full = embed_input_state(space, rho_in)
    for j in space.node_modes:
        n = number_operator(space, j).matrix
        assert np.trace(n @ full.matrix).real == pytest.approx(0.0, abs=1e-12)
    n1 = number_operator(space, 0).matrix
    assert np.trace(n1 @ full.matrix).real == pytest.approx(1.0, abs=1e-12)


def test_embed_rejects_mismatched_truncation():
    rho_in = noon(2)  # 3-level inputs
    with pytest.raises(ValueError, match="modes"):
        embed_input_state(standard_space(2, 4), rho_in)
