import numpy as np
import pytest

from qnphase.measurement import (
    ShotModel,
    sample_bernoulli,
    sample_bernoulli_array,
    sample_gaussian,
)


def test_shot_model_validation():
    with pytest.raises(ValueError):
        ShotModel("gaussian", xi=0.1, m_shots=10)
    with pytest.raises(ValueError):
        ShotModel("bernoulli", m_shots=0)
    with pytest.raises(ValueError):
        ShotModel("poisson")
    assert ShotModel.gaussian(0.01).xi == 0.01
    assert ShotModel.bernoulli(100).m_shots == 100


def test_gaussian_zero_noise_is_exact():
    rng = np.random.default_rng(0)
    means = np.array([[0.1, 0.9], [0.5, 0.3]])
    out = sample_gaussian(means, 0.0, rng)
    assert np.array_equal(out, means)


def test_gaussian_empirical_standard_deviation():
    # sampler statistics: SD of the perturbation should be xi/2
    rng = np.random.default_rng(7)
    xi = 0.04
    means = np.zeros(100_000)
    noise = sample_gaussian(means, xi, rng)
    assert 0.49 * xi <= noise.std() <= 0.51 * xi


def test_gaussian_model_is_additive_in_systematic_offsets():
    rng1 = np.random.default_rng(3)
    rng2 = np.random.default_rng(3)
    means = np.linspace(0.0, 1.0, 10)
    out = sample_gaussian(means, 0.02, rng1)
    shifted = sample_gaussian(means + 0.1, 0.02, rng2)
    assert np.allclose(shifted - out, 0.1, atol=1e-15)


def test_gaussian_does_not_clamp():
    rng = np.random.default_rng(11)
    out = sample_gaussian(np.zeros(2000), 0.5, rng)
    assert out.min() < 0.0


@pytest.mark.parametrize("mean,expected", [(0.0, 0.0), (1.0, 1.0)])
def test_bernoulli_endpoints_are_deterministic(mean, expected):
    rng = np.random.default_rng(5)
    for m in (1, 10, 1000):
        assert sample_bernoulli(mean, m, rng) == expected


def test_bernoulli_rejects_out_of_range_means():
    rng = np.random.default_rng(0)
    with pytest.raises(ValueError, match=r"\[0, 1\]"):
        sample_bernoulli(1.2, 10, rng)
    with pytest.raises(ValueError):
        sample_bernoulli_array(np.array([-0.5]), 10, rng)


def test_bernoulli_empirical_sdm_matches_binomial():
    # binomial SDM at p=0.5, M=1e4 is sqrt(p(1-p)/M) = 0.005
    rng = np.random.default_rng(42)
    estimates = sample_bernoulli_array(np.full(1000, 0.5), 10_000, rng)
    assert 0.0045 <= estimates.std() <= 0.0055


def test_bernoulli_estimator_unbiased():
    rng = np.random.default_rng(9)
    for p in (0.2, 0.5, 0.8):
        trials = 1500
        estimates = sample_bernoulli_array(np.full(trials, p), 400, rng)
        sdm = np.sqrt(p * (1 - p) / 400)
        assert abs(estimates.mean() - p) < 3.0 * sdm / np.sqrt(trials)


def test_bernoulli_array_matches_scalar_distribution():
    rng = np.random.default_rng(17)
    arr = sample_bernoulli_array(np.full((50, 2), 0.3), 200, rng)
    assert arr.shape == (50, 2)
    assert np.all((arr >= 0.0) & (arr <= 1.0))
    assert abs(arr.mean() - 0.3) < 0.02


def test_cross_model_noise_scales_agree():
    # gaussian xi/2 vs binomial sqrt(p(1-p)/M) at p ~ 0.5
    m_shots = 10_000
    p = 0.5
    sdm_bernoulli = np.sqrt(p * (1 - p) / m_shots)
    xi = 2.0 * sdm_bernoulli
    assert xi / 2.0 == pytest.approx(sdm_bernoulli)
    rng = np.random.default_rng(2)
    g = sample_gaussian(np.full(4000, p), xi, rng) - p
    b = sample_bernoulli_array(np.full(4000, p), m_shots, rng) - p
    assert 0.8 <= g.std() / b.std() <= 1.25


def test_shot_model_dispatch():
    rng = np.random.default_rng(1)
    means = np.array([0.2, 0.7])
    g = ShotModel.gaussian(0.01).sample(means, rng)
    assert g.shape == means.shape
    b = ShotModel.bernoulli(50).sample(means, rng)
    assert np.all((b >= 0) & (b <= 1))
