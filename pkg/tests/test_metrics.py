import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qnphase.metrics import PhaseErrorReport, phase_error, qcr_bound, sql_hl_ratio


def test_zero_error_for_perfect_estimates():
    phis = np.linspace(0.1, 1.0, 20)
    report = phase_error(phis, phis)
    assert report.error == 0.0
    assert report.std == 0.0
    assert report.n_test == 20


def test_two_sample_formula_literal():
    # errors +e and -e: sqrt(2 e^2 / (2 * 1)) = e
    e = 0.013
    report = phase_error(np.array([0.5, 0.5]), np.array([0.5 + e, 0.5 - e]))
    assert report.error == pytest.approx(e, abs=1e-15)
    assert report.std == pytest.approx(e * np.sqrt(2.0), abs=1e-15)


def test_gaussian_estimator_monte_carlo():
    # with SD s and 100 samples the aggregate is ~ s/10
    rng = np.random.default_rng(0)
    s = 0.02
    values = []
    for _ in range(200):
        true = rng.uniform(0.0, 1.0, 100)
        est = true + rng.normal(0.0, s, 100)
        values.append(phase_error(true, est).error)
    assert abs(np.mean(values) - s / 10.0) < 0.2 * s / 10.0


def test_phase_error_validation():
    with pytest.raises(ValueError, match="length"):
        phase_error(np.zeros(3), np.zeros(4))
    with pytest.raises(ValueError, match="two"):
        phase_error(np.zeros(1), np.zeros(1))


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 1000))
def test_phase_error_permutation_invariant(seed):
    rng = np.random.default_rng(seed)
    true = rng.uniform(0, np.pi, 25)
    est = true + rng.normal(0, 0.01, 25)
    perm = rng.permutation(25)
    assert phase_error(true, est).error == pytest.approx(
        phase_error(true[perm], est[perm]).error, abs=1e-15
    )


def test_std_is_error_times_sqrt_n():
    rng = np.random.default_rng(5)
    true = np.full(64, 0.4)
    est = true + rng.normal(0, 0.03, 64)
    report = phase_error(true, est)
    assert report.std == pytest.approx(report.error * 8.0)


def report(err, n=100):
    return PhaseErrorReport(error=err, std=err * np.sqrt(n), n_test=n)


def test_equal_errors_stay_below_sql():
    ratio = sql_hl_ratio(report(0.01), report(0.01), 2)
    assert ratio.ratio == pytest.approx(1.0)
    assert ratio.classification == "below_sql"


def test_heisenberg_scaling_classification():
    ratio = sql_hl_ratio(report(0.04), report(0.01), 4)
    assert ratio.ratio == pytest.approx(4.0)
    assert ratio.classification == "beats_sql"
    ratio_hl = sql_hl_ratio(report(0.05), report(0.01), 4)
    assert ratio_hl.classification == "beats_hl"


def test_paper_like_window_ratio_magnitude():
    ratio = sql_hl_ratio(report(2.1e-3), report(1.0e-3), 2)
    assert ratio.ratio == pytest.approx(2.1)
    assert ratio.sql_threshold == pytest.approx(np.sqrt(2.0))
    assert ratio.hl_threshold == 2.0
    assert ratio.classification == "beats_hl"


def test_ratio_validation():
    with pytest.raises(ValueError):
        sql_hl_ratio(report(0.1), report(0.1), 1)
    with pytest.raises(ZeroDivisionError):
        sql_hl_ratio(report(0.1), report(0.0), 2)


def test_qcr_bound_values():
    assert qcr_bound(1.0, 10_000) == pytest.approx(0.01)
    assert qcr_bound(16.0, 10_000) == pytest.approx(0.0025)
    assert qcr_bound(4.0, 10_000) == pytest.approx(1.0 / (np.sqrt(10_000) * 2))


def test_qcr_bound_monotone_decreasing():
    assert qcr_bound(4.0, 100) < qcr_bound(1.0, 100)
    assert qcr_bound(4.0, 400) < qcr_bound(4.0, 100)


def test_qcr_bound_validation():
    with pytest.raises(ValueError):
        qcr_bound(0.0, 10)
    with pytest.raises(ValueError):
        qcr_bound(1.0, 0)
