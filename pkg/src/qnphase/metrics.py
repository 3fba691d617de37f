"""Phase-error statistics, SQL/HL ratio diagnostics and the quantum Cramer-Rao bound."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "PhaseErrorReport",
    "phase_error",
    "SqlHlRatio",
    "sql_hl_ratio",
    "qcr_bound",
]


@dataclass(frozen=True)
class PhaseErrorReport:
    """error is the SDM-style aggregate; std is the plain standard deviation
    error * sqrt(n_test). With a constant true phase the same formula yields the
    SDM of that phase."""

    error: float
    std: float
    n_test: int


def phase_error(phi_true: np.ndarray, phi_est: np.ndarray) -> PhaseErrorReport:
    """sqrt(sum (est - true)^2 / (n (n - 1))) over the test samples."""
    phi_true = np.asarray(phi_true, dtype=float)
    phi_est = np.asarray(phi_est, dtype=float)
    if phi_true.shape != phi_est.shape:
        raise ValueError("true and estimated phase lists must have the same length")
    n = phi_true.size
    if n < 2:
        raise ValueError("need at least two test samples")
    err = float(np.sqrt(np.sum((phi_est - phi_true) ** 2) / (n * (n - 1))))
    return PhaseErrorReport(error=err, std=err * float(np.sqrt(n)), n_test=n)


@dataclass(frozen=True)
class SqlHlRatio:
    """Error ratio against the N=1 reference with its scaling thresholds."""

    n_excitations: int
    ratio: float
    sql_threshold: float
    hl_threshold: float
    classification: str


def sql_hl_ratio(report_1: PhaseErrorReport, report_n: PhaseErrorReport, n_excitations: int) -> SqlHlRatio:
    """ratio = error(N=1) / error(N); beats the SQL above sqrt(N), the HL above N."""
    if n_excitations < 2:
        raise ValueError("ratio is defined for excitation degree >= 2")
    if report_n.error == 0.0:
        raise ZeroDivisionError("reference error for degree N is zero")
    ratio = report_1.error / report_n.error
    sql = float(np.sqrt(n_excitations))
    hl = float(n_excitations)
    if ratio > hl:
        label = "beats_hl"
    elif ratio > sql:
        label = "beats_sql"
    else:
        label = "below_sql"
    return SqlHlRatio(n_excitations, ratio, sql, hl, label)


def qcr_bound(quantum_fisher: float, m_shots: int) -> float:
    """1 / sqrt(M F_q), the repetition-count Cramer-Rao lower bound on delta phi."""
    if quantum_fisher <= 0:
        raise ValueError("quantum Fisher information must be positive")
    if m_shots < 1:
        raise ValueError("repetition count must be >= 1")
    return float(1.0 / np.sqrt(m_shots * quantum_fisher))
