"""NMSE, the channel-matrix CRLB, and the least-squares oracle that attains it.

The CRLB formula 2 sigma^2 N1 N2 / (M Nrf) takes sigma^2 as the noise
variance per real/imaginary component (the equality case assumes
unnormalized +-1 orthogonal pilots and combiners, where P P^H = M I and
W^H W = Nrf I).  For observations with total complex entry variance v,
pass sigma2 = v / 2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class MetricRecord:
    """One aggregated metric sample for a benchmark row."""

    nmse_db: float
    crlb: float
    nmse_bound_db: float
    trial_count: int
    config_digest: str

    def __post_init__(self) -> None:
        if self.trial_count < 1:
            raise ValueError("trial_count must be >= 1")
        if not np.isfinite(self.nmse_db):
            raise ValueError("nmse_db must be finite")


def _entries(x) -> np.ndarray:
    return np.asarray(getattr(x, "entries", x), dtype=complex)


def nmse(h_true, h_hat) -> float:
    """Normalized squared error ||H - H^||^2 / ||H||^2 for a single pair."""
    a = _entries(h_true)
    b = _entries(h_hat)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    ref = float(np.linalg.norm(a) ** 2)
    if ref == 0:
        raise ValueError("reference channel has zero norm")
    return float(np.linalg.norm(a - b) ** 2) / ref


def to_db(x: float) -> float:
    """Power quantity in decibels."""
    return float(10.0 * np.log10(x))


class NmseAccumulator:
    """Expectation-style NMSE over trials: sum of errors over sum of references."""

    def __init__(self) -> None:
        self.err = 0.0
        self.ref = 0.0
        self.count = 0

    def add(self, h_true, h_hat) -> None:
        a = _entries(h_true)
        b = _entries(h_hat)
        self.err += float(np.linalg.norm(a - b) ** 2)
        self.ref += float(np.linalg.norm(a) ** 2)
        self.count += 1

    def value(self) -> float:
        if self.ref == 0:
            raise ValueError("no reference energy accumulated")
        return self.err / self.ref


def crlb(sigma2: float, n1: int, n2: int, m: int, n_rf: int) -> float:
    """Unbiased-estimator bound 2 sigma^2 N1 N2 / (M Nrf)."""
    if min(n1, n2, m, n_rf) < 1:
        raise ValueError("dimensions must be positive integers")
    if sigma2 < 0:
        raise ValueError("sigma2 must be nonnegative")
    return 2.0 * sigma2 * n1 * n2 / (m * n_rf)


def nmse_bound(crlb_value: float, h_energy: float) -> float:
    """NMSE floor implied by the CRLB: CRLB / E||H||^2."""
    if h_energy <= 0:
        raise ValueError("channel energy must be positive")
    return crlb_value / h_energy


def ls_oracle(y: np.ndarray, pilot: np.ndarray, combiner: np.ndarray) -> np.ndarray:
    """Unregularized least-squares inversion of Y = W H P.

    Needs the identifiable case: at least as many pilots as transmit
    antennas (M >= N1, P full row rank) and at least as many RF chains
    as receive antennas (Nrf >= N2, W full column rank).
    """
    n1, m = pilot.shape
    n_rf, n2 = combiner.shape
    if m < n1 or n_rf < n2:
        raise ValueError("underdetermined system: need M >= N1 and Nrf >= N2")
    if np.linalg.matrix_rank(pilot) < n1 or np.linalg.matrix_rank(combiner) < n2:
        raise ValueError("rank-deficient pilot or combiner: system is underdetermined")
    return np.linalg.pinv(combiner) @ y @ np.linalg.pinv(pilot)
