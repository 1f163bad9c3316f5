"""Pilot/combiner generation and the forward observation model Y = W H P + N.

Noise is injected after combining with i.i.d. circular complex entries
of total variance sigma^2 per entry, matching a white-noise observation
model.  The SNR knob is defined per combined observation entry:
sigma^2 = ||W H P||_F^2 / (Nrf * M * 10^(snr/10)).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class MeasurementSet:
    """Observations plus everything needed to reproduce them (except the noise draw)."""

    y: np.ndarray
    pilot: np.ndarray
    combiner: np.ndarray
    sigma2: float
    snr_db: float | None = None

    def __post_init__(self) -> None:
        if self.y.shape[1] != self.pilot.shape[1]:
            raise ValueError("observation and pilot column counts differ")
        if self.y.shape[0] != self.combiner.shape[0]:
            raise ValueError("observation and combiner row counts differ")


def gen_pilot(n1: int, m: int, rng: np.random.Generator) -> np.ndarray:
    """Random sign pilot, entries +-1/sqrt(M), shape (N1, M)."""
    if n1 < 1 or m < 1:
        raise ValueError("pilot dimensions must be positive")
    signs = rng.integers(0, 2, size=(n1, m)) * 2 - 1
    return signs / np.sqrt(m)


def gen_combiner(n_rf: int, n2: int, rng: np.random.Generator) -> np.ndarray:
    """Random sign combiner, entries +-1/sqrt(N2), shape (Nrf, N2)."""
    if n_rf < 1 or n2 < 1:
        raise ValueError("combiner dimensions must be positive")
    signs = rng.integers(0, 2, size=(n_rf, n2)) * 2 - 1
    return signs / np.sqrt(n2)


def observe(
    h,
    pilot: np.ndarray,
    combiner: np.ndarray,
    sigma2: float,
    rng: np.random.Generator,
    snr_db: float | None = None,
) -> MeasurementSet:
    """Forward model: Y = W H P + N with N entries CN(0, sigma2)."""
    entries = np.asarray(getattr(h, "entries", h), dtype=complex)
    if entries.shape != (combiner.shape[1], pilot.shape[0]):
        raise ValueError(
            f"channel shape {entries.shape} incompatible with combiner {combiner.shape} "
            f"and pilot {pilot.shape}"
        )
    if sigma2 < 0:
        raise ValueError("sigma2 must be nonnegative")
    signal = combiner @ entries @ pilot
    if sigma2 > 0:
        noise = np.sqrt(sigma2 / 2.0) * (
            rng.standard_normal(signal.shape) + 1j * rng.standard_normal(signal.shape)
        )
        signal = signal + noise
    return MeasurementSet(y=signal, pilot=pilot, combiner=combiner, sigma2=sigma2, snr_db=snr_db)


def calibrate_sigma2(h, pilot: np.ndarray, combiner: np.ndarray, snr_db: float) -> float:
    """Noise power so the per-entry SNR of W H P equals 10^(snr_db/10)."""
    entries = np.asarray(getattr(h, "entries", h), dtype=complex)
    signal_energy = float(np.linalg.norm(combiner @ entries @ pilot) ** 2)
    if signal_energy == 0:
        raise ValueError("zero signal: cannot calibrate noise power")
    n_obs = combiner.shape[0] * pilot.shape[1]
    return signal_energy / (n_obs * 10.0 ** (snr_db / 10.0))


def kron_sensing(pilot: np.ndarray, combiner: np.ndarray) -> np.ndarray:
    """Vectorized sensing operator Q = P^T kron W, so vec(W H P) = Q vec(H).

    vec is column-major (Fortran order).
    """
    return np.kron(pilot.T, combiner)


def vec(mat: np.ndarray) -> np.ndarray:
    """Column-major vectorization matching kron_sensing."""
    return np.asarray(mat).ravel(order="F")
