"""Field-boundary calculators: MISO-RD, MIMO-RD, MIMO-ARD, and phase-discrepancy laws.

MIMO-RD = 2 (D1 + D2)^2 / lambda bounds where the planar-wavefront
(far-field) model stays within pi/8 of the exact pair phases; MIMO-ARD
= 4 D1 D2 / lambda bounds where the steering-vector-product model does.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

# Round propagation speed: 50 GHz then maps to exactly 6 mm wavelength.
SPEED_OF_LIGHT = 3.0e8


def _require_positive(**kwargs: float) -> None:
    for name, value in kwargs.items():
        if value <= 0:
            raise ValueError(f"{name} must be positive, got {value}")


def miso_rd(aperture: float, wavelength: float) -> float:
    """Classic Rayleigh distance 2 D^2 / lambda for a single large array."""
    _require_positive(aperture=aperture, wavelength=wavelength)
    return 2.0 * aperture**2 / wavelength


def mimo_rd(d1: float, d2: float, wavelength: float) -> float:
    """Two-array Rayleigh distance 2 (D1 + D2)^2 / lambda."""
    _require_positive(d1=d1, d2=d2, wavelength=wavelength)
    return 2.0 * (d1 + d2) ** 2 / wavelength


def mimo_ard(d1: float, d2: float, wavelength: float) -> float:
    """Advanced Rayleigh distance 4 D1 D2 / lambda (product-model validity bound)."""
    _require_positive(d1=d1, d2=d2, wavelength=wavelength)
    return 4.0 * d1 * d2 / wavelength


def max_discrepancy_far(r: float, d1: float, d2: float, wavelength: float) -> float:
    """Worst-case phase gap to the planar model: pi (D1 + D2)^2 / (4 r lambda)."""
    _require_positive(r=r)
    return np.pi * (d1 + d2) ** 2 / (4.0 * r * wavelength)


def max_discrepancy_near(r: float, d1: float, d2: float, wavelength: float) -> float:
    """Worst-case phase gap to the response-product model: pi D1 D2 / (2 r lambda)."""
    _require_positive(r=r)
    return np.pi * d1 * d2 / (2.0 * r * wavelength)


def empirical_discrepancy(h_exact, h_model) -> float:
    """Max entrywise wrapped phase difference between two channel matrices.

    A common phase counts; callers that only care about model shape
    should remove the global phase (e.g. align the (1, 1) entries)
    before calling.
    """
    a = np.asarray(getattr(h_exact, "entries", h_exact), dtype=complex)
    b = np.asarray(getattr(h_model, "entries", h_model), dtype=complex)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return float(np.max(np.abs(np.angle(a * b.conj()))))


def remove_global_phase(h_model, h_ref) -> np.ndarray:
    """Rotate h_model so its (1, 1) entry is phase-aligned with h_ref's."""
    a = np.asarray(getattr(h_ref, "entries", h_ref), dtype=complex)
    b = np.asarray(getattr(h_model, "entries", h_model), dtype=complex)
    rot = np.exp(1j * (np.angle(a[0, 0]) - np.angle(b[0, 0])))
    return b * rot


@dataclass(frozen=True)
class BoundaryReport:
    """All boundary values for one transmitter/receiver aperture pair."""

    miso_rd_t: float
    miso_rd_r: float
    mimo_rd: float
    mimo_ard: float
    wavelength: float
    apertures: tuple[float, float]

    def __post_init__(self) -> None:
        if self.mimo_ard > self.mimo_rd:
            raise ValueError("mimo_ard exceeds mimo_rd; apertures are inconsistent")

    def to_dict(self) -> dict:
        return {
            "wavelength_m": self.wavelength,
            "aperture_tx_m": self.apertures[0],
            "aperture_rx_m": self.apertures[1],
            "miso_rd_tx_m": self.miso_rd_t,
            "miso_rd_rx_m": self.miso_rd_r,
            "mimo_rd_m": self.mimo_rd,
            "mimo_ard_m": self.mimo_ard,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def boundary_report(n1: int, n2: int, freq_hz: float, spacing: float | None = None) -> BoundaryReport:
    """Boundary values for N1/N2-element half-wavelength arrays at a carrier frequency."""
    _require_positive(n1=n1, n2=n2, freq_hz=freq_hz)
    wavelength = SPEED_OF_LIGHT / freq_hz
    d = wavelength / 2.0 if spacing is None else spacing
    _require_positive(spacing=d)
    ap1, ap2 = n1 * d, n2 * d
    return BoundaryReport(
        miso_rd_t=miso_rd(ap1, wavelength),
        miso_rd_r=miso_rd(ap2, wavelength),
        mimo_rd=mimo_rd(ap1, ap2, wavelength),
        mimo_ard=mimo_ard(ap1, ap2, wavelength),
        wavelength=wavelength,
        apertures=(ap1, ap2),
    )
