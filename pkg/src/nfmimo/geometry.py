"""Uniform linear array placement and exact transmitter-receiver distances.

All angles are radians and all lengths meters. Two element-offset
conventions coexist on purpose:

* centered offsets ``delta_n * d`` with ``delta_n = (2n - N - 1) / 2``,
  used by steering vectors and the parallel-array boundary analysis;
* first-antenna anchored offsets ``(n - 1) * d``, used by the geometric
  line-of-sight channel whose reference distance ``r`` is measured
  between the first antennas of the two arrays (so the (1, 1) entry sits
  exactly at distance ``r``).

The coordinate picture behind ``pair_distance_exact``: the transmitter
array lies along the y axis with antenna ``n1`` at ``(0, d1)``, the
receiver's first antenna at ``(r cos(theta), r sin(theta))``, and the
receiver array extending along the unit direction
``(sin(phi), cos(phi))`` so that antenna ``n2`` sits at the anchor plus
``d2 * (sin(phi), cos(phi))``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ArrayGeometry:
    """Uniform linear array: element count and spacing in meters."""

    num_elements: int
    spacing: float

    def __post_init__(self) -> None:
        if self.num_elements < 1:
            raise ValueError(f"num_elements must be >= 1, got {self.num_elements}")
        if self.spacing <= 0:
            raise ValueError(f"spacing must be positive, got {self.spacing}")

    @property
    def aperture(self) -> float:
        """Aperture D = N * d."""
        return self.num_elements * self.spacing

    def centered_offsets(self) -> np.ndarray:
        """Signed offsets delta_n * d, antisymmetric about the array center."""
        n = np.arange(1, self.num_elements + 1)
        return (2 * n - self.num_elements - 1) / 2.0 * self.spacing

    def anchored_offsets(self) -> np.ndarray:
        """Offsets (n - 1) * d measured from the first antenna."""
        return np.arange(self.num_elements) * self.spacing


@dataclass(frozen=True)
class PairOffsets:
    """Signed element offsets of a transmitter/receiver antenna pair."""

    d1: float
    d2: float


def half_wavelength_array(num_elements: int, wavelength: float) -> ArrayGeometry:
    """ULA with the conventional d = lambda / 2 spacing."""
    if wavelength <= 0:
        raise ValueError(f"wavelength must be positive, got {wavelength}")
    return ArrayGeometry(num_elements, wavelength / 2.0)


def element_offset_centered(n: int, num_elements: int, spacing: float) -> float:
    """Offset of the n-th element (1-based) from the array center.

    Returns delta_n * d with delta_n = (2n - N - 1) / 2, so the map is
    antisymmetric: offset(n) == -offset(N + 1 - n).
    """
    if not 1 <= n <= num_elements:
        raise IndexError(f"element index {n} outside 1..{num_elements}")
    return (2 * n - num_elements - 1) / 2.0 * spacing


def scatterer_distance(r, theta, offset):
    """Distance from a source at polar (r, theta) to an element offset along the array.

    Law of cosines: sqrt(r^2 + offset^2 - 2 r offset sin(theta)).
    Broadcasts over array-valued arguments.
    """
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise ValueError("source distance r must be positive")
    offset = np.asarray(offset, dtype=float)
    out = np.sqrt(r**2 + offset**2 - 2.0 * r * offset * np.sin(theta))
    return float(out) if out.ndim == 0 else out


def pair_distance_exact(r, theta, phi, d1, d2):
    """Exact antenna-pair distance for anchored offsets (d1, d2).

    sqrt(r^2 + d1^2 + d2^2 + 2 (r d2 sin(phi + theta) - r d1 sin(theta)
    - d1 d2 cos(phi))); reduces to r when d1 = d2 = 0.  A negative
    radicand means the inputs do not describe a physical placement.
    """
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise ValueError("anchor distance r must be positive")
    d1 = np.asarray(d1, dtype=float)
    d2 = np.asarray(d2, dtype=float)
    radicand = (
        r**2
        + d1**2
        + d2**2
        + 2.0 * (r * d2 * np.sin(phi + theta) - r * d1 * np.sin(theta) - d1 * d2 * np.cos(phi))
    )
    if np.any(radicand < 0):
        raise ValueError("negative radicand: nonphysical pair configuration")
    out = np.sqrt(radicand)
    return float(out) if out.ndim == 0 else out


def pair_distance_parallel(x2, y2, d1, d2):
    """Pair distance for parallel arrays: sqrt(x2^2 + (y2 + d2 - d1)^2).

    (x2, y2) locates the receiver-array center relative to the
    transmitter center; d1, d2 are centered offsets.
    """
    x2 = np.asarray(x2, dtype=float)
    y2 = np.asarray(y2, dtype=float)
    if np.any((x2 == 0) & (y2 == 0)):
        raise ValueError("receiver center coincides with transmitter center")
    out = np.sqrt(x2**2 + (y2 + np.asarray(d2, dtype=float) - np.asarray(d1, dtype=float)) ** 2)
    return float(out) if out.ndim == 0 else out


def pair_distance_taylor2(r, theta, d1, d2):
    """Second-order expansion: r + (d2 - d1) sin(theta) + (d2 - d1)^2 cos^2(theta) / (2r)."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise ValueError("center distance r must be positive")
    diff = np.asarray(d2, dtype=float) - np.asarray(d1, dtype=float)
    out = r + diff * np.sin(theta) + diff**2 * np.cos(theta) ** 2 / (2.0 * r)
    return float(out) if out.ndim == 0 else out


def pair_distance_taylor1(r, theta, d1, d2):
    """First-order (planar wavefront) expansion: r + (d2 - d1) sin(theta)."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise ValueError("center distance r must be positive")
    diff = np.asarray(d2, dtype=float) - np.asarray(d1, dtype=float)
    out = r + diff * np.sin(theta)
    return float(out) if out.ndim == 0 else out
