"""Polar-domain (angle, distance) codebooks and transform matrices.

Angles are uniform in sin(theta); at each angle the distances are the
coherence rings r_s = (N d)^2 cos^2(theta) / (2 s beta^2 lambda) for
s = 1, 2, ... clipped to [r_min, r_max], preceded by one quasi
far-field atom at r_max * 1e3 so the dictionary degenerates gracefully
to a planar-wave grid.  Columns are angle-major, distances descending
within an angle.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .channel import farfield_steering, nearfield_steering_many
from .geometry import ArrayGeometry

FAR_ATOM_FACTOR = 1e3

_CACHE_HEADER = struct.Struct("<QQdd")  # rows, cols, wavelength, beta


@dataclass
class PolarGrid:
    """Sampled (angle, distance) grid backing a codebook."""

    angles: np.ndarray
    distances_per_angle: list[np.ndarray]

    def __post_init__(self) -> None:
        self.angles = np.asarray(self.angles, dtype=float)
        if len(self.distances_per_angle) != self.angles.size:
            raise ValueError("one distance list required per angle")
        if np.any(np.diff(np.sin(self.angles)) <= 0):
            raise ValueError("angles must be strictly increasing in sin(theta)")
        self.distances_per_angle = [np.asarray(d, dtype=float) for d in self.distances_per_angle]
        for d in self.distances_per_angle:
            if np.any(d <= 0):
                raise ValueError("grid distances must be positive")
        if self.size == 0:
            raise ValueError("grid has no points")

    @property
    def size(self) -> int:
        return int(sum(d.size for d in self.distances_per_angle))

    def flat_points(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(theta_j, r_j, angle_index_j) for every column j, angle-major order."""
        thetas, rs, idx = [], [], []
        for i, (ang, dists) in enumerate(zip(self.angles, self.distances_per_angle)):
            thetas.extend([ang] * dists.size)
            rs.extend(dists.tolist())
            idx.extend([i] * dists.size)
        return np.asarray(thetas), np.asarray(rs), np.asarray(idx, dtype=int)


@dataclass
class PolarCodebook:
    """Matrix of sampled array responses plus the grid that generated it."""

    atoms: np.ndarray
    grid: PolarGrid
    geometry: ArrayGeometry
    wavelength: float

    def __post_init__(self) -> None:
        self.atoms = np.asarray(self.atoms, dtype=complex)
        if self.atoms.shape != (self.geometry.num_elements, self.grid.size):
            raise ValueError(
                f"atom matrix shape {self.atoms.shape} does not match "
                f"(N={self.geometry.num_elements}, S={self.grid.size})"
            )

    @property
    def size(self) -> int:
        return self.atoms.shape[1]


def sample_grid(
    geom: ArrayGeometry,
    wavelength: float,
    beta: float = 1.2,
    r_min: float = 10.0,
    r_max: float = 600.0,
) -> PolarGrid:
    """Build the sin-uniform angle grid with inverse-distance ring sampling."""
    if not 0 < r_min < r_max:
        raise ValueError(f"need 0 < r_min < r_max, got ({r_min}, {r_max})")
    if beta <= 0:
        raise ValueError("beta must be positive")
    if wavelength <= 0:
        raise ValueError("wavelength must be positive")
    n = geom.num_elements
    sines = -1.0 + 2.0 * np.arange(n) / n
    angles = np.arcsin(sines)
    far_r = r_max * FAR_ATOM_FACTOR
    aperture_sq = (n * geom.spacing) ** 2

    distances_per_angle: list[np.ndarray] = []
    for ang in angles:
        ring_scale = aperture_sq * np.cos(ang) ** 2 / (2.0 * beta**2 * wavelength)
        dists = [far_r]
        s = 1
        while ring_scale / s >= r_min:
            r_s = ring_scale / s
            if r_s <= r_max:
                dists.append(r_s)
            s += 1
        distances_per_angle.append(np.asarray(dists))
    return PolarGrid(angles=angles, distances_per_angle=distances_per_angle)


def build_codebook(grid: PolarGrid, geom: ArrayGeometry, wavelength: float) -> PolarCodebook:
    """Stack near-field responses at every grid point into unit-norm columns."""
    thetas, rs, _ = grid.flat_points()
    atoms = nearfield_steering_many(thetas, rs, geom, wavelength)
    return PolarCodebook(atoms=atoms, grid=grid, geometry=geom, wavelength=wavelength)


def farfield_codebook(geom: ArrayGeometry, wavelength: float) -> PolarCodebook:
    """Planar-wave dictionary on the same sin-uniform angle grid (one atom per angle)."""
    n = geom.num_elements
    sines = -1.0 + 2.0 * np.arange(n) / n
    angles = np.arcsin(sines)
    atoms = np.column_stack([farfield_steering(a, geom, wavelength) for a in angles])
    # distance entries are placeholders: planar atoms have no range.
    grid = PolarGrid(angles=angles, distances_per_angle=[np.array([1e9])] * n)
    return PolarCodebook(atoms=atoms, grid=grid, geometry=geom, wavelength=wavelength)


def polar_synthesize(hp: np.ndarray, cb_r: PolarCodebook, cb_t: PolarCodebook) -> np.ndarray:
    """Channel from its polar coefficients: D_r @ Hp @ D_t^H."""
    hp = np.asarray(hp, dtype=complex)
    if hp.shape != (cb_r.size, cb_t.size):
        raise ValueError(f"coefficient shape {hp.shape} does not match (S2={cb_r.size}, S1={cb_t.size})")
    return cb_r.atoms @ hp @ cb_t.atoms.conj().T


def nearest_atom(theta: float, r: float, grid: PolarGrid) -> int:
    """Column index of the grid point closest in angle, then in inverse distance.

    Distance proximity is judged in 1/r because column coherence decays
    with the inverse-distance gap.  Ties resolve to the smaller index.
    """
    sines = np.sin(grid.angles)
    ang_idx = int(np.argmin(np.abs(sines - np.sin(theta))))
    offset = int(sum(d.size for d in grid.distances_per_angle[:ang_idx]))
    dists = grid.distances_per_angle[ang_idx]
    return offset + int(np.argmin(np.abs(1.0 / dists - 1.0 / r)))


def save_codebook_cache(cb: PolarCodebook, path, beta: float = 0.0) -> None:
    """Write the atom matrix in the binary cache layout."""
    write_matrix_cache(path, cb.atoms, cb.wavelength, beta)


def load_codebook_cache(path) -> tuple[np.ndarray, float, float]:
    """Read a cached atom matrix; returns (atoms, wavelength, beta)."""
    return read_matrix_cache(path)


def write_matrix_cache(path, mat: np.ndarray, wavelength: float, beta: float) -> None:
    """Dense complex container: <u8 rows, <u8 cols, <f8 wavelength, <f8 beta,
    then row-major interleaved little-endian float64 (re, im) pairs."""
    mat = np.asarray(mat, dtype=complex)
    if mat.ndim != 2:
        raise ValueError("cache payload must be a 2-D matrix")
    rows, cols = mat.shape
    payload = np.empty((rows, cols, 2), dtype="<f8")
    payload[..., 0] = mat.real
    payload[..., 1] = mat.imag
    with open(path, "wb") as fh:
        fh.write(_CACHE_HEADER.pack(rows, cols, float(wavelength), float(beta)))
        fh.write(payload.tobytes(order="C"))


def read_matrix_cache(path) -> tuple[np.ndarray, float, float]:
    with open(path, "rb") as fh:
        header = fh.read(_CACHE_HEADER.size)
        if len(header) != _CACHE_HEADER.size:
            raise ValueError(f"truncated cache header in {path}")
        rows, cols, wavelength, beta = _CACHE_HEADER.unpack(header)
        payload = np.frombuffer(fh.read(), dtype="<f8")
    if payload.size != rows * cols * 2:
        raise ValueError(f"cache payload size mismatch in {path}")
    pairs = payload.reshape(rows, cols, 2)
    return pairs[..., 0] + 1j * pairs[..., 1], wavelength, beta
