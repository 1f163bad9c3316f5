"""Near-field steering vectors and the mixed LoS/NLoS channel synthesis.

The line-of-sight part is geometric: every antenna pair gets amplitude
1 / r and phase -2 pi r / lambda at its own exact distance.  The NLoS
part is the usual sum of scatterer outer products built from near-field
(spherical wavefront) array response vectors.

Phase convention: propagation delay carries a negative exponent, so a
near-field response entry is exp(-j (2 pi / lambda) (r^(n) - r)) and its
far-field limit is exp(+j (2 pi / lambda) delta_n d sin(theta)).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import ArrayGeometry, pair_distance_exact, scatterer_distance


@dataclass(frozen=True)
class LosParams:
    """Line-of-sight geometry: anchor distance r, departure angle theta, array rotation phi."""

    r: float
    theta: float
    phi: float

    def __post_init__(self) -> None:
        if self.r <= 0:
            raise ValueError(f"r must be positive, got {self.r}")
        if not -np.pi / 2 < self.theta < np.pi / 2:
            raise ValueError(f"theta must lie in (-pi/2, pi/2), got {self.theta}")
        if not -np.pi < self.phi <= np.pi:
            raise ValueError(f"phi must lie in (-pi, pi], got {self.phi}")


@dataclass(frozen=True)
class PathComponent:
    """One scatterer path: complex gain plus (angle, distance) at each array."""

    gain: complex
    theta_t: float
    dist_t: float
    theta_r: float
    dist_r: float

    def __post_init__(self) -> None:
        if self.dist_t <= 0 or self.dist_r <= 0:
            raise ValueError("scatterer distances must be positive")
        if abs(self.theta_t) >= np.pi / 2 or abs(self.theta_r) >= np.pi / 2:
            raise ValueError("path angles must lie in (-pi/2, pi/2)")


@dataclass
class ChannelMatrix:
    """N2 x N1 channel with optional LoS/NLoS decomposition metadata."""

    entries: np.ndarray
    los_part: np.ndarray | None = None
    nlos_part: np.ndarray | None = None
    scene: tuple[LosParams, list[PathComponent]] | None = None

    def __post_init__(self) -> None:
        self.entries = np.asarray(self.entries, dtype=complex)
        if self.entries.ndim != 2:
            raise ValueError("channel entries must be a 2-D matrix")
        if not np.all(np.isfinite(self.entries)):
            raise ValueError("channel entries must be finite")

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape


def nearfield_steering(theta: float, r: float, geom: ArrayGeometry, wavelength: float) -> np.ndarray:
    """Spherical-wavefront array response at (theta, r); unit norm, entries of modulus 1/sqrt(N)."""
    if r <= 0:
        raise ValueError("source distance r must be positive")
    if wavelength <= 0:
        raise ValueError("wavelength must be positive")
    dist = scatterer_distance(r, theta, geom.centered_offsets())
    phase = -2.0 * np.pi / wavelength * (dist - r)
    return np.exp(1j * phase) / np.sqrt(geom.num_elements)


def nearfield_steering_many(
    thetas: np.ndarray, rs: np.ndarray, geom: ArrayGeometry, wavelength: float
) -> np.ndarray:
    """Column-stacked near-field responses, shape (N, len(thetas))."""
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    rs = np.atleast_1d(np.asarray(rs, dtype=float))
    if thetas.shape != rs.shape:
        raise ValueError("thetas and rs must have matching shapes")
    if np.any(rs <= 0) or wavelength <= 0:
        raise ValueError("distances and wavelength must be positive")
    offsets = geom.centered_offsets()[:, None]
    dist = np.sqrt(rs**2 + offsets**2 - 2.0 * rs * offsets * np.sin(thetas))
    phase = -2.0 * np.pi / wavelength * (dist - rs)
    return np.exp(1j * phase) / np.sqrt(geom.num_elements)


def farfield_steering(theta: float, geom: ArrayGeometry, wavelength: float) -> np.ndarray:
    """Planar-wavefront response; phase linear in the centered element offset."""
    if wavelength <= 0:
        raise ValueError("wavelength must be positive")
    phase = 2.0 * np.pi / wavelength * geom.centered_offsets() * np.sin(theta)
    return np.exp(1j * phase) / np.sqrt(geom.num_elements)


def pairwise_distances(params: LosParams, geom_t: ArrayGeometry, geom_r: ArrayGeometry) -> np.ndarray:
    """Exact distance of every antenna pair, shape (N2, N1), anchored offsets."""
    d1 = geom_t.anchored_offsets()[None, :]
    d2 = geom_r.anchored_offsets()[:, None]
    return pair_distance_exact(params.r, params.theta, params.phi, d1, d2)


def los_channel(
    params: LosParams, geom_t: ArrayGeometry, geom_r: ArrayGeometry, wavelength: float
) -> ChannelMatrix:
    """Geometric free-space LoS channel: entry (n2, n1) = exp(-j 2 pi r~ / lambda) / r~."""
    if wavelength <= 0:
        raise ValueError("wavelength must be positive")
    dist = pairwise_distances(params, geom_t, geom_r)
    entries = np.exp(-2j * np.pi * dist / wavelength) / dist
    return ChannelMatrix(entries, los_part=entries, nlos_part=np.zeros_like(entries), scene=(params, []))


def nlos_channel(
    paths: list[PathComponent],
    geom_t: ArrayGeometry,
    geom_r: ArrayGeometry,
    wavelength: float,
    allow_empty: bool = False,
) -> ChannelMatrix:
    """Sum of scatterer outer products g_l b_r(theta_r, d_r) b_t(theta_t, d_t)^H."""
    if not paths and not allow_empty:
        raise ValueError("path list is empty (pass allow_empty=True for an explicit zero channel)")
    entries = np.zeros((geom_r.num_elements, geom_t.num_elements), dtype=complex)
    for p in paths:
        b_r = nearfield_steering(p.theta_r, p.dist_r, geom_r, wavelength)
        b_t = nearfield_steering(p.theta_t, p.dist_t, geom_t, wavelength)
        entries += p.gain * np.outer(b_r, b_t.conj())
    return ChannelMatrix(entries, los_part=np.zeros_like(entries), nlos_part=entries)


def mixed_channel(los: ChannelMatrix, nlos: ChannelMatrix) -> ChannelMatrix:
    """Sum of the two components with the decomposition recorded."""
    if los.shape != nlos.shape:
        raise ValueError(f"shape mismatch: {los.shape} vs {nlos.shape}")
    scene = None
    if los.scene is not None:
        nlos_paths = nlos.scene[1] if nlos.scene is not None else []
        scene = (los.scene[0], nlos_paths)
    return ChannelMatrix(
        los.entries + nlos.entries,
        los_part=los.entries.copy(),
        nlos_part=nlos.entries.copy(),
        scene=scene,
    )


@dataclass
class SceneConfig:
    """Random-scene distribution: uniform angles and distances, Gaussian path gains.

    ``nlos_power_ratio`` sets the expected NLoS-to-LoS energy ratio; the
    per-scene gain variance is kappa * N1 * N2 / r^2 split evenly across
    paths, so the ratio holds at every LoS distance (the LoS Frobenius
    energy is N1 N2 / r^2 up to aperture-over-distance corrections).
    """

    angle_range: tuple[float, float] = (-np.pi / 3, np.pi / 3)
    distance_range: tuple[float, float] = (50.0, 500.0)
    phi_range: tuple[float, float] = (-np.pi / 3, np.pi / 3)
    num_paths: int = 3
    nlos_power_ratio: float = 0.1
    scatter_range: tuple[float, float] | None = None
    los_distance: float | None = None

    def __post_init__(self) -> None:
        for name in ("angle_range", "distance_range", "phi_range"):
            lo, hi = getattr(self, name)
            if not lo < hi:
                raise ValueError(f"{name} is empty: ({lo}, {hi})")
        if self.num_paths < 0:
            raise ValueError("num_paths must be nonnegative")
        if self.nlos_power_ratio < 0:
            raise ValueError("nlos_power_ratio must be nonnegative")


def sample_scene(
    rng: np.random.Generator,
    cfg: SceneConfig,
    geom_t: ArrayGeometry,
    geom_r: ArrayGeometry,
) -> tuple[LosParams, list[PathComponent]]:
    """Draw one scene. Deterministic under a fixed generator state.

    Draw order is part of the reproducibility contract: LoS r, theta,
    phi, then per path (theta_t, dist_t, theta_r, dist_r), then all
    gains at once.
    """
    r = cfg.los_distance if cfg.los_distance is not None else rng.uniform(*cfg.distance_range)
    theta = rng.uniform(*cfg.angle_range)
    phi = rng.uniform(*cfg.phi_range)
    los = LosParams(r=float(r), theta=float(theta), phi=float(phi))

    scatter_lo, scatter_hi = cfg.scatter_range if cfg.scatter_range is not None else cfg.distance_range
    draws = []
    for _ in range(cfg.num_paths):
        th_t = rng.uniform(*cfg.angle_range)
        d_t = rng.uniform(scatter_lo, scatter_hi)
        th_r = rng.uniform(*cfg.angle_range)
        d_r = rng.uniform(scatter_lo, scatter_hi)
        draws.append((th_t, d_t, th_r, d_r))

    paths: list[PathComponent] = []
    if cfg.num_paths > 0:
        gain_var = cfg.nlos_power_ratio * geom_t.num_elements * geom_r.num_elements / r**2
        scale = np.sqrt(gain_var / (2.0 * cfg.num_paths))
        gains = scale * (
            rng.standard_normal(cfg.num_paths) + 1j * rng.standard_normal(cfg.num_paths)
        )
        for (th_t, d_t, th_r, d_r), g in zip(draws, gains):
            paths.append(
                PathComponent(gain=complex(g), theta_t=th_t, dist_t=d_t, theta_r=th_r, dist_r=d_r)
            )
    return los, paths
