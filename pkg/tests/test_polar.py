import numpy as np
import pytest

from nfmimo.channel import PathComponent, farfield_steering, nearfield_steering, nlos_channel
from nfmimo.geometry import ArrayGeometry, half_wavelength_array
from nfmimo.polar import (
    PolarGrid,
    build_codebook,
    farfield_codebook,
    load_codebook_cache,
    nearest_atom,
    polar_synthesize,
    read_matrix_cache,
    sample_grid,
    save_codebook_cache,
    write_matrix_cache,
)

LAM = 0.006

# frozen regression baseline: max adjacent-ring coherence measured for
# N=64, d=lambda/2, beta=1.2 over r in [0.25, 600]
ADJACENT_COHERENCE_BASELINE = 0.82


def test_angle_grid_uniform_in_sin():
    geom = half_wavelength_array(4, LAM)
    grid = sample_grid(geom, LAM, beta=1.2, r_min=1.0, r_max=100.0)
    assert np.allclose(np.sin(grid.angles), [-1.0, -0.5, 0.0, 0.5])


def test_edge_angle_keeps_only_far_atom():
    geom = half_wavelength_array(4, LAM)
    grid = sample_grid(geom, LAM, beta=1.2, r_min=1.0, r_max=100.0)
    # sin = -1 -> cos = 0 collapses every finite ring
    assert grid.distances_per_angle[0].size == 1
    assert grid.distances_per_angle[0][0] == pytest.approx(100.0 * 1e3)


def test_ring_distances_strictly_decreasing():
    geom = half_wavelength_array(64, LAM)
    grid = sample_grid(geom, LAM, beta=1.2, r_min=0.25, r_max=600.0)
    for dists in grid.distances_per_angle:
        assert np.all(np.diff(dists) < 0)


def test_rings_follow_inverse_distance_law():
    geom = half_wavelength_array(64, LAM)
    beta = 1.2
    grid = sample_grid(geom, LAM, beta=beta, r_min=0.25, r_max=600.0)
    i = int(np.argmin(np.abs(grid.angles)))  # broadside angle
    rings = grid.distances_per_angle[i][1:]  # drop the far atom
    scale = geom.aperture**2 * np.cos(grid.angles[i]) ** 2 / (2 * beta**2 * LAM)
    for s, r in enumerate(rings, start=1):
        assert r == pytest.approx(scale / s, rel=1e-12)


def test_sample_grid_validation():
    geom = half_wavelength_array(8, LAM)
    with pytest.raises(ValueError):
        sample_grid(geom, LAM, beta=0.0)
    with pytest.raises(ValueError):
        sample_grid(geom, LAM, r_min=10.0, r_max=5.0)


def test_codebook_columns_are_steering_vectors():
    geom = half_wavelength_array(16, LAM)
    grid = sample_grid(geom, LAM, beta=1.2, r_min=1.0, r_max=200.0)
    cb = build_codebook(grid, geom, LAM)
    thetas, rs, _ = grid.flat_points()
    j = min(5, cb.size - 1)
    assert np.allclose(cb.atoms[:, j], nearfield_steering(thetas[j], rs[j], geom, LAM))


def test_codebook_single_point_single_antenna():
    geom = ArrayGeometry(1, LAM / 2)
    grid = PolarGrid(angles=np.array([0.0]), distances_per_angle=[np.array([100.0])])
    cb = build_codebook(grid, geom, LAM)
    assert cb.atoms.shape == (1, 1)
    assert cb.atoms[0, 0] == pytest.approx(1.0)


def test_codebook_unit_columns():
    geom = half_wavelength_array(32, LAM)
    cb = build_codebook(sample_grid(geom, LAM, 1.2, 1.0, 300.0), geom, LAM)
    norms = np.linalg.norm(cb.atoms, axis=0)
    assert np.max(np.abs(norms - 1.0)) < 1e-12


def test_far_atom_matches_farfield_steering():
    geom = half_wavelength_array(32, LAM)
    grid = sample_grid(geom, LAM, 1.2, 1.0, 300.0)
    cb = build_codebook(grid, geom, LAM)
    offset = 0
    for ang, dists in zip(grid.angles, grid.distances_per_angle):
        far_col = cb.atoms[:, offset]  # far atom is first at each angle
        corr = abs(np.vdot(far_col, farfield_steering(ang, geom, LAM)))
        assert corr > 0.999
        offset += dists.size


def test_adjacent_ring_coherence_regression():
    geom = half_wavelength_array(64, LAM)
    grid = sample_grid(geom, LAM, beta=1.2, r_min=0.25, r_max=600.0)
    cb = build_codebook(grid, geom, LAM)
    offset = 0
    for dists in grid.distances_per_angle:
        for s in range(dists.size - 1):
            c = abs(np.vdot(cb.atoms[:, offset + s], cb.atoms[:, offset + s + 1]))
            assert c < ADJACENT_COHERENCE_BASELINE
        offset += dists.size


def test_polar_synthesize_shapes_and_outer_product():
    lam = LAM
    geom_t = half_wavelength_array(16, lam)
    geom_r = half_wavelength_array(8, lam)
    cb_t = build_codebook(sample_grid(geom_t, lam, 1.2, 1.0, 300.0), geom_t, lam)
    cb_r = build_codebook(sample_grid(geom_r, lam, 1.2, 1.0, 300.0), geom_r, lam)
    hp = np.zeros((cb_r.size, cb_t.size), dtype=complex)
    assert np.all(polar_synthesize(hp, cb_r, cb_t) == 0)
    hp[3, 5] = 1.0
    h = polar_synthesize(hp, cb_r, cb_t)
    assert np.allclose(h, np.outer(cb_r.atoms[:, 3], cb_t.atoms[:, 5].conj()))
    assert np.linalg.norm(h) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ValueError):
        polar_synthesize(np.zeros((2, 2)), cb_r, cb_t)


def test_polar_synthesize_linearity():
    geom_t = half_wavelength_array(8, LAM)
    geom_r = half_wavelength_array(4, LAM)
    cb_t = build_codebook(sample_grid(geom_t, LAM, 1.2, 1.0, 300.0), geom_t, LAM)
    cb_r = build_codebook(sample_grid(geom_r, LAM, 1.2, 1.0, 300.0), geom_r, LAM)
    rng = np.random.default_rng(3)
    a = rng.standard_normal((cb_r.size, cb_t.size)) + 1j * rng.standard_normal((cb_r.size, cb_t.size))
    b = rng.standard_normal((cb_r.size, cb_t.size)) + 1j * rng.standard_normal((cb_r.size, cb_t.size))
    alpha = 2.5 - 1.5j
    lhs = polar_synthesize(alpha * a + b, cb_r, cb_t)
    rhs = alpha * polar_synthesize(a, cb_r, cb_t) + polar_synthesize(b, cb_r, cb_t)
    assert np.allclose(lhs, rhs, atol=1e-12)


def test_on_grid_paths_exactly_representable():
    geom_t = half_wavelength_array(32, LAM)
    geom_r = half_wavelength_array(16, LAM)
    grid_t = sample_grid(geom_t, LAM, 1.2, 0.5, 300.0)
    grid_r = sample_grid(geom_r, LAM, 1.2, 0.5, 300.0)
    cb_t = build_codebook(grid_t, geom_t, LAM)
    cb_r = build_codebook(grid_r, geom_r, LAM)
    th_t, r_t, _ = grid_t.flat_points()
    th_r, r_r, _ = grid_r.flat_points()
    rng = np.random.default_rng(6)
    paths = []
    hp = np.zeros((cb_r.size, cb_t.size), dtype=complex)
    for _ in range(3):
        jt = int(rng.integers(0, cb_t.size))
        jr = int(rng.integers(0, cb_r.size))
        g = complex(rng.standard_normal(), rng.standard_normal())
        # far atoms sit beyond the PathComponent distance validation; clamp to rings
        if not (0 < r_t[jt] < 1e4 and 0 < r_r[jr] < 1e4):
            jt, jr = 1, 1
        paths.append(
            PathComponent(gain=g, theta_t=th_t[jt], dist_t=r_t[jt], theta_r=th_r[jr], dist_r=r_r[jr])
        )
        hp[jr, jt] += g
    h = nlos_channel(paths, geom_t, geom_r, LAM).entries
    h_synth = polar_synthesize(hp, cb_r, cb_t)
    assert np.linalg.norm(h - h_synth) < 1e-10


def test_nearest_atom_exact_and_ties():
    geom = half_wavelength_array(16, LAM)
    grid = sample_grid(geom, LAM, 1.2, 0.2, 300.0)
    thetas, rs, _ = grid.flat_points()
    for j in (0, 3, grid.size - 1):
        assert nearest_atom(thetas[j], rs[j], grid) == j
    # equidistant in sin between angles 0 and 1 -> smaller index wins
    mid_sin = (np.sin(grid.angles[0]) + np.sin(grid.angles[1])) / 2
    idx = nearest_atom(np.arcsin(mid_sin), rs[0], grid)
    assert idx < sum(d.size for d in grid.distances_per_angle[:1]) + grid.distances_per_angle[1].size
    first_angle_size = grid.distances_per_angle[0].size
    assert idx < first_angle_size  # tie resolves to the first angle block


def test_nearest_atom_maximizes_correlation_within_angle():
    geom = half_wavelength_array(32, LAM)
    grid = sample_grid(geom, LAM, 1.2, 0.2, 300.0)
    cb = build_codebook(grid, geom, LAM)
    _, _, angle_idx = grid.flat_points()
    rng = np.random.default_rng(10)
    for _ in range(40):
        theta = rng.uniform(-1.0, 1.0)
        r = rng.uniform(0.5, 280.0)
        j = nearest_atom(theta, r, grid)
        b = nearfield_steering(theta, r, geom, LAM)
        same_angle = np.flatnonzero(angle_idx == angle_idx[j])
        corrs = np.abs(cb.atoms[:, same_angle].conj().T @ b)
        assert corrs[np.where(same_angle == j)[0][0]] == pytest.approx(np.max(corrs), rel=1e-9)


def test_farfield_codebook_atoms():
    geom = half_wavelength_array(16, LAM)
    cb = farfield_codebook(geom, LAM)
    assert cb.size == 16
    sines = np.sin(cb.grid.angles)
    assert np.allclose(sines, -1 + 2 * np.arange(16) / 16)
    gram = cb.atoms.conj().T @ cb.atoms
    assert np.allclose(gram, np.eye(16), atol=1e-12)


def test_cache_roundtrip(tmp_path):
    geom = half_wavelength_array(16, LAM)
    cb = build_codebook(sample_grid(geom, LAM, 1.2, 1.0, 300.0), geom, LAM)
    path = tmp_path / "cb.bin"
    save_codebook_cache(cb, path, beta=1.2)
    atoms, wavelength, beta = load_codebook_cache(path)
    assert np.array_equal(atoms, cb.atoms)
    assert wavelength == LAM
    assert beta == 1.2


def test_matrix_cache_header_and_errors(tmp_path):
    rng = np.random.default_rng(0)
    m = rng.standard_normal((3, 5)) + 1j * rng.standard_normal((3, 5))
    path = tmp_path / "m.bin"
    write_matrix_cache(path, m, 0.006, 0.0)
    with open(path, "rb") as fh:
        raw = fh.read()
    assert len(raw) == 32 + 3 * 5 * 16  # header + interleaved float64 pairs
    back, lam, beta = read_matrix_cache(path)
    assert np.array_equal(back, m)
    with open(path, "wb") as fh:
        fh.write(raw[:20])
    with pytest.raises(ValueError):
        read_matrix_cache(path)
