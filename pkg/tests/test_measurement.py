import numpy as np
import pytest

from nfmimo.channel import LosParams, los_channel
from nfmimo.geometry import half_wavelength_array
from nfmimo.measurement import (
    MeasurementSet,
    calibrate_sigma2,
    gen_combiner,
    gen_pilot,
    kron_sensing,
    observe,
    vec,
)

LAM = 0.006


def test_pilot_alphabet():
    rng = np.random.default_rng(0)
    p = gen_pilot(2, 1, rng)
    assert set(np.unique(p)) <= {-1.0, 1.0}
    p = gen_pilot(16, 9, rng)
    assert np.allclose(np.abs(p), 1 / 3.0)
    assert np.allclose(np.sum(p**2, axis=1), 1.0)  # row energy M * (1/M)


def test_combiner_alphabet():
    rng = np.random.default_rng(1)
    w = gen_combiner(1, 4, rng)
    assert np.allclose(np.abs(w), 0.5)
    w = gen_combiner(3, 16, rng)
    assert np.allclose(np.sum(w**2, axis=1), 1.0)
    assert np.allclose(np.diag(w @ w.T), 1.0)


def test_pilot_concentration():
    # E[P P^H] ~ I for M = N1 = 64: off-diagonal sample means shrink as 1/sqrt(trials M)
    rng = np.random.default_rng(7)
    trials = 200
    acc = np.zeros((64, 64))
    for _ in range(trials):
        p = gen_pilot(64, 64, rng)
        acc += p @ p.T
    acc /= trials
    off = acc - np.diag(np.diag(acc))
    assert np.max(np.abs(off)) < 3 / np.sqrt(trials * 64) * 4  # generous union-bound slack
    assert np.allclose(np.diag(acc), 1.0)


def test_generation_determinism():
    a = gen_pilot(8, 5, np.random.default_rng(42))
    b = gen_pilot(8, 5, np.random.default_rng(42))
    assert np.array_equal(a, b)


def test_observe_noiseless_exact():
    geom_t = half_wavelength_array(8, LAM)
    geom_r = half_wavelength_array(4, LAM)
    h = los_channel(LosParams(60.0, 0.2, 0.0), geom_t, geom_r, LAM)
    rng = np.random.default_rng(3)
    p = gen_pilot(8, 6, rng)
    w = gen_combiner(2, 4, rng)
    ms = observe(h, p, w, 0.0, rng)
    assert np.array_equal(ms.y, w @ h.entries @ p)


def test_observe_noise_statistics():
    rng = np.random.default_rng(5)
    p = gen_pilot(8, 100, rng)
    w = gen_combiner(100, 4, rng)
    h = np.zeros((4, 8), dtype=complex)
    sigma2 = 0.37
    ms = observe(h, p, w, sigma2, rng)
    assert ms.y.shape == (100, 100)
    sample_var = np.mean(np.abs(ms.y) ** 2)
    assert sample_var == pytest.approx(sigma2, rel=0.05)


def test_observe_determinism():
    geom = half_wavelength_array(4, LAM)
    h = los_channel(LosParams(30.0, 0.1, 0.0), geom, geom, LAM)
    p = gen_pilot(4, 3, np.random.default_rng(1))
    w = gen_combiner(2, 4, np.random.default_rng(2))
    y1 = observe(h, p, w, 0.1, np.random.default_rng(99)).y
    y2 = observe(h, p, w, 0.1, np.random.default_rng(99)).y
    assert np.array_equal(y1, y2)


def test_observe_linearity():
    geom = half_wavelength_array(4, LAM)
    rng = np.random.default_rng(8)
    h1 = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    h2 = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    p = gen_pilot(4, 3, rng)
    w = gen_combiner(2, 4, rng)
    alpha = 2.0
    lhs = observe(alpha * h1 + h2, p, w, 0.0, rng).y
    rhs = alpha * (w @ h1 @ p) + w @ h2 @ p
    assert np.allclose(lhs, rhs)


def test_observe_shape_mismatch():
    rng = np.random.default_rng(0)
    p = gen_pilot(8, 4, rng)
    w = gen_combiner(2, 4, rng)
    with pytest.raises(ValueError):
        observe(np.zeros((4, 4), dtype=complex), p, w, 0.0, rng)


def test_measurement_set_validation():
    with pytest.raises(ValueError):
        MeasurementSet(
            y=np.zeros((2, 3), dtype=complex),
            pilot=np.zeros((4, 5)),
            combiner=np.zeros((2, 4)),
            sigma2=0.1,
        )


def test_calibrate_sigma2_definition():
    geom_t = half_wavelength_array(8, LAM)
    geom_r = half_wavelength_array(4, LAM)
    h = los_channel(LosParams(60.0, 0.2, 0.0), geom_t, geom_r, LAM)
    rng = np.random.default_rng(4)
    p = gen_pilot(8, 6, rng)
    w = gen_combiner(2, 4, rng)
    energy = np.linalg.norm(w @ h.entries @ p) ** 2
    s0 = calibrate_sigma2(h, p, w, 0.0)
    assert s0 == pytest.approx(energy / 12)
    s10 = calibrate_sigma2(h, p, w, 10.0)
    assert s10 == pytest.approx(s0 / 10.0)
    with pytest.raises(ValueError):
        calibrate_sigma2(np.zeros((4, 8)), p, w, 0.0)


def test_calibrated_snr_empirical():
    geom_t = half_wavelength_array(16, LAM)
    geom_r = half_wavelength_array(8, LAM)
    h = los_channel(LosParams(45.0, -0.3, 0.2), geom_t, geom_r, LAM)
    rng = np.random.default_rng(17)
    target = 7.0
    ratios = []
    for _ in range(100):
        p = gen_pilot(16, 12, rng)
        w = gen_combiner(4, 8, rng)
        s2 = calibrate_sigma2(h, p, w, target)
        signal = w @ h.entries @ p
        noise = observe(h, p, w, s2, rng).y - signal
        ratios.append(np.linalg.norm(signal) ** 2 / np.linalg.norm(noise) ** 2)
    snr_db = 10 * np.log10(np.mean(ratios))
    assert abs(snr_db - target) < 0.2


def test_kron_sensing_identity_cases():
    assert np.allclose(kron_sensing(np.eye(3), np.eye(2)), np.eye(6))
    q = kron_sensing(np.array([[2.0]]), np.array([[3.0]]))
    assert q.shape == (1, 1) and q[0, 0] == 6.0


def test_kron_sensing_vec_identity():
    rng = np.random.default_rng(21)
    h = rng.standard_normal((2, 3)) + 1j * rng.standard_normal((2, 3))
    p = gen_pilot(3, 2, rng)
    w = gen_combiner(2, 2, rng)
    q = kron_sensing(p, w)
    assert q.shape == (2 * 2, 3 * 2)
    assert np.allclose(q @ vec(h), vec(w @ h @ p), atol=1e-10)


def test_kron_sensing_vec_identity_random_shapes():
    rng = np.random.default_rng(31)
    for _ in range(20):
        n1, n2, m, n_rf = rng.integers(1, 7, size=4)
        h = rng.standard_normal((n2, n1)) + 1j * rng.standard_normal((n2, n1))
        p = gen_pilot(int(n1), int(m), rng)
        w = gen_combiner(int(n_rf), int(n2), rng)
        assert np.allclose(kron_sensing(p, w) @ vec(h), vec(w @ h @ p), atol=1e-10)
