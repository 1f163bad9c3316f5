import numpy as np
import pytest
import scipy.linalg

from nfmimo.metrics import MetricRecord, NmseAccumulator, crlb, ls_oracle, nmse, nmse_bound, to_db


def test_nmse_trivials():
    rng = np.random.default_rng(0)
    h = rng.standard_normal((4, 6)) + 1j * rng.standard_normal((4, 6))
    assert nmse(h, h) == 0.0
    assert nmse(h, np.zeros_like(h)) == pytest.approx(1.0)
    assert nmse(h, 2 * h) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        nmse(np.zeros((2, 2)), np.zeros((2, 2)))
    with pytest.raises(ValueError):
        nmse(h, h[:2])


def test_nmse_unitary_invariance():
    rng = np.random.default_rng(3)
    h = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    g = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    u, _ = np.linalg.qr(rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4)))
    v, _ = np.linalg.qr(rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4)))
    assert nmse(u @ h @ v, u @ g @ v) == pytest.approx(nmse(h, g), rel=1e-10)


def test_nmse_accumulator_expectation_semantics():
    rng = np.random.default_rng(5)
    acc = NmseAccumulator()
    errs = refs = 0.0
    for _ in range(5):
        h = rng.standard_normal((3, 3)) + 0j
        g = h + 0.1 * rng.standard_normal((3, 3))
        acc.add(h, g)
        errs += np.linalg.norm(h - g) ** 2
        refs += np.linalg.norm(h) ** 2
    assert acc.value() == pytest.approx(errs / refs)
    assert acc.count == 5


def test_crlb_formula_and_scalings():
    assert crlb(0.1, 4, 2, 8, 2) == pytest.approx(0.1)
    assert crlb(0.0, 4, 2, 8, 2) == 0.0
    base = crlb(0.2, 8, 4, 16, 4)
    assert crlb(0.2, 8, 4, 32, 4) == pytest.approx(base / 2)
    assert crlb(0.2, 16, 4, 16, 4) == pytest.approx(base * 2)
    assert crlb(0.2, 8, 8, 16, 4) == pytest.approx(base * 2)
    assert crlb(0.2, 8, 4, 16, 8) == pytest.approx(base / 2)
    with pytest.raises(ValueError):
        crlb(0.1, 0, 2, 8, 2)
    with pytest.raises(ValueError):
        crlb(-0.1, 4, 2, 8, 2)


def test_nmse_bound():
    assert nmse_bound(0.1, 1.0) == pytest.approx(0.1)
    assert nmse_bound(0.0, 2.0) == 0.0
    assert nmse_bound(0.1, 2.0) == pytest.approx(0.05)
    with pytest.raises(ValueError):
        nmse_bound(0.1, 0.0)


def test_to_db():
    assert to_db(1.0) == 0.0
    assert to_db(0.1) == pytest.approx(-10.0)


def test_metric_record_validation():
    with pytest.raises(ValueError):
        MetricRecord(nmse_db=0.0, crlb=0.1, nmse_bound_db=0.0, trial_count=0, config_digest="x")
    with pytest.raises(ValueError):
        MetricRecord(nmse_db=np.nan, crlb=0.1, nmse_bound_db=0.0, trial_count=3, config_digest="x")


def test_ls_oracle_noiseless_exact():
    rng = np.random.default_rng(7)
    h = rng.standard_normal((4, 8)) + 1j * rng.standard_normal((4, 8))
    p = scipy.linalg.hadamard(8).astype(float)
    w = scipy.linalg.hadamard(4).astype(float)
    y = w @ h @ p
    h_hat = ls_oracle(y, p, w)
    assert np.linalg.norm(h - h_hat) < 1e-10


def test_ls_oracle_underdetermined():
    rng = np.random.default_rng(9)
    with pytest.raises(ValueError):
        ls_oracle(np.zeros((4, 4), dtype=complex), rng.standard_normal((8, 4)), np.eye(4))
    # rank-deficient square pilot
    p = np.ones((4, 4))
    with pytest.raises(ValueError):
        ls_oracle(np.zeros((4, 4), dtype=complex), p, np.eye(4))


def test_ls_oracle_orthogonal_case_meets_crlb():
    # +-1 Hadamard pilots/combiners: P P^H = M I, W^H W = Nrf I -> LS attains the bound.
    # crlb takes the per-component noise variance; noise parts are drawn with variance s2.
    rng = np.random.default_rng(11)
    n1 = m = 8
    n2 = n_rf = 4
    p = scipy.linalg.hadamard(m).astype(float)
    w = scipy.linalg.hadamard(n_rf).astype(float)
    h = rng.standard_normal((n2, n1)) + 1j * rng.standard_normal((n2, n1))
    signal = w @ h @ p
    s2 = 0.01
    bound = crlb(s2, n1, n2, m, n_rf)
    total = 0.0
    draws = 600
    for _ in range(draws):
        noise = np.sqrt(s2) * (rng.standard_normal(signal.shape) + 1j * rng.standard_normal(signal.shape))
        h_hat = ls_oracle(signal + noise, p, w)
        total += np.linalg.norm(h_hat - h) ** 2
    assert total / draws == pytest.approx(bound, rel=0.08)


def test_ls_oracle_random_pilots_above_crlb():
    rng = np.random.default_rng(13)
    n1 = m = 8
    n2 = n_rf = 4

    def full_rank_signs(rows, cols):
        while True:
            mat = (rng.integers(0, 2, size=(rows, cols)) * 2 - 1).astype(float)
            if np.linalg.matrix_rank(mat) == min(rows, cols):
                return mat

    p = full_rank_signs(n1, m)
    w = full_rank_signs(n_rf, n2)
    h = rng.standard_normal((n2, n1)) + 1j * rng.standard_normal((n2, n1))
    signal = w @ h @ p
    s2 = 0.01
    bound = crlb(s2, n1, n2, m, n_rf)
    total = 0.0
    draws = 400
    for _ in range(draws):
        noise = np.sqrt(s2) * (rng.standard_normal(signal.shape) + 1j * rng.standard_normal(signal.shape))
        h_hat = ls_oracle(signal + noise, p, w)
        total += np.linalg.norm(h_hat - h) ** 2
    assert total / draws > bound * 1.05
