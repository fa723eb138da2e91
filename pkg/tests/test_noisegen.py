import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import signal

from qdsim.noisegen import (NoiseError, NoiseSettings, _gaussian_kernel, axis_psd, batch, derive_n6, envelope,
                            generate_from_psd, generate_n2, generate_n3, generate_n4, psd_bins, psd_x, psd_z,
                            spectrum_from_phases, validate_profiles)
from qdsim.rng import noise_stream
from qdsim.validation import averaged_periodogram, verify_psd

T, M = 1.0, 1024


def test_psd_z_values():
    assert psd_z(20) == pytest.approx(1 / 21 + 0.8, rel=1e-15)
    assert psd_z(20) == pytest.approx(0.847619, abs=1e-6)
    assert psd_z(60) == pytest.approx(0.25 + 0.8 * np.exp(-160), rel=1e-15)
    assert psd_z(50) == pytest.approx(1 / 51 + 0.8 * np.exp(-90))
    assert isinstance(psd_z(3.0), float)


def test_psd_x_seam_branches():
    bump = 0.5 * np.exp(-2.5)
    assert psd_x(20) == pytest.approx(21**-1.5 + bump, rel=1e-14)
    assert psd_x(np.nextafter(20, 30)) == pytest.approx(5 / 48 + bump, rel=1e-12)
    assert psd_x(0) == pytest.approx(1 + 0.5 * np.exp(-22.5))


def test_psd_rejects_negative_frequency():
    with pytest.raises(NoiseError):
        psd_z(-1.0)
    with pytest.raises(NoiseError):
        psd_x(np.array([1.0, -0.1]))


def test_axis_psd_selection():
    w = np.linspace(0, 300, 31)
    np.testing.assert_array_equal(axis_psd("Z", "N1")(w), psd_z(w))
    np.testing.assert_array_equal(axis_psd("IZ", "N1")(w), psd_z(w))
    np.testing.assert_array_equal(axis_psd("X", "N1")(w), psd_x(w))
    np.testing.assert_array_equal(axis_psd("Z", "N5")(w), psd_z(w, 40.0))
    np.testing.assert_array_equal(axis_psd("X", "N5", NoiseSettings(n5_bump=60.0))(w), psd_x(w, 60.0))
    with pytest.raises(NoiseError):
        axis_psd("Y", "N1")
    with pytest.raises(NoiseError):
        axis_psd("Z", "N2")


def test_zero_psd_gives_zero_realization():
    beta = generate_from_psd(lambda w: np.zeros_like(w), T, M, np.random.default_rng(0))
    assert not beta.any()
    assert not averaged_periodogram(beta, T).any()


def test_same_stream_same_realization():
    a = generate_from_psd(psd_z, T, M, noise_stream(5, 0, 3, 0))
    b = generate_from_psd(psd_z, T, M, noise_stream(5, 0, 3, 0))
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, generate_from_psd(psd_z, T, M, noise_stream(5, 0, 4, 0)))


def test_rejects_bad_grid():
    with pytest.raises(NoiseError):
        generate_from_psd(psd_z, T, 1000, np.random.default_rng(0))
    with pytest.raises(NoiseError):
        psd_bins(lambda w: -np.ones_like(w), T, 16)


def test_spectrum_hermitian_layout():
    rng = np.random.default_rng(2)
    s = rng.random(M // 2 + 1)
    p = spectrum_from_phases(s, rng.random(M // 2 + 1), T, M)
    assert p.shape == (M,)
    np.testing.assert_array_equal(p[1:], np.conj(p[1:][::-1]))
    assert p[0].imag == 0 and p[M // 2].imag == 0


@pytest.mark.parametrize("T_", [1.0, 0.5, 3.0])
def test_periodogram_recovers_psd_per_realization(T_):
    # fixed bin magnitudes: one realisation reproduces S on every interior bin
    rng = np.random.default_rng(7)
    beta = generate_from_psd(psd_z, T_, M, rng)
    omega, s = psd_bins(psd_z, T_, M)
    est = averaged_periodogram(beta, T_)
    np.testing.assert_allclose(est[1:-1], s[1:-1], rtol=1e-10)
    assert np.all(est[[0, -1]] <= s[[0, -1]] * (1 + 1e-10))


def test_estimator_against_scipy_periodogram():
    beta = generate_from_psd(psd_x, T, M, np.random.default_rng(11))
    _, pxx = signal.periodogram(beta, fs=M / T, window="boxcar", detrend=False, scaling="density")
    ours = averaged_periodogram(beta, T)
    # one-sided density in Hz doubles interior bins of the two-sided angular-bin estimator
    np.testing.assert_allclose(pxx[1:-1] / 2, ours[1:-1], rtol=1e-9)


def test_psd_recovery_band_check():
    beta = np.stack([generate_from_psd(psd_z, T, M, noise_stream(0, 0, k, 0)) for k in range(200)])
    rep = verify_psd(beta, psd_z, T)
    assert rep.passed and rep.max_abs_error <= 0.05
    assert rep.details["bins"] == 50


def test_verify_psd_detects_wrong_spectrum():
    beta = np.stack([generate_from_psd(psd_z, T, M, noise_stream(0, 0, k, 0)) for k in range(50)])
    assert not verify_psd(beta, lambda w: 1.2 * psd_z(w), T).passed


def test_realizations_are_zero_mean_on_average():
    beta = np.stack([generate_from_psd(psd_z, T, M, noise_stream(1, 0, k, 0)) for k in range(2000)])
    # only the DC bin contributes: each realisation's mean is sqrt(S(0)/T) cos(2 pi phi)
    per = beta.mean(axis=1)
    assert np.all(np.abs(per) <= np.sqrt(psd_z(0.0) / T) + 1e-12)
    assert abs(per.mean()) <= 4 * np.sqrt(psd_z(0.0) / (2 * T)) / np.sqrt(len(beta))


def test_gaussian_kernel_unit_energy():
    k = _gaussian_kernel(T, M, 1 / 32)
    assert np.sum(k * k) == pytest.approx(1.0)
    np.testing.assert_allclose(k[1:], k[1:][::-1])


def test_n2_white_zeros_give_zeros():
    from qdsim.noisegen import colour
    assert not colour(np.zeros(M), T, M).any()


@pytest.fixture(scope="module")
def n2_batch():
    return batch(["N2"], ["Z"], 2000, T, M, 0, 0)[:, :, 0]


def test_n2_unit_variance_and_autocorrelation(n2_batch):
    np.testing.assert_allclose(n2_batch.std(axis=1), 1.0, rtol=1e-12)
    x = n2_batch - n2_batch.mean(axis=1, keepdims=True)
    lag1 = np.mean(np.sum(x * np.roll(x, -1, axis=1), axis=1) / np.sum(x * x, axis=1))
    assert lag1 > 0.5


def test_n2_mean_near_zero(n2_batch):
    # effective sample size: the kernel correlates sum(k)^2 neighbouring samples
    k = _gaussian_kernel(T, M, 1 / 32)
    K = len(n2_batch)
    assert abs(n2_batch.mean()) <= 4 * k.sum() / np.sqrt(K * M)


def test_n3_is_n2_times_envelope():
    t = (0.5 + np.arange(M)) / M
    n2 = generate_n2(T, M, np.random.default_rng(3))
    n3 = generate_n3(T, M, np.random.default_rng(3))
    np.testing.assert_allclose(n3, n2 * envelope(t, T), rtol=1e-15)
    assert envelope(0.75, 1.0) == pytest.approx(0.0, abs=1e-15)
    assert envelope(3.0, 4.0) == pytest.approx(0.0, abs=1e-15)


def test_n3_variance_follows_envelope():
    b = batch(["N3"], ["Z"], 2000, T, M, 0, 0)[:, :, 0]
    t = (0.5 + np.arange(M)) / M
    var = b.var(axis=0)
    env2 = envelope(t, T) ** 2
    v = var.reshape(-1, 32).mean(axis=1)
    e = env2.reshape(-1, 32).mean(axis=1)
    # N2 has unit variance about its own realisation mean, so compare shapes, not levels
    big = e > 0.5
    np.testing.assert_allclose(v[big] / v.mean(), e[big] / e.mean(), rtol=0.1)
    assert np.corrcoef(v, e)[0, 1] > 0.99


def test_n4_square_and_centred():
    raw = generate_n4(T, M, np.random.default_rng(4), centre=False)
    assert np.all(raw >= 0)
    c = generate_n4(T, M, np.random.default_rng(4))
    np.testing.assert_allclose(c, raw - raw.mean())
    assert abs(c.mean()) < 1e-12


def test_n4_skewness():
    raw = np.concatenate([generate_n4(T, M, noise_stream(0, 0, k, 0), centre=False) for k in range(2000)])
    z = raw - raw.mean()
    assert np.mean(z**3) / np.mean(z**2) ** 1.5 > 0.5


def test_n6_definition():
    np.testing.assert_array_equal(derive_n6(np.array([1.0, -2.0])), [1.0, 4.0])
    assert not derive_n6(np.zeros(4)).any()


def test_validate_profiles():
    validate_profiles(["N1", "N6"])
    for bad in (["N7"], ["N6"], ["N0", "N6"], ["N6", "N6"]):
        with pytest.raises(NoiseError):
            validate_profiles(bad)


def test_batch_n0_and_shape():
    b = batch(["N0", "N0"], ["X", "Z"], 3, T, 64, 0, 0)
    assert b.shape == (3, 64, 2) and not b.any()


def test_batch_n6_pairs_with_source():
    b = batch(["N1", "N6"], ["IZ", "ZI"], 40, T, 128, 9, 2)
    np.testing.assert_array_equal(b[:, :, 1], b[:, :, 0] ** 2)


def test_batch_seed_lineage():
    b = batch(["N1", "N5"], ["X", "Z"], 5, T, 128, 3, 7)
    for k in range(5):
        np.testing.assert_array_equal(b[k, :, 0], generate_from_psd(lambda w: psd_x(w), T, 128, noise_stream(3, 7, k, 0)))
        np.testing.assert_array_equal(b[k, :, 1],
                                      generate_from_psd(lambda w: psd_z(w, 40.0), T, 128, noise_stream(3, 7, k, 1)))


@pytest.mark.parametrize("profiles", [("N1",), ("N2",), ("N3",), ("N4",)])
def test_batch_independent_of_threads(profiles):
    serial = batch(profiles, ["Z"], 37, T, 256, 1, 0, threads=1)
    for threads in (2, 3, 8):
        np.testing.assert_array_equal(batch(profiles, ["Z"], 37, T, 256, 1, 0, threads=threads), serial)


def test_batch_argument_errors():
    with pytest.raises(NoiseError):
        batch(["N1"], ["Z"], 0, T, 64, 0, 0)
    with pytest.raises(NoiseError):
        batch(["N1"], ["Z", "X"], 2, T, 64, 0, 0)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([16, 64, 256]), st.floats(0.1, 10.0))
def test_psd_realization_real_and_exact_power(seed, m, t_total):
    beta = generate_from_psd(psd_z, t_total, m, np.random.default_rng(seed))
    assert beta.dtype == float and beta.shape == (m,)
    _, s = psd_bins(psd_z, t_total, m)
    np.testing.assert_allclose(averaged_periodogram(beta, t_total)[1:-1], s[1:-1], rtol=1e-9)
