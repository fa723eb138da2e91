import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.linalg import expm

from qdsim.evolution import evolve, interaction_unitary
from qdsim.qlinalg import LinalgError, expm_unitary, unitarity_error

from conftest import random_hermitian, random_unitary


def substep_oracle(slices, dt, sub=16):
    u = np.eye(slices.shape[-1], dtype=complex)
    for h in slices:
        step = expm(-1j * h * dt / sub)
        for _ in range(sub):
            u = step @ u
    return u


def test_zero_slices_give_identity():
    assert np.array_equal(evolve(np.zeros((10, 2, 2)), 0.1).final, np.eye(2))


@pytest.mark.parametrize("d", [2, 4])
def test_constant_slice_equals_single_exponential(rng, d):
    h = random_hermitian(rng, d, 5.0)
    M, T = 256, 1.0
    u = evolve(np.broadcast_to(h, (M, d, d)), T / M).final
    np.testing.assert_allclose(u, expm_unitary(h, T), atol=1e-12)


@pytest.mark.parametrize("d", [2, 4])
def test_time_varying_against_substep_oracle(rng, d):
    M = 40
    slices = np.stack([random_hermitian(rng, d, 20.0) for _ in range(M)])
    np.testing.assert_allclose(evolve(slices, 1 / M).final, substep_oracle(slices, 1 / M), atol=1e-11)


def test_ordering_is_left_multiplication(rng):
    a, b = random_hermitian(rng, 2), random_hermitian(rng, 2)
    u = evolve(np.stack([a, b]), 0.3).final
    np.testing.assert_allclose(u, expm(-0.3j * b) @ expm(-0.3j * a), atol=1e-13)
    assert not np.allclose(u, expm(-0.3j * a) @ expm(-0.3j * b))


def test_intermediates(rng):
    slices = np.stack([random_hermitian(rng, 4) for _ in range(6)])
    tr = evolve(slices, 0.05, keep_intermediates=True)
    assert tr.intermediates.shape == (6, 4, 4)
    np.testing.assert_array_equal(tr.intermediates[-1], tr.final)
    for j in range(1, 6):
        np.testing.assert_allclose(tr.intermediates[j], expm_unitary(slices[j], 0.05) @ tr.intermediates[j - 1],
                                   atol=1e-14)


def test_batched_leading_axes(rng):
    slices = np.stack([[random_hermitian(rng, 2) for _ in range(5)] for _ in range(3)])
    out = evolve(slices, 0.1).final
    for k in range(3):
        np.testing.assert_allclose(out[k], evolve(slices[k], 0.1).final, atol=0)


def test_determinant_phase(rng):
    slices = np.stack([random_hermitian(rng, 4, 3.0) for _ in range(30)])
    dt = 0.02
    u = evolve(slices, dt).final
    want = np.exp(-1j * dt * np.trace(slices, axis1=-2, axis2=-1).real.sum())
    assert np.linalg.det(u) == pytest.approx(want, abs=1e-11)


def test_rejects_non_hermitian_and_empty():
    bad = np.zeros((3, 2, 2), dtype=complex)
    bad[1, 0, 1] = 1.0
    with pytest.raises(LinalgError):
        evolve(bad, 0.1)
    with pytest.raises(ValueError):
        evolve(np.zeros((0, 2, 2)), 0.1)


def test_interaction_unitary_round_trip(rng):
    u, u0 = random_unitary(rng, 4), random_unitary(rng, 4)
    ui = interaction_unitary(u, u0)
    np.testing.assert_allclose(ui @ u0, u, atol=1e-12)
    np.testing.assert_allclose(interaction_unitary(u0, u0), np.eye(4), atol=1e-12)
    assert unitarity_error(ui) < 1e-12
    with pytest.raises(LinalgError):
        interaction_unitary(2 * u, u0)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([2, 4]), st.integers(1, 64), st.floats(1e-4, 0.1))
def test_every_propagator_unitary(seed, d, m, dt):
    rng = np.random.default_rng(seed)
    slices = np.stack([random_hermitian(rng, d, 100.0) for _ in range(m)])
    tr = evolve(slices, dt, keep_intermediates=True)
    assert np.max(unitarity_error(tr.intermediates)) <= 1e-10
