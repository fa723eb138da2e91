import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from qdsim.qlinalg import (LinalgError, SIGMA_X, SIGMA_Z, check_hermitian, dagger, expectation,
                           expm_unitary, pauli, tensor, unitarity_error)

from conftest import random_hermitian


def taylor_expm(a, terms=20):
    out = np.eye(a.shape[0], dtype=complex)
    term = np.eye(a.shape[0], dtype=complex)
    for k in range(1, terms):
        term = term @ a / k
        out = out + term
    return out


def kron_by_index(a, b):
    out = np.zeros((4, 4), dtype=complex)
    for i in range(2):
        for j in range(2):
            for k in range(2):
                for m in range(2):
                    out[2 * i + k, 2 * j + m] = a[i, j] * b[k, m]
    return out


def test_pauli_z_and_identity():
    assert np.array_equal(pauli("Z"), [[1, 0], [0, -1]])
    assert np.array_equal(pauli("I"), np.eye(2))
    assert np.array_equal(pauli("0"), np.eye(2))


def test_pauli_zx_matrix():
    want = np.array([[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, -1, 0]])
    assert np.array_equal(pauli("ZX"), want)
    assert np.array_equal(tensor(SIGMA_Z, SIGMA_X), want)


def test_pauli_rejects_bad_labels():
    for bad in ("Q", "", "XYZ", "X1"):
        with pytest.raises(LinalgError):
            pauli(bad)


def test_pauli_returns_writable_copy():
    p = pauli("X")
    p[0, 0] = 5
    assert pauli("X")[0, 0] == 0


def test_tensor_identity():
    assert np.array_equal(tensor(np.eye(2), np.eye(2)), np.eye(4))


@pytest.mark.parametrize("a", "IXYZ")
@pytest.mark.parametrize("b", "IXYZ")
def test_tensor_matches_index_formula(a, b):
    assert np.array_equal(tensor(pauli(a), pauli(b)), kron_by_index(pauli(a), pauli(b)))
    assert np.array_equal(tensor(pauli(a), pauli(b)), np.kron(pauli(a), pauli(b)))


def test_tensor_random_against_index_formula(rng):
    a = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    b = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    np.testing.assert_allclose(tensor(a, b), kron_by_index(a, b), atol=0)


def test_tensor_batched_and_rejects_non_qubit():
    stack = np.stack([pauli("X"), pauli("Z")])
    out = tensor(stack, pauli("Y"))
    assert out.shape == (2, 4, 4)
    np.testing.assert_array_equal(out[1], np.kron(pauli("Z"), pauli("Y")))
    with pytest.raises(LinalgError):
        tensor(np.eye(4), np.eye(2))


def test_expm_zero_and_pi_half():
    np.testing.assert_array_equal(expm_unitary(np.zeros((2, 2)), 0.3), np.eye(2))
    dt = 0.01
    np.testing.assert_allclose(expm_unitary(np.pi / (2 * dt) * SIGMA_X, dt), -1j * SIGMA_X, atol=1e-14)


@pytest.mark.parametrize("d", [2, 4])
def test_expm_matches_taylor(rng, d):
    for _ in range(20):
        h = random_hermitian(rng, d, scale=3.0)
        np.testing.assert_allclose(expm_unitary(h, 0.01), taylor_expm(-1j * h * 0.01), atol=1e-12)


def test_expm_qubit_with_trace_part(rng):
    # the closed form must carry the global phase of the identity component
    h = random_hermitian(rng, 2) + 7.0 * np.eye(2)
    np.testing.assert_allclose(expm_unitary(h, 0.05), taylor_expm(-1j * h * 0.05, 30), atol=1e-12)


def test_expm_batched(rng):
    hs = np.stack([random_hermitian(rng, 4) for _ in range(5)])
    us = expm_unitary(hs, 0.2)
    for h, u in zip(hs, us):
        np.testing.assert_allclose(u, expm_unitary(h, 0.2), atol=1e-15)


def test_expm_rejects_non_hermitian_and_bad_shape():
    with pytest.raises(LinalgError):
        expm_unitary(np.array([[0, 1], [0, 0]], dtype=complex), 0.1)
    with pytest.raises(LinalgError):
        expm_unitary(np.eye(3), 0.1)


def test_check_hermitian_tolerance():
    h = pauli("X").astype(complex)
    h[0, 1] += 1e-12
    check_hermitian(h)
    h[0, 1] += 1e-8
    with pytest.raises(LinalgError):
        check_hermitian(h)


def test_expectation_examples():
    one = np.array([[0, 0], [0, 1]], dtype=complex)
    assert expectation(one, pauli("Z")) == -1
    assert expectation(np.eye(2) / 2, pauli("X")) == 0
    assert expectation(0.5 * (np.eye(2) + pauli("X")), pauli("X")) == pytest.approx(1.0, abs=1e-15)


def test_expectation_rejects_imaginary_leak():
    with pytest.raises(LinalgError):
        expectation(np.array([[1, 0], [0, 0]], dtype=complex), np.array([[1j, 0], [0, 0]]))


finite = st.floats(-20, 20, allow_nan=False, allow_infinity=False)


def hermitian_from(raw, d):
    a = raw[: d * d].reshape(d, d) + 1j * raw[d * d:2 * d * d].reshape(d, d)
    return 0.5 * (a + dagger(a))


@settings(max_examples=60, deadline=None)
@given(arrays(float, 32, elements=finite), st.floats(0.0, 0.5), st.floats(0.0, 0.5), st.sampled_from([2, 4]))
def test_expm_group_property_and_unitarity(raw, a, b, d):
    h = hermitian_from(raw, d)
    ua, ub, uab = expm_unitary(h, a), expm_unitary(h, b), expm_unitary(h, a + b)
    assert unitarity_error(uab) <= 1e-10
    np.testing.assert_allclose(ua @ ub, uab, atol=1e-11)


@settings(max_examples=60, deadline=None)
@given(arrays(float, 32, elements=finite), st.floats(1e-4, 0.1))
def test_expm_inverse_is_negative_time(raw, dt):
    h = hermitian_from(raw, 4)
    np.testing.assert_allclose(expm_unitary(h, dt) @ expm_unitary(h, -dt), np.eye(4), atol=1e-11)
