"""Dense complex matrix kernel for one- and two-qubit operators.

Matrices are plain ``numpy`` ``complex128`` arrays of shape ``(d, d)`` with
``d`` in {2, 4}, or stacks of them with shape ``(..., d, d)``.  Every routine
here accepts stacks so the simulation layers can stay vectorised over time
slices and noise realisations.
"""

from __future__ import annotations

import numpy as np

HERMITIAN_TOL = 1e-10
UNITARY_TOL = 1e-10
IMAG_TOL = 1e-10

SIGMA_0 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)

_SINGLE = {"I": SIGMA_0, "0": SIGMA_0, "X": SIGMA_X, "Y": SIGMA_Y, "Z": SIGMA_Z}

for _m in _SINGLE.values():
    _m.setflags(write=False)


class LinalgError(ValueError):
    """Raised when an operator violates a kernel precondition."""


def pauli(label: str) -> np.ndarray:
    """Return the Pauli matrix for a label such as ``"Z"`` or ``"ZX"``.

    Characters are read left to right, one per qubit, so ``"ZX"`` is
    ``sigma_z (x) sigma_x`` with the first qubit as the left Kronecker factor.
    ``"I"`` (or ``"0"``) denotes the identity.
    """
    label = label.upper()
    if len(label) not in (1, 2) or any(c not in _SINGLE for c in label):
        raise LinalgError(f"invalid Pauli label {label!r}")
    out = _SINGLE[label[0]]
    for c in label[1:]:
        out = tensor(out, _SINGLE[c])
    return out.copy()


def tensor(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product of two single-qubit operators (block layout a_ij * b)."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape[-2:] != (2, 2) or b.shape[-2:] != (2, 2):
        raise LinalgError(f"tensor expects 2x2 factors, got {a.shape} and {b.shape}")
    out = a[..., :, None, :, None] * b[..., None, :, None, :]
    return out.reshape(*np.broadcast_shapes(a.shape[:-2], b.shape[:-2]), 4, 4)


def dagger(a: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(a, -1, -2))


def hermiticity_error(a: np.ndarray) -> np.ndarray:
    """Frobenius norm ||A - A^dagger|| per matrix in the stack."""
    return np.linalg.norm(a - dagger(a), axis=(-2, -1))


def unitarity_error(u: np.ndarray) -> np.ndarray:
    """Frobenius norm ||U^dagger U - I|| per matrix in the stack."""
    d = u.shape[-1]
    return np.linalg.norm(dagger(u) @ u - np.eye(d), axis=(-2, -1))


def check_hermitian(a: np.ndarray, tol: float = HERMITIAN_TOL, what: str = "operator") -> None:
    err = hermiticity_error(a)
    if err.size and float(np.max(err)) > tol:
        raise LinalgError(f"{what} is not Hermitian (max ||A - A^+||_F = {np.max(err):.3e})")


def check_unitary(u: np.ndarray, tol: float = UNITARY_TOL, what: str = "operator") -> None:
    err = unitarity_error(u)
    if err.size and float(np.max(err)) > tol:
        raise LinalgError(f"{what} is not unitary (max ||U^+U - I||_F = {np.max(err):.3e})")


def _expm_qubit(h: np.ndarray, dt: float) -> np.ndarray:
    # h = h0 I + n.sigma  =>  exp(-i h dt) = e^{-i h0 dt} (cos|n|dt I - i sin|n|dt n^.sigma)
    h0 = 0.5 * (h[..., 0, 0] + h[..., 1, 1]).real
    nz = 0.5 * (h[..., 0, 0] - h[..., 1, 1]).real
    nx = 0.5 * (h[..., 0, 1] + h[..., 1, 0]).real
    ny = 0.5 * (h[..., 1, 0] - h[..., 0, 1]).imag
    r = np.sqrt(nx * nx + ny * ny + nz * nz)
    theta = r * dt
    c = np.cos(theta)
    # sin(theta)/r, with the r -> 0 limit dt
    with np.errstate(invalid="ignore", divide="ignore"):
        s = np.where(r > 0, np.sin(theta) / np.where(r > 0, r, 1.0), dt)
    phase = np.exp(-1j * h0 * dt)
    out = np.empty(h.shape, dtype=complex)
    out[..., 0, 0] = c - 1j * s * nz
    out[..., 1, 1] = c + 1j * s * nz
    out[..., 0, 1] = -1j * s * (nx - 1j * ny)
    out[..., 1, 0] = -1j * s * (nx + 1j * ny)
    return out * phase[..., None, None]


def _expm_eigh(h: np.ndarray, dt: float) -> np.ndarray:
    w, v = np.linalg.eigh(h)
    return (v * np.exp(-1j * w * dt)[..., None, :]) @ dagger(v)


def expm_unitary(h: np.ndarray, dt: float, check: bool = True) -> np.ndarray:
    """Return ``exp(-i h dt)`` for a Hermitian ``h`` (or a stack of them).

    Qubit generators use the closed-form Pauli rotation; 4x4 generators are
    exponentiated through their Hermitian eigendecomposition, so the result is
    unitary up to rounding in both cases.
    """
    h = np.asarray(h, dtype=complex)
    d = h.shape[-1]
    if h.ndim < 2 or h.shape[-2] != d or d not in (2, 4):
        raise LinalgError(f"expected (..., d, d) with d in (2, 4), got {h.shape}")
    if check:
        check_hermitian(h, what="generator")
    if d == 2:
        return _expm_qubit(h, dt)
    return _expm_eigh(h, dt)


def expectation(rho: np.ndarray, o: np.ndarray, tol: float = IMAG_TOL) -> np.ndarray:
    """Real part of ``Tr(rho O)``; raises if the imaginary part leaks above ``tol``."""
    val = np.einsum("...ij,...ji->...", rho, o)
    leak = np.max(np.abs(val.imag)) if np.size(val) else 0.0
    if leak > tol:
        raise LinalgError(f"imaginary part {leak:.3e} in expectation value exceeds {tol:.0e}")
    return val.real
