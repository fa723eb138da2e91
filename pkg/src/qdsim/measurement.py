"""Pauli-eigenstate preparations, Pauli observables and Monte Carlo statistics.

Expectation tensors are flattened state-major, observable-minor: for one
qubit the 18 entries run (x+: sx, sy, sz), (x-: sx, sy, sz), ..., (z-: ...).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .qlinalg import IMAG_TOL, LinalgError, dagger, expectation, pauli, tensor

STATE_LABELS_1Q = ("x+", "x-", "y+", "y-", "z+", "z-")
EXPECTATION_TOL = 1e-9


def _eigenprojectors() -> list[np.ndarray]:
    eye = np.eye(2, dtype=complex)
    out = []
    for axis in "XYZ":
        s = pauli(axis)
        out += [0.5 * (eye + s), 0.5 * (eye - s)]
    return out


def state_labels(nqubits: int) -> list[str]:
    if nqubits == 1:
        return list(STATE_LABELS_1Q)
    return [f"{a},{b}" for a in STATE_LABELS_1Q for b in STATE_LABELS_1Q]


def initial_states(nqubits: int) -> np.ndarray:
    """``(6, 2, 2)`` or ``(36, 4, 4)`` density matrices; two-qubit order is first-qubit major."""
    one = _eigenprojectors()
    if nqubits == 1:
        return np.stack(one)
    if nqubits == 2:
        return np.stack([tensor(a, b) for a in one for b in one])
    raise ValueError("only one- and two-qubit systems are supported")


def observable_labels(nqubits: int) -> list[str]:
    if nqubits == 1:
        return ["X", "Y", "Z"]
    if nqubits == 2:
        return [a + b for a in "IXYZ" for b in "IXYZ"][1:]
    raise ValueError("only one- and two-qubit systems are supported")


def observables(nqubits: int) -> np.ndarray:
    return np.stack([pauli(lbl) for lbl in observable_labels(nqubits)])


@dataclass
class ExpectationTensor:
    per_realization: np.ndarray  # (K, n_states * n_obs)
    averaged: np.ndarray         # (n_states * n_obs,)
    max_imag: float = 0.0


def expectations(states: np.ndarray, obs: np.ndarray, propagators: np.ndarray) -> tuple[np.ndarray, float]:
    """``Tr(U rho U^+ O)`` for every propagator, state and observable, shape ``(K, S, O)``."""
    u = np.asarray(propagators, dtype=complex)
    evolved = u[:, None] @ states[None] @ dagger(u)[:, None]
    vals = np.einsum("ksij,oji->kso", evolved, obs)
    leak = float(np.max(np.abs(vals.imag), initial=0.0))
    if leak > EXPECTATION_TOL:
        raise LinalgError(f"expectation values carry imaginary part {leak:.3e}")
    return vals.real, leak


def monte_carlo(states: np.ndarray, obs: np.ndarray, propagators: np.ndarray) -> ExpectationTensor:
    """Per-realisation expectations and their arithmetic mean over realisations."""
    if len(propagators) < 1:
        raise ValueError("at least one propagator (K >= 1) is required")
    vals, leak = expectations(states, obs, propagators)
    flat = vals.reshape(vals.shape[0], -1)
    return ExpectationTensor(flat, flat.mean(axis=0), leak)


def _inverse(o: np.ndarray) -> np.ndarray:
    d = o.shape[-1]
    if np.allclose(o @ o, np.eye(d), atol=IMAG_TOL):
        return o
    if np.linalg.cond(o) > 1e12:
        raise LinalgError("observable is not invertible")
    return np.linalg.inv(o)


def w_operator(u: np.ndarray, u0: np.ndarray, o: np.ndarray) -> np.ndarray:
    """``O^-1 U_I^+ O U_I`` with ``U_I = U U0^+``; broadcasts over leading axes of ``u``."""
    o = np.asarray(o, dtype=complex)
    ui = u @ dagger(u0)
    return _inverse(o) @ dagger(ui) @ o @ ui


def w_operators(u: np.ndarray, u0: np.ndarray, obs: np.ndarray) -> np.ndarray:
    """``(K, n_obs, d, d)`` W operators for K propagators against one noiseless propagator."""
    ui = np.asarray(u)[:, None] @ dagger(u0)
    inv = np.stack([_inverse(o) for o in obs])
    return inv[None] @ dagger(ui) @ obs[None] @ ui


def v_operator(ws: np.ndarray) -> np.ndarray:
    """Noise average of W operators (mean over the first axis)."""
    ws = np.asarray(ws)
    if len(ws) < 1:
        raise ValueError("no W operators to average")
    return ws.mean(axis=0)


def reconstruct(w: np.ndarray, u0: np.ndarray, rho: np.ndarray, o: np.ndarray) -> float:
    """``Tr(W U0 rho U0^+ O)``, which equals ``Tr(U rho U^+ O)`` for the matching W."""
    return float(expectation(w @ u0 @ rho @ dagger(u0), o))
