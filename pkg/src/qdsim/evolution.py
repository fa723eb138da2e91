"""Time-ordered propagation through piecewise-constant Hamiltonian slices."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .qlinalg import check_hermitian, check_unitary, dagger, expm_unitary


@dataclass
class PropagatorTrace:
    final: np.ndarray
    intermediates: np.ndarray | None
    dt: float


def evolve(slices: np.ndarray, dt: float, keep_intermediates: bool = False) -> PropagatorTrace:
    """Ordered product ``U = U_{M-1} ... U_1 U_0`` with ``U_j = exp(-i H_j dt)``.

    ``slices`` has shape ``(..., M, d, d)``; leading axes are independent
    evolutions (for instance noise realisations) propagated together.
    ``intermediates[..., j]`` holds the propagator up to and including slice j.
    """
    slices = np.asarray(slices, dtype=complex)
    if slices.ndim < 3 or slices.shape[-3] < 1:
        raise ValueError("evolve needs at least one slice of shape (d, d)")
    check_hermitian(slices, what="Hamiltonian slice")
    steps = expm_unitary(slices, dt, check=False)
    m, d = slices.shape[-3], slices.shape[-1]
    u = np.broadcast_to(np.eye(d, dtype=complex), steps.shape[:-3] + (d, d)).copy()
    inter = np.empty_like(steps) if keep_intermediates else None
    for j in range(m):
        u = steps[..., j, :, :] @ u
        if inter is not None:
            inter[..., j, :, :] = u
    return PropagatorTrace(u, inter, dt)


def interaction_unitary(u: np.ndarray, u0: np.ndarray, check: bool = True) -> np.ndarray:
    """Modified interaction unitary ``U U0^dagger``, so that ``U = U_I U0``."""
    if check:
        check_unitary(u, what="full propagator")
        check_unitary(u0, what="noiseless propagator")
    return u @ dagger(u0)
