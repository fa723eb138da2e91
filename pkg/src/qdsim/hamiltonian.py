"""Drift, control and noise Hamiltonians for the four system categories."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .qlinalg import pauli


class HamiltonianError(ValueError):
    pass


@dataclass(frozen=True)
class SystemCategory:
    id: int
    nqubits: int
    control_axes: tuple[str, ...]
    noise_axes: tuple[str, ...]

    @property
    def dim(self) -> int:
        return 2 ** self.nqubits


# Axis labels are Pauli strings with the first qubit leftmost ("IX" = sigma_0 (x) sigma_x).
CATEGORIES = {
    1: SystemCategory(1, 1, ("X",), ("Z",)),
    2: SystemCategory(2, 1, ("X", "Y"), ("X", "Z")),
    3: SystemCategory(3, 2, ("IX", "XI"), ("IZ", "ZI")),
    4: SystemCategory(4, 2, ("IX", "XI", "XX"), ("IZ", "ZI")),
}


@dataclass(frozen=True)
class EnergyGaps:
    omega: float = 12.0
    omega1: float = 12.0
    omega2: float = 10.0

    def to_dict(self) -> dict:
        return {"Omega": self.omega, "Omega1": self.omega1, "Omega2": self.omega2}


def drift(cat: SystemCategory, gaps: EnergyGaps = EnergyGaps()) -> np.ndarray:
    if cat.nqubits == 1:
        return 0.5 * gaps.omega * pauli("Z")
    return 0.5 * gaps.omega1 * pauli("ZI") + 0.5 * gaps.omega2 * pauli("IZ")


def static_operators(cat: SystemCategory) -> list[np.ndarray]:
    return [pauli("Z")] if cat.nqubits == 1 else [pauli("ZI"), pauli("IZ")]


def control_coefficients(cat: SystemCategory, half_xx: bool = False) -> np.ndarray:
    # The interacting XX term carries no 1/2 unless half_xx is set.
    return np.array([0.5 if (ax != "XX" or half_xx) else 1.0 for ax in cat.control_axes])


def _weighted_sum(coeffs: np.ndarray, ops: np.ndarray) -> np.ndarray:
    return np.einsum("...a,aij->...ij", coeffs.astype(complex), ops)


def control_slices(cat: SystemCategory, waveforms: np.ndarray, half_xx: bool = False) -> np.ndarray:
    """``(M, d, d)`` control Hamiltonians from ``(M, n_control)`` waveform samples."""
    w = np.asarray(waveforms, dtype=float)
    if w.ndim != 2 or w.shape[1] != len(cat.control_axes):
        raise HamiltonianError(
            f"category {cat.id} needs waveforms of shape (M, {len(cat.control_axes)}), got {w.shape}")
    ops = np.stack([pauli(ax) for ax in cat.control_axes])
    return _weighted_sum(w * control_coefficients(cat, half_xx), ops)


def noise_slices(cat: SystemCategory, noise: np.ndarray) -> np.ndarray:
    """``(K, M, d, d)`` noise Hamiltonians from ``(K, M, n_noise)`` realisations."""
    b = np.asarray(noise, dtype=float)
    if b.ndim != 3 or b.shape[2] != len(cat.noise_axes):
        raise HamiltonianError(
            f"category {cat.id} needs noise of shape (K, M, {len(cat.noise_axes)}), got {b.shape}")
    ops = np.stack([pauli(ax) for ax in cat.noise_axes])
    return _weighted_sum(0.5 * b, ops)


def system_slices(cat: SystemCategory, waveforms: np.ndarray, gaps: EnergyGaps = EnergyGaps(),
                  half_xx: bool = False) -> np.ndarray:
    """``H0(t_j)`` = drift + control, one per time slice."""
    return drift(cat, gaps) + control_slices(cat, waveforms, half_xx)


def total(h0: np.ndarray, h1: np.ndarray) -> np.ndarray:
    return h0 + h1
