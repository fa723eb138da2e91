"""Time-domain classical noise realisations for profiles N0 to N6.

N1 and N5 are synthesised from a power spectral density by random-phase
inverse FFT.  N2 to N4 are built from white Gaussian noise by colouring
(circular convolution), a deterministic envelope (non-stationarity) and
squaring (non-Gaussianity).  N6 is the elementwise square of a paired
axis' realisation.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .rng import noise_stream

PROFILES = ("N0", "N1", "N2", "N3", "N4", "N5", "N6")
PSD_PROFILES = ("N1", "N5")

# Default bump centres (rad/s) of the z- and x-axis spectra.
Z_BUMP = 20.0
X_BUMP = 15.0


class NoiseError(ValueError):
    pass


@dataclass(frozen=True)
class NoiseSettings:
    """Free parameters of the non-PSD profiles, echoed into dataset metadata."""

    n2_kernel_width: float = 1.0 / 32  # Gaussian kernel std, as a fraction of T
    n5_bump: float = 40.0              # relocated bump centre for N5, rad/s

    def to_dict(self) -> dict:
        return {
            "n2_kernel": "gaussian",
            "n2_kernel_width_fraction_of_T": self.n2_kernel_width,
            "n3_envelope": "1 + sin(2 pi t / T)",
            "n4": "square of N3, mean-centred per realisation",
            "n5_bump_rad_per_s": self.n5_bump,
            "n6": "elementwise square of paired axis realisation",
        }


def _check_omega(omega) -> np.ndarray:
    w = np.asarray(omega, dtype=float)
    if np.any(w < 0) or np.any(~np.isfinite(w)):
        raise NoiseError("PSD evaluated at negative or non-finite frequency")
    return w


def psd_z(omega, bump: float = Z_BUMP):
    """z-axis spectrum: 1/(w+1) below 50 rad/s, flat 0.25 above, plus a Gaussian bump."""
    w = _check_omega(omega)
    g = 0.8 * np.exp(-((w - bump) ** 2) / 10)
    out = np.where(w <= 50, 1.0 / (w + 1), 0.25) + g
    return float(out) if out.ndim == 0 else out


def psd_x(omega, bump: float = X_BUMP):
    """x-axis spectrum: (w+1)^-1.5 below 20 rad/s, flat 5/48 above, plus a Gaussian bump."""
    w = _check_omega(omega)
    g = 0.5 * np.exp(-((w - bump) ** 2) / 10)
    out = np.where(w <= 20, (w + 1) ** -1.5, 5 / 48) + g
    return float(out) if out.ndim == 0 else out


def axis_psd(axis: str, profile: str, settings: NoiseSettings = NoiseSettings()) -> Callable:
    """The spectrum used for a PSD profile on a given noise axis label (``"Z"``, ``"IZ"``, ...)."""
    letter = axis.upper().replace("I", "")
    if profile not in PSD_PROFILES:
        raise NoiseError(f"profile {profile} is not PSD-specified")
    if letter == "Z":
        bump = Z_BUMP if profile == "N1" else settings.n5_bump
        return lambda w: psd_z(w, bump)
    if letter == "X":
        bump = X_BUMP if profile == "N1" else settings.n5_bump
        return lambda w: psd_x(w, bump)
    raise NoiseError(f"no spectrum defined for noise axis {axis!r}")


def psd_bins(S: Callable, T: float, M: int) -> tuple[np.ndarray, np.ndarray]:
    """Angular frequencies ``2 pi j / T`` and ``S`` values for ``j = 0 .. M/2``."""
    omega = 2 * np.pi * np.arange(M // 2 + 1) / T
    s = np.asarray(S(omega), dtype=float)
    if np.any(s < 0) or np.any(~np.isfinite(s)):
        raise NoiseError("PSD must be finite and non-negative at every bin")
    return omega, s


def spectrum_from_phases(s_bins: np.ndarray, phases: np.ndarray, T: float, M: int) -> np.ndarray:
    """Hermitian-symmetric length-``M`` spectrum from ``M/2 + 1`` bin powers and phases in [0, 1)."""
    p = (M / np.sqrt(T)) * np.sqrt(s_bins) * np.exp(2j * np.pi * phases)
    # DC and Nyquist bins must be real; keep the real part of the random-phase value.
    p[..., 0] = p[..., 0].real
    p[..., -1] = p[..., -1].real
    return np.concatenate([p, np.conj(p[..., -2:0:-1])], axis=-1)


def realization_from_spectrum(spec: np.ndarray) -> np.ndarray:
    beta = np.fft.ifft(spec, axis=-1)
    scale = max(1.0, float(np.max(np.abs(beta.real), initial=0.0)))
    if np.max(np.abs(beta.imag), initial=0.0) > 1e-12 * scale:
        raise NoiseError("inverse FFT of a Hermitian spectrum left an imaginary residue")
    return beta.real


def generate_from_psd(S: Callable, T: float, M: int, rng: np.random.Generator) -> np.ndarray:
    """One realisation whose spectrum bins have magnitude ``(M/sqrt T) sqrt(S)`` and random phase."""
    if M < 2 or M & (M - 1):
        raise NoiseError("M must be a power of two")
    _, s = psd_bins(S, T, M)
    phases = rng.random(M // 2 + 1)
    return realization_from_spectrum(spectrum_from_phases(s, phases, T, M))


def _gaussian_kernel(T: float, M: int, width: float) -> np.ndarray:
    lag = np.arange(M)
    d = np.minimum(lag, M - lag) * (T / M)
    k = np.exp(-0.5 * (d / (width * T)) ** 2)
    return k / np.sqrt(np.sum(k * k))


def colour(white: np.ndarray, T: float, M: int, settings: NoiseSettings = NoiseSettings()) -> np.ndarray:
    """Circularly convolve white samples with the unit-energy kernel; rescale to unit sample variance."""
    k = _gaussian_kernel(T, M, settings.n2_kernel_width)
    out = np.fft.ifft(np.fft.fft(white, axis=-1) * np.fft.fft(k), axis=-1).real
    sd = out.std(axis=-1, keepdims=True)
    return np.divide(out, sd, out=np.zeros_like(out), where=sd > 0)


def envelope(t, T: float) -> np.ndarray:
    return 1.0 + np.sin(2 * np.pi * np.asarray(t) / T)


def generate_n2(T: float, M: int, rng: np.random.Generator, settings: NoiseSettings = NoiseSettings()) -> np.ndarray:
    return colour(rng.standard_normal(M), T, M, settings)


def generate_n3(T: float, M: int, rng: np.random.Generator, settings: NoiseSettings = NoiseSettings()) -> np.ndarray:
    t = (0.5 + np.arange(M)) * (T / M)
    return generate_n2(T, M, rng, settings) * envelope(t, T)


def generate_n4(T: float, M: int, rng: np.random.Generator, settings: NoiseSettings = NoiseSettings(),
                centre: bool = True) -> np.ndarray:
    sq = generate_n3(T, M, rng, settings) ** 2
    return sq - sq.mean() if centre else sq


def derive_n6(source: np.ndarray) -> np.ndarray:
    return np.square(source)


def validate_profiles(profiles: Sequence[str]) -> None:
    for p in profiles:
        if p not in PROFILES:
            raise NoiseError(f"unknown noise profile {p!r}")
    if "N6" in profiles:
        sources = [p for p in profiles if p != "N6"]
        if not sources or sources[0] == "N0":
            raise NoiseError("N6 needs a paired non-N6, non-N0 source axis")


def _single(profile: str, axis: str, T: float, M: int, rng: np.random.Generator,
            settings: NoiseSettings) -> np.ndarray:
    if profile == "N0":
        return np.zeros(M)
    if profile in PSD_PROFILES:
        return generate_from_psd(axis_psd(axis, profile, settings), T, M, rng)
    if profile == "N2":
        return generate_n2(T, M, rng, settings)
    if profile == "N3":
        return generate_n3(T, M, rng, settings)
    if profile == "N4":
        return generate_n4(T, M, rng, settings)
    raise NoiseError(f"profile {profile} cannot be generated independently")


def batch(profiles: Sequence[str], axes: Sequence[str], K: int, T: float, M: int,
          master_seed: int, example: int, settings: NoiseSettings = NoiseSettings(),
          threads: int = 1) -> np.ndarray:
    """``(K, M, n_axes)`` realisations; realisation ``k`` of axis ``a`` uses stream (seed, example, k, a).

    N6 axes are the square of the first non-N6 axis, realisation by
    realisation.  The result does not depend on ``threads``.
    """
    if K < 1:
        raise NoiseError("K must be at least 1")
    if len(profiles) != len(axes):
        raise NoiseError("one noise profile per noise axis is required")
    validate_profiles(profiles)
    out = np.zeros((K, M, len(axes)))
    source = next((i for i, p in enumerate(profiles) if p != "N6"), None)

    def fill(ks: range) -> None:
        for k in ks:
            for a, (p, ax) in enumerate(zip(profiles, axes)):
                if p in ("N0", "N6"):
                    continue
                out[k, :, a] = _single(p, ax, T, M, noise_stream(master_seed, example, k, a), settings)
            for a, p in enumerate(profiles):
                if p == "N6":
                    out[k, :, a] = derive_n6(out[k, :, source])

    if threads <= 1 or K == 1:
        fill(range(K))
    else:
        step = -(-K // threads)
        with ThreadPoolExecutor(threads) as pool:
            list(pool.map(fill, [range(i, min(i + step, K)) for i in range(0, K, step)]))
    return out
