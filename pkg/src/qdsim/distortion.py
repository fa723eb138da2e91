"""Control-line distortion as a fixed Chebyshev type I low-pass filter.

The analog prototype is designed in zero/pole/gain form, discretised with a
pre-warped bilinear transform at the cutoff, and applied to sampled
waveforms as a causal IIR filter starting from rest.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import signal


class FilterError(ValueError):
    pass


@dataclass(frozen=True)
class AnalogFilterSpec:
    order: int = 4
    passband_ripple_db: float = 0.5
    cutoff_rad_per_s: float = 2 * math.pi * 20.0

    def __post_init__(self):
        if int(self.order) != self.order or self.order < 1:
            raise FilterError(f"filter order must be a positive integer, got {self.order}")
        if not self.passband_ripple_db > 0:
            raise FilterError("passband ripple must be positive")
        if not self.cutoff_rad_per_s > 0:
            raise FilterError("cutoff must be positive")

    @property
    def epsilon(self) -> float:
        return math.sqrt(10 ** (self.passband_ripple_db / 10) - 1)

    def to_dict(self) -> dict:
        return {
            "type": "chebyshev1",
            "order": self.order,
            "passband_ripple_db": self.passband_ripple_db,
            "cutoff_rad_per_s": self.cutoff_rad_per_s,
        }


@dataclass(frozen=True)
class AnalogZPK:
    zeros: np.ndarray
    poles: np.ndarray
    gain: float

    def __call__(self, omega) -> np.ndarray:
        """Complex response H(j omega)."""
        s = 1j * np.asarray(omega, dtype=float)
        num = np.prod(s[..., None] - self.zeros, axis=-1) if len(self.zeros) else 1.0
        den = np.prod(s[..., None] - self.poles, axis=-1) if len(self.poles) else 1.0
        return self.gain * num / den


@dataclass(frozen=True)
class DiscreteFilter:
    b: tuple
    a: tuple
    sample_rate: float
    spec: AnalogFilterSpec | None = None
    zpk: tuple | None = field(default=None, compare=False)  # (zeros, poles, gain) in z, kept for well-conditioned evaluation

    def __post_init__(self):
        if not self.a or self.a[0] != 1.0:
            raise FilterError("denominator must be normalised with a[0] == 1")
        if not self.is_stable():
            raise FilterError("discrete filter is unstable (pole on or outside the unit circle)")

    def poles(self) -> np.ndarray:
        if self.zpk is not None:
            return np.asarray(self.zpk[1])
        return np.roots(self.a) if len(self.a) > 1 else np.array([])

    def sos(self) -> np.ndarray:
        """Cascade of second-order sections; avoids the cancellation of high-order (b, a)."""
        if self.zpk is None:
            return signal.tf2sos(self.b, self.a)
        z, p, k = self.zpk
        return signal.zpk2sos(z, p, k)

    def is_stable(self) -> bool:
        p = self.poles()
        return bool(np.all(np.abs(p) < 1.0))

    def to_dict(self) -> dict:
        return {
            "spec": self.spec.to_dict() if self.spec else None,
            "sample_rate": self.sample_rate,
            "b": list(self.b),
            "a": list(self.a),
            "sos": self.sos().tolist(),
        }


@dataclass(frozen=True)
class FrequencyResponse:
    frequencies: np.ndarray
    magnitude: np.ndarray
    phase: np.ndarray


def identity_filter(sample_rate: float) -> DiscreteFilter:
    return DiscreteFilter((1.0,), (1.0,), sample_rate)


def design_chebyshev1(spec: AnalogFilterSpec) -> AnalogZPK:
    """Chebyshev type I low-pass prototype scaled to the cutoff.

    Poles lie on the Chebyshev ellipse; the gain puts the passband peaks at
    unity, so odd orders have unit DC gain and even orders sit at the bottom
    of the ripple, ``1/sqrt(1 + eps^2)``.
    """
    n = int(spec.order)
    eps = spec.epsilon
    mu = math.asinh(1.0 / eps) / n
    theta = np.pi * (2 * np.arange(1, n + 1) - 1) / (2 * n)
    poles = spec.cutoff_rad_per_s * (-math.sinh(mu) * np.sin(theta) + 1j * math.cosh(mu) * np.cos(theta))
    gain = float(np.real(np.prod(-poles)))
    if n % 2 == 0:
        gain /= math.sqrt(1 + eps * eps)
    return AnalogZPK(np.array([], dtype=complex), poles, gain)


def discretize(analog: AnalogZPK, sample_rate: float, prewarp_rad_per_s: float | None = None,
               spec: AnalogFilterSpec | None = None) -> DiscreteFilter:
    """Bilinear transform, pre-warped so the response matches at ``prewarp_rad_per_s``."""
    fs = float(sample_rate)
    if prewarp_rad_per_s is None:
        prewarp_rad_per_s = spec.cutoff_rad_per_s if spec else None
    if prewarp_rad_per_s is None:
        k = 2 * fs
    else:
        if not prewarp_rad_per_s / (2 * math.pi) < fs / 2:
            raise FilterError("pre-warp frequency must lie below Nyquist")
        k = prewarp_rad_per_s / math.tan(prewarp_rad_per_s / (2 * fs))
    zeros = np.asarray(analog.zeros, dtype=complex)
    poles = np.asarray(analog.poles, dtype=complex)
    if len(zeros) > len(poles):
        raise FilterError("improper analog transfer function")
    zd = (k + zeros) / (k - zeros)
    pd = (k + poles) / (k - poles)
    # zeros at infinity land on Nyquist
    zd = np.concatenate([zd, -np.ones(len(poles) - len(zeros))])
    gain = analog.gain * np.prod(k - zeros) / np.prod(k - poles)
    b = np.real(gain * np.poly(zd)) if len(zd) else np.array([np.real(gain)])
    a = np.real(np.poly(pd)) if len(pd) else np.array([1.0])
    try:
        return DiscreteFilter(tuple(float(x) for x in np.atleast_1d(b)),
                              tuple(float(x) for x in np.atleast_1d(a)), fs, spec,
                              (zd, pd, float(np.real(gain))))
    except FilterError as exc:
        raise FilterError(f"{exc}; cutoff too close to Nyquist for fs={fs}") from None


def default_filter(sample_rate: float, spec: AnalogFilterSpec | None = None) -> DiscreteFilter:
    spec = spec or AnalogFilterSpec()
    return discretize(design_chebyshev1(spec), sample_rate, spec=spec)


def apply(filt: DiscreteFilter, w: np.ndarray) -> np.ndarray:
    """Filter a waveform (last axis is time) from zero initial state."""
    w = np.asarray(w, dtype=float)
    if len(filt.a) == 1:
        return (filt.b[0] / filt.a[0]) * w if len(filt.b) == 1 else signal.lfilter(filt.b, filt.a, w, axis=-1)
    return signal.sosfilt(filt.sos(), w, axis=-1)


def response(filt: DiscreteFilter, frequencies) -> FrequencyResponse:
    """Frequency response on the unit circle at ``frequencies`` in Hz."""
    f = np.asarray(frequencies, dtype=float)
    z = np.exp(2j * np.pi * f / filt.sample_rate)
    if filt.zpk is not None:
        zs, ps, k = filt.zpk
        h = k * np.prod(z[..., None] - zs, axis=-1) / np.prod(z[..., None] - ps, axis=-1)
        return FrequencyResponse(f, np.abs(h), np.unwrap(np.angle(h)))
    zinv = 1 / z
    h = np.polyval(np.asarray(filt.b)[::-1], zinv) / np.polyval(np.asarray(filt.a)[::-1], zinv)
    return FrequencyResponse(f, np.abs(h), np.unwrap(np.angle(h)))
