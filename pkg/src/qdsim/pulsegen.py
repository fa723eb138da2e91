"""Random square and Gaussian control-pulse trains and their sampled waveforms."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np


@dataclass(frozen=True)
class PulseConfig:
    """Timing and amplitude parameters shared by every pulse train.

    ``gaussian_sigma=None`` means the default ``T / (12 M)``.
    """

    total_time: float = 1.0
    num_steps: int = 1024
    num_pulses: int = 5
    amp_min: float = -100.0
    amp_max: float = 100.0
    gaussian_sigma: float | None = None

    def __post_init__(self):
        m = self.num_steps
        if not self.total_time > 0:
            raise ValueError("total_time must be positive")
        if m < 2 or m & (m - 1):
            raise ValueError(f"num_steps must be a power of two, got {m}")
        if self.num_pulses < 1:
            raise ValueError("num_pulses must be at least 1")
        if not self.amp_min < self.amp_max:
            raise ValueError("amp_min must be below amp_max")
        if self.gaussian_sigma is not None and not self.gaussian_sigma > 0:
            raise ValueError("gaussian_sigma must be positive")

    @property
    def dt(self) -> float:
        return self.total_time / self.num_steps

    @property
    def sigma(self) -> float:
        if self.gaussian_sigma is None:
            return self.total_time / (12 * self.num_steps)
        return self.gaussian_sigma

    def to_dict(self) -> dict:
        return {
            "total_time": self.total_time,
            "num_steps": self.num_steps,
            "num_pulses": self.num_pulses,
            "amp_min": self.amp_min,
            "amp_max": self.amp_max,
            "gaussian_sigma": self.gaussian_sigma,
            "gaussian_sigma_effective": self.sigma,
        }


@dataclass(frozen=True)
class SquareTrain:
    amplitudes: np.ndarray
    window_starts: np.ndarray
    window_widths: np.ndarray
    shape: str = field(default="square", init=False)

    def parameters(self) -> np.ndarray:
        """``(n, 3)`` rows of (amplitude, window start, window width)."""
        return np.column_stack([self.amplitudes, self.window_starts, self.window_widths])


@dataclass(frozen=True)
class GaussianTrain:
    amplitudes: np.ndarray
    means: np.ndarray
    sigma: float
    shape: str = field(default="gaussian", init=False)

    def parameters(self) -> np.ndarray:
        """``(n, 3)`` rows of (amplitude, mean, standard deviation)."""
        n = len(self.amplitudes)
        return np.column_stack([self.amplitudes, self.means, np.full(n, self.sigma)])


PulseTrain = Union[SquareTrain, GaussianTrain]


def time_grid(cfg: PulseConfig) -> np.ndarray:
    """Slice midpoints ``t_j = (0.5 + j) * dt``."""
    return (0.5 + np.arange(cfg.num_steps)) * cfg.dt


def _amplitudes(cfg: PulseConfig, rng: np.random.Generator) -> np.ndarray:
    return rng.uniform(cfg.amp_min, cfg.amp_max, size=cfg.num_pulses)


def random_square(cfg: PulseConfig, rng: np.random.Generator) -> SquareTrain:
    # Each pulse sits in the central half of one of n equal bins.
    n, T = cfg.num_pulses, cfg.total_time
    amps = _amplitudes(cfg, rng)
    starts = np.arange(n) * T / n + T / (4 * n)
    widths = np.full(n, T / (2 * n))
    return SquareTrain(amps, starts, widths)


def random_gaussian(cfg: PulseConfig, rng: np.random.Generator, jitter: bool = True) -> GaussianTrain:
    """Gaussian train with means jittered by at most ``T/(4n)`` around bin centres."""
    n, T = cfg.num_pulses, cfg.total_time
    amps = _amplitudes(cfg, rng)
    means = (np.arange(1, n + 1) - 0.5) * T / n
    if jitter:
        means = means + rng.uniform(-T / (4 * n), T / (4 * n), size=n)
    return GaussianTrain(amps, means, cfg.sigma)


def random_train(shape: str, cfg: PulseConfig, rng: np.random.Generator) -> PulseTrain:
    if shape == "gaussian":
        return random_gaussian(cfg, rng)
    if shape == "square":
        return random_square(cfg, rng)
    raise ValueError(f"unknown pulse shape {shape!r}")


def sample(train: PulseTrain, cfg: PulseConfig) -> np.ndarray:
    """Evaluate a pulse train at the ``M`` slice midpoints."""
    t = time_grid(cfg)
    if isinstance(train, SquareTrain):
        out = np.zeros_like(t)
        for a, s, w in zip(train.amplitudes, train.window_starts, train.window_widths):
            out[(t >= s) & (t < s + w)] = a
        return out
    if isinstance(train, GaussianTrain):
        z = (t[:, None] - train.means[None, :]) / train.sigma
        return np.exp(-0.5 * z * z) @ np.asarray(train.amplitudes, dtype=float)
    raise TypeError(f"not a pulse train: {type(train).__name__}")
