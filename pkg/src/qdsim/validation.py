"""Independent cross-checks: an RK4 propagator oracle and statistical verifiers.

The oracle integrates dU/dt = -i H U with classical fourth-order Runge-Kutta
and re-unitarises the result through its polar factor; it never calls the
eigendecomposition exponential used by :mod:`qdsim.evolution`.
"""

from __future__ import annotations

import json
from pathlib import Path
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from .container import ContainerError, read_example
from .distortion import AnalogFilterSpec, default_filter
from .distortion import apply as apply_filter
from .hamiltonian import noise_slices
from .measurement import ExpectationTensor, initial_states, monte_carlo, observables
from .noisegen import batch, psd_z
from .pipeline import simulate
from .pulsegen import random_gaussian, sample
from .rng import pulse_stream

NOISELESS_TOL = 1e-6
MATCHED_NOISE_TOL = 1e-6
PSD_TOL = 0.05
UNITARY_FUZZ_TOL = 1e-10


@dataclass
class ValidationReport:
    kind: str
    passed: bool
    tolerance: float
    mean_abs_error: float = 0.0
    max_abs_error: float = 0.0
    grand_mean_error: float = 0.0
    per_observable: list = field(default_factory=list)
    psd_relative_errors: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)


def polar_unitary(a: np.ndarray) -> np.ndarray:
    """Closest unitary (polar factor) via SVD."""
    w, _, vh = np.linalg.svd(a)
    return w @ vh


def oracle_evolve(slices: np.ndarray, dt: float, substeps: int = 64) -> np.ndarray:
    """RK4-integrated propagator for ``(..., M, d, d)`` piecewise-constant slices."""
    if substeps < 4:
        raise ValueError("oracle needs at least 4 RK4 substeps per slice")
    slices = np.asarray(slices, dtype=complex)
    d = slices.shape[-1]
    h = dt / substeps
    u = np.broadcast_to(np.eye(d, dtype=complex), slices.shape[:-3] + (d, d)).copy()
    for j in range(slices.shape[-3]):
        a = -1j * slices[..., j, :, :]
        for _ in range(substeps):
            k1 = a @ u
            k2 = a @ (u + (0.5 * h) * k1)
            k3 = a @ (u + (0.5 * h) * k2)
            k4 = a @ (u + h * k3)
            u = u + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return polar_unitary(u)


def oracle_expectations(nqubits: int, propagators: np.ndarray) -> ExpectationTensor:
    return monte_carlo(initial_states(nqubits), observables(nqubits), propagators)


def compare_expectations(sim: ExpectationTensor, oracle: ExpectationTensor, n_obs: int,
                         tol: float = NOISELESS_TOL, kind: str = "expectations") -> ValidationReport:
    """Noise-averaged expectations compared entry by entry and per observable.

    ``per_observable[o]`` is the mean over initial states of the absolute
    difference for observable ``o``; the pass flag requires both the overall
    mean and every per-observable mean to sit within ``tol``.
    """
    diff = np.abs(np.asarray(sim.averaged) - np.asarray(oracle.averaged))
    per_obs = diff.reshape(-1, n_obs).mean(axis=0)
    mean = float(diff.mean())
    grand = float(abs(np.mean(sim.averaged) - np.mean(oracle.averaged)))
    return ValidationReport(kind, bool(mean <= tol and np.all(per_obs <= tol)), tol,
                            mean_abs_error=mean, max_abs_error=float(diff.max()),
                            grand_mean_error=grand, per_observable=per_obs.tolist())


def averaged_periodogram(realizations: np.ndarray, T: float) -> np.ndarray:
    """``(T / M^2) |FFT(beta)|^2`` averaged over realisations, bins ``0 .. M/2``."""
    r = np.atleast_2d(np.asarray(realizations, dtype=float))
    M = r.shape[-1]
    spec = np.fft.rfft(r, axis=-1)
    return (T / M**2) * np.mean(np.abs(spec) ** 2, axis=0)


def verify_psd(realizations: np.ndarray, S: Callable, T: float,
               band: tuple[float, float] = (2 * np.pi, 2 * np.pi * 50), smooth: int = 4,
               tol: float = PSD_TOL) -> ValidationReport:
    """Band-averaged periodogram against ``S`` on ``band`` (rad/s), in groups of ``smooth`` bins."""
    r = np.atleast_2d(realizations)
    M = r.shape[-1]
    est = averaged_periodogram(r, T)
    omega = 2 * np.pi * np.arange(M // 2 + 1) / T
    sel = np.nonzero((omega >= band[0] - 1e-9) & (omega <= band[1] + 1e-9))[0]
    target = np.asarray(S(omega[sel]), dtype=float)
    errs = []
    for i in range(0, len(sel), smooth):
        e = est[sel[i:i + smooth]].mean()
        s = target[i:i + smooth].mean()
        errs.append(abs(e - s) / s if s > 0 else abs(e))
    worst = max(errs) if errs else 0.0
    return ValidationReport("psd", bool(worst <= tol), tol, mean_abs_error=float(np.mean(errs)) if errs else 0.0,
                            max_abs_error=float(worst), psd_relative_errors=[float(e) for e in errs],
                            details={"realizations": int(r.shape[0]), "bins": int(len(sel)), "smooth": smooth})


def xcorr_lag(reference: np.ndarray, signal_: np.ndarray) -> int:
    """Lag (in samples) maximising the cross-correlation; positive means ``signal_`` is delayed."""
    c = np.correlate(signal_, reference, mode="full")
    return int(np.argmax(c)) - (len(reference) - 1)


def verify_distortion(pulses: np.ndarray, distorted: np.ndarray) -> ValidationReport:
    """Distorted waveform should be a delayed copy of the input with no amplitude gain."""
    p = np.asarray(pulses, dtype=float)
    q = np.asarray(distorted, dtype=float)
    peak = float(np.max(np.abs(p)))
    ratio = float(np.max(np.abs(q)) / peak) if peak > 0 else 1.0
    lag = xcorr_lag(p, q)
    return ValidationReport("distortion", bool(lag >= 0 and ratio <= 1.0), 1.0,
                            details={"lag_samples": lag, "peak_ratio": ratio})


def linearity_residual(apply: Callable, w1: np.ndarray, w2: np.ndarray, alpha: float, beta: float) -> float:
    lhs = apply(alpha * w1 + beta * w2)
    rhs = alpha * apply(w1) + beta * apply(w2)
    return float(np.max(np.abs(lhs - rhs)))


def time_invariance_residual(apply: Callable, w: np.ndarray, shift: int) -> float:
    shifted = np.concatenate([np.zeros(shift), w[:len(w) - shift]])
    out = apply(shifted)
    ref = apply(w)
    return float(np.max(np.abs(out[shift:] - ref[:len(w) - shift])))


def run_oracle(cfg, num_examples: int, substeps: int = 64, tol: float = NOISELESS_TOL,
               threads: int = 1) -> ValidationReport:
    """Re-simulate examples of ``cfg`` and compare with the oracle fed identical slices and noise."""
    nq = cfg.category.nqubits
    states, obs = initial_states(nq), observables(nq)
    sims = [simulate(cfg, i, threads=threads) for i in range(num_examples)]
    if cfg.noiseless:
        slices = np.stack([s.h0 for s in sims])[:, None]
    else:
        slices = np.stack([s.h0[None] + noise_slices(cfg.category, s.noise) for s in sims])
    u_oracle = oracle_evolve(slices, cfg.pulse.dt, substeps)
    reports = [compare_expectations(monte_carlo(states, obs, s.u_final), monte_carlo(states, obs, uo),
                                    len(obs), tol)
               for s, uo in zip(sims, u_oracle)]
    per_obs = np.mean([r.per_observable for r in reports], axis=0)
    mean = float(np.mean([r.mean_abs_error for r in reports]))
    return ValidationReport(
        "oracle-noiseless" if cfg.noiseless else "oracle-matched-noise",
        bool(mean <= tol and np.all(per_obs <= tol)), tol, mean_abs_error=mean,
        max_abs_error=float(max(r.max_abs_error for r in reports)),
        grand_mean_error=float(np.mean([r.grand_mean_error for r in reports])),
        per_observable=per_obs.tolist(),
        details={"name": cfg.canonical_name, "examples": num_examples, "K": cfg.K, "substeps": substeps,
                 "per_example_mean_abs_error": [r.mean_abs_error for r in reports]})


def run_psd(realizations: int = 2000, M: int = 1024, T: float = 1.0, seed: int = 0,
            tol: float = PSD_TOL) -> ValidationReport:
    beta = batch(["N1"], ["Z"], realizations, T, M, seed, 0)[:, :, 0]
    return verify_psd(beta, psd_z, T, tol=tol)


def run_distortion(cfg, num_examples: int = 5) -> ValidationReport:
    """Distortion check on freshly drawn Gaussian trains through the dataset's filter."""
    pc = cfg.pulse
    filt = default_filter(pc.num_steps / pc.total_time, cfg.filter_spec or AnalogFilterSpec())
    results, ok = [], True
    for i in range(num_examples):
        w = sample(random_gaussian(pc, pulse_stream(cfg.master_seed, i, 0)), pc)
        rep = verify_distortion(w, apply_filter(filt, w))
        ok &= rep.passed
        results.append(rep.details)
    return ValidationReport("distortion", ok, 1.0, details={"examples": results})


def run_files(directory) -> ValidationReport:
    """Read back every ``*.qds`` file in a dataset directory, verifying checksums and shapes."""
    bad = {}
    files = sorted(Path(directory).glob("*.qds"))
    for f in files:
        try:
            read_example(f)
        except ContainerError as exc:
            bad[f.name] = f"{type(exc).__name__}: {exc}"
    return ValidationReport("files", not bad and bool(files), 0.0,
                            details={"files": len(files), "failures": bad})
