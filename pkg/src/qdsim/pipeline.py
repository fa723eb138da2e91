"""End-to-end generation of one dataset example.

pulses -> optional distortion -> noise batch -> Hamiltonian slices ->
propagators -> expectations and noise operators -> record.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import distortion, noisegen
from .configs import DatasetConfig
from .evolution import evolve, interaction_unitary
from .hamiltonian import noise_slices, static_operators, system_slices
from .measurement import (initial_states, monte_carlo, observable_labels, observables, state_labels,
                          v_operator, w_operators)
from .pulsegen import random_train, sample, time_grid
from .qlinalg import check_unitary, dagger, pauli
from .rng import pulse_stream

# Realisations are propagated in fixed-size chunks so results never depend on the thread count.
CHUNK = 64

RECORD_KEYS = ("pulse_parameters", "time_range", "pulses", "distorted_pulses", "expectations", "V_O",
               "V_O_per_realization", "E_O", "noise", "H0", "H1", "U0", "UI")


@dataclass
class Simulation:
    """Intermediate products of one example, kept for validation and record assembly."""

    cfg: DatasetConfig
    example_index: int
    trains: list
    pulses: np.ndarray            # (M, n_ctrl)
    distorted: np.ndarray         # (M, n_ctrl)
    noise: np.ndarray             # (K, M, n_noise)
    h0: np.ndarray                # (M, d, d)
    u0_trace: np.ndarray          # (M, d, d)
    u_final: np.ndarray           # (K, d, d)
    ui_trace: np.ndarray | None   # (K, M, d, d)
    extra: dict = field(default_factory=dict)

    @property
    def u0(self) -> np.ndarray:
        return self.u0_trace[-1]


def make_filter(cfg: DatasetConfig) -> distortion.DiscreteFilter | None:
    if not cfg.name.distorted:
        return None
    fs = cfg.pulse.num_steps / cfg.pulse.total_time
    return distortion.default_filter(fs, cfg.filter_spec)


def control_waveforms(cfg: DatasetConfig, example_index: int):
    trains, waves = [], []
    for a in range(len(cfg.category.control_axes)):
        tr = random_train(cfg.pulse_shape, cfg.pulse, pulse_stream(cfg.master_seed, example_index, a))
        trains.append(tr)
        waves.append(sample(tr, cfg.pulse))
    pulses = np.stack(waves, axis=1)
    filt = make_filter(cfg)
    distorted = distortion.apply(filt, pulses.T).T.copy() if filt else pulses.copy()
    return trains, pulses, distorted


def _map_chunks(fn, K: int, threads: int) -> None:
    chunks = [range(i, min(i + CHUNK, K)) for i in range(0, K, CHUNK)]
    if threads <= 1 or len(chunks) == 1:
        for c in chunks:
            fn(c)
    else:
        with ThreadPoolExecutor(threads) as pool:
            list(pool.map(fn, chunks))


def simulate(cfg: DatasetConfig, example_index: int, threads: int = 1,
             keep_ui: bool | None = None) -> Simulation:
    keep_ui = cfg.keep_ui if keep_ui is None else keep_ui
    cat, T, M, K = cfg.category, cfg.pulse.total_time, cfg.pulse.num_steps, cfg.K
    dt = T / M
    trains, pulses, distorted = control_waveforms(cfg, example_index)
    noise = noisegen.batch(cfg.profiles, cat.noise_axes, K, T, M, cfg.master_seed, example_index,
                           cfg.noise, threads=threads)
    h0 = system_slices(cat, distorted, cfg.gaps, cfg.half_xx)
    u0_trace = evolve(h0, dt, keep_intermediates=True).intermediates
    d = cat.dim
    u_final = np.empty((K, d, d), dtype=complex)
    ui_trace = np.empty((K, M, d, d), dtype=complex) if keep_ui else None

    if cfg.noiseless:
        # H1 = 0: every realisation shares the noiseless propagator.
        u_final[:] = u0_trace[-1]
        if ui_trace is not None:
            ui_trace[:] = interaction_unitary(u0_trace, u0_trace)
    else:
        def run(ks: range) -> None:
            sl = slice(ks.start, ks.stop)
            h = h0[None] + noise_slices(cat, noise[sl])
            tr = evolve(h, dt, keep_intermediates=keep_ui)
            u_final[sl] = tr.final
            if ui_trace is not None:
                ui_trace[sl] = tr.intermediates @ dagger(u0_trace)[None]

        _map_chunks(run, K, threads)
    return Simulation(cfg, example_index, trains, pulses, distorted, noise, h0, u0_trace, u_final, ui_trace)


def _matrix_json(m: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m)]


def simulation_parameters(cfg: DatasetConfig) -> dict:
    cat = cfg.category
    nq = cat.nqubits
    return {
        "name": cfg.canonical_name,
        "dim": cat.dim,
        "Omega": cfg.gaps.to_dict(),
        "static_operators": [_matrix_json(m) for m in static_operators(cat)],
        "dynamic_operators": {
            "labels": list(cat.control_axes),
            "matrices": [_matrix_json(pauli(a)) for a in cat.control_axes],
            "signal": "distorted" if cfg.name.distorted else "pulses",
        },
        "noise_operators": {
            "labels": list(cat.noise_axes),
            "matrices": [_matrix_json(pauli(a)) for a in cat.noise_axes],
        },
        "measurement_operators": {
            "labels": observable_labels(nq),
            "matrices": [_matrix_json(o) for o in observables(nq)],
        },
        "initial_states": {
            "labels": state_labels(nq),
            "matrices": [_matrix_json(r) for r in initial_states(nq)],
        },
        "T": cfg.pulse.total_time,
        "M": cfg.pulse.num_steps,
        "num_ex": cfg.num_examples,
        "batch_size": CHUNK,
        "K": cfg.K,
        "noise_profile": list(cfg.profiles),
        "pulse_shape": cfg.pulse_shape,
        "num_pulses": cfg.pulse.num_pulses,
        "elapsed_time": "see manifest.json",
    }


def generate_example(cfg: DatasetConfig, example_index: int, threads: int = 1) -> tuple[dict, dict]:
    """Build ``(metadata, arrays)`` for one example; deterministic in (config, seed, index)."""
    sim = simulate(cfg, example_index, threads=threads)
    cat = cfg.category
    nq = cat.nqubits
    states, obs = initial_states(nq), observables(nq)

    check_unitary(sim.u_final, what="propagator")
    check_unitary(sim.u0_trace, what="noiseless propagator")
    mc = monte_carlo(states, obs, sim.u_final)
    ws = w_operators(sim.u_final, sim.u0, obs)
    v = v_operator(ws)

    arrays = {
        "pulse_parameters": np.stack([tr.parameters() for tr in sim.trains]),
        "time_range": time_grid(cfg.pulse),
        "pulses": sim.pulses,
        "distorted_pulses": sim.distorted,
        "expectations": mc.averaged,
        "V_O": v,
        "V_O_per_realization": mc.per_realization,
        "E_O": mc.averaged,
        "noise": sim.noise,
        "H0": sim.h0,
    }
    if cfg.keep_h1:
        arrays["H1"] = noise_slices(cat, sim.noise)
    arrays["U0"] = sim.u0_trace
    if cfg.keep_ui:
        check_unitary(sim.ui_trace, what="interaction unitary")
        arrays["UI"] = sim.ui_trace

    filt = make_filter(cfg)
    metadata = {
        "format": "QDS1",
        "name": cfg.canonical_name,
        "example_index": example_index,
        "simulation_parameters": simulation_parameters(cfg),
        "config": cfg.to_dict(),
        "filter": filt.to_dict() if filt else None,
        "seed_lineage": {
            "master_seed": cfg.master_seed,
            "example_index": example_index,
            "generator": "Philox via SeedSequence(master_seed, spawn_key)",
            "pulse_key": "(example_index, 0, control_axis)",
            "noise_key": "(example_index, 1, realization, noise_axis)",
        },
        "ordering": {
            "states": state_labels(nq),
            "observables": observable_labels(nq),
            "expectations": "state-major, observable-minor",
            "pulse_parameters": ("(amplitude, mean, sigma)" if cfg.pulse_shape == "gaussian"
                                 else "(amplitude, window_start, window_width)"),
        },
        "retention": {"H1": cfg.keep_h1, "UI": cfg.keep_ui},
        "health": {"max_imag_expectation": mc.max_imag},
        "key_order": [k for k in RECORD_KEYS if k in arrays],
        "shapes": {k: list(a.shape) for k, a in arrays.items()},
    }
    return metadata, arrays
