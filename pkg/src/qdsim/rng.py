"""Seed lineage for reproducible, order-independent random streams.

Every random draw in the pipeline comes from a Philox (counter-based)
generator keyed by ``(master_seed, example, domain, *indices)``.  Because a
stream depends only on its key, realisations can be produced in any order or
on any number of threads and still come out bit-identical.
"""

from __future__ import annotations

import numpy as np

PULSES = 0
NOISE = 1


def stream(master_seed: int, *key: int) -> np.random.Generator:
    """Independent generator for one node of the seed tree."""
    if master_seed < 0 or any(k < 0 for k in key):
        raise ValueError("seed lineage entries must be non-negative integers")
    ss = np.random.SeedSequence(int(master_seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


def pulse_stream(master_seed: int, example: int, axis: int) -> np.random.Generator:
    return stream(master_seed, example, PULSES, axis)


def noise_stream(master_seed: int, example: int, realization: int, axis: int) -> np.random.Generator:
    return stream(master_seed, example, NOISE, realization, axis)
