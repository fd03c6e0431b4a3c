"""Seeded randomness.

Every random choice goes through a numpy ``Generator`` driven by Philox4x64-10,
a counter-based bit generator with 64-bit words.  Independent streams for
sub-tasks (one trial of a sweep, one retry of a construction) come from
``SeedSequence`` spawn keys, so a (seed, key) pair pins the stream exactly.
"""

import numpy as np

GENERATOR_NAME = "numpy Philox4x64-10 keyed by SeedSequence(seed, spawn_key)"


def make_rng(seed, *key):
    seq = np.random.SeedSequence(int(seed) & ((1 << 64) - 1), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(seq))


def ensure_rng(rng_or_seed):
    if isinstance(rng_or_seed, np.random.Generator):
        return rng_or_seed
    return make_rng(0 if rng_or_seed is None else rng_or_seed)
