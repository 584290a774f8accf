"""
Counter-based random streams.

Every random draw in the package comes from a Philox generator whose key is
derived from a master seed and a tuple of integer indices (replication,
bootstrap draw, attempt, ...). A stream therefore depends only on its key and
never on the order in which work is scheduled.
"""
from __future__ import annotations

import numpy as np

# Integer tags separating the purposes a stream can serve.
DATA = 0
BOOT = 1
FDWB = 2


def stream(seed: int, *key: int) -> np.random.Generator:
    """
    Return the generator identified by ``(seed, *key)``.

    Parameters
    ----------
    seed : int
        Master seed (non-negative).
    *key : int
        Additional non-negative integers addressing a sub-stream.

    Returns
    -------
    numpy.random.Generator
        A Philox-backed generator. Identical keys give identical draws.
    """
    if seed < 0 or any(k < 0 for k in key):
        raise ValueError("seed and stream keys must be non-negative")
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


def as_generator(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, tuple):
        return stream(*seed)
    return stream(int(seed))
