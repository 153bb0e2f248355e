"""Named, independent random sub-streams.

Every random draw in a run comes from a PCG64 generator seeded by
``SeedSequence(seed, spawn_key=(crc32(name),))``. Streams for different names
never share state, so switching one mechanism on or off cannot shift the
draws seen by another.
"""

import zlib

import numpy as np


def stream_key(name: str) -> int:
    return zlib.crc32(name.encode("utf-8"))


def substream(seed: int, name: str) -> np.random.Generator:
    """Return the generator for sub-stream ``name`` of run seed ``seed``."""
    ss = np.random.SeedSequence(int(seed), spawn_key=(stream_key(name),))
    return np.random.Generator(np.random.PCG64(ss))


class Streams:
    """Lazily created, cached sub-streams for one run."""

    def __init__(self, seed: int):
        self.seed = int(seed)
        self._cache: dict[str, np.random.Generator] = {}

    def __call__(self, name: str) -> np.random.Generator:
        gen = self._cache.get(name)
        if gen is None:
            gen = self._cache[name] = substream(self.seed, name)
        return gen
