"""Counter-based random streams.

Every random draw in the package flows from a single 64-bit seed through
Philox substreams keyed by (seed, path).  A substream is fully determined
by its path, so sample sets are independent of evaluation order and of
how work is split across threads.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1

# purpose tags, kept distinct so unrelated call sites never share a stream
BALLMAX = 0x01
RAY = 0x02
AFFINE = 0x03
MODULUS = 0x04
PROBE = 0x05
TAU = 0x06
TAU_MESH = 0x07
SUITE = 0x08
EXAMPLE51 = 0x09


def _fold(path: tuple[int, ...]) -> int:
    """splitmix64-style mixing of a path of small ints into one word."""
    h = 0x9E3779B97F4A7C15
    for part in path:
        h = (h + (int(part) & _MASK64)) & _MASK64
        h ^= h >> 30
        h = (h * 0xBF58476D1CE4E5B9) & _MASK64
        h ^= h >> 27
        h = (h * 0x94D049BB133111EB) & _MASK64
        h ^= h >> 31
    return h


def substream(seed: int, *path: int) -> np.random.Generator:
    """Independent generator for the given seed and integer path."""
    key = np.array([int(seed) & _MASK64, _fold(path)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def ball_point(rng: np.random.Generator, dim: int, radius: float) -> np.ndarray:
    """Uniform draw from the closed ball of the given radius."""
    v = rng.standard_normal(dim)
    nv = np.linalg.norm(v)
    if nv == 0.0:
        return np.zeros(dim)
    r = radius * rng.uniform() ** (1.0 / dim)
    return (r / nv) * v


def sphere_point(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Uniform draw from the unit sphere."""
    while True:
        v = rng.standard_normal(dim)
        nv = np.linalg.norm(v)
        if nv > 1e-12:
            return v / nv
