"""Portable 64-bit random streams.

All randomness in the package comes from ``xoshiro256**`` seeded through
``splitmix64``. Both are defined on unsigned 64-bit integers only, so the
streams are bit-identical on every platform. Kernels that need random numbers
receive the four-word state array and advance it in place.

Seed derivation
---------------
``derive_seed(master, tag, i, j)`` is the splitmix64 finalizer chained over
the inputs::

    z = mix(master + 0x9E3779B97F4A7C15)
    z = mix(z ^ fnv1a64(tag.encode("utf-8")))
    z = mix(z ^ i)
    z = mix(z ^ j)

``mix`` is a bijection on 64-bit words, so two argument tuples that differ in
exactly one position always map to different seeds.
"""

from __future__ import annotations

import numpy as np
from numba import njit

ALGORITHM = "xoshiro256** (splitmix64 seeding); seeds via splitmix64-mix chain over FNV-1a(tag)"

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


def _mix(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def fnv1a64(data: bytes) -> int:
    h = 0xCBF29CE484222325
    for b in data:
        h = ((h ^ b) * 0x100000001B3) & MASK64
    return h


def derive_seed(master_seed: int, purpose_tag: str, problem_index: int = 0, try_index: int = 0) -> int:
    """Return the 64-bit seed for one (purpose, problem, try) stream."""
    z = _mix((master_seed + GOLDEN) & MASK64)
    z = _mix(z ^ fnv1a64(purpose_tag.encode("utf-8")))
    z = _mix(z ^ (problem_index & MASK64))
    z = _mix(z ^ (try_index & MASK64))
    return z


def seed_state(seed: int) -> np.ndarray:
    """Expand a 64-bit seed into a xoshiro256** state with splitmix64."""
    state = np.empty(4, dtype=np.uint64)
    x = seed & MASK64
    for i in range(4):
        x = (x + GOLDEN) & MASK64
        state[i] = _mix(x)
    return state


@njit(cache=True, inline="always")
def _rotl(x, k):
    return (x << np.uint64(k)) | (x >> np.uint64(64 - k))


@njit(cache=True)
def next_u64(s):
    result = _rotl(s[1] * np.uint64(5), 7) * np.uint64(9)
    t = s[1] << np.uint64(17)
    s[2] ^= s[0]
    s[3] ^= s[1]
    s[1] ^= s[2]
    s[0] ^= s[3]
    s[2] ^= t
    s[3] = _rotl(s[3], 45)
    return result


@njit(cache=True)
def next_bit(s):
    return np.int64(next_u64(s) >> np.uint64(63))


@njit(cache=True)
def next_below(s, n):
    """Unbiased integer in ``[0, n)`` by rejection of the short top range."""
    un = np.uint64(n)
    threshold = (np.uint64(0) - un) % un
    while True:
        r = next_u64(s)
        if r >= threshold:
            return np.int64(r % un)


@njit(cache=True)
def next_double(s):
    return np.float64(next_u64(s) >> np.uint64(11)) * (1.0 / 9007199254740992.0)


class Stream:
    """A seeded xoshiro256** stream usable from Python code."""

    def __init__(self, seed: int):
        self.seed = seed & MASK64
        self.state = seed_state(self.seed)

    def u64(self) -> int:
        return int(next_u64(self.state))

    def below(self, n: int) -> int:
        return int(next_below(self.state, n))

    def random(self) -> float:
        return float(next_double(self.state))

    def __repr__(self) -> str:
        return f"Stream(seed={self.seed:#018x})"
