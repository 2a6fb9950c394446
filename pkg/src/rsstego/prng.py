"""SplitMix64-seeded xoshiro256** and an unbiased Fisher-Yates permutation.

The generator is fixed so that a shuffle seed produces the same permutation
on every platform.  :class:`Xoshiro256StarStar` is the readable reference;
:func:`fisher_yates` runs the identical algorithm compiled with numba, since
payloads reach millions of symbols.
"""

from __future__ import annotations

import numba
import numpy as np

MASK64 = 0xFFFFFFFFFFFFFFFF


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & MASK64


class Xoshiro256StarStar:
    def __init__(self, state: tuple[int, int, int, int]):
        if not any(state):
            raise ValueError("xoshiro256** state must not be all zero")
        self.s = [v & MASK64 for v in state]

    @classmethod
    def from_seed(cls, seed: int) -> "Xoshiro256StarStar":
        sm = SplitMix64(seed)
        return cls(tuple(sm.next_u64() for _ in range(4)))

    def next_u64(self) -> int:
        s = self.s
        result = (_rotl((s[1] * 5) & MASK64, 7) * 9) & MASK64
        t = (s[1] << 17) & MASK64
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = _rotl(s[3], 45)
        return result

    def bounded(self, bound: int) -> int:
        """Uniform integer in [0, bound) by rejection sampling."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        limit = (1 << 64) // bound * bound
        while True:
            v = self.next_u64()
            if v < limit:
                return v % bound


def seed_state(seed: int) -> tuple[int, int, int, int]:
    sm = SplitMix64(seed)
    return tuple(sm.next_u64() for _ in range(4))


def fisher_yates_reference(n: int, seed: int) -> list[int]:
    rng = Xoshiro256StarStar.from_seed(seed)
    idx = list(range(n))
    for i in range(n - 1, 0, -1):
        j = rng.bounded(i + 1)
        idx[i], idx[j] = idx[j], idx[i]
    return idx


@numba.njit(cache=True)
def _fisher_yates_kernel(n, s0, s1, s2, s3):
    idx = np.arange(n, dtype=np.int64)
    for i in range(n - 1, 0, -1):
        bound = np.uint64(i + 1)
        # reject v >= floor(2^64 / bound) * bound, i.e. the top (2^64 mod bound) values
        excess = (np.uint64(0) - bound) % bound
        top = np.uint64(0xFFFFFFFFFFFFFFFF) - excess
        while True:
            x = s1 * np.uint64(5)
            r = ((x << np.uint64(7)) | (x >> np.uint64(57))) * np.uint64(9)
            t = s1 << np.uint64(17)
            s2 ^= s0
            s3 ^= s1
            s1 ^= s2
            s0 ^= s3
            s2 ^= t
            s3 = (s3 << np.uint64(45)) | (s3 >> np.uint64(19))
            if r <= top:
                break
        j = np.int64(r % bound)
        tmp = idx[i]
        idx[i] = idx[j]
        idx[j] = tmp
    return idx


def fisher_yates(n: int, seed: int) -> np.ndarray:
    """Permutation of range(n) as an int64 array; ``out[i]`` is the source
    index that lands at position i."""
    s0, s1, s2, s3 = (np.uint64(v) for v in seed_state(seed))
    return _fisher_yates_kernel(np.int64(n), s0, s1, s2, s3)
