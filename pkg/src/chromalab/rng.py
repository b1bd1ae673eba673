"""Counter-based pseudorandom bits.

Every random decision in this package is a pure function of
``(seed, stream, counter)``: a 64-bit mixing function (the splitmix64
finalizer) applied to a keyed counter.  There is no hidden generator
state, so

* runs are bit-reproducible across platforms and thread counts, and
* any single edge of a sampled graph can be re-derived (or conditioned
  away) without touching the randomness of any other edge.

The scalar and vectorized paths are exercised against each other in the
test suite and must stay identical.
"""

from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_STREAM_SALT = 0xD1B54A32D192ED03

_U = np.uint64


def mix64(z: int) -> int:
    """splitmix64 finalizer (scalar, python ints)."""
    z &= _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def mix64_np(z: np.ndarray) -> np.ndarray:
    """splitmix64 finalizer on a uint64 array (wrapping arithmetic)."""
    z = z ^ (z >> _U(30))
    z = z * _U(0xBF58476D1CE4E5B9)
    z = z ^ (z >> _U(27))
    z = z * _U(0x94D049BB133111EB)
    return z ^ (z >> _U(31))


def derive_key(seed: int, stream: int) -> int:
    """64-bit key for one (seed, stream) pair."""
    return mix64((seed * _GOLDEN) ^ mix64(stream + _STREAM_SALT)) & _MASK


def counter_word(seed: int, stream: int, counter: int) -> int:
    """The 64-bit word at a given counter position."""
    key = derive_key(seed, stream)
    return mix64(((counter + 1) * _GOLDEN + key) & _MASK)


def counter_words_np(seed: int, stream: int, start: int, count: int) -> np.ndarray:
    """Vectorized ``counter_word`` for counters start..start+count-1."""
    key = _U(derive_key(seed, stream))
    idx = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    return mix64_np(idx * _U(_GOLDEN) + key)


def coin_bits(seed: int, stream: int, count: int) -> np.ndarray:
    """``count`` fair-coin bits (bool array), one per counter position."""
    return (counter_words_np(seed, stream, 0, count) >> _U(63)).astype(bool)


class CounterRNG:
    """Sequential convenience wrapper over the counter stream.

    Used where a handful of variates are consumed in order (shuffles,
    inversion sampling).  Bulk edge sampling goes through ``coin_bits``.
    """

    def __init__(self, seed: int, stream: int = 0):
        self.seed = seed
        self.stream = stream
        self._key = derive_key(seed, stream)
        self._counter = 0

    def next_u64(self) -> int:
        self._counter += 1
        return mix64((self._counter * _GOLDEN + self._key) & _MASK)

    def random(self) -> float:
        """Uniform in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * (2.0 ** -53)

    def randrange(self, m: int) -> int:
        """Uniform integer in [0, m) by rejection (unbiased)."""
        if m <= 0:
            raise ValueError("randrange needs m >= 1")
        limit = (1 << 64) - ((1 << 64) % m)
        while True:
            u = self.next_u64()
            if u < limit:
                return u % m

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates shuffle."""
        for i in range(len(items) - 1, 0, -1):
            j = self.randrange(i + 1)
            items[i], items[j] = items[j], items[i]

    def permutation(self, n: int) -> list[int]:
        p = list(range(n))
        self.shuffle(p)
        return p
