"""Portable deterministic random number generation.

All randomness in this package flows through xoshiro256++ seeded via
splitmix64, both fixed published algorithms with reference
implementations in C (Blackman & Vigna). Any language can therefore
reproduce the exact same synthetic datasets and splits from the same
64-bit seed, which keeps benchmark numbers portable.

Stream derivation rules (load-bearing for reproducibility):

* ``uniform`` uses the top 53 bits of one 64-bit output: ``(x >> 11) * 2**-53``.
* ``normal`` is Box-Muller on two uniforms ``u1, u2``; ``u1`` is mapped to
  ``1 - u`` so the log argument is never zero. The cosine variate is
  returned first, the sine variate is cached and returned next.
* ``bernoulli(p)`` is ``uniform() < p``.
* ``integer(n)`` is ``min(floor(uniform() * n), n - 1)``.
"""

from __future__ import annotations

import math

_MASK64 = (1 << 64) - 1


def splitmix64(state: int) -> tuple[int, int]:
    """Advance a splitmix64 state once; returns (output, new_state)."""
    state = (state + 0x9E3779B97F4A7C15) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64, state


def derive_seeds(seed: int, count: int) -> list[int]:
    """Expand one 64-bit seed into ``count`` independent sub-seeds.

    Used to derive the data-generation and split seeds from a single
    experiment seed without correlating their streams.
    """
    state = seed & _MASK64
    out = []
    for _ in range(count):
        value, state = splitmix64(state)
        out.append(value)
    return out


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & _MASK64


class Xoshiro256PlusPlus:
    """xoshiro256++ with splitmix64 state initialization."""

    __slots__ = ("_s", "_spare_normal")

    def __init__(self, seed: int):
        if seed < 0 or seed > _MASK64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        state = seed
        s = []
        for _ in range(4):
            value, state = splitmix64(state)
            s.append(value)
        self._s = s
        self._spare_normal: float | None = None

    def next_uint64(self) -> int:
        s = self._s
        result = (_rotl((s[0] + s[3]) & _MASK64, 23) + s[0]) & _MASK64
        t = (s[1] << 17) & _MASK64
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = _rotl(s[3], 45)
        return result

    def uniform(self) -> float:
        """One double in [0, 1) from the top 53 bits."""
        return (self.next_uint64() >> 11) * 2.0**-53

    def normal(self) -> float:
        """One standard normal variate (Box-Muller, cached pair)."""
        if self._spare_normal is not None:
            z = self._spare_normal
            self._spare_normal = None
            return z
        u1 = 1.0 - self.uniform()  # in (0, 1], log never sees zero
        u2 = self.uniform()
        radius = math.sqrt(-2.0 * math.log(u1))
        angle = 2.0 * math.pi * u2
        self._spare_normal = radius * math.sin(angle)
        return radius * math.cos(angle)

    def normals(self, count: int) -> list[float]:
        return [self.normal() for _ in range(count)]

    def bernoulli(self, p: float) -> int:
        return 1 if self.uniform() < p else 0

    def integer(self, n: int) -> int:
        """Uniform integer in [0, n)."""
        if n <= 0:
            raise ValueError("n must be positive")
        return min(int(self.uniform() * n), n - 1)

    def shuffle_indices(self, n: int) -> list[int]:
        """Fisher-Yates permutation of range(n), drawing j in [0, i]."""
        idx = list(range(n))
        for i in range(n - 1, 0, -1):
            j = self.integer(i + 1)
            idx[i], idx[j] = idx[j], idx[i]
        return idx
