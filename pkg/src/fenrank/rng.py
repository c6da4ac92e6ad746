"""Deterministic random number generation.

Everything stochastic in this package draws from SplitMix64 generators so
runs reproduce bit-for-bit across platforms and Python versions, which the
stdlib Mersenne Twister does not guarantee for all derived helpers. Each
unit of work gets its own stream derived from (seed, index), so results do
not depend on scheduling or worker count.
"""
from __future__ import annotations

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    """SplitMix64 output finalizer (Steele, Lea, Flood 2014)."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


class SplitMix64:
    """Seeded 64-bit generator with a uniform integer helper."""

    __slots__ = ("_state",)

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + _GOLDEN) & _MASK64
        return mix64(self._state)

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi], rejection sampled to avoid modulo bias."""
        if hi < lo:
            raise ValueError(f"empty range [{lo}, {hi}]")
        span = hi - lo + 1
        # Largest multiple of span below 2**64; values past it would skew the tail.
        limit = (1 << 64) - ((1 << 64) % span)
        while True:
            u = self.next_u64()
            if u < limit:
                return lo + (u % span)

    def sample_indices(self, population: int, count: int) -> list[int]:
        """Distinct indices from range(population), returned ascending."""
        if count > population:
            raise ValueError(f"cannot draw {count} distinct from {population}")
        chosen: set[int] = set()
        while len(chosen) < count:
            chosen.add(self.randint(0, population - 1))
        return sorted(chosen)

    def choice(self, items):
        return items[self.randint(0, len(items) - 1)]


def derive_stream(seed: int, index: int) -> SplitMix64:
    """Independent generator for work unit ``index`` under ``seed``.

    The derivation is mix64(mix64(seed) + index * GOLDEN): part of the
    reproducibility contract, so changing it is a breaking change.
    """
    return SplitMix64(mix64((mix64(seed) + (index & _MASK64) * _GOLDEN) & _MASK64))
