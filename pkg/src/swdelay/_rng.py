"""Deterministic 64-bit generator used for disturbance sampling and signals.

The generator is splitmix64 (Steele, Lea, Flood 2014): the state advances by
the golden-gamma constant 0x9E3779B97F4A7C15 and the output is a two-round
xor-multiply mix with constants 0xBF58476D1CE4E5B9 and 0x94D049BB133111EB.
It is reproduced here in full so that sampled disturbances and random dwell
schedules are bit-reproducible across platforms and Python versions, which
the standard library generators do not guarantee for all APIs.

Doubles are drawn by taking the top 53 bits of one output word, giving a
uniform sample on [0, 1) with the full mantissa resolution.
"""

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


class SplitMix64:
    """splitmix64 stream seeded with an arbitrary integer."""

    def __init__(self, seed: int):
        self._state = seed & _MASK

    def next_u64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK
        z = self._state
        z = ((z ^ (z >> 30)) * _MIX1) & _MASK
        z = ((z ^ (z >> 27)) * _MIX2) & _MASK
        return (z ^ (z >> 31)) & _MASK

    def uniform(self, lo: float = 0.0, hi: float = 1.0) -> float:
        """Uniform double in [lo, hi)."""
        u = self.next_u64() >> 11
        return lo + (hi - lo) * (u * 2.0**-53)

    def randint(self, n: int) -> int:
        """Uniform integer in {0, ..., n-1} (modulo; bias negligible here)."""
        if n <= 0:
            raise ValueError("n must be positive")
        return self.next_u64() % n
