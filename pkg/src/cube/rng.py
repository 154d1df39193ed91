"""Deterministic 64-bit generator used for all seeded behavior.

splitmix64 is chosen because an exact port fits in a dozen lines of any
language, which is what makes cross-language trajectory parity testable.
Secrets, seeded start positions, and interleaving schedules all draw from
this single stream definition.
"""

from __future__ import annotations

_MASK64 = (1 << 64) - 1


class Splitmix64:
    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return (z ^ (z >> 31)) & _MASK64

    def next_below(self, bound: int) -> int:
        """Next output reduced modulo bound. Bound must be positive."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        return self.next() % bound


def secret_hex(seed: int) -> str:
    """Lowercase 16-hex-char secret: the first output of the seeded stream."""
    return format(Splitmix64(seed).next(), "016x")
