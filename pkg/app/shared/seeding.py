"""
Counter-based random streams.

A stream is a pure function of (master seed, spawn key), so the same trial or
person always sees the same numbers no matter which worker runs it or in which
order trials are scheduled.
"""

from dataclasses import dataclass

import numpy as np

MEN = 0
WOMEN = 1
AUX = 2


@dataclass(frozen=True)
class SeedStream:
    master: int

    def __post_init__(self):
        if not 0 <= self.master < 2**64:
            raise ValueError(f"master seed must fit in 64 bits, got {self.master}")

    def trial(self, index: int, point: int = 0) -> "TrialStream":
        return TrialStream(self.master, (point, index))


@dataclass(frozen=True)
class TrialStream:
    master: int
    key: tuple[int, ...]

    def person(self, side: int, index: int) -> np.random.Generator:
        return self._rng(side, index)

    def aux(self, label: int = 0) -> np.random.Generator:
        return self._rng(AUX, label)

    def _rng(self, *suffix: int) -> np.random.Generator:
        seq = np.random.SeedSequence(self.master, spawn_key=self.key + suffix)
        return np.random.default_rng(seq)
