"""Exact dyadic angles.

A :class:`DyadicPhase` is the angle ``2*pi * numerator / 2**MAX_LEVEL`` with
the numerator kept as a Python int reduced modulo ``2**MAX_LEVEL``. The gate
angles ``sign * 2*pi / 2**k`` are special cases; sums of them stay exact.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from . import config


@dataclass(frozen=True, order=True)
class DyadicPhase:
    numerator: int = 0
    max_level: int = config.MAX_LEVEL

    def __post_init__(self):
        if self.max_level < 0:
            raise ValueError("max_level must be non-negative")
        object.__setattr__(self, "numerator", self.numerator % (1 << self.max_level))

    @classmethod
    def from_level(cls, sign: int, level: int, max_level: int | None = None) -> DyadicPhase:
        """The angle ``sign * 2*pi / 2**level``."""
        K = config.MAX_LEVEL if max_level is None else max_level
        if sign not in (1, -1):
            raise ValueError(f"sign must be +1 or -1, got {sign}")
        if not 0 <= level <= K:
            raise ValueError(f"level {level} outside [0, {K}]")
        return cls(sign * (1 << (K - level)), K)

    @classmethod
    def zero(cls, max_level: int | None = None) -> DyadicPhase:
        return cls(0, config.MAX_LEVEL if max_level is None else max_level)

    @classmethod
    def snap(cls, angle: float, tol: float = 1e-9, max_snap_level: int | None = None,
             max_level: int | None = None) -> DyadicPhase | None:
        """Nearest dyadic angle at the coarsest level within ``tol`` radians, else None."""
        K = config.MAX_LEVEL if max_level is None else max_level
        top = min(K, config.SNAP_MAX_LEVEL if max_snap_level is None else max_snap_level)
        turns = (angle / (2 * math.pi)) % 1.0
        for k in range(top + 1):
            num = round(turns * (1 << k))
            err = abs(turns * (1 << k) - num) * 2 * math.pi / (1 << k)
            if err <= tol:
                return cls((num % (1 << k)) << (K - k), K)
        return None

    def _check(self, other: DyadicPhase):
        if self.max_level != other.max_level:
            raise ValueError("cannot combine phases with different max_level")

    def __add__(self, other: DyadicPhase) -> DyadicPhase:
        self._check(other)
        return DyadicPhase(self.numerator + other.numerator, self.max_level)

    def __sub__(self, other: DyadicPhase) -> DyadicPhase:
        self._check(other)
        return DyadicPhase(self.numerator - other.numerator, self.max_level)

    def __neg__(self) -> DyadicPhase:
        return DyadicPhase(-self.numerator, self.max_level)

    def __mul__(self, times: int) -> DyadicPhase:
        return DyadicPhase(self.numerator * int(times), self.max_level)

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return self.numerator == 0

    @property
    def level(self) -> int | None:
        """k when the angle is exactly +-2*pi/2**k, else None."""
        sl = self.sign_level()
        return None if sl is None else sl[1]

    @property
    def sign(self) -> int | None:
        sl = self.sign_level()
        return None if sl is None else sl[0]

    def sign_level(self) -> tuple[int, int] | None:
        K, num = self.max_level, self.numerator
        if num == 0:
            return (1, 0)
        for cand, sign in ((num, 1), ((1 << K) - num, -1)):
            if cand & (cand - 1) == 0:
                return (sign, K - cand.bit_length() + 1)
        return None

    @property
    def turns(self) -> float:
        return self.numerator / (1 << self.max_level)

    @property
    def radians(self) -> float:
        return 2 * math.pi * self.turns

    def exp(self) -> complex:
        """e^{i*angle}; the only place a phase becomes floating point."""
        # exact for the quarter turns so Clifford phases carry no rounding
        q, r = divmod(self.numerator << 2, 1 << self.max_level)
        if r == 0:
            return (1, 1j, -1, -1j)[q % 4]
        return cmath.exp(1j * self.radians)

    def __repr__(self) -> str:
        sl = self.sign_level()
        if sl is not None:
            return f"DyadicPhase({'+' if sl[0] > 0 else '-'}2pi/2^{sl[1]})"
        return f"DyadicPhase({self.numerator}/2^{self.max_level} turn)"
