"""Classical postselection wrapper over a sampler of ``b + 2`` bits.

An outcome ``y`` is read as ``b + 1`` postselection bits followed by one
output bit. ``0^{b+1}1`` and ``0^{b+1}0`` are kept (post = 0) with the output
bit as the answer; everything else is discarded (post = 1, out = 1).
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from statistics import NormalDist
from typing import Mapping

import numpy as np

from .errors import CircuitError
from .weaksim import _draw_many


@dataclass(frozen=True)
class PostselectOutcome:
    post: int
    out: int


def filter_outcome(y: str) -> PostselectOutcome:
    if len(y) < 2:
        raise CircuitError(f"outcome {y!r} is shorter than 2 bits")
    if set(y) - {"0", "1"}:
        raise CircuitError(f"outcome {y!r} is not a bitstring")
    if "1" in y[:-1]:
        return PostselectOutcome(1, 1)
    return PostselectOutcome(0, int(y[-1]))


@dataclass(frozen=True)
class AcceptanceEstimate:
    """``Pr[out = 1 | post = 0]`` with a Wilson interval (degenerate in exact mode)."""
    value: float
    lower: float
    upper: float
    post_zero: float      # count of post = 0 events, or their probability in exact mode
    accepted: float
    shots: int | None
    confidence: float
    exact: bool

    def to_json(self) -> dict:
        return {"value": self.value, "interval": [self.lower, self.upper],
                "post_zero": self.post_zero, "accepted": self.accepted,
                "shots": self.shots, "confidence": self.confidence, "exact": self.exact}


@dataclass(frozen=True)
class NoPostselectionMass:
    """No ``post = 0`` event was seen (or it has probability 0): the ratio is undefined."""
    shots: int | None
    exact: bool

    post_zero = 0

    def to_json(self) -> dict:
        return {"value": None, "reason": "no postselection mass", "shots": self.shots,
                "exact": self.exact}


def wilson_interval(successes: int, trials: int, confidence: float = 0.99) -> tuple[float, float]:
    if trials <= 0:
        raise ValueError("trials must be positive")
    z = NormalDist().inv_cdf(0.5 + confidence / 2)
    p = successes / trials
    denom = 1 + z * z / trials
    centre = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    return max(0.0, centre - half), min(1.0, centre + half)


def exact_acceptance(distribution: Mapping[str, float]):
    """Ratio ``Pr[0^{b+1}1] / (Pr[0^{b+1}1] + Pr[0^{b+1}0])`` from a full distribution."""
    probs = getattr(distribution, "probs", distribution)
    acc = rej = 0.0
    for y, p in probs.items():
        o = filter_outcome(y)
        if o.post == 0:
            if o.out:
                acc += p
            else:
                rej += p
    mass = acc + rej
    if mass <= 0:
        return NoPostselectionMass(None, True)
    return AcceptanceEstimate(acc / mass, acc / mass, acc / mass, mass, acc, None, 1.0, True)


def from_counts(counts: Mapping[str, int], confidence: float = 0.99):
    shots = int(sum(counts.values()))
    kept = accepted = 0
    for y, c in counts.items():
        o = filter_outcome(y)
        if o.post == 0:
            kept += c
            accepted += c * o.out
    if kept == 0:
        return NoPostselectionMass(shots, False)
    lo, hi = wilson_interval(accepted, kept, confidence)
    return AcceptanceEstimate(accepted / kept, lo, hi, kept, accepted, shots, confidence, False)


def conditional_acceptance(sampler, x, shots: int, seed, exact: bool = False,
                           confidence: float = 0.99):
    """Estimate ``Pr[out = 1 | post = 0]`` from ``shots`` seeded draws, or exactly.

    ``sampler`` is called as ``sampler(x, rng)`` (or ``sampler.sample_many``);
    exact mode needs ``sampler.distribution(x)``.
    """
    if exact:
        if not hasattr(sampler, "distribution"):
            raise TypeError("exact mode needs a sampler exposing distribution(x)")
        return exact_acceptance(sampler.distribution(x))
    if shots < 1:
        raise ValueError("shots must be >= 1")
    rng = np.random.default_rng(seed)
    return from_counts(Counter(_draw_many(sampler, x, rng, shots)), confidence)


@dataclass(frozen=True)
class ThresholdReport:
    estimate: AcceptanceEstimate | NoPostselectionMass
    accept_at: float
    reject_at: float

    @property
    def verdict(self) -> str:
        """accept / reject when the whole interval clears a threshold, else inconclusive."""
        e = self.estimate
        if isinstance(e, NoPostselectionMass):
            return "no-mass"
        if e.lower >= self.accept_at:
            return "accept"
        if e.upper <= self.reject_at:
            return "reject"
        return "inconclusive"

    def to_json(self) -> dict:
        return {"estimate": self.estimate.to_json(), "accept_at": self.accept_at,
                "reject_at": self.reject_at, "verdict": self.verdict}


def threshold_report(estimate, accept_at: float = 3 / 5, reject_at: float = 2 / 5) -> ThresholdReport:
    if not 0 <= reject_at <= accept_at <= 1:
        raise ValueError("need 0 <= reject_at <= accept_at <= 1")
    return ThresholdReport(estimate, accept_at, reject_at)
