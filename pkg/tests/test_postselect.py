import itertools

import numpy as np
import pytest

from ccsim import constructions as K, gates as G, postselect as PS, statevector as sv, weaksim as W
from ccsim.circuit import INPUT, ZERO, Circuit
from ccsim.errors import CircuitError


def test_filter_examples():
    assert PS.filter_outcome("0001") == PS.PostselectOutcome(0, 1)
    assert PS.filter_outcome("0000") == PS.PostselectOutcome(0, 0)
    assert PS.filter_outcome("0101") == PS.PostselectOutcome(1, 1)
    with pytest.raises(CircuitError):
        PS.filter_outcome("1")


def test_exact_ratio():
    table = {"0001": 0.2, "0000": 0.1, "0101": 0.3, "1111": 0.4}
    est = PS.exact_acceptance(table)
    assert est.value == pytest.approx(2 / 3) and est.post_zero == pytest.approx(0.3)
    assert isinstance(PS.exact_acceptance({"11": 1.0}), PS.NoPostselectionMass)


def test_no_mass_from_counts():
    res = PS.conditional_acceptance(W.TableSampler({"10": 1.0}), (), 100, 0)
    assert isinstance(res, PS.NoPostselectionMass) and res.shots == 100


def _toy():
    c = Circuit(3, [G.h(0), G.t(0), G.h(0), G.cnot(0, 1), G.h(2), G.cr(2, 0, 2)],
                (INPUT, ZERO, ZERO), outputs=(0,), postselect=(1, 2))
    return c


def test_exact_mode_matches_oracle():
    a = _toy()
    sampler = W.OracleFSampler(a, a.postselect + a.outputs)
    for x in ((0,), (1,)):
        est = PS.conditional_acceptance(sampler, x, 1, 0, exact=True)
        want = sv.conditional_distribution(a, x, {1: 0, 2: 0}, (0,))["1"]
        assert abs(est.value - want) <= 1e-9


def test_sampled_within_wilson():
    a = _toy()
    sampler = W.OracleFSampler(a, a.postselect + a.outputs)
    exact = PS.conditional_acceptance(sampler, (0,), 1, 0, exact=True).value
    est = PS.conditional_acceptance(sampler, (0,), 100000, 5)
    assert est.lower <= exact <= est.upper
    assert est.post_zero > 0 and est.shots == 100000


def test_wilson_and_report():
    lo, hi = PS.wilson_interval(50, 100, 0.95)
    assert lo < 0.5 < hi and hi - lo == pytest.approx(0.19, abs=0.01)
    est = PS.AcceptanceEstimate(0.8, 0.7, 0.9, 10, 8, 10, 0.99, False)
    assert PS.threshold_report(est).verdict == "accept"
    assert PS.threshold_report(PS.AcceptanceEstimate(0.5, 0.3, 0.7, 1, 1, 1, 0.99, False)).verdict == "inconclusive"
    with pytest.raises(ValueError):
        PS.threshold_report(est, 0.2, 0.4)
