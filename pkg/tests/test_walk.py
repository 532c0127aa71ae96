"""Step-distribution construction, hypothesis checks, drift, classification."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qhp.errors import ValidationError
from qhp.walk import (
    Regime,
    StepDistribution,
    classify,
    drift,
    dumps_walk,
    loads_walk,
    preset,
    random_zero_drift,
    validate,
)


def test_voter_preset_entries():
    v = preset("voter")
    assert len(v.steps) == 6
    for _, p in v.steps:
        assert p == pytest.approx(1.0 / 6.0, abs=0)
    assert v.prob(1, 1) == 0.0 and v.prob(-1, -1) == 0.0


def test_tandem_preset_entries():
    t = preset("tandem", (0.2, 0.4))
    assert t.probs == {(1, 0): 0.2, (0, -1): 0.4, (-1, 1): 0.4}


def test_nucleosome_preset_formula():
    lam, nu = 1.0, 2.0
    n = preset("nucleosome", (lam, nu))
    denom = 2.0 * (2.0 * lam + nu)
    for s in [(1, 0), (-1, 0), (0, 1), (0, -1)]:
        assert n.prob(*s) == pytest.approx(lam / denom, rel=1e-15)
    for s in [(1, -1), (-1, 1)]:
        assert n.prob(*s) == pytest.approx(nu / denom, rel=1e-15)


def test_preset_errors():
    with pytest.raises(ValidationError):
        preset("unknown")
    with pytest.raises(ValidationError):
        preset("tandem", (0.2, 0.3))  # lam + 2 nu != 1
    with pytest.raises(ValidationError):
        preset("asym_simple", (0.5, 0.5, 0.5, -0.5))


def test_malformed_distributions():
    with pytest.raises(ValidationError):
        StepDistribution.from_probs({(0, 0): 1.0})
    with pytest.raises(ValidationError):
        StepDistribution.from_probs({(1, 0): 0.7, (0, 1): 0.2})  # bad sum
    with pytest.raises(ValidationError):
        StepDistribution.from_probs({(1, 0): -0.1, (0, 1): 1.1})
    with pytest.raises(ValidationError):
        StepDistribution.from_probs({(2, 0): 1.0})


def test_validate_voter():
    rep = validate(preset("voter"))
    assert rep.h1 and rep.h2 and rep.h3 and rep.h4
    assert not rep.h2prime


def test_validate_diagonal_only_walk():
    p = StepDistribution.from_probs({(1, 1): 0.5, (-1, -1): 0.5})
    rep = validate(p)
    assert not rep.h2  # three consecutive zeros in the cyclic list
    assert not rep.h3  # all mass on diagonals


def test_validate_tandem_all_pass():
    rep = validate(preset("tandem", (0.2, 0.4)))
    assert rep.h1 and rep.h2 and rep.h3 and rep.h4


def test_h2prime_family():
    p = StepDistribution.from_probs(
        {(-1, 1): 0.3, (-1, 0): 0.2, (0, -1): 0.3, (1, -1): 0.2})
    rep = validate(p)
    assert rep.h2prime
    assert not rep.h2  # N, NE, E all zero wraps to three consecutive zeros
    assert classify(p).tag is Regime.H2PRIME


def test_h2prime_needs_side_conditions():
    # same family but p(-1,1) = 0: not in the supported degenerate class
    p = StepDistribution.from_probs({(-1, 0): 0.5, (0, -1): 0.3, (1, -1): 0.2})
    rep = validate(p)
    assert not rep.h2prime
    assert classify(p).tag is Regime.UNSUPPORTED


def test_drift_values():
    assert drift(preset("voter")).as_tuple() == (0.0, 0.0)
    assert drift(preset("tandem", (0.2, 0.4))).as_tuple() == pytest.approx((-0.2, 0.0), abs=1e-15)
    a = preset("asym_simple", (0.2, 0.3, 0.2, 0.3))
    assert drift(a).as_tuple() == pytest.approx((-0.1, -0.1), rel=1e-12)


def test_classify_presets():
    assert classify(preset("voter")).tag is Regime.ZERO_ZERO
    assert classify(preset("simple")).tag is Regime.ZERO_ZERO
    assert classify(preset("nucleosome", (1.0, 2.0))).tag is Regime.ZERO_ZERO
    assert classify(preset("tandem", (0.2, 0.4))).tag is Regime.NEG_ZERO
    assert classify(preset("asym_simple", (0.2, 0.3, 0.2, 0.3))).tag is Regime.NEG_NEG
    # zero horizontal drift, negative vertical: still the geometric regime
    assert classify(preset("asym_simple", (0.25, 0.25, 0.2, 0.3))).tag is Regime.NEG_NEG


@settings(max_examples=50, deadline=None)
@given(st.integers(min_value=0, max_value=2 ** 32 - 1), st.integers(min_value=0, max_value=6))
def test_classify_stable_under_tiny_perturbation(seed, which):
    """Perturbing one probability below tolerance never changes the tag."""
    rng = np.random.default_rng(seed)
    p = random_zero_drift(rng)
    tag = classify(p).tag
    probs = p.probs
    key = sorted(probs)[which % len(probs)]
    probs[key] += 9e-14
    total = math.fsum(probs.values())
    probs = {k: v / total for k, v in probs.items()}
    assert classify(StepDistribution.from_probs(probs)).tag is tag


def test_random_zero_drift_is_exact():
    rng = np.random.default_rng(7)
    for _ in range(25):
        p = random_zero_drift(rng)
        assert drift(p).as_tuple() == (0.0, 0.0)
        assert classify(p).tag is Regime.ZERO_ZERO


def test_walk_spec_roundtrip():
    p = preset("tandem", (0.2, 0.4))
    q = loads_walk(dumps_walk(p))
    assert q.probs == p.probs


def test_walk_spec_string_probabilities():
    doc = '{"steps": [{"di": 1, "dj": 0, "p": "0.5"}, {"di": 0, "dj": 1, "p": 0.5}]}'
    p = loads_walk(doc)
    assert p.prob(1, 0) == 0.5


def test_walk_spec_duplicate_step_rejected():
    doc = ('{"steps": [{"di": 1, "dj": 0, "p": 0.5}, '
           '{"di": 1, "dj": 0, "p": 0.5}]}')
    with pytest.raises(ValidationError):
        loads_walk(doc)


def test_walk_spec_bad_json_rejected():
    with pytest.raises(ValidationError):
        loads_walk("{not json")
    with pytest.raises(ValidationError):
        loads_walk('{"steps": {"di": 1}}')
