import math

import pytest
from hypothesis import assume, given, strategies as st

from holonomy_lab.exchange import Anyon, Boson, ExchangePhase, Fermion, circulation_phase, classify
from holonomy_lab.phase import phase_distance


def test_circulation_examples():
    assert phase_distance(circulation_phase(ExchangePhase(math.pi)), 0.0) <= 1e-12
    assert circulation_phase(ExchangePhase(0.0)) == 0.0
    assert circulation_phase(ExchangePhase(math.pi / 3, 2)) == pytest.approx(2 * math.pi / 3)
    assert phase_distance(circulation_phase(ExchangePhase(math.pi, 3)), 0.0) <= 1e-12


def test_classify_examples():
    assert classify(ExchangePhase(0.0)) == Boson()
    assert classify(ExchangePhase(math.pi)) == Fermion()
    got = classify(ExchangePhase(math.pi / 3, 2))
    assert isinstance(got, Anyon)
    assert got.theta == pytest.approx(math.pi / 3)
    assert (Boson().name, Fermion().name, got.name) == ("boson", "fermion", "anyon")


def test_three_dimensional_restriction():
    with pytest.raises(ValueError):
        ExchangePhase(math.pi / 2, 3)
    with pytest.raises(ValueError):
        ExchangePhase(math.pi / 3, 3)
    assert classify(ExchangePhase(0.0, 3)) == Boson()
    for theta in (math.pi, -math.pi):
        assert classify(ExchangePhase(theta, 3)) == Fermion()
    assert classify(ExchangePhase(2 * math.pi, 3)) == Boson()
    with pytest.raises(ValueError):
        ExchangePhase(0.0, 4)


@given(st.floats(-50, 50))
def test_classification_is_periodic(theta):
    # at exactly the tolerance edge a one-ulp shift may legitimately change the class
    for anchor in (0.0, math.pi):
        assume(abs(phase_distance(theta, anchor) - 1e-9) > 1e-12)
    a = classify(ExchangePhase(theta))
    b = classify(ExchangePhase(theta + 2 * math.pi))
    assert type(a) is type(b)
    if isinstance(a, Anyon):
        assert phase_distance(a.theta, b.theta) <= 1e-12
