from decimal import Decimal
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from coaltwo.core import (
    EXTENDED_STATES,
    LIVE_STATES,
    Colocation,
    Parameters,
    ScalingScenario,
    State,
    colocation_signature,
    parse_rational,
    resolve_scenario,
)


def test_parse_rational_forms():
    assert parse_rational("3/10") == Fraction(3, 10)
    assert parse_rational("0.3") == Fraction(3, 10)
    assert parse_rational(" 1e-3 ") == Fraction(1, 1000)
    assert parse_rational(Decimal("0.25")) == Fraction(1, 4)
    assert parse_rational(7) == 7


@pytest.mark.parametrize("bad", ["abc", "1/0", "nan", "inf", "1/x"])
def test_parse_rational_rejects_garbage(bad):
    with pytest.raises(ValueError):
        parse_rational(bad)


def test_parse_rational_rejects_floats_and_bools():
    with pytest.raises(TypeError):
        parse_rational(0.3)
    with pytest.raises(TypeError):
        parse_rational(True)


@given(st.integers(-10**6, 10**6), st.integers(1, 10**6))
def test_parse_rational_roundtrips_fraction_strings(p, q):
    assert parse_rational(f"{p}/{q}") == Fraction(p, q)


@pytest.mark.parametrize("N,s,r", [(1, 0, 0), (5, "-1/2", 0), (5, 0, "3/2"), (5, "11/10", 0)])
def test_parameters_validation(N, s, r):
    with pytest.raises(ValueError):
        Parameters(N, s, r)


def test_parameters_normalise_and_R():
    p = Parameters(10, "0.3", "1/4")
    assert p.s == Fraction(3, 10) and p.r == Fraction(1, 4)
    assert p.R == Fraction(9, 16) + Fraction(1, 16)
    assert hash(p) == hash(Parameters(10, Fraction(3, 10), Fraction(1, 4)))


def test_state_labels_and_parse():
    assert [x.label for x in LIVE_STATES] == [f"q{k}" for k in range(1, 13)]
    assert len(EXTENDED_STATES) == 17
    for state in EXTENDED_STATES:
        assert State.parse(state.label) is state
        assert State.parse(state.name.lower()) is state
    with pytest.raises(ValueError):
        State.parse("q13")


def test_colocation_signatures():
    S, D = Colocation.SAME, Colocation.DIFF
    assert colocation_signature(State.Q2) == (S, D)
    assert colocation_signature(State.Q9) == (D, S)
    assert colocation_signature(State.Q12) == (S, S)
    assert colocation_signature(State.Q11) == (D, D)
    assert colocation_signature("q5") == (S, S)
    with pytest.raises(ValueError):
        colocation_signature(State.BOTH)


def test_scaling_scenario_requirements():
    with pytest.raises(ValueError):
        ScalingScenario("i", sigma_tilde=1)
    sc = ScalingScenario("ii", s="2/5", rho_tilde=3)
    assert not sc.selfing_scales and sc.recombination_scales
    with pytest.raises(ValueError):
        ScalingScenario("iii", sigma_tilde=0, r="1/2").check_asymptotic_domain()
    ScalingScenario("iii", sigma_tilde=0, r="1/2").check_asymptotic_domain(allow_zero_sigma=True)


def test_resolve_scenario_never_clamps():
    sc = ScalingScenario("i", sigma_tilde=1, rho_tilde=3)
    assert resolve_scenario(sc, 500) == Parameters(500, Fraction(1, 500), Fraction(3, 500))
    with pytest.raises(ValueError):
        resolve_scenario(sc, 2)
