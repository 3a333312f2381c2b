import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

from coaltwo.asympt import (
    FORMULAS,
    AsymptoticResult,
    RecombinationLimit,
    P_poly,
    asymptotic_correlation,
    asymptotic_covariance,
    covariance_to_correlation,
    extreme_correlation,
    extreme_covariance,
    limit_moment_ratios,
    order_N_covariance,
    tail_probability,
    tajima_variance_limit,
)
from coaltwo.chain import build_single_locus_matrix
from coaltwo.core import LIVE_STATES, Colocation, Parameters, ScalingScenario, State, resolve_scenario
from coaltwo.exact import exact_correlation, exact_covariance, float_correlation, solve_covariances

F = Fraction
SCENARIOS = [
    ScalingScenario("i", sigma_tilde=1, rho_tilde=F(3, 2)),
    ScalingScenario("i", sigma_tilde=F(1, 2), rho_tilde=4),
    ScalingScenario("ii", s=F(2, 5), rho_tilde=F(3, 2)),
    ScalingScenario("ii", s=F(4, 5), rho_tilde=F(1, 3)),
    ScalingScenario("iii", sigma_tilde=2, r=F(3, 10)),
    ScalingScenario("iii", sigma_tilde=F(1, 2), r=F(1, 2)),
    ScalingScenario("iv", s=F(2, 5), r=F(3, 10)),
    ScalingScenario("iv", s=F(2, 5), r=F(1, 2)),
    ScalingScenario("iv", s=F(4, 5), r=F(7, 10)),
]
BIG_N = 10**5


def _ids(sc):
    return f"{sc.kind.value}-" + "-".join(str(x) for x in (sc.sigma_tilde, sc.rho_tilde, sc.s, sc.r) if x is not None)


@pytest.fixture(scope="module")
def big_covariances():
    return {sc: solve_covariances(resolve_scenario(sc, BIG_N), "float") for sc in SCENARIOS}


@pytest.mark.parametrize("sc", SCENARIOS, ids=_ids)
def test_covariance_laws_track_the_solver(sc, big_covariances):
    cov = big_covariances[sc]
    for st in LIVE_STATES:
        res = asymptotic_covariance(sc, st)
        if res.coefficient is None:
            continue
        scaled = cov[st] / BIG_N**res.power
        c = float(res.coefficient)
        assert abs(scaled - c) <= 5e-3 * max(abs(c), 1), (st.label, scaled, c)


@pytest.mark.parametrize("sc", SCENARIOS, ids=_ids)
def test_correlation_laws_track_the_solver(sc):
    p = resolve_scenario(sc, BIG_N)
    for st in (State.Q5, State.Q11, State.Q12):
        res = asymptotic_correlation(sc, st)
        if res.coefficient is None:
            continue
        ex = float_correlation(p, st)
        lead = float(res.value(BIG_N))
        # the next-order term is O(1/N) relative, except for the small q5 laws
        tol = 2e-2 if st is State.Q5 else 2e-3
        assert ex == pytest.approx(lead, rel=tol), st.label


def test_order_N_deviation_shrinks_like_one_over_N():
    sc = ScalingScenario("iv", s=F(2, 5), r=F(3, 10))
    c = float(order_N_covariance(sc, "q5"))
    devs = [(solve_covariances(resolve_scenario(sc, N), "float")[State.Q5] / N - c) * N for N in (10**4, 10**5, 10**6)]
    assert devs[2] == pytest.approx(devs[1], rel=1e-2)


def test_correlation_laws_equal_normalised_covariance_laws():
    vals = [F(1, 5), F(2, 5), F(4, 5)]
    for s, r, k in itertools.product(vals, [F(1, 5), F(1, 2), F(9, 10)], [F(1, 3), F(2)]):
        for sc in (ScalingScenario("i", sigma_tilde=k, rho_tilde=k + 1), ScalingScenario("ii", s=s, rho_tilde=k),
                   ScalingScenario("iii", sigma_tilde=k, r=r), ScalingScenario("iv", s=s, r=r)):
            for st in (State.Q5, State.Q11, State.Q12):
                a = asymptotic_correlation(sc, st)
                b = covariance_to_correlation(sc, st, asymptotic_covariance(sc, st))
                assert (a.order, a.coefficient) == (b.order, b.coefficient)


def test_printed_scenario_ii_q5_correlation_is_off_by_one_minus_s():
    sc = ScalingScenario("ii", s=F(2, 5), rho_tilde=F(3, 2))
    from coaltwo.asympt import _ctx
    printed = FORMULAS["corr_printed/ii/q5"](_ctx(sc))[1]
    assert asymptotic_correlation(sc, "q5").coefficient == printed * (1 - sc.s)
    ex = float_correlation(resolve_scenario(sc, BIG_N), "q5")
    assert abs(ex - float(printed)) > 0.01


def test_printed_q10_constant_disagrees_with_solver():
    from coaltwo.asympt import _ctx
    sc = ScalingScenario("iv", s=F(2, 5), r=F(3, 10))
    cov = solve_covariances(resolve_scenario(sc, BIG_N), "float")[State.Q10] / BIG_N
    fixed = float(FORMULAS["cov_n/iv/q10"](_ctx(sc))[1])
    printed = float(FORMULAS["cov_n_printed/iv/q10"](_ctx(sc))[1])
    assert cov == pytest.approx(fixed, rel=1e-3)
    assert abs(cov - printed) > 0.05 * abs(cov)


@pytest.mark.parametrize("s", [F(1, 5), F(1, 2), F(4, 5)])
def test_r_half_closed_forms_equal_general_forms(s):
    sc = ScalingScenario("iv", s=s, r=F(1, 2))
    for st in LIVE_STATES:
        if st is State.Q12:
            continue
        tag = f"cov_n_half/iv/{st.label}"
        if tag in FORMULAS:
            assert order_N_covariance(sc, st, simplified=True) == order_N_covariance(sc, st)


def test_limit_moment_tables_difference_is_the_covariance():
    for sc in SCENARIOS[:4]:
        for st in (State.Q5, State.Q11, State.Q12):
            joint, prod = limit_moment_ratios(sc, st)
            assert joint - prod == asymptotic_covariance(sc, st).coefficient


def test_named_values():
    i = ScalingScenario("i", sigma_tilde=1, rho_tilde=1)
    assert asymptotic_covariance(i, "q11") == AsymptoticResult("N^2", F(44, 43), "cov/i/q11")
    assert asymptotic_correlation(i, "q11").coefficient == F(11, 43)
    iv = ScalingScenario("iv", s=F(1, 2), r=F(1, 2))
    assert asymptotic_correlation(iv, "q12").coefficient == F(1, 7)
    iii = ScalingScenario("iii", sigma_tilde=0, r=F(1, 2))
    res = asymptotic_correlation(iii, "q12", allow_zero_sigma=True)
    assert (res.order, res.coefficient) == ("1/N", F(1, 12))
    assert asymptotic_correlation(ScalingScenario("iii", sigma_tilde=1, r=F(1, 2)), "q12").coefficient == F(1, 3)


def test_recombination_limits():
    s = F(2, 5)
    ii = asymptotic_correlation(ScalingScenario("ii", s=s, rho_tilde=10**6), "q12")
    iv = asymptotic_correlation(ScalingScenario("iv", s=s, r=1 - F(1, 10**6)), "q12")
    assert abs(float(ii.coefficient) - 0.2) < 1e-4
    assert abs(float(iv.coefficient) - 0.2) < 1e-4


def test_tajima_limits():
    assert tajima_variance_limit(1, RecombinationLimit(F(1, 2)), "q12") == F(1, 16)
    # the covariance law itself, pushed to r -> 1, gives theta^2 s (1 - s) / 2
    s = F(1, 2)
    derived = tajima_variance_limit(1, ScalingScenario("iv", s=s, r=1 - F(1, 10**9)), "q12")
    assert float(derived) == pytest.approx(float(s * (1 - s) / 2), rel=1e-6)
    order_n = tajima_variance_limit(2, ScalingScenario("iv", s=s, r=F(1, 3)), "q11", N=1000)
    cov = asymptotic_covariance(ScalingScenario("iv", s=s, r=F(1, 3)), "q11")
    assert order_n == 4 * cov.value(1000) / (4 * 1000**2)
    with pytest.raises(ValueError):
        tajima_variance_limit(1, ScalingScenario("iv", s=s, r=F(1, 3)), "q11")


@pytest.mark.parametrize("c,s", [(Colocation.SAME, F(3, 10)), (Colocation.DIFF, F(3, 10)), (Colocation.SAME, F(0))])
def test_tail_probability_matches_chain(c, s):
    N, t = 1000, 0.7
    P = build_single_locus_matrix(Parameters(N, s, 0)).to_float()
    start = np.zeros(3)
    start[1 if c is Colocation.SAME else 2] = 1.0
    alive = 1 - (start @ np.linalg.matrix_power(P, int(N * t)))[0]
    assert tail_probability(t, c, s=s) == pytest.approx(alive, rel=5e-3)


def test_tail_probability_vanishing_selfing():
    assert tail_probability(2.0, Colocation.DIFF, regime="vanishing_s") == pytest.approx(math.exp(-1))
    with pytest.raises(ValueError):
        tail_probability(-1, Colocation.DIFF, s=0)


@pytest.mark.parametrize("N", [5, 30])
@pytest.mark.parametrize("x", [F(0), F(1, 4), F(1, 2), F(3, 4)])
def test_extreme_forms_match_solver(N, x):
    p = Parameters(N, 1, x)
    for st in ("q5", "q12"):
        assert extreme_covariance("total_selfing", p, st).exact == exact_covariance(p, st)
        assert extreme_correlation("total_selfing", p, st).exact == exact_correlation(p, st).exact
    p = Parameters(N, x, 0)
    for st in ("q11", "q12"):
        assert extreme_covariance("no_recombination", p, st).exact == exact_covariance(p, st)
        assert extreme_correlation("no_recombination", p, st).exact == 1


def test_no_recombination_q5_limit():
    s = F(1, 3)
    lead = extreme_covariance("no_recombination", Parameters(10, s, 0), "q5").asymptotic.coefficient
    assert lead == 8 * (1 - s) ** 2 / 9
    N = 20000
    assert float(exact_covariance(Parameters(N, s, 0), "q5", method="float")) / N**2 == pytest.approx(float(lead), rel=1e-3)


def test_P_poly_reduces_to_16R_without_selfing():
    for r in (F(1, 5), F(1, 2), F(4, 5)):
        assert P_poly(r, 0) == 16 * ((1 - r) ** 2 + r**2)


@pytest.mark.parametrize("s,r", [(F(1, 5), F(1, 5)), (F(1, 2), F(4, 5)), (F(4, 5), F(1, 2))])
def test_P_poly_q11_law_tracks_the_solver(s, r):
    sc = ScalingScenario("iv", s=s, r=r)
    c = float(order_N_covariance(sc, "q11"))
    cov = float(exact_covariance(resolve_scenario(sc, BIG_N), "q11", method="float")) / BIG_N
    assert cov == pytest.approx(c, rel=5e-3)


def test_domain_errors():
    with pytest.raises(ValueError):
        asymptotic_covariance(ScalingScenario("iv", s=1, r=F(1, 2)), "q12")
    with pytest.raises(ValueError):
        asymptotic_covariance(ScalingScenario("iv", s=F(1, 2), r=0), "q12")
    with pytest.raises(ValueError):
        asymptotic_correlation(ScalingScenario("iii", sigma_tilde=0, r=F(1, 2)), "q12")
    with pytest.raises(ValueError):
        asymptotic_correlation(ScalingScenario("iv", s=F(1, 2), r=F(1, 2)), "q7")
    with pytest.raises(ValueError):
        order_N_covariance(ScalingScenario("i", sigma_tilde=1, rho_tilde=1), "q11")
    with pytest.raises(TypeError):
        asymptotic_covariance("iv", "q12")
