"""Closed-form large-N behaviour of the two-locus coalescence times.

Every formula is an entry of :data:`FORMULAS`, keyed by a tag such as
``"cov/iv/q12"``. An entry maps the scenario constants to a leading order
in N and its coefficient, so coverage over scenarios and states can be
checked mechanically.

Tag families
------------
cov         leading term of Cov_q[T_i, T_j]
corr        leading term of Corr_q[T_i, T_j]
lim_joint   lim E_q[T_i T_j] / N^2
lim_prod    lim E_q[T_i] E_q[T_j] / N^2
cov_n       lim Cov_q[T_i, T_j] / N where the N^2 term vanishes
cov_n_half  the same at r = 1/2, in simplified form
cov_n_printed  a published O(N) entry that the exact solver contradicts
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from types import SimpleNamespace
from typing import Callable

from .core import (
    Colocation,
    Parameters,
    Scenario,
    ScalingScenario,
    State,
    colocation_signature,
    parse_rational,
)

__all__ = [
    "AsymptoticResult",
    "ExtremeValue",
    "RecombinationLimit",
    "FORMULAS",
    "ORDERS",
    "P_poly",
    "asymptotic_covariance",
    "asymptotic_correlation",
    "covariance_to_correlation",
    "leading_variance",
    "extreme_covariance",
    "extreme_correlation",
    "limit_moment_ratios",
    "order_N_covariance",
    "tail_probability",
    "tajima_variance_limit",
]

# leading order -> power of N
ORDERS = {"N^2": 2, "N": 1, "1": 0, "1/N": -1, "1/N^2": -2}
EXTREME_CASES = ("total_selfing", "no_recombination")
TABULATED_STATES = (State.Q5, State.Q11, State.Q12)


@dataclass(frozen=True)
class AsymptoticResult:
    """Leading behaviour ``coefficient * N**k`` with ``k`` from ``order``.

    ``coefficient`` is None when only the order is known.
    """

    order: str
    coefficient: Fraction | None
    formula_id: str

    def __post_init__(self):
        if self.order not in ORDERS:
            raise ValueError(f"unknown order {self.order!r}")

    @property
    def power(self) -> int:
        return ORDERS[self.order]

    def value(self, N: int) -> Fraction:
        """Leading term evaluated at population size N."""
        if self.coefficient is None:
            raise ValueError(f"{self.formula_id} has no published constant")
        return self.coefficient * Fraction(N) ** self.power


@dataclass(frozen=True)
class ExtremeValue:
    """A total-selfing or no-recombination result.

    Exact rows set ``exact``; leading-order rows set ``asymptotic``.
    """

    formula_id: str
    exact: Fraction | None = None
    asymptotic: AsymptoticResult | None = None


@dataclass(frozen=True)
class RecombinationLimit:
    """Constant selfing ``s`` with recombination pushed to its limit.

    This is rho -> infinity in scenario II, or r -> 1 in scenario IV.
    """

    s: Fraction

    def __post_init__(self):
        s = parse_rational(self.s)
        if not 0 <= s < 1:
            raise ValueError(f"s must lie in [0, 1), got {s}")
        object.__setattr__(self, "s", s)


def P_poly(r, s) -> Fraction:
    """The degree-5 polynomial in s appearing in the scenario iv q11 laws."""
    r, s = Fraction(r), Fraction(s)
    R = (1 - r) ** 2 + r**2
    return ((R - 1) * (2 * r - 1) ** 3 * s**5
            - (R + 2 * r**2) * (2 * R - 1) * s**4
            + (32 * r**4 - 40 * R * r + 8 * r + 4) * s**3
            + 8 * r * (2 * r - 1) * s**2
            - (40 * R - 24) * s
            + 16 * R)


def _ctx(sc: ScalingScenario) -> SimpleNamespace:
    s = Fraction(0) if sc.selfing_scales else sc.s
    r = None if sc.recombination_scales else sc.r
    rho = sc.rho_tilde
    c = SimpleNamespace(s=s, r=r, sig=sc.sigma_tilde, rho=rho)
    if r is not None:
        c.R = (1 - r) ** 2 + r**2
        # shared denominator of the scenario iv O(N) table
        c.D4 = 4 * r * (1 - s) * (s * c.R - 2) * (r * s + r - s - 2) * (2 * r * s - s + 2)
    if rho is not None:
        c.lam = 8 * rho**2 + 26 * rho + 9
        c.lam2 = 8 * rho**2 * s**2 - 16 * rho**2 * s - 26 * rho * s + c.lam
    return c


Entry = Callable[[SimpleNamespace], tuple[str, Fraction | None]]
FORMULAS: dict[str, Entry] = {}


def _reg(tag: str, order: str, fn: Callable[[SimpleNamespace], Fraction | None]) -> None:
    FORMULAS[tag] = lambda c, _o=order, _f=fn: (_o, _f(c))


# --- lim E[T_i T_j] / N^2 -------------------------------------------------
for k in range(1, 13):
    tail = 8 if k <= 6 else 12
    if k >= 11:
        _reg(f"lim_joint/i/q{k}", "N^2", lambda c: (4 * c.lam + 8 * c.rho + 36) / c.lam)
    else:
        _reg(f"lim_joint/i/q{k}", "N^2", lambda c, t=tail: (4 * c.lam + t) / c.lam)
    _reg(f"lim_joint/iii/q{k}", "N^2", lambda c: Fraction(4))

_same_diff = lambda c: 2 * (1 - c.s) * (2 - c.s)  # noqa: E731
_diff_diff = lambda c: (2 - c.s) ** 2  # noqa: E731
_same_same = lambda c: 4 * (1 - c.s) ** 2  # noqa: E731
_PROD = {1: _diff_diff, 2: _same_diff, 3: _same_diff, 4: _diff_diff, 5: _same_same, 6: _diff_diff,
         7: _diff_diff, 8: _same_diff, 9: _same_diff, 10: _diff_diff, 11: _diff_diff, 12: _same_same}

_LIM_II = {
    1: lambda c: (c.s - 2) ** 2 * (c.lam2 + 2) / c.lam2,
    2: lambda c: 2 * (1 - c.s) * (2 - c.s) * (c.lam2 + 2) / c.lam2,
    3: lambda c: 2 * (1 - c.s) * (2 - c.s) * (c.lam2 + 2) / c.lam2,
    4: lambda c: ((2 - c.s) ** 2 * c.lam2 + (2 - c.s) * (4 - c.s)) / c.lam2,
    5: lambda c: 4 * (1 - c.s) ** 2 * (c.lam2 + 2) / c.lam2,
    6: lambda c: ((2 - c.s) ** 2 * c.lam2 - 2 * c.rho * c.s**3 + 2 * c.rho * c.s**2
                  + 5 * c.s**2 - 4 * c.s + 8) / c.lam2,
    7: lambda c: (2 - c.s) ** 2 * (c.lam2 + 3) / c.lam2,
    8: lambda c: 2 * (1 - c.s) * (2 - c.s) * (c.lam2 + 3) / c.lam2,
    9: lambda c: 2 * (1 - c.s) * (2 - c.s) * (c.lam2 + 3) / c.lam2,
    10: lambda c: (2 - c.s) * ((2 - c.s) * c.lam2 - 2 * c.rho * c.s**2 + 2 * c.rho * c.s
                               + 3 * c.s + 6) / c.lam2,
    11: lambda c: (2 - c.s) ** 2 * (c.lam2 - 2 * c.rho * c.s + 2 * c.rho + 9) / c.lam2,
    12: lambda c: 2 * (1 - c.s) * (2 - c.s) * (c.lam2 - 2 * c.rho * c.s + 2 * c.rho + 9) / c.lam2,
}
for k in range(1, 13):
    _reg(f"lim_joint/ii/q{k}", "N^2", _LIM_II[k])
    _reg(f"lim_joint/iv/q{k}", "N^2", _PROD[k] if k < 12 else
         (lambda c: 2 * (c.s - 1) * (c.s - 2) ** 2 / (2 * c.s * c.r**2 - 2 * c.s * c.r + c.s - 2)))
    _reg(f"lim_prod/i/q{k}", "N^2", lambda c: Fraction(4))
    _reg(f"lim_prod/ii/q{k}", "N^2", _PROD[k])
    _reg(f"lim_prod/iii/q{k}", "N^2", lambda c: Fraction(4))
    _reg(f"lim_prod/iv/q{k}", "N^2", _PROD[k])

# --- lim Cov / N in the r = O(1) scenarios --------------------------------
for k in range(1, 11):
    _reg(f"cov_n/iii/q{k}", "N", lambda c: Fraction(0))
_reg("cov_n/iii/q11", "N", lambda c: 2 * c.R / (c.r * (2 - c.r)))
_reg("cov_n/iii/q12", "N", lambda c: 2 * c.R * (c.sig * c.r * (2 - c.r) + (1 - c.r) ** 2)
     / (c.r * (2 - c.r)))

for k in (1, 2, 3, 4, 7):
    _reg(f"cov_n/iv/q{k}", "N", lambda c: Fraction(0))
    _reg(f"cov_n_half/iv/q{k}", "N", lambda c: Fraction(0))
_reg("cov_n/iv/q5", "N", lambda c: 2 * c.s**3 * (1 - c.s) * (2 * c.R + c.s - 2 * c.s * c.R)
     / ((4 - c.s**2) * (2 - c.s * c.R)))
_reg("cov_n/iv/q6", "N", lambda c: c.s**2 * (2 - c.s) * (
    (16 * c.r**5 - 40 * c.r**4 + 36 * c.r**3 - 14 * c.r**2 + 2 * c.r) * c.s**3
    + (16 * c.r**4 - 40 * c.r**3 + 24 * c.r**2 - 2 * c.r - 1) * c.s**2
    - 8 * c.r * (2 * c.r**2 - c.r - 1) * c.s + 8 * c.r + 4) / c.D4)
_reg("cov_n/iv/q8", "N", lambda c: c.s**2 * (1 - c.s) * (2 * c.R + c.s - 2 * c.s * c.R)
     / ((2 - c.s) * (2 - c.s * c.R)))
_reg("cov_n/iv/q9", "N", lambda c: c.s**2 * (1 - c.s) * (2 * c.R + c.s - 2 * c.s * c.R)
     / ((2 - c.s) * (2 - c.s * c.R)))


def _q10_order_n(c, const):
    return c.s * (2 - c.s) * (
        (16 * c.r**5 - 40 * c.r**4 + 36 * c.r**3 - 14 * c.r**2 + 2 * c.r) * c.s**4
        - (16 * c.r**3 - 24 * c.r**2 + 10 * c.r - 1) * c.s**3
        + (16 * c.r**4 - 48 * c.r**3 + 36 * c.r**2 - 4 * c.r - 2) * c.s**2
        + (24 * c.r**3 - 52 * c.r**2 + 36 * c.r - 4) * c.s
        - 16 * c.r**3 + 24 * c.r**2 - 8 * c.r + const) / c.D4


# The published q10 row ends in "- 8"; the exact solver and the r = 1/2
# closed form both require "+ 8". The printed variant is kept for audit.
_reg("cov_n/iv/q10", "N", lambda c: _q10_order_n(c, 8))
_reg("cov_n_printed/iv/q10", "N", lambda c: _q10_order_n(c, -8))
_reg("cov_n/iv/q11", "N", lambda c: (2 - c.s) * (
    (16 * c.r**5 - 40 * c.r**4 + 36 * c.r**3 - 14 * c.r**2 + 2 * c.r) * c.s**5
    - (16 * c.r**4 - 24 * c.r**3 + 16 * c.r**2 - 6 * c.r + 1) * c.s**4
    + (32 * c.r**4 - 80 * c.r**3 + 80 * c.r**2 - 32 * c.r + 4) * c.s**3
    + 8 * c.r * (2 * c.r - 1) * c.s**2
    - (80 * c.r**2 - 80 * c.r + 16) * c.s
    + 32 * c.r**2 - 32 * c.r + 16) / c.D4)
_reg("cov_n_half/iv/q5", "N", lambda c: 4 * c.s**3 * (1 - c.s) / ((4 - c.s) * (2 - c.s) * (c.s + 2)))
_reg("cov_n_half/iv/q6", "N", lambda c: 4 * c.s**2 * (2 - c.s) * (2 + c.s)
     / ((1 - c.s) * (3 + c.s) * (4 - c.s)))
_reg("cov_n_half/iv/q8", "N", lambda c: 2 * c.s**2 * (1 - c.s) / ((4 - c.s) * (2 - c.s)))
_reg("cov_n_half/iv/q9", "N", lambda c: 2 * c.s**2 * (1 - c.s) / ((4 - c.s) * (2 - c.s)))
_reg("cov_n_half/iv/q10", "N", lambda c: 4 * c.s * (2 - c.s) * (2 + c.s)
     / ((1 - c.s) * (3 + c.s) * (4 - c.s)))
_reg("cov_n_half/iv/q11", "N", lambda c: 4 * (2 - c.s) * (2 + c.s)
     / ((1 - c.s) * (3 + c.s) * (4 - c.s)))

# --- covariance: leading term ---------------------------------------------
_reg("cov/i/q5", "N^2", lambda c: 8 / c.lam)
_reg("cov/i/q11", "N^2", lambda c: (8 * c.rho + 36) / c.lam)
_reg("cov/i/q12", "N^2", lambda c: (8 * c.rho + 36) / c.lam)
_reg("cov/ii/q5", "N^2", lambda c: 8 * (1 - c.s) ** 2 / c.lam2)
_reg("cov/ii/q11", "N^2", lambda c: (2 - c.s) ** 2 * (2 * c.rho * (1 - c.s) + 9) / c.lam2)
_reg("cov/ii/q12", "N^2", lambda c: 4 * (1 - c.s) * (
    4 * c.rho**2 * c.s * (1 - c.s) ** 2 + 12 * c.rho * c.s * (1 - c.s)
    + 2 * c.rho * (1 - c.s) + 9) / c.lam2)
_reg("cov/iii/q5", "1", lambda c: None)
_reg("cov/iii/q11", "N", lambda c: 2 * c.R / (c.r * (2 - c.r)))
_reg("cov/iii/q12", "N", lambda c: 2 * c.R * (2 * c.r * c.sig - 2 * c.r - c.r**2 * c.sig + c.r**2 + 1)
     / (c.r * (2 - c.r)))
_reg("cov/iv/q5", "N", lambda c: 2 * c.s**3 * (1 - c.s) * (2 * c.R - 2 * c.s * c.R + c.s)
     / ((4 - c.s**2) * (2 - c.s * c.R)))
_reg("cov/iv/q11", "N", lambda c: (2 - c.s) * P_poly(c.r, c.s) / c.D4)
_reg("cov/iv/q12", "N^2", lambda c: 2 * (1 - c.s) * (2 - c.s) ** 2 / (2 - c.s * c.R) - 4 * (1 - c.s) ** 2)

# --- correlation: leading term --------------------------------------------
_reg("corr/i/q5", "1", lambda c: 2 / c.lam)
_reg("corr/i/q11", "1", lambda c: (2 * c.rho + 9) / c.lam)
_reg("corr/i/q12", "1", lambda c: (2 * c.rho + 9) / c.lam)
# Dividing the q5 covariance 8(1-s)^2/lam2 by the variance 4(1-s) gives
# 2(1-s)/lam2; the published correlation drops the (1-s). Printed form kept.
_reg("corr/ii/q5", "1", lambda c: 2 * (1 - c.s) / c.lam2)
_reg("corr_printed/ii/q5", "1", lambda c: 2 / c.lam2)
_reg("corr/ii/q11", "1", lambda c: (2 * c.rho * (1 - c.s) + 9) / c.lam2)
_reg("corr/ii/q12", "1", lambda c: (4 * c.rho**2 * c.s * (1 - c.s) ** 2 + 12 * c.rho * c.s * (1 - c.s)
                                    + 2 * c.rho * (1 - c.s) + 9) / c.lam2)
_reg("corr/iii/q5", "1/N^2", lambda c: None)
_reg("corr/iii/q11", "1/N", lambda c: c.R / (2 * c.r * (2 - c.r)))
_reg("corr/iii/q12", "1/N", lambda c: c.R * (2 * c.r * c.sig - 2 * c.r - c.r**2 * c.sig + c.r**2 + 1)
     / (2 * c.r * (2 - c.r)))
_reg("corr/iv/q5", "1/N", lambda c: c.s**3 * (2 * c.R - 2 * c.s * c.R + c.s)
     / (2 * (4 - c.s**2) * (2 - c.s * c.R)))
_reg("corr/iv/q11", "1/N", lambda c: P_poly(c.r, c.s) / (
    4 * c.r * (2 - c.s) * (1 - c.s) * (c.s * c.R - 2) * (c.r * c.s + c.r - c.s - 2)
    * (2 * c.r * c.s - c.s + 2)))
_reg("corr/iv/q12", "1", lambda c: (2 - c.s) ** 2 / (2 * (2 - c.s * c.R)) + c.s - 1)


def _state(state) -> State:
    st = State.parse(state) if isinstance(state, str) else State(state)
    if not st.is_live:
        raise ValueError(f"{st.label} is not a live state")
    return st


def _scenario(scenario, allow_zero_sigma: bool) -> ScalingScenario:
    if not isinstance(scenario, ScalingScenario):
        raise TypeError("expected a ScalingScenario")
    if not scenario.selfing_scales and scenario.s == 1:
        raise ValueError("s = 1 is the total-selfing extreme; use extreme_covariance")
    if not scenario.recombination_scales and scenario.r == 0:
        raise ValueError("r = 0 is the no-recombination extreme; use extreme_covariance")
    scenario.check_asymptotic_domain(allow_zero_sigma=allow_zero_sigma)
    return scenario


def _lookup(tag: str, sc: ScalingScenario) -> AsymptoticResult:
    order, coef = FORMULAS[tag](_ctx(sc))
    return AsymptoticResult(order, coef, tag)


def limit_moment_ratios(scenario: ScalingScenario, state, allow_zero_sigma: bool = False):
    """``(lim E_q[T_i T_j]/N^2, lim E_q[T_i] E_q[T_j]/N^2)``."""
    sc = _scenario(scenario, allow_zero_sigma)
    st = _state(state)
    key = f"{sc.kind.value}/{st.label}"
    c = _ctx(sc)
    return FORMULAS[f"lim_joint/{key}"](c)[1], FORMULAS[f"lim_prod/{key}"](c)[1]


def order_N_covariance(scenario: ScalingScenario, state, simplified: bool = False,
                       allow_zero_sigma: bool = False) -> Fraction:
    """``lim Cov_q[T_i, T_j] / N`` for scenarios iii and iv.

    Parameters
    ----------
    simplified : bool
        Use the closed forms specific to r = 1/2 (scenario iv only).
    """
    sc = _scenario(scenario, allow_zero_sigma)
    st = _state(state)
    if sc.kind not in (Scenario.III, Scenario.IV):
        raise ValueError("the covariance is of order N^2 in scenarios i and ii")
    if sc.kind is Scenario.IV and st is State.Q12:
        raise ValueError("in scenario iv the q12 covariance is of order N^2")
    if simplified:
        if sc.kind is not Scenario.IV or sc.r != Fraction(1, 2):
            raise ValueError("simplified forms exist only for scenario iv with r = 1/2")
        return FORMULAS[f"cov_n_half/iv/{st.label}"](_ctx(sc))[1]
    return FORMULAS[f"cov_n/{sc.kind.value}/{st.label}"](_ctx(sc))[1]


def asymptotic_covariance(scenario: ScalingScenario, state, allow_zero_sigma: bool = False) -> AsymptoticResult:
    """Leading term of ``Cov_q[T_i, T_j]`` as N grows.

    q5, q11 and q12 use the main closed forms. Other states in scenarios
    i and ii use the difference of the two limit-moment tables; in
    scenarios iii and iv they use the O(N) tables, where a zero
    coefficient means the covariance is o(N).
    """
    sc = _scenario(scenario, allow_zero_sigma)
    st = _state(state)
    kind = sc.kind.value
    tag = f"cov/{kind}/{st.label}"
    if tag in FORMULAS:
        return _lookup(tag, sc)
    if sc.kind in (Scenario.I, Scenario.II):
        joint, prod = limit_moment_ratios(sc, st, allow_zero_sigma)
        return AsymptoticResult("N^2", joint - prod, f"lim_joint-lim_prod/{kind}/{st.label}")
    return _lookup(f"cov_n/{kind}/{st.label}", sc)


def asymptotic_correlation(scenario: ScalingScenario, state, allow_zero_sigma: bool = False) -> AsymptoticResult:
    """Leading term of ``Corr_q[T_i, T_j]`` for q5, q11 and q12."""
    sc = _scenario(scenario, allow_zero_sigma)
    st = _state(state)
    if st not in TABULATED_STATES:
        raise ValueError("asymptotic correlations are tabulated for q5, q11 and q12 only")
    return _lookup(f"corr/{sc.kind.value}/{st.label}", sc)


def _extreme_params(case: str, params: Parameters, state) -> State:
    if case not in EXTREME_CASES:
        raise ValueError(f"unknown case {case!r}")
    if case == "total_selfing" and params.s != 1:
        raise ValueError(f"total_selfing needs s = 1, got {params.s}")
    if case == "no_recombination" and params.r != 0:
        raise ValueError(f"no_recombination needs r = 0, got {params.r}")
    st = _state(state)
    if st not in TABULATED_STATES:
        raise ValueError(f"no extreme-case formula for {st.label}; use the exact solver")
    return st


def extreme_covariance(case: str, params: Parameters, state) -> ExtremeValue:
    """Covariance at s = 1 or r = 0.

    Total selfing q11 has no published constant; its ``asymptotic`` field
    carries ``Cov / N^2`` at the given N from the exact solver.
    """
    st = _extreme_params(case, params, state)
    N, s, r = params.N, params.s, params.r
    tag = f"extreme_cov/{case}/{st.label}"
    if case == "total_selfing":
        if st is State.Q5:
            return ExtremeValue(tag, exact=2 * (2 * r - 1) ** 2 / ((3 * N + 1) * (1 + 2 * r - 2 * r**2)))
        if st is State.Q12:
            return ExtremeValue(tag, exact=6 / (1 + 2 * r - 2 * r**2) - 4)
        from .exact import exact_covariance
        ratio = exact_covariance(params, st) / N**2
        return ExtremeValue(tag, asymptotic=AsymptoticResult("N^2", ratio, tag + "/solver"))
    if st is State.Q5:
        return ExtremeValue(tag, asymptotic=AsymptoticResult("N^2", 8 * (1 - s) ** 2 / 9, tag))
    if st is State.Q11:
        return ExtremeValue(tag, exact=(4 - 4 * s + s**2) * N**2 + (2 - 3 * s) * N + 2)
    return ExtremeValue(tag, exact=(4 - 4 * s) * N**2 + (2 - 2 * s) * N + 2)


def extreme_correlation(case: str, params: Parameters, state) -> ExtremeValue:
    """Correlation at s = 1 or r = 0."""
    st = _extreme_params(case, params, state)
    N, s, r = params.N, params.s, params.r
    tag = f"extreme_corr/{case}/{st.label}"
    if case == "total_selfing":
        if st is State.Q5:
            return ExtremeValue(tag, exact=(2 * r - 1) ** 2 / ((3 * N + 1) * (1 + 2 * r - 2 * r**2)))
        if st is State.Q12:
            return ExtremeValue(tag, exact=3 / (1 + 2 * r - 2 * r**2) - 2)
        return ExtremeValue(tag, asymptotic=AsymptoticResult("1", Fraction(1), tag))
    if st is State.Q5:
        return ExtremeValue(tag, asymptotic=AsymptoticResult("1", 2 * (1 - s) / 9, tag))
    return ExtremeValue(tag, exact=Fraction(1))


def tail_probability(t, c, regime: str = "constant_s", s=None) -> float:
    """Limit of ``P(T > N t)`` for one pair of gene copies.

    Parameters
    ----------
    t : float
        Time in units of N generations, t > 0.
    c : Colocation
        Starting colocation of the pair.
    regime : {"constant_s", "vanishing_s"}
        Whether the selfing probability stays fixed or scales as 1/N.
    s : rational, optional
        The fixed selfing probability for ``constant_s``.
    """
    t = float(t)
    if not t > 0:
        raise ValueError(f"t must be positive, got {t}")
    c = Colocation(c)
    if c is Colocation.COAL:
        raise ValueError("a coalesced pair has no tail")
    if regime == "vanishing_s":
        return math.exp(-t / 2)
    if regime != "constant_s":
        raise ValueError(f"unknown regime {regime!r}")
    if s is None:
        raise ValueError("constant_s needs s")
    s = parse_rational(s) if not isinstance(s, float) else Fraction(s)
    if not 0 <= s < 1:
        raise ValueError(f"s must lie in [0, 1), got {s}")
    decay = math.exp(-t / float(2 - s))
    if c is Colocation.SAME:
        return decay * float(2 * (1 - s) / (2 - s))
    return decay


def tajima_variance_limit(theta, scenario, state, N: int | None = None) -> Fraction:
    """Many-locus limit of the variance of Tajima's estimator.

    For a :class:`ScalingScenario` this is ``4 mu^2 Cov_q[T_i, T_j]`` with
    ``mu = theta / (4N)`` and the covariance replaced by its leading term;
    N is needed unless that term is of order N^2. For a
    :class:`RecombinationLimit` and q12 it is the closed form
    ``theta^2 (1-s)^2 s / 2``.
    """
    theta = parse_rational(theta)
    if not theta > 0:
        raise ValueError(f"theta must be positive, got {theta}")
    st = _state(state)
    if isinstance(scenario, RecombinationLimit):
        if st is not State.Q12:
            raise ValueError("the recombination limit is tabulated for q12 only")
        s = scenario.s
        return theta**2 * (1 - s) ** 2 * s / 2
    res = asymptotic_covariance(scenario, st)
    if res.coefficient is None:
        raise ValueError(f"{res.formula_id} has no published constant")
    if res.power == 2:
        return theta**2 * res.coefficient / 4
    if N is None:
        raise ValueError(f"N is required for an order-{res.order} covariance")
    return theta**2 * res.value(N) / (4 * Fraction(N) ** 2)


def leading_variance(scenario: ScalingScenario, c: Colocation) -> Fraction:
    """``lim Var[T] / N^2`` for one locus under a scaling scenario."""
    s = Fraction(0) if scenario.selfing_scales else scenario.s
    if Colocation(c) is Colocation.SAME:
        return 4 * (1 - s)
    return (2 - s) ** 2


def covariance_to_correlation(scenario: ScalingScenario, state, cov: AsymptoticResult) -> AsymptoticResult:
    """Divide a leading covariance by the leading variances of the two loci."""
    ci, cj = colocation_signature(_state(state))
    vi, vj = leading_variance(scenario, ci), leading_variance(scenario, cj)
    if vi != vj:
        raise ValueError("mixed colocation: correlation leading term is irrational")
    order = {2: "1", 1: "1/N", 0: "1/N^2"}[cov.power]
    coef = None if cov.coefficient is None else cov.coefficient / vi
    return AsymptoticResult(order, coef, cov.formula_id + "/normalized")
