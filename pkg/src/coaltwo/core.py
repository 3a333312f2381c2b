"""Model parameters, the two-locus state space and scaling scenarios.

All probabilities are held as :class:`fractions.Fraction` so that every
matrix built from them is exact.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from numbers import Rational

__all__ = [
    "Colocation",
    "LIVE_STATES",
    "SUBSTATES",
    "EXTENDED_STATES",
    "TWO_LOCUS_STATES",
    "Parameters",
    "ScalingScenario",
    "State",
    "colocation_signature",
    "parse_rational",
    "resolve_scenario",
]


def parse_rational(value) -> Fraction:
    """Convert ``value`` to an exact :class:`Fraction`.

    Strings may be ``"p/q"`` or a base-10 decimal (``"0.3"`` is exactly
    3/10). Floats are rejected because they carry binary rounding.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, (int, Fraction, Rational)):
        return Fraction(value)
    if isinstance(value, Decimal):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if "/" in text:
            num, _, den = text.partition("/")
            try:
                return Fraction(int(num), int(den))
            except (ValueError, ZeroDivisionError) as exc:
                raise ValueError(f"not a rational: {value!r}") from exc
        try:
            dec = Decimal(text)
        except InvalidOperation as exc:
            raise ValueError(f"not a rational: {value!r}") from exc
        if not dec.is_finite():
            raise ValueError(f"not a finite rational: {value!r}")
        return Fraction(dec)
    raise TypeError(f"cannot convert {type(value).__name__} to an exact rational")


class Colocation(enum.Enum):
    """Where the two gene copies at one locus sit relative to each other."""

    COAL = "coal"
    SAME = "same"
    DIFF = "diff"


class State(enum.IntEnum):
    """Two-locus sampling configurations.

    The 12 live states come first, in their conventional order. The five
    coalescent substates split the absorbing state q0: ``BOTH`` means both loci have
    coalesced, ``I_DIFF``/``I_SAME`` mean only locus i is still running
    (its two copies in different individuals / the same individual) and
    ``J_DIFF``/``J_SAME`` likewise for locus j.
    """

    Q1 = 0
    Q2 = 1
    Q3 = 2
    Q4 = 3
    Q5 = 4
    Q6 = 5
    Q7 = 6
    Q8 = 7
    Q9 = 8
    Q10 = 9
    Q11 = 10
    Q12 = 11
    BOTH = 12
    I_DIFF = 13
    I_SAME = 14
    J_DIFF = 15
    J_SAME = 16

    @property
    def label(self) -> str:
        return _LABELS[self]

    @property
    def is_live(self) -> bool:
        return self <= State.Q12

    @classmethod
    def parse(cls, text: str) -> "State":
        key = text.strip()
        for st in cls:
            if key.lower() in (st.label.lower(), st.name.lower()):
                return st
        raise ValueError(f"unknown state {text!r}")


_LABELS = {
    **{State(k): f"q{k + 1}" for k in range(12)},
    State.BOTH: "Both",
    State.I_DIFF: "OneLeft_i_diff",
    State.I_SAME: "OneLeft_i_same",
    State.J_DIFF: "OneLeft_j_diff",
    State.J_SAME: "OneLeft_j_same",
}

LIVE_STATES: tuple[State, ...] = tuple(State(k) for k in range(12))
SUBSTATES: tuple[State, ...] = (
    State.BOTH, State.I_DIFF, State.I_SAME, State.J_DIFF, State.J_SAME,
)
EXTENDED_STATES: tuple[State, ...] = LIVE_STATES + SUBSTATES
# label of the aggregated absorbing state in the 13-state chain
Q0 = "q0"
TWO_LOCUS_STATES: tuple[str, ...] = tuple(st.label for st in LIVE_STATES) + (Q0,)

_S, _D = Colocation.SAME, Colocation.DIFF
_SIGNATURES = {
    State.Q1: (_D, _D),
    State.Q2: (_S, _D),
    State.Q3: (_D, _S),
    State.Q4: (_D, _D),
    State.Q5: (_S, _S),
    State.Q6: (_D, _D),
    State.Q7: (_D, _D),
    State.Q8: (_S, _D),
    State.Q9: (_D, _S),
    State.Q10: (_D, _D),
    State.Q11: (_D, _D),
    State.Q12: (_S, _S),
}


def colocation_signature(state: State) -> tuple[Colocation, Colocation]:
    """Return the colocation of the locus-i pair and of the locus-j pair."""
    state = State.parse(state) if isinstance(state, str) else State(state)
    if not state.is_live:
        raise ValueError(f"{state.label} is a coalescent substate")
    return _SIGNATURES[state]


@dataclass(frozen=True)
class Parameters:
    """Population size ``N`` with selfing ``s`` and recombination ``r``."""

    N: int
    s: Fraction
    r: Fraction

    def __post_init__(self):
        if isinstance(self.N, bool) or int(self.N) != self.N:
            raise ValueError(f"N must be an integer, got {self.N!r}")
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "s", parse_rational(self.s))
        object.__setattr__(self, "r", parse_rational(self.r))
        if self.N < 2:
            raise ValueError(f"N must be at least 2, got {self.N}")
        if not 0 <= self.s <= 1:
            raise ValueError(f"selfing probability s={self.s} outside [0, 1]")
        if not 0 <= self.r <= 1:
            raise ValueError(f"recombination probability r={self.r} outside [0, 1]")

    @property
    def R(self) -> Fraction:
        """Probability that both or neither chromosome of a child recombines."""
        return (1 - self.r) ** 2 + self.r ** 2

    def as_floats(self) -> tuple[int, float, float]:
        return self.N, float(self.s), float(self.r)


class Scenario(enum.Enum):
    I = "i"
    II = "ii"
    III = "iii"
    IV = "iv"

    @classmethod
    def parse(cls, text) -> "Scenario":
        if isinstance(text, cls):
            return text
        key = str(text).strip().lower()
        for sc in cls:
            if key in (sc.value, sc.name.lower()):
                return sc
        raise ValueError(f"unknown scenario {text!r}")


@dataclass(frozen=True)
class ScalingScenario:
    """How (s_N, r_N) scale with N.

    I: (sigma/N, rho/N); II: (s, rho/N); III: (sigma/N, r); IV: (s, r).
    Only the constants used by ``kind`` are required.
    """

    kind: Scenario
    sigma_tilde: Fraction | None = None
    rho_tilde: Fraction | None = None
    s: Fraction | None = None
    r: Fraction | None = None

    def __post_init__(self):
        kind = Scenario.parse(self.kind)
        object.__setattr__(self, "kind", kind)
        for name in ("sigma_tilde", "rho_tilde", "s", "r"):
            val = getattr(self, name)
            if val is not None:
                object.__setattr__(self, name, parse_rational(val))
        need = {
            Scenario.I: ("sigma_tilde", "rho_tilde"),
            Scenario.II: ("s", "rho_tilde"),
            Scenario.III: ("sigma_tilde", "r"),
            Scenario.IV: ("s", "r"),
        }[kind]
        for name in need:
            if getattr(self, name) is None:
                raise ValueError(f"scenario {kind.value} requires {name}")

    @property
    def selfing_scales(self) -> bool:
        """True when s_N = sigma/N."""
        return self.kind in (Scenario.I, Scenario.III)

    @property
    def recombination_scales(self) -> bool:
        """True when r_N = rho/N."""
        return self.kind in (Scenario.I, Scenario.II)

    def check_asymptotic_domain(self, allow_zero_sigma: bool = False) -> None:
        """Raise ValueError unless the constants lie in the asymptotic domain.

        The asymptotic formulas need s in [0, 1), r in (0, 1] and
        sigma, rho > 0.
        """
        if self.selfing_scales:
            lo_ok = self.sigma_tilde >= 0 if allow_zero_sigma else self.sigma_tilde > 0
            if not lo_ok:
                raise ValueError(f"sigma_tilde must be > 0, got {self.sigma_tilde}")
        else:
            if not 0 <= self.s < 1:
                raise ValueError(f"s must lie in [0, 1), got {self.s}")
        if self.recombination_scales:
            if not self.rho_tilde > 0:
                raise ValueError(f"rho_tilde must be > 0, got {self.rho_tilde}")
        else:
            if not 0 < self.r <= 1:
                raise ValueError(f"r must lie in (0, 1], got {self.r}")


def resolve_scenario(scenario: ScalingScenario, N: int) -> Parameters:
    """Concrete (N, s_N, r_N) for a scaling scenario; never clamps."""
    if int(N) != N or N < 2:
        raise ValueError(f"N must be an integer >= 2, got {N!r}")
    N = int(N)
    s = scenario.sigma_tilde / N if scenario.selfing_scales else scenario.s
    r = scenario.rho_tilde / N if scenario.recombination_scales else scenario.r
    if not 0 <= s <= 1:
        raise ValueError(f"scenario {scenario.kind.value} gives s={s} outside [0, 1] at N={N}")
    if not 0 <= r <= 1:
        raise ValueError(f"scenario {scenario.kind.value} gives r={r} outside [0, 1] at N={N}")
    return Parameters(N, s, r)
