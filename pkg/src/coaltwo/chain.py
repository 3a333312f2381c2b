"""Transition matrices of the single-locus and two-locus ancestral chains.

Rows index the current state and columns the state one generation further
back in time. Every matrix is held with exact :class:`fractions.Fraction`
entries and checked on construction: entries must be nonnegative and every
row must sum to exactly one.

Three two-locus chains are built here:

* the 3-state single-locus chain over ``coal``, ``same``, ``diff``;
* the 13-state chain over ``q1..q12`` and the absorbing ``q0``;
* the 17-state chain in which ``q0`` is split by which locus coalesced and
  where the surviving pair sits.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import _tables
from .core import (
    EXTENDED_STATES,
    LIVE_STATES,
    SUBSTATES,
    TWO_LOCUS_STATES,
    Parameters,
    State,
    parse_rational,
)
from .derivation import evaluate_row

__all__ = [
    "MatrixInvariantError",
    "TransitionMatrix",
    "SINGLE_LOCUS_STATES",
    "REFERENCE_CASES",
    "build_single_locus_matrix",
    "build_two_locus_matrix",
    "build_extended_matrix",
    "appendix_reference_matrix",
    "limit_matrix",
]

SINGLE_LOCUS_STATES = ("coal", "same", "diff")
EXTENDED_LABELS = tuple(st.label for st in EXTENDED_STATES)
REFERENCE_CASES = ("total_selfing", "no_recombination", "free_recombination")

# Thresholds for sampling live in [0, 2**63] so that p = 1 still fits a uint64.
CDF_SCALE = 1 << 63


class MatrixInvariantError(ValueError):
    """A transition matrix failed its nonnegativity or row-sum check."""


@dataclass(frozen=True)
class TransitionMatrix:
    """Square stochastic matrix with exact rational entries.

    Parameters
    ----------
    states : tuple of str
        State labels, in row/column order.
    entries : tuple of tuple of Fraction
        Row-major entries. Validated on construction.
    """

    states: tuple[str, ...]
    entries: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        states = tuple(str(s) for s in self.states)
        rows = tuple(tuple(Fraction(x) for x in row) for row in self.entries)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "entries", rows)
        n = len(states)
        if len(set(states)) != n:
            raise MatrixInvariantError("duplicate state labels")
        if len(rows) != n or any(len(row) != n for row in rows):
            raise MatrixInvariantError(f"matrix is not {n} x {n}")
        for label, row in zip(states, rows):
            for col, x in zip(states, row):
                if x < 0:
                    raise MatrixInvariantError(f"row {label}: entry {col} = {x} is negative")
            total = sum(row)
            if total != 1:
                raise MatrixInvariantError(f"row {label} sums to {total}, not 1")

    @classmethod
    def from_rows(cls, states: Sequence[str], rows: Iterable[Mapping[str, Fraction]]) -> "TransitionMatrix":
        """Build from sparse rows keyed by column label."""
        states = tuple(states)
        index = {s: k for k, s in enumerate(states)}
        dense = []
        for row in rows:
            vec = [Fraction(0)] * len(states)
            for col, val in row.items():
                vec[index[col]] += Fraction(val)
            dense.append(vec)
        return cls(states, dense)

    @property
    def size(self) -> int:
        return len(self.states)

    def index(self, state) -> int:
        return self.states.index(_label(state))

    def __getitem__(self, key) -> Fraction:
        a, b = key
        return self.entries[self.index(a)][self.index(b)]

    def row(self, state) -> dict[str, Fraction]:
        """Nonzero entries of one row, keyed by column label."""
        vals = self.entries[self.index(state)]
        return {s: x for s, x in zip(self.states, vals) if x}

    def submatrix(self, states: Sequence) -> list[list[Fraction]]:
        """Rows and columns restricted to ``states`` (no longer stochastic)."""
        idx = [self.index(s) for s in states]
        return [[self.entries[a][b] for b in idx] for a in idx]

    def collapse(self, groups: Mapping[str, Sequence]) -> "TransitionMatrix":
        """Merge each group of states into one state named by its key.

        Rows of a merged group must agree after merging, which is checked;
        otherwise the result would not be a Markov chain on the new states.
        """
        member_of = {}
        for name, members in groups.items():
            for m in members:
                member_of[_label(m)] = name
        new_states: list[str] = []
        for s in self.states:
            name = member_of.get(s, s)
            if name not in new_states:
                new_states.append(name)
        pos = {s: k for k, s in enumerate(new_states)}
        merged: dict[str, list[Fraction]] = {}
        for s, row in zip(self.states, self.entries):
            vec = [Fraction(0)] * len(new_states)
            for col, x in zip(self.states, row):
                vec[pos[member_of.get(col, col)]] += x
            name = member_of.get(s, s)
            if name in merged and merged[name] != vec:
                raise MatrixInvariantError(f"group {name} is not lumpable at row {s}")
            merged[name] = vec
        return TransitionMatrix(tuple(new_states), [merged[s] for s in new_states])

    def to_float(self) -> np.ndarray:
        """Round-to-nearest float64 copy of the entries."""
        return np.array([[float(x) for x in row] for row in self.entries], dtype=np.float64)

    def cdf_thresholds(self) -> np.ndarray:
        """Per-row cumulative thresholds ``floor(cdf * 2**63)`` as uint64.

        A uniform 63-bit integer ``u`` selects the first column whose
        threshold exceeds ``u``. The last nonzero column of every row is
        pinned to ``2**63`` so a draw always lands.
        """
        n = self.size
        out = np.zeros((n, n), dtype=np.uint64)
        for a, row in enumerate(self.entries):
            acc = Fraction(0)
            last = max(k for k, x in enumerate(row) if x)
            for b, x in enumerate(row):
                acc += x
                out[a, b] = CDF_SCALE if b >= last else (acc.numerator * CDF_SCALE) // acc.denominator
        return out

    def to_json(self) -> str:
        return json.dumps({
            "states": list(self.states),
            "entries": [[f"{x.numerator}/{x.denominator}" for x in row] for row in self.entries],
        })

    @classmethod
    def from_json(cls, text: str) -> "TransitionMatrix":
        data = json.loads(text)
        return cls(tuple(data["states"]), [[parse_rational(x) for x in row] for row in data["entries"]])


def _label(state) -> str:
    if isinstance(state, State):
        return state.label
    return str(state)


def build_single_locus_matrix(params: Parameters) -> TransitionMatrix:
    """3 x 3 chain for one pair of gene copies over (coal, same, diff)."""
    N, s = params.N, params.s
    rows = [
        [Fraction(1), Fraction(0), Fraction(0)],
        [s / 2, s / 2, 1 - s],
        [Fraction(1, 2 * N), Fraction(1, 2 * N), 1 - Fraction(1, N)],
    ]
    return TransitionMatrix(SINGLE_LOCUS_STATES, rows)


def _from_indexed(rows: list[dict[int, Fraction]]) -> TransitionMatrix:
    dense = []
    for row in rows:
        vec = [Fraction(0)] * 13
        for k, x in row.items():
            vec[k] = x
        dense.append(vec)
    q0 = [Fraction(0)] * 12 + [Fraction(1)]
    return TransitionMatrix(TWO_LOCUS_STATES, dense + [q0])


def build_two_locus_matrix(params: Parameters) -> TransitionMatrix:
    """13 x 13 chain over q1..q12 and the absorbing state q0."""
    return _from_indexed(_tables.general_rows(params.N, params.s, params.r))


def build_extended_matrix(params: Parameters) -> TransitionMatrix:
    """17 x 17 chain over q1..q12 and the five coalescent substates.

    Live-to-live entries come from the 13-state table. The q0 mass of each
    live row is split over the substates by enumerating the one-generation
    reproduction outcomes, and the split must add back up to the table's
    q0 entry exactly.
    """
    base = build_two_locus_matrix(params)
    single = build_single_locus_matrix(params)
    rows = []
    for st in LIVE_STATES:
        table_row = base.entries[st]
        routed = evaluate_row(st, params)
        vec = list(table_row[:12]) + [routed.get(sub, Fraction(0)) for sub in SUBSTATES]
        if sum(vec[12:]) != table_row[12]:
            raise MatrixInvariantError(
                f"row {st.label}: substate split {sum(vec[12:])} != q0 entry {table_row[12]}"
            )
        rows.append(vec)
    # one-locus substates replay the single-locus chain
    _, same, diff = single.entries
    embed = {
        State.BOTH: {State.BOTH: Fraction(1)},
        State.I_SAME: {State.BOTH: same[0], State.I_SAME: same[1], State.I_DIFF: same[2]},
        State.I_DIFF: {State.BOTH: diff[0], State.I_SAME: diff[1], State.I_DIFF: diff[2]},
        State.J_SAME: {State.BOTH: same[0], State.J_SAME: same[1], State.J_DIFF: same[2]},
        State.J_DIFF: {State.BOTH: diff[0], State.J_SAME: diff[1], State.J_DIFF: diff[2]},
    }
    for sub in SUBSTATES:
        vec = [Fraction(0)] * 17
        for col, x in embed[sub].items():
            vec[EXTENDED_STATES.index(col)] = x
        rows.append(vec)
    return TransitionMatrix(EXTENDED_LABELS, rows)


def _check_case(case: str) -> str:
    if case not in REFERENCE_CASES:
        raise ValueError(f"unknown case {case!r}; expected one of {', '.join(REFERENCE_CASES)}")
    return case


def appendix_reference_matrix(case: str, params: Parameters) -> TransitionMatrix:
    """Hard-coded 13-state table for s = 1, r = 0 or r = 1/2.

    These are transcribed independently of :func:`build_two_locus_matrix`
    and serve as its regression target at the three special points.
    """
    case = _check_case(case)
    if case == "total_selfing":
        if params.s != 1:
            raise ValueError(f"total_selfing needs s = 1, got s = {params.s}")
        rows = _tables.total_selfing_rows(params.N, params.r)
    elif case == "no_recombination":
        if params.r != 0:
            raise ValueError(f"no_recombination needs r = 0, got r = {params.r}")
        rows = _tables.no_recombination_rows(params.N, params.s)
    else:
        if params.r != Fraction(1, 2):
            raise ValueError(f"free_recombination needs r = 1/2, got r = {params.r}")
        rows = _tables.free_recombination_rows(params.N, params.s)
    return _from_indexed(rows)


def limit_matrix(case: str, s_or_r) -> TransitionMatrix:
    """Entrywise N -> infinity limit of the special-case tables.

    ``s_or_r`` is r for ``total_selfing`` and s for the other two cases.
    """
    case = _check_case(case)
    x = parse_rational(s_or_r)
    if not 0 <= x <= 1:
        raise ValueError(f"probability {x} outside [0, 1]")
    builder = {
        "total_selfing": _tables.total_selfing_limit_rows,
        "no_recombination": _tables.no_recombination_limit_rows,
        "free_recombination": _tables.free_recombination_limit_rows,
    }[case]
    return _from_indexed(builder(x))
