"""Exact one-generation transition probabilities from the reproduction rules.

Every outcome of one generation of reproduction is enumerated for the
individuals that carry sampled lineages: selfing or outcrossing per child,
the equality pattern of the parents that receive lineage-carrying
chromosomes, and the Mendelian/recombination choice per chromosome. Only
equality patterns of parents matter, so a row needs at most
16 x 15 x 16 outcomes.

The result for each (row, column) is stored as integer-coefficient terms::

    count * ff(N, B) * (N-1)^e * s^a (1-s)^b * r^c (1-r)^d

over a denominator that is constant per row, ``N^k (N-1)^k2 * 2^m``,
where ``ff`` is the falling factorial. Evaluating at any rational
(s, r) and integer N is then exact integer arithmetic.
"""
from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import cache

from .core import EXTENDED_STATES, SUBSTATES, Parameters, State

__all__ = ["RowTerms", "classify", "representative", "row_terms", "evaluate_row", "enumerated_matrix"]

I, J = 0, 1

# (locus, individual, chromosome) for each live lineage
_REPS: dict[State, tuple[tuple[int, int, int], ...]] = {
    State.Q1: ((I, 0, 0), (I, 1, 0), (J, 2, 0), (J, 3, 0)),
    State.Q2: ((I, 0, 0), (I, 0, 1), (J, 1, 0), (J, 2, 0)),
    State.Q3: ((I, 0, 0), (I, 1, 0), (J, 2, 0), (J, 2, 1)),
    State.Q4: ((I, 0, 0), (I, 1, 0), (J, 0, 1), (J, 2, 0)),
    State.Q5: ((I, 0, 0), (I, 0, 1), (J, 1, 0), (J, 1, 1)),
    State.Q6: ((I, 0, 0), (I, 1, 0), (J, 0, 1), (J, 1, 1)),
    State.Q7: ((I, 0, 0), (I, 1, 0), (J, 0, 0), (J, 2, 0)),
    State.Q8: ((I, 0, 0), (I, 0, 1), (J, 0, 0), (J, 1, 0)),
    State.Q9: ((I, 0, 0), (I, 1, 0), (J, 0, 0), (J, 0, 1)),
    State.Q10: ((I, 0, 0), (I, 1, 0), (J, 0, 0), (J, 1, 1)),
    State.Q11: ((I, 0, 0), (I, 1, 0), (J, 0, 0), (J, 1, 0)),
    State.Q12: ((I, 0, 0), (I, 0, 1), (J, 0, 0), (J, 0, 1)),
    State.I_DIFF: ((I, 0, 0), (I, 1, 0)),
    State.I_SAME: ((I, 0, 0), (I, 0, 1)),
    State.J_DIFF: ((J, 0, 0), (J, 1, 0)),
    State.J_SAME: ((J, 0, 0), (J, 0, 1)),
    State.BOTH: (),
}


def representative(state: State) -> tuple[tuple[int, int, int], ...]:
    """A concrete lineage layout for ``state``."""
    return _REPS[State(state)]


def classify(i_pos, j_pos) -> State:
    """Map lineage positions to a state.

    ``i_pos`` and ``j_pos`` each hold the (individual, chromosome) of the
    two copies at a locus, or are empty once that locus has coalesced.
    Two copies at one position have coalesced.
    """
    i_alive = len(i_pos) == 2 and i_pos[0] != i_pos[1]
    j_alive = len(j_pos) == 2 and j_pos[0] != j_pos[1]
    if not i_alive and not j_alive:
        return State.BOTH
    if not j_alive:
        return State.I_SAME if i_pos[0][0] == i_pos[1][0] else State.I_DIFF
    if not i_alive:
        return State.J_SAME if j_pos[0][0] == j_pos[1][0] else State.J_DIFF
    shared = [(x, y) for x in (0, 1) for y in (0, 1) if i_pos[x] == j_pos[y]]
    ind_i = (i_pos[0][0], i_pos[1][0])
    ind_j = (j_pos[0][0], j_pos[1][0])
    if len(shared) == 2:
        x, y = shared[0]
        return State.Q12 if i_pos[x][0] == i_pos[1 - x][0] else State.Q11
    if len(shared) == 1:
        x, y = shared[0]
        home = i_pos[x][0]
        if ind_i[1 - x] == home:
            return State.Q8
        if ind_j[1 - y] == home:
            return State.Q9
        return State.Q10 if ind_i[1 - x] == ind_j[1 - y] else State.Q7
    i_together = ind_i[0] == ind_i[1]
    j_together = ind_j[0] == ind_j[1]
    if i_together and j_together:
        return State.Q5
    if i_together:
        return State.Q2
    if j_together:
        return State.Q3
    mixed = sum(1 for a in ind_i for b in ind_j if a == b)
    return (State.Q1, State.Q4, State.Q6)[mixed]


def _set_partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        for k in range(len(part)):
            yield part[:k] + [[first] + part[k]] + part[k + 1:]
        yield [[first]] + part


@dataclass(frozen=True)
class RowTerms:
    """Integer term table for one row; see the module docstring."""

    k: int       # occupied individuals
    k2: int      # individuals with two lineage-carrying chromosomes
    m2: int      # chromosomes carrying both loci
    m: int       # lineage-carrying chromosomes
    terms: dict  # column State -> {(B, e, a, b, c, d): count}


@cache
def row_terms(state: State) -> RowTerms:
    state = State(state)
    lineages = _REPS[state]
    if not lineages:
        return RowTerms(0, 0, 0, 0, {State.BOTH: {(0, 0, 0, 0, 0, 0): 1}})
    chroms: dict[tuple[int, int], list[int]] = defaultdict(list)
    for idx, (_, ind, chrom) in enumerate(lineages):
        chroms[(ind, chrom)].append(idx)
    chrom_keys = sorted(chroms)
    individuals = sorted({ind for ind, _ in chrom_keys})
    per_ind = {ind: [c for c in chrom_keys if c[0] == ind] for ind in individuals}
    k = len(individuals)
    k2 = sum(1 for ind in individuals if len(per_ind[ind]) == 2)
    m2 = sum(1 for c in chrom_keys if len(chroms[c]) == 2)
    m = len(chrom_keys)

    terms: dict[State, dict] = defaultdict(lambda: defaultdict(int))
    for selfed in itertools.product((True, False), repeat=k):
        a = sum(selfed)
        b = k - a
        slot_of: dict[tuple[int, int], int] = {}
        distinct_pairs = []
        nslots = 0
        n_pairs = 0
        for ind, is_self in zip(individuals, selfed):
            if is_self:
                for c in per_ind[ind]:
                    slot_of[c] = nslots
                nslots += 1
            else:
                own = []
                for c in per_ind[ind]:
                    slot_of[c] = nslots
                    own.append(nslots)
                    nslots += 1
                if len(own) == 2:
                    distinct_pairs.append(tuple(own))
                    n_pairs += 1
        e = k2 - n_pairs
        for part in _set_partitions(list(range(nslots))):
            block = {}
            for bid, members in enumerate(part):
                for sl in members:
                    block[sl] = bid
            if any(block[x] == block[y] for x, y in distinct_pairs):
                continue
            B = len(part)
            # per chromosome: list of (rec flag or None, {lineage: parental chrom})
            options = []
            for c in chrom_keys:
                members = chroms[c]
                opts = []
                for par in (0, 1):
                    if len(members) == 2:
                        for rec in (0, 1):
                            where = {}
                            for idx in members:
                                locus = lineages[idx][0]
                                where[idx] = par if (locus == I or not rec) else 1 - par
                            opts.append((rec, where))
                    else:
                        opts.append((None, {members[0]: par}))
                options.append(opts)
            for combo in itertools.product(*options):
                c_rec = sum(1 for rec, _ in combo if rec == 1)
                d_rec = sum(1 for rec, _ in combo if rec == 0)
                pos = [None] * len(lineages)
                for ckey, (_, where) in zip(chrom_keys, combo):
                    for idx, par in where.items():
                        pos[idx] = (block[slot_of[ckey]], par)
                i_pos = [pos[x] for x, lin in enumerate(lineages) if lin[0] == I]
                j_pos = [pos[x] for x, lin in enumerate(lineages) if lin[0] == J]
                dest = classify(i_pos, j_pos)
                terms[dest][(B, e, a, b, c_rec, d_rec)] += 1
    return RowTerms(k, k2, m2, m, {col: dict(t) for col, t in terms.items()})


def _falling(n: int, k: int) -> int:
    out = 1
    for t in range(k):
        out *= n - t
    return out


def evaluate_row(state: State, params: Parameters) -> dict[State, Fraction]:
    """Exact one-step distribution from ``state``; keys are destination states."""
    rt = row_terms(State(state))
    N = params.N
    sn, sd = params.s.numerator, params.s.denominator
    rn, rd = params.r.numerator, params.r.denominator
    den = N ** rt.k * (N - 1) ** rt.k2 * sd ** rt.k * rd ** rt.m2 * 2 ** rt.m
    out = {}
    for col, terms in rt.terms.items():
        num = 0
        for (B, e, a, b, c, d), count in terms.items():
            num += (count * _falling(N, B) * (N - 1) ** e
                    * sn ** a * (sd - sn) ** b * rn ** c * (rd - rn) ** d)
        if num:
            out[col] = Fraction(num, den)
    return out


def enumerated_matrix(params: Parameters) -> list[list[Fraction]]:
    """Full 17 x 17 matrix straight from the enumeration."""
    rows = []
    for st in EXTENDED_STATES:
        dist = evaluate_row(st, params)
        rows.append([dist.get(col, Fraction(0)) for col in EXTENDED_STATES])
    return rows


SUBSTATE_SET = frozenset(SUBSTATES)
