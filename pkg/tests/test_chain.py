from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings

from coaltwo import _tables
from coaltwo.chain import (
    CDF_SCALE,
    MatrixInvariantError,
    TransitionMatrix,
    appendix_reference_matrix,
    build_extended_matrix,
    build_single_locus_matrix,
    build_two_locus_matrix,
    limit_matrix,
)
from coaltwo.core import SUBSTATES, Parameters
from coaltwo.derivation import enumerated_matrix

from conftest import parameters

GRID = [Fraction(k, 4) for k in range(5)]


def _assert_stochastic(m: TransitionMatrix):
    for row in m.entries:
        assert all(x >= 0 for x in row)
        assert sum(row) == 1


@settings(max_examples=60, deadline=None)
@given(parameters())
def test_rows_are_stochastic(p):
    _assert_stochastic(build_two_locus_matrix(p))
    _assert_stochastic(build_extended_matrix(p))
    _assert_stochastic(build_single_locus_matrix(p))


@settings(max_examples=40, deadline=None)
@given(parameters())
def test_extended_collapses_to_two_locus(p):
    ext = build_extended_matrix(p)
    collapsed = ext.collapse({"q0": [st.label for st in SUBSTATES]})
    assert collapsed == build_two_locus_matrix(p)


@settings(max_examples=25, deadline=None)
@given(parameters(max_N=30))
def test_extended_matches_direct_enumeration(p):
    assert [list(r) for r in build_extended_matrix(p).entries] == enumerated_matrix(p)


@pytest.mark.parametrize("N", [2, 5, 10, 37])
def test_special_tables_equal_general_table(N):
    for s in GRID:
        for r in GRID:
            p = Parameters(N, s, r)
            general = build_two_locus_matrix(p)
            if s == 1:
                assert appendix_reference_matrix("total_selfing", p) == general
            if r == 0:
                assert appendix_reference_matrix("no_recombination", p) == general
            if r == Fraction(1, 2):
                assert appendix_reference_matrix("free_recombination", p) == general


def test_reference_case_checks_parameters():
    with pytest.raises(ValueError):
        appendix_reference_matrix("total_selfing", Parameters(5, "1/2", 0))
    with pytest.raises(ValueError):
        appendix_reference_matrix("no_such_case", Parameters(5, 1, 0))


def test_corrected_q3_row():
    # the published q3 row swaps the q10 and q11 entries
    p = Parameters(7, "1/3", "1/5")
    m = build_two_locus_matrix(p)
    assert m["q3", "q10"] == (1 - p.s) / p.N**2
    assert m["q3", "q11"] == (1 - p.s) / (2 * p.N**2)


def test_corrected_total_selfing_q11_to_q6():
    p = Parameters(7, 1, "1/5")
    m = appendix_reference_matrix("total_selfing", p)
    assert m["q11", "q6"] == p.r**2 * (p.N - 1) / p.N


@pytest.mark.parametrize("case,x", [("total_selfing", Fraction(1, 5)),
                                    ("no_recombination", Fraction(2, 7)),
                                    ("free_recombination", Fraction(1, 3))])
def test_limit_matrix_is_large_N_limit(case, x):
    lim = limit_matrix(case, x).to_float()
    N = 10**9
    s, r = {"total_selfing": (1, x), "no_recombination": (x, 0), "free_recombination": (x, Fraction(1, 2))}[case]
    big = build_two_locus_matrix(Parameters(N, s, r)).to_float()
    assert np.allclose(lim, big, atol=1e-7)


def test_total_selfing_q12_never_spreads_over_three_individuals():
    for N in (2, 5, 50):
        for r in GRID:
            row = build_extended_matrix(Parameters(N, 1, r)).row("q12")
            assert not {"q1", "q2", "q3", "q4"} & set(row)


@settings(max_examples=30, deadline=None)
@given(parameters())
def test_cdf_thresholds(p):
    m = build_extended_matrix(p)
    thr = m.cdf_thresholds()
    assert thr.dtype == np.uint64
    assert (np.diff(thr.astype(object), axis=1) >= 0).all()
    for a, row in enumerate(m.entries):
        last = max(k for k, x in enumerate(row) if x)
        assert int(thr[a, last]) == CDF_SCALE
        acc = Fraction(0)
        for b in range(last):
            acc += row[b]
            assert int(thr[a, b]) == acc * CDF_SCALE // 1


def test_json_roundtrip():
    m = build_extended_matrix(Parameters(6, "3/10", "1/7"))
    assert TransitionMatrix.from_json(m.to_json()) == m


def test_invariant_errors_name_the_row():
    with pytest.raises(MatrixInvariantError, match="row b"):
        TransitionMatrix(("a", "b"), [[1, 0], [Fraction(1, 2), Fraction(1, 3)]])
    with pytest.raises(MatrixInvariantError, match="negative"):
        TransitionMatrix(("a", "b"), [[1, 0], [2, -1]])


def test_collapse_rejects_non_lumpable_groups():
    m = TransitionMatrix(("a", "b", "c"), [[1, 0, 0], [Fraction(1, 2), Fraction(1, 2), 0], [0, 0, 1]])
    with pytest.raises(MatrixInvariantError):
        m.collapse({"x": ["b", "c"]})


def test_single_locus_matrix():
    p = Parameters(8, "1/4", 0)
    m = build_single_locus_matrix(p)
    assert m.row("same") == {"coal": Fraction(1, 8), "same": Fraction(1, 8), "diff": Fraction(3, 4)}
    assert m.row("diff") == {"coal": Fraction(1, 16), "same": Fraction(1, 16), "diff": Fraction(7, 8)}


def test_general_rows_shape():
    rows = _tables.general_rows(9, Fraction(1, 3), Fraction(1, 4))
    assert len(rows) == 12
    assert all(sum(r.values()) == 1 for r in rows)
