"""Exact finite-N moments of the pairwise coalescence times.

Single-locus means and variances have closed forms; the joint moment
``E_q[T_i T_j]`` solves the first-step system

    E = Pi E + b,   b_q = E_q[T_i] + E_q[T_j] - 1,

over the 12 live states, where ``Pi`` is the live block of the 13-state
chain. The system is solved exactly by fraction-free elimination, or in
floating point for very large N.
"""
from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from functools import lru_cache
from math import lcm

import numpy as np

from .chain import build_single_locus_matrix, build_two_locus_matrix
from .core import LIVE_STATES, Colocation, Parameters, State, colocation_signature

__all__ = [
    "SingleLocusMoments",
    "Correlation",
    "SingularSystemError",
    "bareiss_solve",
    "single_locus_moments",
    "solve_single_locus",
    "solve_joint_moments",
    "solve_covariances",
    "exact_covariance",
    "exact_correlation",
    "float_correlation",
]

FLOAT_RESIDUAL_TOL = 1e-12


class SingularSystemError(ArithmeticError):
    """The first-step system has no unique solution."""


@dataclass(frozen=True)
class SingleLocusMoments:
    """First two moments of T for one pair of gene copies (generations)."""

    mean: Fraction
    second_moment: Fraction
    variance: Fraction

    def __post_init__(self):
        if self.variance != self.second_moment - self.mean ** 2:
            raise ValueError("variance must equal second_moment - mean**2")


def single_locus_moments(params: Parameters, c: Colocation) -> SingleLocusMoments:
    """Closed-form mean, second moment and variance of T.

    Parameters
    ----------
    params : Parameters
    c : Colocation
        ``same`` when the two copies start in one individual, ``diff``
        otherwise.
    """
    c = Colocation(c)
    N, s = params.N, params.s
    if c is Colocation.SAME:
        mean = 2 * (1 - s) * N + 2
        second = 4 * (1 - s) * (2 - s) * N**2 + 10 * (1 - s) * N + 6
    elif c is Colocation.DIFF:
        mean = (2 - s) * N + 1
        second = 2 * (2 - s) ** 2 * N**2 + (6 - 5 * s) * N + 3
    else:
        raise ValueError("coalesced pairs have T = 0; moments are not defined here")
    return SingleLocusMoments(Fraction(mean), Fraction(second), Fraction(second - mean**2))


def bareiss_solve(A, B) -> list[list[Fraction]]:
    """Solve ``A X = B`` exactly.

    Rows are scaled to integers and reduced by Bareiss' fraction-free
    elimination, so intermediate values stay integral and their size grows
    only linearly with the dimension.

    Parameters
    ----------
    A : sequence of sequences of rationals, n x n
    B : sequence of sequences of rationals, n x k

    Returns
    -------
    list of list of Fraction
        The n x k solution.
    """
    n = len(A)
    k = len(B[0])
    M = []
    for a_row, b_row in zip(A, B):
        row = [Fraction(x) for x in a_row] + [Fraction(x) for x in b_row]
        scale = lcm(*(x.denominator for x in row))
        M.append([x.numerator * (scale // x.denominator) for x in row])
    prev = 1
    for p in range(n):
        piv = next((i for i in range(p, n) if M[i][p] != 0), None)
        if piv is None:
            raise SingularSystemError(f"matrix is singular at column {p}")
        if piv != p:
            M[p], M[piv] = M[piv], M[p]
        mpp = M[p][p]
        for i in range(p + 1, n):
            mip = M[i][p]
            row_i, row_p = M[i], M[p]
            for j in range(p + 1, n + k):
                row_i[j] = (row_i[j] * mpp - mip * row_p[j]) // prev
            row_i[p] = 0
        prev = mpp
    X = [[Fraction(0)] * k for _ in range(n)]
    for col in range(k):
        for i in range(n - 1, -1, -1):
            acc = Fraction(M[i][n + col])
            for j in range(i + 1, n):
                acc -= M[i][j] * X[j][col]
            X[i][col] = acc / M[i][i]
    return X


def solve_single_locus(params: Parameters) -> dict[Colocation, SingleLocusMoments]:
    """Moments of T from the 3-state chain by first-step analysis."""
    P = build_single_locus_matrix(params).entries
    live = (1, 2)
    A = [[(1 if a == b else 0) - P[a][b] for b in live] for a in live]
    means = [row[0] for row in bareiss_solve(A, [[1], [1]])]
    # T = 1 + T' gives E[T^2] = 2 E[T] - 1 + sum_k P E_k[T^2]
    seconds = [row[0] for row in bareiss_solve(A, [[2 * m - 1] for m in means])]
    out = {}
    for c, m, v in zip((Colocation.SAME, Colocation.DIFF), means, seconds):
        out[c] = SingleLocusMoments(m, v, v - m * m)
    return out


def _locus_moments(params: Parameters, state: State):
    ci, cj = colocation_signature(state)
    return single_locus_moments(params, ci), single_locus_moments(params, cj)


def _system(params: Parameters):
    """``I - Pi`` over the live states, with both right-hand sides.

    Returns the matrix, the joint-moment vector b and the covariance
    right-hand side ``b + Pi m - m`` where ``m_q = E_q[T_i] E_q[T_j]``.
    """
    Pi = build_two_locus_matrix(params).entries
    A = [[(1 if a == b else 0) - Pi[a][b] for b in range(12)] for a in range(12)]
    b, m = [], []
    for st in LIVE_STATES:
        mi, mj = _locus_moments(params, st)
        b.append(mi.mean + mj.mean - 1)
        m.append(mi.mean * mj.mean)
    c = [b[a] - sum(A[a][k] * m[k] for k in range(12)) for a in range(12)]
    return A, b, c, m


@lru_cache(maxsize=256)
def _exact_joint(params: Parameters) -> tuple[Fraction, ...]:
    A, b, _, _ = _system(params)
    return tuple(row[0] for row in bareiss_solve(A, [[x] for x in b]))


def _float_solve(A, rhs, sweeps: int = 3) -> np.ndarray:
    """LU solve in float64 with iterative refinement.

    Corrections are accumulated exactly and residuals are computed in
    exact arithmetic, so the refined solution is not limited by float64
    spacing at ``|x| ~ N |b|``. Raises if the relative residual
    ``max|A x - b| / max|b|`` stays above :data:`FLOAT_RESIDUAL_TOL`.
    """
    n = len(rhs)
    Af = np.array([[float(x) for x in row] for row in A])
    x = [Fraction(0)] * n
    res = list(rhs)
    scale = max(abs(float(v)) for v in rhs) or 1.0
    rel = float("inf")
    for _ in range(sweeps):
        d = np.linalg.solve(Af, np.array([float(v) for v in res]))
        x = [xi + Fraction(float(di)) for xi, di in zip(x, d)]
        res = [rhs[a] - sum(A[a][k] * x[k] for k in range(n)) for a in range(n)]
        rel = max(abs(float(v)) for v in res) / scale
        if rel <= FLOAT_RESIDUAL_TOL * 1e-2:
            break
    if rel > FLOAT_RESIDUAL_TOL:
        raise ArithmeticError(f"float solve residual {rel:.3e} exceeds {FLOAT_RESIDUAL_TOL:g}")
    return np.array([float(v) for v in x])


def solve_joint_moments(params: Parameters, method: str = "exact") -> dict[State, Fraction | float]:
    """``E_q[T_i T_j]`` for every live state q.

    Parameters
    ----------
    params : Parameters
    method : {"exact", "float"}
        ``exact`` returns Fractions; ``float`` returns floats and is meant
        for N in the hundreds of thousands and beyond.
    """
    if method == "exact":
        vals = _exact_joint(params)
    elif method == "float":
        A, b, _, _ = _system(params)
        vals = tuple(float(v) for v in _float_solve(A, b))
    else:
        raise ValueError(f"unknown method {method!r}")
    return dict(zip(LIVE_STATES, vals))


def solve_covariances(params: Parameters, method: str = "exact") -> dict[State, Fraction | float]:
    """``Cov_q[T_i, T_j]`` for every live state q.

    The float path solves ``(I - Pi) C = b + Pi m - m`` for the covariance
    vector directly, which avoids subtracting two numbers of size N^2.
    """
    if method == "exact":
        E = _exact_joint(params)
        out = {}
        for st, e in zip(LIVE_STATES, E):
            mi, mj = _locus_moments(params, st)
            out[st] = e - mi.mean * mj.mean
        return out
    if method == "float":
        A, _, c, _ = _system(params)
        return dict(zip(LIVE_STATES, (float(v) for v in _float_solve(A, c))))
    raise ValueError(f"unknown method {method!r}")


def exact_covariance(params: Parameters, state, method: str = "exact"):
    """``Cov_q[T_i, T_j] = E_q[T_i T_j] - E_q[T_i] E_q[T_j]``."""
    state = State(state) if not isinstance(state, str) else State.parse(state)
    if not state.is_live:
        raise ValueError(f"{state.label} is not a live state")
    return solve_covariances(params, method)[state]


@dataclass(frozen=True)
class Correlation:
    """Correlation of T_i and T_j with its exact ingredients.

    When the two variances differ the correlation is irrational in
    general; ``squared`` and the sign are exact, and :meth:`decimal`
    gives the signed root to any precision.
    """

    covariance: Fraction
    var_i: Fraction
    var_j: Fraction

    @property
    def exact(self) -> Fraction | None:
        """The correlation as a rational, when the variances agree."""
        if self.var_i == self.var_j:
            return self.covariance / self.var_i
        return None

    @property
    def squared(self) -> Fraction:
        return self.covariance ** 2 / (self.var_i * self.var_j)

    @property
    def var_product(self) -> Fraction:
        return self.var_i * self.var_j

    @property
    def sign(self) -> int:
        return (self.covariance > 0) - (self.covariance < 0)

    def decimal(self, digits: int = 50) -> Decimal:
        with localcontext() as ctx:
            ctx.prec = digits + 5
            sq = Decimal(self.squared.numerator) / Decimal(self.squared.denominator)
            val = self.sign * sq.sqrt()
            ctx.prec = digits
            return +val

    def __float__(self) -> float:
        ex = self.exact
        return float(ex) if ex is not None else float(self.decimal(20))


def exact_correlation(params: Parameters, state) -> Correlation:
    """Correlation of T_i and T_j from a live start state.

    The covariance is divided by the square root of the two single-locus
    variances, each chosen by where that locus's pair starts.
    """
    state = State(state) if not isinstance(state, str) else State.parse(state)
    cov = exact_covariance(params, state)
    mi, mj = _locus_moments(params, state)
    if mi.variance <= 0 or mj.variance <= 0:
        raise ArithmeticError("zero variance; correlation undefined")
    return Correlation(cov, mi.variance, mj.variance)


def float_correlation(params: Parameters, state) -> float:
    """Correlation through the float solve path."""
    state = State(state) if not isinstance(state, str) else State.parse(state)
    cov = exact_covariance(params, state, method="float")
    mi, mj = _locus_moments(params, state)
    return cov / float(mi.variance * mj.variance) ** 0.5
