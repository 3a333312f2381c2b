"""Seeded Monte Carlo estimation of the correlation of T_i and T_j.

Two samplers produce (T_i, T_j) pairs:

* ``matrix`` walks the 17-state extended chain, one Philox draw per step;
* ``generative`` traces the four sampled lineages through a population of
  N diploids using the reproduction rules directly, and never consults a
  transition matrix. It is the independent oracle for the chain.

Trial ``t`` draws only from the Philox stream keyed by the master seed at
counter position ``t``, and all aggregation uses exact integer sums, so
results do not depend on the thread count or the order of execution.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from functools import lru_cache

import numpy as np

from ..chain import CDF_SCALE, build_extended_matrix
from ..core import EXTENDED_STATES, Parameters, State
from ..derivation import representative
from . import _fallback

try:
    from . import _kernel as _compiled
except ImportError:  # pragma: no cover - depends on the build
    _compiled = None

__all__ = [
    "BACKEND",
    "SAMPLERS",
    "STEP_CAP",
    "StepCapExceeded",
    "TrialStream",
    "TrialOutcome",
    "CorrelationEstimate",
    "OneStepEstimate",
    "get_backend",
    "default_threads",
    "run_trial",
    "run_trial_generative",
    "sample_outcomes",
    "pearson_from_sums",
    "estimate_correlation",
    "one_step_empirical",
]

STEP_CAP = 10**9
CHUNK = 4096
SAMPLERS = ("matrix", "generative")


def get_backend(name: str | None = None):
    """Kernel module by name: ``cython``, ``python`` or None for the default.

    The default is the compiled kernel when it is importable, unless the
    environment variable ``COALTWO_BACKEND`` is set to ``python``.
    """
    if name is None:
        name = os.environ.get("COALTWO_BACKEND", "cython" if _compiled is not None else "python")
    if name == "python":
        return _fallback
    if name == "cython":
        if _compiled is None:
            raise ImportError("the compiled kernel coaltwo.mc._kernel is not built")
        return _compiled
    raise ValueError(f"unknown backend {name!r}")


BACKEND = "python" if get_backend() is _fallback else "cython"


class StepCapExceeded(RuntimeError):
    """A trial failed to absorb within the step cap."""


def default_threads() -> int:
    """Thread count from ``COALTWO_THREADS``, else 1."""
    raw = os.environ.get("COALTWO_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"COALTWO_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise ValueError(f"COALTWO_THREADS must be a positive integer, got {raw!r}")
    return n


@dataclass(frozen=True)
class TrialStream:
    """Random stream of one trial: Philox keyed by the seed, at one counter."""

    master_seed: int
    trial_index: int

    def __post_init__(self):
        _check_seed(self.master_seed)
        if not 0 <= self.trial_index < 2**64:
            raise ValueError("trial_index must lie in [0, 2**64)")


@dataclass(frozen=True)
class TrialOutcome:
    """Coalescence times (generations) at loci i and j."""

    t_i: int
    t_j: int


@dataclass(frozen=True)
class CorrelationEstimate:
    """Pearson estimate with its exact integer sums.

    ``pearson`` is NaN and ``degenerate`` is True when either sample
    variance is zero.
    """

    pearson: float
    trials: int
    sum_i: int
    sum_j: int
    sum_ii: int
    sum_jj: int
    sum_ij: int
    std_error: float
    degenerate: bool = False

    @property
    def sums(self) -> tuple[int, int, int, int, int]:
        return (self.sum_i, self.sum_j, self.sum_ii, self.sum_jj, self.sum_ij)


@dataclass(frozen=True)
class OneStepEstimate:
    """Empirical one-generation transition frequencies from one start state."""

    start: State
    trials: int
    counts: tuple[int, ...]

    @property
    def states(self) -> tuple[State, ...]:
        return EXTENDED_STATES

    @property
    def frequencies(self) -> np.ndarray:
        return np.array(self.counts, dtype=float) / self.trials

    @property
    def std_errors(self) -> np.ndarray:
        p = self.frequencies
        return np.sqrt(p * (1 - p) / self.trials)


def _check_seed(seed: int):
    if not isinstance(seed, (int, np.integer)) or not 0 <= int(seed) < 2**64:
        raise ValueError(f"master seed must be an integer in [0, 2**64), got {seed!r}")


def _live(start) -> State:
    st = State.parse(start) if isinstance(start, str) else State(start)
    if not st.is_live:
        raise ValueError(f"start state {st.label} is not live")
    return st


@lru_cache(maxsize=64)
def _thresholds(params: Parameters) -> np.ndarray:
    out = build_extended_matrix(params).cdf_thresholds()
    out.setflags(write=False)
    return out


def _prob_threshold(p: Fraction) -> int:
    """floor(p * 2**63); a 63-bit uniform u succeeds when u < threshold."""
    return (p.numerator * CDF_SCALE) // p.denominator


@lru_cache(maxsize=64)
def _layout(start: State) -> tuple[np.ndarray, np.ndarray]:
    reps = representative(start)
    ind = np.array([x[1] for x in reps], dtype=np.int64)
    ch = np.array([x[2] for x in reps], dtype=np.int64)
    ind.setflags(write=False)
    ch.setflags(write=False)
    return ind, ch


def _generative_args(params: Parameters, start: State):
    if params.N >= 2**31:
        raise ValueError("the generative sampler needs N < 2**31")
    ind, ch = _layout(start)
    return params.N, _prob_threshold(params.s), _prob_threshold(params.r), ind, ch


def _run_chunk(kern, sampler, params, start, seed, first, ti, tj, cap):
    if sampler == "matrix":
        status = kern.matrix_trials(_thresholds(params), int(start), seed, first, ti, tj, cap)
    else:
        N, s_thr, r_thr, ind, ch = _generative_args(params, start)
        status = kern.generative_trials(N, s_thr, r_thr, ind, ch, seed, first, ti, tj, cap)
    if status:
        raise StepCapExceeded(f"a trial in [{first}, {first + ti.shape[0]}) exceeded {cap} steps")


def _single(sampler, params, start, stream, backend, cap) -> TrialOutcome:
    start = _live(start)
    ti = np.zeros(1, dtype=np.int64)
    tj = np.zeros(1, dtype=np.int64)
    _run_chunk(get_backend(backend), sampler, params, start, stream.master_seed,
               stream.trial_index, ti, tj, cap)
    return TrialOutcome(int(ti[0]), int(tj[0]))


def run_trial(params: Parameters, start, stream: TrialStream, *, backend: str | None = None,
              step_cap: int = STEP_CAP) -> TrialOutcome:
    """One trial of the matrix-driven sampler.

    Walks the 17-state chain until both loci have coalesced. The clock of
    locus i runs in live states and in the two states where only locus i
    is still uncoalesced; likewise for locus j.
    """
    return _single("matrix", params, start, stream, backend, step_cap)


def run_trial_generative(params: Parameters, start, stream: TrialStream, *,
                         backend: str | None = None, step_cap: int = STEP_CAP) -> TrialOutcome:
    """One trial of the lineage-tracing sampler.

    Each generation, every individual carrying a sampled lineage picks a
    parent pair (one parent twice with probability s, else two distinct
    parents), each lineage-carrying chromosome picks a parental
    chromosome by a fair coin, and the locus-j copy switches to the other
    parental chromosome with probability r.
    """
    return _single("generative", params, start, stream, backend, step_cap)


def sample_outcomes(params: Parameters, start, M: int, master_seed: int, *,
                    sampler: str = "matrix", threads: int | None = None,
                    backend: str | None = None, first_trial: int = 0,
                    step_cap: int = STEP_CAP) -> tuple[np.ndarray, np.ndarray]:
    """Arrays of T_i and T_j for trials ``first_trial .. first_trial + M - 1``."""
    start = _live(start)
    _check_seed(master_seed)
    if sampler not in SAMPLERS:
        raise ValueError(f"unknown sampler {sampler!r}; expected one of {', '.join(SAMPLERS)}")
    if M < 1:
        raise ValueError("M must be positive")
    threads = default_threads() if threads is None else int(threads)
    if threads < 1:
        raise ValueError("threads must be positive")
    kern = get_backend(backend)
    if sampler == "matrix":
        _thresholds(params)
    ti = np.zeros(M, dtype=np.int64)
    tj = np.zeros(M, dtype=np.int64)
    bounds = [(a, min(a + CHUNK, M)) for a in range(0, M, CHUNK)]

    def job(ab):
        a, b = ab
        _run_chunk(kern, sampler, params, start, int(master_seed), first_trial + a,
                   ti[a:b], tj[a:b], step_cap)

    if threads == 1 or len(bounds) == 1:
        for ab in bounds:
            job(ab)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(job, bounds))
    return ti, tj


def _exact_sum(x: np.ndarray) -> int:
    """Exact integer sum of an int64 array in overflow-safe chunks."""
    total = 0
    x = np.asarray(x, dtype=np.int64)
    big = int(np.abs(x).max(initial=0))
    step = max(1, (2**62) // max(big, 1))
    for a in range(0, x.size, step):
        total += int(x[a:a + step].sum())
    return total


def pearson_from_sums(M: int, si: int, sj: int, sii: int, sjj: int, sij: int) -> float:
    """Pearson coefficient from exact sums, correctly rounded; NaN if degenerate."""
    num = M * sij - si * sj
    vi = M * sii - si * si
    vj = M * sjj - sj * sj
    if vi <= 0 or vj <= 0:
        return math.nan
    sq = Fraction(num * num, vi * vj)
    with localcontext() as ctx:
        ctx.prec = 40
        root = (Decimal(sq.numerator) / Decimal(sq.denominator)).sqrt()
    val = float(root) if num >= 0 else -float(root)
    return max(-1.0, min(1.0, val))


def _batch_se(ti: np.ndarray, tj: np.ndarray) -> float:
    M = ti.size
    B = math.isqrt(M)
    if B < 2:
        return math.nan
    vals = []
    for bi, bj in zip(np.array_split(ti, B), np.array_split(tj, B)):
        p = pearson_from_sums(bi.size, *(_sums(bi, bj)))
        if not math.isnan(p):
            vals.append(p)
    if len(vals) < 2:
        return math.nan
    return float(np.std(vals, ddof=1) / math.sqrt(len(vals)))


def _sums(ti, tj):
    return (_exact_sum(ti), _exact_sum(tj), _exact_sum(ti * ti), _exact_sum(tj * tj),
            _exact_sum(ti * tj))


def estimate_correlation(params: Parameters, start, M: int, master_seed: int, *,
                         sampler: str = "matrix", threads: int | None = None,
                         backend: str | None = None) -> CorrelationEstimate:
    """Pearson correlation of T_i and T_j over M seeded trials.

    Parameters
    ----------
    params : Parameters
    start : State or label
        Live start state.
    M : int
        Number of trials, at least 2.
    master_seed : int
        64-bit seed; trial t uses the stream at counter position t.
    sampler : {"matrix", "generative"}
    threads : int, optional
        Worker threads; defaults to ``COALTWO_THREADS`` or 1. The result
        is bit-identical for every thread count.

    Returns
    -------
    CorrelationEstimate
        The standard error comes from batch means over floor(sqrt(M))
        contiguous batches of trials.
    """
    if M < 2:
        raise ValueError("M must be at least 2")
    ti, tj = sample_outcomes(params, start, M, master_seed, sampler=sampler,
                             threads=threads, backend=backend)
    sums = _sums(ti, tj)
    p = pearson_from_sums(M, *sums)
    degenerate = math.isnan(p)
    se = math.nan if degenerate else _batch_se(ti, tj)
    return CorrelationEstimate(p, M, *sums, std_error=se, degenerate=degenerate)


def one_step_empirical(params: Parameters, start, M: int, master_seed: int, *,
                       threads: int | None = None, backend: str | None = None) -> OneStepEstimate:
    """One-generation transition counts from the lineage-tracing sampler.

    The counts are over the 17 extended states, so they can be checked
    against the corresponding row of the extended chain.
    """
    start = _live(start)
    _check_seed(master_seed)
    if M < 1:
        raise ValueError("M must be positive")
    threads = default_threads() if threads is None else int(threads)
    kern = get_backend(backend)
    N, s_thr, r_thr, ind, ch = _generative_args(params, start)
    out = np.zeros(M, dtype=np.int64)
    bounds = [(a, min(a + CHUNK * 16, M)) for a in range(0, M, CHUNK * 16)]

    def job(ab):
        a, b = ab
        kern.generative_one_step(N, s_thr, r_thr, ind, ch, int(master_seed), a, out[a:b])

    if threads == 1 or len(bounds) == 1:
        for ab in bounds:
            job(ab)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(job, bounds))
    counts = np.bincount(out, minlength=17)
    return OneStepEstimate(start, M, tuple(int(c) for c in counts))
