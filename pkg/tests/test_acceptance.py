"""Acceptance criteria, each checked at its stated tolerance and time budget.

Every test prints one ``criterion k: PASS`` or ``criterion k: FAIL`` line
to the terminal (also without ``-s``) before asserting.
"""
import csv
import io
import time
from fractions import Fraction

import numpy as np
import pytest

from coaltwo import cli
from coaltwo.asympt import (
    RecombinationLimit,
    asymptotic_correlation,
    order_N_covariance,
    tajima_variance_limit,
)
from coaltwo.chain import appendix_reference_matrix, build_extended_matrix, build_two_locus_matrix
from coaltwo.core import LIVE_STATES, Parameters, ScalingScenario, State, resolve_scenario
from coaltwo.exact import (
    exact_correlation,
    float_correlation,
    single_locus_moments,
    solve_covariances,
    solve_single_locus,
)
from coaltwo.mc import estimate_correlation, one_step_empirical

F = Fraction
GRID = [F(k, 4) for k in range(5)]


@pytest.fixture
def report(capsys):
    def _report(k, ok, seconds, budget, detail=""):
        ok = ok and seconds < budget
        line = f"criterion {k}: {'PASS' if ok else 'FAIL'} ({seconds:.2f} s, budget {budget} s){' ' + detail if detail else ''}"
        with capsys.disabled():
            print("\n" + line)
        return ok
    return _report


def test_criterion_01_matrix_exactness(report):
    t0 = time.perf_counter()
    bad = []
    for N in (2, 3, 4, 5, 10, 50, 200):
        for s in GRID:
            for r in GRID:
                p = Parameters(N, s, r)
                for m in (build_two_locus_matrix(p), build_extended_matrix(p)):
                    for row in m.entries:
                        if sum(row) != 1 or min(row) < 0:
                            bad.append((N, s, r, m.size))
    assert report(1, not bad, time.perf_counter() - t0, 5, f"bad rows: {len(bad)}")


def test_criterion_02_special_tables(report):
    t0 = time.perf_counter()
    checked = mismatched = 0
    for N in (2, 5, 10):
        for x in GRID:
            cases = [("total_selfing", Parameters(N, 1, x)), ("no_recombination", Parameters(N, x, 0)),
                     ("free_recombination", Parameters(N, x, F(1, 2)))]
            for case, p in cases:
                checked += 1
                if appendix_reference_matrix(case, p) != build_two_locus_matrix(p):
                    mismatched += 1
    assert report(2, mismatched == 0, time.perf_counter() - t0, 1, f"{checked} tables, {mismatched} differ")


def test_criterion_03_single_locus_moments(report):
    t0 = time.perf_counter()
    bad = 0
    for N in range(2, 51):
        for k in range(11):
            p = Parameters(N, F(k, 10), 0)
            solved = solve_single_locus(p)
            for c, m in solved.items():
                bad += m != single_locus_moments(p, c)
    assert report(3, bad == 0, time.perf_counter() - t0, 1, f"{bad} mismatches")


def test_criterion_04_extreme_identities(report):
    t0 = time.perf_counter()
    bad = []
    for N in range(2, 21):
        for x in GRID:
            p = Parameters(N, 1, x)
            cov = solve_covariances(p)
            d = 1 + 2 * x - 2 * x * x
            if cov[State.Q12] != 6 / d - 4:
                bad.append(("s=1 q12", N, x))
            if cov[State.Q5] != 2 * (2 * x - 1) ** 2 / ((3 * N + 1) * d):
                bad.append(("s=1 q5", N, x))
            p = Parameters(N, x, 0)
            cov = solve_covariances(p)
            if cov[State.Q11] != (4 - 4 * x + x * x) * N * N + (2 - 3 * x) * N + 2:
                bad.append(("r=0 q11", N, x))
            if cov[State.Q12] != (4 - 4 * x) * N * N + (2 - 2 * x) * N + 2:
                bad.append(("r=0 q12", N, x))
    assert report(4, not bad, time.perf_counter() - t0, 5, f"failures: {bad[:3]}")


def test_criterion_05_large_N_convergence(report):
    t0 = time.perf_counter()
    N = 10**4
    sc1 = ScalingScenario("i", sigma_tilde=1, rho_tilde=1)
    cov = solve_covariances(resolve_scenario(sc1, N), "float")[State.Q11] / N**2
    e1 = abs(cov - 44 / 43) / (44 / 43)
    c4 = float_correlation(Parameters(N, F(1, 2), F(1, 2)), "q12")
    e4 = abs(c4 - 1 / 7) / (1 / 7)
    c3 = N * float_correlation(Parameters(N, 0, F(1, 2)), "q12")
    e3 = abs(c3 - 1 / 12) / (1 / 12)
    ok = e1 <= 0.01 and e4 <= 0.01 and e3 <= 0.02
    assert report(5, ok, time.perf_counter() - t0, 10, f"rel errors i={e1:.2e} iv={e4:.2e} iii={e3:.2e}")


def test_criterion_06_q11_polynomial(report):
    t0 = time.perf_counter()
    N = 10**5
    worst = 0.0
    for s in (F(1, 5), F(1, 2), F(4, 5)):
        for r in (F(1, 5), F(1, 2), F(4, 5)):
            sc = ScalingScenario("iv", s=s, r=r)
            c = float(order_N_covariance(sc, "q11"))
            got = solve_covariances(resolve_scenario(sc, N), "float")[State.Q11] / N
            worst = max(worst, abs(got - c) / abs(c))
    assert report(6, worst <= 0.005, time.perf_counter() - t0, 10, f"worst rel error {worst:.2e}")


def test_criterion_07_monte_carlo_vs_exact(report):
    t0 = time.perf_counter()
    zs = []
    for p, st in ((Parameters(500, F(3, 10), F(1, 10)), "q12"), (Parameters(500, 0, F(1, 500)), "q11")):
        est = estimate_correlation(p, st, 2 * 10**5, 20240601)
        zs.append((est.pearson - float(exact_correlation(p, st))) / est.std_error)
    ok = all(abs(z) <= 4 for z in zs)
    assert report(7, ok, time.perf_counter() - t0, 60, "z = " + ", ".join(f"{z:+.2f}" for z in zs))


def test_criterion_08_one_step_frequencies(report):
    t0 = time.perf_counter()
    p = Parameters(10, F(1, 2), F(1, 4))
    ext = build_extended_matrix(p).to_float()
    base = build_two_locus_matrix(p).to_float()
    M = 10**6
    worst = 0.0
    ok = True
    for st in LIVE_STATES:
        est = one_step_empirical(p, st, M, 8000 + int(st))
        f17 = est.frequencies
        # 13-state row: the five coalescent substates lumped into q0
        f13 = np.append(f17[:12], f17[12:].sum())
        for freq, row in ((f13, base[int(st)]), (f17, ext[int(st)])):
            se = np.sqrt(row * (1 - row) / M)
            dev = np.abs(freq - row)
            ok &= bool(np.all((dev <= 4 * se) | ((row == 0) & (freq == 0))))
            with np.errstate(divide="ignore", invalid="ignore"):
                worst = max(worst, float(np.nanmax(np.where(se > 0, dev / se, 0))))
    assert report(8, ok, time.perf_counter() - t0, 60, f"max |dev|/SE {worst:.2f}")


def test_criterion_09_limits(report):
    t0 = time.perf_counter()
    s = F(2, 5)
    ii = float(asymptotic_correlation(ScalingScenario("ii", s=s, rho_tilde=10**6), "q12").coefficient)
    iv = float(asymptotic_correlation(ScalingScenario("iv", s=s, r=1 - F(1, 10**6)), "q12").coefficient)
    taj = tajima_variance_limit(1, RecombinationLimit(F(1, 2)), "q12")
    ok = abs(ii - 0.2) <= 1e-4 and abs(iv - 0.2) <= 1e-4 and taj == F(1, 16)
    assert report(9, ok, time.perf_counter() - t0, 1, f"ii={ii:.7f} iv={iv:.7f} tajima={taj}")


def test_criterion_10_thread_determinism(report, capsys):
    t0 = time.perf_counter()
    outs = []
    for threads in (1, 4, 8):
        code = cli.main(["simulate", "--N", "500", "--s", "0.3", "--r", "0.1", "--state", "q12",
                         "--trials", "50000", "--seed", "42", "--threads", str(threads), "--format", "csv"])
        outs.append((code, capsys.readouterr().out))
    ok = all(code == 0 for code, _ in outs) and len({out for _, out in outs}) == 1
    assert report(10, ok, time.perf_counter() - t0, 30, "byte-identical" if ok else "outputs differ")


@pytest.mark.slow
def test_sweep_regenerates_scenario_i_curve(report, capsys):
    t0 = time.perf_counter()
    code = cli.main(["sweep", "--scenario", "i", "--state", "q12", "--vary", "rho", "--grid", "0.2:10:50",
                     "--sigma", "1", "--N", "500", "--paths", "asympt,mc", "--trials", "20000",
                     "--seed", "3", "--format", "csv"])
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    mc_rows = [r for r in rows if r["quantity"] == "corr_mc"]
    zs = [abs(float(r["z_score"])) for r in mc_rows]
    ok = code == 0 and len(mc_rows) == 50 and max(zs) <= 4
    with capsys.disabled():
        print(f"\nsweep (scenario i, q12, N=500, M=20000, 50 points): {'PASS' if ok else 'FAIL'} "
              f"({time.perf_counter() - t0:.2f} s) max |z| {max(zs):.2f}")
    assert ok
