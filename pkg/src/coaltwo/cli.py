"""Command-line interface.

Every command prints flat records with one fixed set of fields (see
:data:`FIELDS`), as a JSON array or as CSV with a header row. Decimal
values carry 15 significant digits; exact rationals are repeated as
``num/den`` in ``value_exact``. Each record holds enough fields to re-run
the computation that produced it.

Exit codes: 0 success, 2 invalid input, 3 I/O failure, 4 internal
invariant violation.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from decimal import Decimal, localcontext
from fractions import Fraction

from . import asympt, exact, mc
from .chain import MatrixInvariantError
from .core import (
    Colocation,
    Parameters,
    ScalingScenario,
    State,
    colocation_signature,
    parse_rational,
    resolve_scenario,
)

__all__ = ["FIELDS", "main", "build_parser", "format_value", "parse_grid"]

FIELDS = (
    "command", "N", "s", "r", "s_exact", "r_exact", "scenario", "sigma", "rho",
    "state", "theta", "t", "colocation", "quantity", "value", "value_exact", "order", "std_error", "seed",
    "trials", "sampler", "sum_i", "sum_j", "sum_ii", "sum_jj", "sum_ij", "reference",
    "abs_dev", "z_score",
)

EXIT_OK, EXIT_INPUT, EXIT_IO, EXIT_INTERNAL = 0, 2, 3, 4
# exact rational solves stay fast up to here; beyond it the float path is used
EXACT_N_LIMIT = 20000


class InputError(ValueError):
    """Invalid command-line input."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


def format_value(x) -> str | None:
    """Decimal string with 15 significant digits; None for missing or NaN."""
    if x is None:
        return None
    if isinstance(x, Fraction):
        if x == 0:
            return "0"
        with localcontext() as ctx:
            ctx.prec = 15
            d = Decimal(x.numerator) / Decimal(x.denominator)
        return _plain(d)
    x = float(x)
    if math.isnan(x):
        return None
    return _plain(Decimal(f"{x:.15g}"))


def _plain(d: Decimal) -> str:
    if d == d.to_integral_value() and abs(d) < Decimal(10) ** 15:
        return str(d.quantize(Decimal(1)))
    return f"{d:g}" if abs(d.adjusted()) > 15 else format(d.normalize(), "f")


def _exact_str(x) -> str | None:
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    return None


def _record(command, **kw) -> dict:
    rec = dict.fromkeys(FIELDS)
    rec["command"] = command
    for k, v in kw.items():
        if k not in rec:
            raise KeyError(k)
        rec[k] = v
    return rec


def _param_fields(p: Parameters) -> dict:
    return {"N": p.N, "s": format_value(p.s), "r": format_value(p.r),
            "s_exact": _exact_str(p.s), "r_exact": _exact_str(p.r)}


def _scenario_fields(sc: ScalingScenario) -> dict:
    out = {"scenario": sc.kind.value}
    if sc.selfing_scales:
        out["sigma"] = _exact_str(sc.sigma_tilde)
    else:
        out["s"], out["s_exact"] = format_value(sc.s), _exact_str(sc.s)
    if sc.recombination_scales:
        out["rho"] = _exact_str(sc.rho_tilde)
    else:
        out["r"], out["r_exact"] = format_value(sc.r), _exact_str(sc.r)
    return out


def _value_fields(v) -> dict:
    return {"value": format_value(v), "value_exact": _exact_str(v)}


def parse_grid(text: str, integer: bool = False) -> list:
    """Grid points from ``start:stop:count`` (inclusive, evenly spaced) or ``a,b,c``.

    Values are exact rationals, or integers when ``integer`` is set.
    """
    text = text.strip()
    if not text:
        raise InputError("empty grid")
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise InputError(f"grid {text!r} must be start:stop:count")
        a, b = parse_rational(parts[0]), parse_rational(parts[1])
        try:
            n = int(parts[2])
        except ValueError:
            raise InputError(f"grid count {parts[2]!r} is not an integer") from None
        if n < 1:
            raise InputError("empty grid")
        pts = [a] if n == 1 else [a + (b - a) * k / (n - 1) for k in range(n)]
    else:
        pts = [parse_rational(x) for x in text.split(",") if x.strip()]
        if not pts:
            raise InputError("empty grid")
    if integer:
        if any(p.denominator != 1 for p in pts):
            raise InputError("N grid points must be integers")
        pts = [int(p) for p in pts]
    return pts


def _state(text: str) -> State:
    try:
        st = State.parse(text)
    except (KeyError, ValueError):
        raise InputError(f"unknown state {text!r}") from None
    if not st.is_live:
        raise InputError(f"{st.label} is not a live state")
    return st


def _params(args) -> Parameters:
    return Parameters(args.N, args.s, args.r)


def _solve_method(args, N: int) -> str:
    if args.method == "auto":
        return "exact" if N <= EXACT_N_LIMIT else "float"
    return args.method


def _exact_corr_value(p: Parameters, st: State, method: str):
    if method == "exact":
        c = exact.exact_correlation(p, st)
        return c.exact if c.exact is not None else float(c)
    return exact.float_correlation(p, st)


# --- exact -------------------------------------------------------------------

def cmd_exact(args) -> list[dict]:
    p = _params(args)
    st = _state(args.state)
    method = _solve_method(args, p.N)
    base = {**_param_fields(p), "state": st.label}
    recs = []
    if args.quantity in ("cov", "moments"):
        cov = exact.exact_covariance(p, st, method=method)
        recs.append(_record("exact", **base, quantity="cov_exact", **_value_fields(cov)))
    if args.quantity == "corr":
        recs.append(_record("exact", **base, quantity="corr_exact",
                            **_value_fields(_exact_corr_value(p, st, method))))
    if args.quantity == "moments":
        mi = exact.single_locus_moments(p, colocation_signature(st)[0])
        mj = exact.single_locus_moments(p, colocation_signature(st)[1])
        joint = exact.solve_joint_moments(p, method)[st]
        for q, v in (("mean_i", mi.mean), ("mean_j", mj.mean), ("var_i", mi.variance),
                     ("var_j", mj.variance), ("joint_moment", joint)):
            recs.append(_record("exact", **base, quantity=q, **_value_fields(v)))
    return recs


# --- asymptotic --------------------------------------------------------------

def _scaling(args) -> ScalingScenario:
    return ScalingScenario(args.scenario, sigma_tilde=args.sigma, rho_tilde=args.rho, s=args.s, r=args.r)


def _asympt_record(command, res: asympt.AsymptoticResult, quantity, N=None, **extra):
    if res.coefficient is None:
        val = None
    elif N is not None:
        val = res.value(N)
    else:
        val = res.coefficient
    return _record(command, quantity=quantity, order=res.order, N=N, **_value_fields(val), **extra)


def cmd_asymptotic(args) -> list[dict]:
    st = _state(args.state)
    if args.quantity == "tajima" and args.recombination_limit:
        lim = asympt.RecombinationLimit(args.s)
        v = asympt.tajima_variance_limit(args.theta, lim, st)
        return [_record("asymptotic", state=st.label, quantity="tajima_var", scenario="recombination_limit",
                        theta=_exact_str(args.theta),
                        s=format_value(lim.s), s_exact=_exact_str(lim.s), **_value_fields(v))]
    sc = _scaling(args)
    allow0 = args.allow_zero_sigma
    base = {**_scenario_fields(sc), "state": st.label}
    if args.quantity == "cov":
        res = asympt.asymptotic_covariance(sc, st, allow_zero_sigma=allow0)
        return [_asympt_record("asymptotic", res, "cov_asympt", args.N, **base)]
    if args.quantity == "corr":
        res = asympt.asymptotic_correlation(sc, st, allow_zero_sigma=allow0)
        return [_asympt_record("asymptotic", res, "corr_asympt", args.N, **base)]
    if args.quantity == "tajima":
        v = asympt.tajima_variance_limit(args.theta, sc, st, N=args.N)
        return [_record("asymptotic", **base, N=args.N, theta=_exact_str(args.theta), quantity="tajima_var",
                        **_value_fields(v))]
    # tail
    if args.t is None:
        raise InputError("--quantity tail needs --t")
    c = colocation_signature(st)[0] if args.colocation is None else Colocation(args.colocation)
    if sc.selfing_scales:
        v = asympt.tail_probability(args.t, c, regime="vanishing_s")
    else:
        v = asympt.tail_probability(args.t, c, regime="constant_s", s=sc.s)
    return [_record("asymptotic", **base, t=format_value(args.t), colocation=c.value, quantity="tail_prob",
                    **_value_fields(v))]


# --- simulate ----------------------------------------------------------------

def _mc_record(command, p, st, est: mc.CorrelationEstimate, seed, sampler, **extra):
    return _record(command, **_param_fields(p), state=st.label, quantity="corr_mc",
                   value=format_value(est.pearson), std_error=format_value(est.std_error),
                   seed=seed, trials=est.trials, sampler=sampler, sum_i=est.sum_i, sum_j=est.sum_j,
                   sum_ii=est.sum_ii, sum_jj=est.sum_jj, sum_ij=est.sum_ij, **extra)


def _check_trials(trials):
    if trials < 2:
        raise InputError("--trials must be at least 2")


def _estimate(args, p, st):
    return mc.estimate_correlation(p, st, args.trials, args.seed, sampler=args.sampler,
                                   threads=args.threads)


def cmd_simulate(args) -> list[dict]:
    p = _params(args)
    st = _state(args.state)
    _check_trials(args.trials)
    est = _estimate(args, p, st)
    return [_mc_record("simulate", p, st, est, args.seed, args.sampler)]


# --- compare -----------------------------------------------------------------

def _matched_scenario(kind: str, p: Parameters) -> ScalingScenario:
    """Scaling scenario whose constants reproduce (s, r) at this N."""
    return ScalingScenario(kind, sigma_tilde=p.s * p.N, rho_tilde=p.r * p.N, s=p.s, r=p.r)


def _asympt_corr(p: Parameters, st: State, kind: str):
    """Leading-order correlation at (N, s, r) with its order and scenario.

    ``kind`` ``auto`` uses scenario iii when s = 0 and iv otherwise. At
    s = 1 or r = 0 the closed extreme-case forms are used instead.
    """
    if p.s == 1 or p.r == 0:
        case = "total_selfing" if p.s == 1 else "no_recombination"
        try:
            ev = asympt.extreme_correlation(case, p, st)
        except ValueError:
            return None, None, None
        if ev.exact is not None:
            return ev.exact, None, None
        return ev.asymptotic.value(p.N), ev.asymptotic.order, None
    if kind == "auto":
        kind = "iii" if p.s == 0 else "iv"
    sc = _matched_scenario(kind, p)
    allow0 = sc.selfing_scales and sc.sigma_tilde == 0
    try:
        if st in (State.Q5, State.Q11, State.Q12):
            res = asympt.asymptotic_correlation(sc, st, allow_zero_sigma=allow0)
        else:
            cov = asympt.asymptotic_covariance(sc, st, allow_zero_sigma=allow0)
            res = asympt.covariance_to_correlation(sc, st, cov)
    except ValueError:
        return None, None, kind
    if res.coefficient is None:
        return None, res.order, kind
    return res.value(p.N), res.order, kind


def cmd_compare(args) -> list[dict]:
    p = _params(args)
    st = _state(args.state)
    _check_trials(args.trials)
    method = _solve_method(args, p.N)
    base = {**_param_fields(p), "state": st.label}
    ex = _exact_corr_value(p, st, method)
    recs = [_record("compare", **base, quantity="corr_exact", **_value_fields(ex))]
    av, order, kind = _asympt_corr(p, st, args.scenario)
    if av is None:
        dev = None
    elif isinstance(ex, Fraction) and isinstance(av, Fraction):
        dev = abs(ex - av)
    else:
        dev = abs(float(ex) - float(av))
    matched = _scenario_fields(_matched_scenario(kind, p)) if kind else {}
    recs.append(_record("compare", **{**base, **matched},
                        quantity="corr_asympt", order=order, **_value_fields(av),
                        reference="corr_exact", abs_dev=format_value(dev)))
    est = _estimate(args, p, st)
    extra = {"reference": "corr_exact", "abs_dev": format_value(abs(est.pearson - float(ex)))}
    if est.std_error and not math.isnan(est.std_error) and est.std_error > 0:
        extra["z_score"] = format_value((est.pearson - float(ex)) / est.std_error)
    recs.append(_mc_record("compare", p, st, est, args.seed, args.sampler, **extra))
    return recs


# --- sweep -------------------------------------------------------------------

_VARY_FIELD = {"s": "s", "r": "r", "sigma": "sigma_tilde", "rho": "rho_tilde"}


def cmd_sweep(args) -> list[dict]:
    st = _state(args.state)
    paths = {x.strip() for x in args.paths.split(",") if x.strip()}
    unknown = paths - {"asympt", "exact", "mc"}
    if unknown or not paths:
        raise InputError(f"--paths must name asympt, exact and/or mc, got {args.paths!r}")
    if "mc" in paths:
        _check_trials(args.trials)
    points = parse_grid(args.grid, integer=args.vary == "N")
    consts = {"sigma_tilde": args.sigma, "rho_tilde": args.rho, "s": args.s, "r": args.r}
    sc0 = ScalingScenario(args.scenario, **consts) if args.vary == "N" else None
    if args.vary != "N":
        field = _VARY_FIELD[args.vary]
        probe = ScalingScenario(args.scenario, **{**consts, field: points[0]})
        used = {"sigma_tilde": probe.selfing_scales, "rho_tilde": probe.recombination_scales,
                "s": not probe.selfing_scales, "r": not probe.recombination_scales}
        if not used[field]:
            raise InputError(f"scenario {args.scenario} has no parameter {args.vary!r} to vary")
        if args.N is None:
            raise InputError("--N is required unless --vary N")
    recs = []
    for x in points:
        if args.vary == "N":
            sc, N = sc0, x
        else:
            sc, N = ScalingScenario(args.scenario, **{**consts, field: x}), args.N
        p = resolve_scenario(sc, N)
        base = {**_param_fields(p), **_scenario_fields(sc), "state": st.label}
        ref_val, ref_name = None, None
        if "asympt" in paths:
            res = asympt.asymptotic_correlation(sc, st)
            val = None if res.coefficient is None else res.value(N)
            recs.append(_record("sweep", **base, quantity="corr_asympt", order=res.order, **_value_fields(val)))
            ref_val, ref_name = val, "corr_asympt"
        if "exact" in paths:
            ev = _exact_corr_value(p, st, _solve_method(args, N))
            recs.append(_record("sweep", **base, quantity="corr_exact", **_value_fields(ev)))
            if ref_val is None:
                ref_val, ref_name = ev, "corr_exact"
        if "mc" in paths:
            est = _estimate(args, p, st)
            extra = {}
            if ref_val is not None:
                extra = {"reference": ref_name, "abs_dev": format_value(abs(est.pearson - float(ref_val)))}
                if est.std_error > 0:
                    extra["z_score"] = format_value((est.pearson - float(ref_val)) / est.std_error)
            rec = _mc_record("sweep", p, st, est, args.seed, args.sampler, **extra)
            rec.update({k: v for k, v in base.items() if k in ("scenario", "sigma", "rho")})
            recs.append(rec)
    return recs


# --- output ------------------------------------------------------------------

def render(records: list[dict], fmt: str) -> str:
    if fmt == "json":
        return json.dumps(records, indent=1) + "\n"
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=FIELDS, lineterminator="\n")
    w.writeheader()
    for rec in records:
        w.writerow({k: ("" if v is None else v) for k, v in rec.items()})
    return buf.getvalue()


def _threads_default():
    try:
        return mc.default_threads()
    except ValueError as exc:
        raise InputError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="coaltwo", description=__doc__.split("\n")[0])
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--out", default=None, help="write to this file instead of stdout")

    def finite(p):
        p.add_argument("--N", type=int, required=True)
        p.add_argument("--s", type=parse_rational, required=True)
        p.add_argument("--r", type=parse_rational, required=True)
        p.add_argument("--state", required=True)

    def solve(p):
        p.add_argument("--method", choices=("auto", "exact", "float"), default="auto",
                       help=f"linear solve; auto is exact up to N = {EXACT_N_LIMIT}")

    def sim(p, required=True):
        p.add_argument("--trials", type=int, required=required, default=None if required else 0)
        p.add_argument("--seed", type=int, required=required, default=None if required else 0)
        p.add_argument("--threads", type=int, default=None, help="default: COALTWO_THREADS or 1")
        p.add_argument("--sampler", choices=mc.SAMPLERS, default="matrix")

    p = sub.add_parser("exact", help="exact finite-N covariance, correlation or moments")
    finite(p)
    p.add_argument("--quantity", choices=("cov", "corr", "moments"), default="cov")
    solve(p)
    common(p)

    p = sub.add_parser("asymptotic", help="leading large-N behaviour")
    p.add_argument("--scenario", choices=("i", "ii", "iii", "iv"), default=None)
    p.add_argument("--sigma", type=parse_rational, default=None)
    p.add_argument("--rho", type=parse_rational, default=None)
    p.add_argument("--s", type=parse_rational, default=None)
    p.add_argument("--r", type=parse_rational, default=None)
    p.add_argument("--state", required=True)
    p.add_argument("--quantity", choices=("cov", "corr", "tajima", "tail"), default="cov")
    p.add_argument("--N", type=int, default=None, help="evaluate the leading term at this N")
    p.add_argument("--theta", type=parse_rational, default=Fraction(1))
    p.add_argument("--t", type=float, default=None, help="time in units of N generations")
    p.add_argument("--colocation", choices=("same", "diff"), default=None)
    p.add_argument("--recombination-limit", action="store_true",
                   help="Tajima variance in the limit of free recombination at fixed s")
    p.add_argument("--allow-zero-sigma", action="store_true")
    common(p)

    p = sub.add_parser("simulate", help="Monte Carlo correlation estimate")
    finite(p)
    sim(p)
    common(p)

    p = sub.add_parser("compare", help="exact, asymptotic and Monte Carlo side by side")
    finite(p)
    sim(p)
    solve(p)
    p.add_argument("--scenario", choices=("auto", "i", "ii", "iii", "iv"), default="auto",
                   help="scaling used for the asymptotic column; auto is iii at s = 0, else iv")
    common(p)

    p = sub.add_parser("sweep", help="records over a parameter grid")
    p.add_argument("--scenario", choices=("i", "ii", "iii", "iv"), required=True)
    p.add_argument("--state", required=True)
    p.add_argument("--vary", choices=("s", "r", "N", "sigma", "rho"), required=True)
    p.add_argument("--grid", required=True, help="start:stop:count or a comma list")
    p.add_argument("--N", type=int, default=None)
    p.add_argument("--sigma", type=parse_rational, default=None)
    p.add_argument("--rho", type=parse_rational, default=None)
    p.add_argument("--s", type=parse_rational, default=None)
    p.add_argument("--r", type=parse_rational, default=None)
    p.add_argument("--paths", default="asympt,exact,mc")
    sim(p, required=False)
    solve(p)
    common(p)
    return ap


COMMANDS = {"exact": cmd_exact, "asymptotic": cmd_asymptotic, "simulate": cmd_simulate,
            "compare": cmd_compare, "sweep": cmd_sweep}


def _needs_scenario(args):
    if args.command == "asymptotic" and args.scenario is None and not args.recombination_limit:
        raise InputError("--scenario is required")


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        _needs_scenario(args)
        if getattr(args, "threads", 0) is None:
            args.threads = _threads_default()
        if getattr(args, "threads", 1) < 1:
            raise InputError("--threads must be positive")
        if getattr(args, "seed", 0) is not None and not 0 <= getattr(args, "seed", 0) < 2**64:
            raise InputError("--seed must lie in [0, 2**64)")
        text = render(COMMANDS[args.command](args), args.format)
    except (mc.StepCapExceeded, MatrixInvariantError) as exc:
        print(f"coaltwo: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except (InputError, ValueError, TypeError, KeyError) as exc:
        msg = str(exc).strip().splitlines()[0] if str(exc).strip() else type(exc).__name__
        print(f"coaltwo: error: {msg}", file=sys.stderr)
        return EXIT_INPUT
    except ArithmeticError as exc:
        print(f"coaltwo: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    try:
        if args.out is None or args.out == "-":
            sys.stdout.write(text)
        else:
            with open(args.out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
    except OSError as exc:
        print(f"coaltwo: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
