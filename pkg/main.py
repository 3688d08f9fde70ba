#!/usr/bin/env python3
"""
Command-line entry point for DP location-scale mixtures.

Subcommands cover prior tail estimation, distances between mixtures, sieve bounds,
posterior fitting, f₀ regularity checks and end-to-end consistency experiments.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
import time
from pathlib import Path
from typing import Any

import numpy as np
from pydantic import ValidationError

from Mixtures.config import load_base_measure, load_experiment
from Mixtures.consistency_harness import ingest_data, run, summarize, write_results
from Mixtures.core_math import MixtureDensity
from Mixtures.distances import Metric, estimate_distance
from Mixtures.errors import DPMixturesError, EstimationError, InputError
from Mixtures.f0_checker import F0Spec, check_f0
from Mixtures.posterior_sampler import DPMixtureModel, MCMCConfig, fit, fit_chains
from Mixtures.priors import check_consistency_constraints, condition_number_threshold
from Mixtures.random_streams import stream
from Mixtures.sieve import (
    DEFAULT_J_MAX,
    DEFAULT_L_MAX,
    SieveParams,
    entropy_bound,
    prior_complement_bound,
    summability_series,
)
from Mixtures.tails import (
    TailRequirements,
    TailStatistic,
    analytic_condition_number_exponent,
    auto_grid,
    draw_statistic,
    estimate_survival,
    fit_tail_exponent,
    log_grid,
    survival_from_counts,
    verify_tail_conditions,
    write_tail_csv,
)
from utilities.logging_setup import setup_logging
from utilities.report_display import (
    RED,
    RESET,
    render_checks,
    render_key_values,
    render_table,
    render_tail_report,
)

logger = logging.getLogger("DPMixtures.CLI")


def _load_mixture(path: str) -> MixtureDensity:
    try:
        with open(path, encoding="utf-8") as fh:
            return MixtureDensity.from_dict(json.load(fh))
    except OSError as exc:
        raise InputError(f"cannot read mixture file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc


def _parse_grid(text: str) -> np.ndarray:
    try:
        lo, hi, points = text.split(":")
        return log_grid(float(lo), float(hi), int(points))
    except ValueError as exc:
        if isinstance(exc, DPMixturesError):
            raise
        raise InputError(f"grid must look like lo:hi:points, got {text!r}") from exc


def _write_key_values(path: str, values: dict[str, Any]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["key", "value"])
        for key, value in values.items():
            writer.writerow([key, repr(value) if isinstance(value, float) else value])


# --------------------------------------------------------------------------- #
#  Subcommands
# --------------------------------------------------------------------------- #
def cmd_tails(args: argparse.Namespace) -> int:
    spec = load_base_measure(args.prior)
    statistic = TailStatistic(args.statistic)
    source = spec.location if statistic is TailStatistic.NORM_THETA else spec.covariance
    if args.grid:
        estimate = estimate_survival(source, statistic, _parse_grid(args.grid), args.samples, args.seed, args.workers)
    else:
        values = draw_statistic(source, statistic, args.samples, args.seed, args.workers)
        grid = auto_grid(values)
        if grid is None:
            raise EstimationError(f"{statistic.value} has no spread above its median; pass --grid")
        hits = (values.size - np.searchsorted(np.sort(values), grid, side="right")).astype(float)
        estimate = survival_from_counts(statistic, grid, hits, values.size)
    slope, stderr = fit_tail_exponent(estimate)
    estimate = estimate.model_copy(update={"fitted_slope": slope, "slope_stderr": stderr})
    analytic = analytic_condition_number_exponent(spec.covariance) if statistic is TailStatistic.CONDITION_NUMBER else None
    if args.out:
        write_tail_csv(args.out, estimate, analytic)
    print(
        render_key_values(
            f"Tail of {statistic.value}",
            {"samples": estimate.n_samples, "slope": slope, "slope_stderr": stderr, "analytic_exponent": analytic},
        )
    )
    return 0


def cmd_distance(args: argparse.Namespace) -> int:
    f, g = _load_mixture(args.f), _load_mixture(args.g)
    est = estimate_distance(args.metric, f, g, args.budget, stream(args.seed))
    print(render_key_values(f"{est.metric.value} distance", {"value": est.value, "stderr": est.stderr}))
    return 0


def cmd_sieve(args: argparse.Namespace) -> int:
    if args.mode == "entropy":
        values: dict[str, Any] = {
            "log_covering_bound": entropy_bound(
                args.d,
                args.H,
                args.M,
                args.sigma,
                args.epsilon,
                [args.a_upper] * args.H,
                [args.a_lower] * args.H,
                [args.u] * args.H,
                args.C1,
            )
        }
    elif args.mode == "complement":
        if args.n is not None:
            params = SieveParams.from_sample_size(args.n, args.epsilon, args.C, args.alpha, args.c1, args.c2, args.c3)
        else:
            params = SieveParams(
                epsilon=args.epsilon,
                H=args.H,
                M=args.M,
                sigma=args.sigma,
                alpha=args.alpha,
                c1=args.c1,
                c2=args.c2,
                c3=args.c3,
                C=args.C,
            )
        bound = prior_complement_bound(params, args.d)
        values = {
            "H": params.H,
            "stick_term": bound.stick_term,
            "tail_term": bound.tail_term,
            "total": bound.total,
            "complement_rate": params.complement_rate(args.d),
        }
    else:
        if args.n is None:
            raise InputError("summability needs --n")
        params = SieveParams.from_sample_size(args.n, args.epsilon, args.C, args.alpha, args.c1, args.c2, args.c3)
        req = TailRequirements(d=args.d, r=args.r, kappa=args.kappa, c1=args.c1, c2=args.c2, c3=args.c3)
        result = summability_series(params, req, args.c, (args.j_max, args.l_max), args.C1)
        values = {
            "H": result.H,
            "divergent": result.divergent,
            "log_partial": result.log_partial,
            "log_upper": result.log_upper,
            "value": result.value,
            "c4": result.c4,
            "max_C": result.max_C,
        }
        for reason in result.reasons:
            print(f"{RED}{reason}{RESET}")
    if args.out:
        _write_key_values(args.out, values)
    print(render_key_values(f"sieve {args.mode}", values))
    return 0


def cmd_fit(args: argparse.Namespace) -> int:
    data = ingest_data(args.data, header=args.header)
    model = DPMixtureModel(alpha=args.alpha, base=load_base_measure(args.prior), truncation=args.trunc)
    cfg = MCMCConfig(
        iterations=args.iters, burn_in=args.burnin, thin=args.thin, seed=args.seed, standardize=args.standardize
    )
    draws = fit(data, model, cfg) if args.chains == 1 else fit_chains(data, model, cfg, args.chains)
    if args.out:
        Path(args.out).write_text(json.dumps(draws.to_dict()), encoding="utf-8")
    values = {"snapshots": len(draws), "mean_remainder": float(np.mean(draws.remainders))}
    values.update({f"acceptance[{k}]": v for k, v in draws.acceptance.items()})
    print(render_key_values("fit", values))
    return 0


def cmd_check_f0(args: argparse.Namespace) -> int:
    spec = F0Spec(density=_load_mixture(args.f0), eta=args.eta, delta=args.delta, M=args.M)
    report = check_f0(spec, args.budget, stream(args.seed), args.workers)
    print(render_checks("f0 regularity", report.checks, report.passed))
    return 0 if report.passed else 1


def cmd_consistency(args: argparse.Namespace) -> int:
    config = load_experiment(args.config)
    start = time.perf_counter()
    result = run(config, workers=args.workers)
    elapsed = time.perf_counter() - start
    csv_path, _ = write_results(result, config, args.out_dir, elapsed if config.record_seconds else None)
    rows = [(s.n, s.replicates, s.median_distance, s.iqr_distance, s.median_exceedance) for s in summarize(result)]
    print(render_table("consistency", ("n", "reps", "median_dist", "iqr", "median_exceed"), rows))
    print(f"results written to {csv_path}")
    return 0


def cmd_constraints(args: argparse.Namespace) -> int:
    spec = load_base_measure(args.prior)
    report = check_consistency_constraints(spec)
    print(render_checks(f"{report.family.value} prior, d={report.d}", report.checks, report.passed))
    return 0 if report.passed else 1


def cmd_verify_tails(args: argparse.Namespace) -> int:
    spec = load_base_measure(args.prior)
    r = args.r
    if r is None:
        r = spec.location.tail_r if np.isfinite(spec.location.tail_r) else float(spec.d)
    kappa = args.kappa if args.kappa is not None else analytic_condition_number_exponent(spec.covariance)
    if kappa is None:
        raise InputError(f"no closed-form condition-number exponent for the {spec.covariance.family} prior; pass --kappa")
    req = TailRequirements(d=spec.d, r=r, kappa=kappa)
    report = verify_tail_conditions(spec, req, args.samples, args.seed, args.workers)
    print(render_tail_report(report))
    logger.info(f"verify-tails: threshold d(d−1) = {condition_number_threshold(spec.d):g}, passed={report.passed}")
    return 0 if report.passed else 1


# --------------------------------------------------------------------------- #
#  Parser
# --------------------------------------------------------------------------- #
def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="DP location-scale Gaussian mixtures: priors, sieves and consistency")
    parser.add_argument("--verbose", "-v", action="store_true", help="Echo log records to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tails", help="Survival curve and log-log slope of a prior statistic")
    p.add_argument("--prior", required=True, help="Prior TOML file")
    p.add_argument("--statistic", choices=[s.value for s in TailStatistic], default="condition_number")
    p.add_argument("--grid", help="lo:hi:points (log spaced); chosen from sample quantiles when omitted")
    p.add_argument("--samples", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", help="CSV output")
    p.set_defaults(func=cmd_tails)

    p = sub.add_parser("distance", help="Monte Carlo distance between two mixtures")
    p.add_argument("--f", required=True, help="Mixture JSON")
    p.add_argument("--g", required=True, help="Mixture JSON")
    p.add_argument("--metric", choices=[m.value for m in Metric], default="hellinger")
    p.add_argument("--budget", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_distance)

    p = sub.add_parser("sieve", help="Entropy, prior-complement and summability bounds")
    p.add_argument("--mode", choices=["entropy", "complement", "summability"], required=True)
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--epsilon", type=float, default=0.5)
    p.add_argument("--H", type=int, default=1)
    p.add_argument("--M", type=int, default=1)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--c1", type=float, default=1.0)
    p.add_argument("--c2", type=float, default=1.0)
    p.add_argument("--c3", type=float, default=1.0)
    p.add_argument("--C", type=float, default=1.0, help="Sieve-size constant")
    p.add_argument("--C1", type=float, default=1.0, help="Entropy constant")
    p.add_argument("--n", type=int, help="Sample size; derives H, M and sigma")
    p.add_argument("--a-upper", dest="a_upper", type=float, default=1.0)
    p.add_argument("--a-lower", dest="a_lower", type=float, default=0.0)
    p.add_argument("--u", type=float, default=1.0, help="Condition-number bound per component")
    p.add_argument("--r", type=float, default=2.0, help="Location tail exponent")
    p.add_argument("--kappa", type=float, default=5.0, help="Condition-number tail exponent")
    p.add_argument("--c", type=float, default=1.0, help="Exponent constant in e^{-(4-c)nε²}")
    p.add_argument("--j-max", dest="j_max", type=int, default=DEFAULT_J_MAX)
    p.add_argument("--l-max", dest="l_max", type=int, default=DEFAULT_L_MAX)
    p.add_argument("--out", help="CSV output (key,value)")
    p.set_defaults(func=cmd_sieve)

    p = sub.add_parser("fit", help="Blocked Gibbs posterior fit")
    p.add_argument("--data", required=True, help="CSV with d columns")
    p.add_argument("--header", action="store_true", help="Skip the first CSV line")
    p.add_argument("--prior", required=True, help="Prior TOML file")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--trunc", type=int, default=None, help="Truncation H")
    p.add_argument("--iters", type=int, default=2000)
    p.add_argument("--burnin", type=int, default=500)
    p.add_argument("--thin", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--chains", type=int, default=1)
    p.add_argument("--standardize", action="store_true")
    p.add_argument("--out", help="Fit JSON output")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("check-f0", help="Regularity checks on a candidate f0")
    p.add_argument("--f0", required=True, help="Mixture JSON")
    p.add_argument("--eta", type=float, default=1.0)
    p.add_argument("--delta", type=float, default=0.5)
    p.add_argument("--M", type=float, default=None, help="Claimed bound on sup f0")
    p.add_argument("--budget", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_check_f0)

    p = sub.add_parser("consistency", help="Posterior consistency experiment over an n-grid")
    p.add_argument("--config", required=True, help="Experiment TOML file")
    p.add_argument("--out-dir", dest="out_dir", required=True)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_consistency)

    p = sub.add_parser("constraints", help="Hyperparameter constraints for consistency")
    p.add_argument("--prior", required=True, help="Prior TOML file")
    p.set_defaults(func=cmd_constraints)

    p = sub.add_parser("verify-tails", help="Monte Carlo verdicts on the four base-measure tail conditions")
    p.add_argument("--prior", required=True, help="Prior TOML file")
    p.add_argument("--r", type=float, default=None, help="Claimed location exponent; from the prior when omitted")
    p.add_argument("--kappa", type=float, default=None, help="Claimed condition-number exponent")
    p.add_argument("--samples", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_verify_tails)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging("DPMixtures", console=args.verbose)
    logger.info(f"command {args.command}")
    try:
        return args.func(args)
    except (DPMixturesError, ValidationError) as exc:
        logger.error(f"{args.command} failed: {exc}")
        print(f"{RED}error:{RESET} {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
