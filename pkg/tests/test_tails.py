import os
import sys

import numpy as np
import pytest

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from Mixtures.errors import EstimationError, InputError
from Mixtures.priors import BaseMeasureSpec, FactorParams, IWParams, LocationKind, LocationPriorSpec, SpectralParams
from Mixtures.tails import (
    TailEstimate,
    TailRequirements,
    TailStatistic,
    Verdict,
    analytic_condition_number_exponent,
    draw_statistic,
    estimate_survival,
    fit_tail_exponent,
    log_grid,
    power_law_diagnostic,
    read_tail_csv,
    survival_from_counts,
    verify_tail_conditions,
    write_tail_csv,
)


def pareto(alpha):
    return lambda size, rng: rng.pareto(alpha, size) + 1.0


def test_pareto_slope_recovered():
    t = estimate_survival(pareto(3.0), TailStatistic.CONDITION_NUMBER, log_grid(1.0, 100.0, 30), 200_000, 0)
    slope, se = fit_tail_exponent(t)
    assert slope == pytest.approx(-3.0, abs=0.15)
    assert se < 0.1


def test_survival_independent_of_worker_count():
    grid = log_grid(1.0, 50.0, 12)
    one = estimate_survival(pareto(2.0), TailStatistic.CONDITION_NUMBER, grid, 250_000, 42, workers=1)
    three = estimate_survival(pareto(2.0), TailStatistic.CONDITION_NUMBER, grid, 250_000, 42, workers=3)
    assert one.survival == three.survival


def test_survival_is_nonincreasing():
    t = estimate_survival(IWParams(d=2, nu=6.0), "condition_number", log_grid(1.0, 1e3, 25), 50_000, 1)
    assert all(b <= a for a, b in zip(t.survival, t.survival[1:]))


def test_too_few_samples_rejected():
    with pytest.raises(InputError):
        estimate_survival(pareto(2.0), TailStatistic.CONDITION_NUMBER, [1.0, 2.0], 100, 0)


def test_descending_grid_rejected():
    with pytest.raises(InputError):
        estimate_survival(pareto(2.0), TailStatistic.CONDITION_NUMBER, [2.0, 1.0], 20_000, 0)


def test_norm_theta_needs_location_prior():
    with pytest.raises(InputError):
        draw_statistic(IWParams(d=2, nu=6.0), TailStatistic.NORM_THETA, 10, 0)


def test_fit_needs_three_points():
    t = TailEstimate(
        statistic=TailStatistic.CONDITION_NUMBER,
        grid=[1.0, 2.0],
        survival=[0.05, 0.01],
        stderr=[0.0, 0.0],
        n_samples=100_000,
    )
    with pytest.raises(EstimationError):
        fit_tail_exponent(t)


def test_exponential_tail_flagged_lighter_than_power():
    exponential = lambda size, rng: rng.exponential(1.0, size) + 1.0  # noqa: E731
    t = estimate_survival(exponential, TailStatistic.LAMBDA_MAX_INV, log_grid(1.0, 14.0, 40), 1_000_000, 5)
    assert power_law_diagnostic(t).non_power_law


def test_pareto_not_flagged():
    t = estimate_survival(pareto(2.0), TailStatistic.CONDITION_NUMBER, log_grid(1.0, 100.0, 40), 1_000_000, 5)
    assert not power_law_diagnostic(t).non_power_law


def test_analytic_exponents():
    assert analytic_condition_number_exponent(IWParams(d=2, nu=8.0)) == pytest.approx(3.5)
    assert analytic_condition_number_exponent(SpectralParams(d=3, a=5.0, b=1.0)) == pytest.approx(5.0)
    assert analytic_condition_number_exponent(FactorParams(d=3, rank=1, a=2.0, b=1.0)) is None


def test_spectral_condition_number_slope():
    values = draw_statistic(SpectralParams(d=2, a=3.0, b=1.0), TailStatistic.CONDITION_NUMBER, 2_000_000, 3)
    # far enough out that the beta-prime correction to the power law is small
    grid = log_grid(np.quantile(values, 0.998), np.quantile(values, 0.99999), 25)
    hits = (values.size - np.searchsorted(np.sort(values), grid, side="right")).astype(float)
    slope, _ = np.polyfit(np.log(grid), np.log(hits / values.size), 1)
    assert -slope == pytest.approx(3.0, abs=0.4)


def test_requirement_thresholds():
    req = TailRequirements(d=3, r=1.5, kappa=6.0)
    assert req.r_threshold == pytest.approx(1.0)
    assert req.location_ok
    assert not req.condition_ok


def test_iw_below_threshold_fails_condition_number():
    spec = BaseMeasureSpec(
        location=LocationPriorSpec(d=2, kind=LocationKind.FIXED), covariance=IWParams(d=2, nu=4.0)
    )
    req = TailRequirements(d=2, r=2.0, kappa=1.5)
    report = verify_tail_conditions(spec, req, 50_000, 0)
    verdict = report.verdict_for("condition_number_tail")
    assert verdict.verdict is Verdict.FAIL
    assert verdict.analytic_exponent == pytest.approx(1.5)
    assert not report.passed


def test_verification_dimension_mismatch():
    spec = BaseMeasureSpec(location=LocationPriorSpec(d=2), covariance=IWParams(d=2, nu=8.0))
    with pytest.raises(InputError):
        verify_tail_conditions(spec, TailRequirements(d=3, r=2.0, kappa=7.0), 50_000, 0)


def test_tail_csv_round_trip(tmp_path):
    t = estimate_survival(pareto(2.5), TailStatistic.CONDITION_NUMBER, log_grid(1.0, 40.0, 10), 20_000, 2)
    path = tmp_path / "tail.csv"
    write_tail_csv(path, t, 2.5)
    body, footer = read_tail_csv(path)
    assert [row[0] for row in body] == t.grid
    assert footer["analytic_exponent"] == 2.5
    assert footer["slope"] == t.fitted_slope


def test_curved_power_law_body_not_flagged():
    # Lomax: P(X > x) = (1 + x)^{−2}, local slope −2x/(1 + x) still bending across the window
    lomax = lambda size, rng: rng.pareto(2.0, size)  # noqa: E731
    t = estimate_survival(lomax, TailStatistic.CONDITION_NUMBER, log_grid(0.5, 200.0, 40), 1_000_000, 5)
    diagnostic = power_law_diagnostic(t)
    assert diagnostic.high_slope < diagnostic.low_slope
    assert not diagnostic.non_power_law


def test_factor_condition_number_below_threshold_fails():
    spec = BaseMeasureSpec(
        location=LocationPriorSpec(d=3, kind=LocationKind.FIXED), covariance=FactorParams(d=3, rank=1, a=6.0, b=1.0)
    )
    report = verify_tail_conditions(spec, TailRequirements(d=3, r=2.0, kappa=7.0), 400_000, 5)
    verdict = report.verdict_for("condition_number_tail")
    assert verdict.analytic_exponent is None
    assert verdict.verdict is Verdict.FAIL
    assert -verdict.fitted_slope + 3 * verdict.slope_stderr <= 6.0


def test_power_law_verdicts_ignore_lighter_flag():
    # only the precision-max condition may pass on the steepening flag alone
    spec = BaseMeasureSpec(location=LocationPriorSpec(d=2, kind=LocationKind.FIXED), covariance=IWParams(d=2, nu=8.0))
    report = verify_tail_conditions(spec, TailRequirements(d=2, r=2.0, kappa=3.0), 200_000, 6)
    for condition in ("location_tail", "covariance_max_tail", "condition_number_tail"):
        assert report.verdict_for(condition).note != "lighter than any power"


def upper_tail_slope(values, lower_quantile=0.99, min_hits=50):
    grid = log_grid(np.quantile(values, lower_quantile), np.quantile(values, 1.0 - min_hits / values.size), 25)
    hits = (values.size - np.searchsorted(np.sort(values), grid, side="right")).astype(float)
    slope, se = fit_tail_exponent(survival_from_counts(TailStatistic.CONDITION_NUMBER, grid, hits, values.size))
    return slope, se


@pytest.mark.parametrize(("nu", "tolerance"), [(6.0, 0.4), (8.0, 0.4), (12.0, 0.7)])
def test_iw_condition_number_slope(nu, tolerance):
    p = IWParams(d=2, nu=nu)
    values = draw_statistic(p, TailStatistic.CONDITION_NUMBER, 2_000_000, 7)
    slope, se = upper_tail_slope(values)
    assert -slope == pytest.approx(analytic_condition_number_exponent(p), abs=tolerance + 3 * se)


def test_student_t_location_slope():
    # d = 1: θ is Student-t with ν_B dof, so P(|θ| > x) ~ x^{−ν_B}
    values = draw_statistic(LocationPriorSpec(d=1, nu_b=5.0), TailStatistic.NORM_THETA, 2_000_000, 8)
    slope, se = upper_tail_slope(values)
    assert slope == pytest.approx(-5.0, abs=0.5 + 3 * se)
