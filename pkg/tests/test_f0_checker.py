import math
import os
import sys

import numpy as np
import pytest
from pydantic import ValidationError

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from Mixtures.core_math import GaussianComponent, MixtureDensity, SPDMatrix
from Mixtures.errors import InputError
from Mixtures.f0_checker import (
    F0Spec,
    check_bounded,
    check_entropy,
    check_f0,
    check_local_log_ratio,
    check_moment,
)


def standard_normal(d=1):
    return MixtureDensity.single(np.zeros(d), np.eye(d))


def test_bounded_standard_normal_2d():
    result = check_bounded(F0Spec(density=standard_normal(2), M=0.2))
    assert result.estimate == pytest.approx(1.0 / (2.0 * math.pi))
    assert result.passed


def test_bounded_fails_below_claim():
    assert not check_bounded(F0Spec(density=standard_normal(2), M=0.1)).passed


def test_bounded_separated_components():
    f = MixtureDensity(
        np.array([0.5, 0.5]),
        (
            GaussianComponent(np.array([-6.0]), SPDMatrix.identity(1)),
            GaussianComponent(np.array([6.0]), SPDMatrix.identity(1)),
        ),
    )
    assert check_bounded(F0Spec(density=f)).estimate == pytest.approx(0.5 * 0.3989422804014327, rel=1e-6)


def test_entropy_standard_normal():
    result = check_entropy(F0Spec(density=standard_normal(1)), 200_000, np.random.default_rng(0))
    assert result.estimate == pytest.approx(-0.5 * math.log(2 * math.pi * math.e), abs=3 * result.stderr + 1e-3)
    assert result.passed


def test_entropy_standard_normal_2d():
    result = check_entropy(F0Spec(density=standard_normal(2)), 200_000, np.random.default_rng(1))
    assert result.estimate == pytest.approx(-math.log(2 * math.pi * math.e), abs=3 * result.stderr + 1e-3)


def test_local_log_ratio_standard_normal():
    # log f(x) − min over the δ-ball = δ|x| + δ²/2, so the mean is δ√(2/π) + δ²/2
    result = check_local_log_ratio(F0Spec(density=standard_normal(1), delta=0.5), 100_000, np.random.default_rng(2))
    assert result.estimate == pytest.approx(0.5 * math.sqrt(2 / math.pi) + 0.125, abs=0.01)
    assert result.passed


def test_moment_half_normal():
    result = check_moment(F0Spec(density=standard_normal(1), eta=0.5), 400_000, np.random.default_rng(3))
    assert result.estimate == pytest.approx(2 * math.sqrt(2 / math.pi), abs=4 * result.stderr)


def test_budget_floor():
    with pytest.raises(InputError):
        check_moment(F0Spec(density=standard_normal(1)), 10, np.random.default_rng(0))


def test_spec_rejects_nonpositive_eta():
    with pytest.raises(ValidationError):
        F0Spec(density=standard_normal(1), eta=0.0)


def test_report_collects_all_checks():
    report = check_f0(F0Spec(density=standard_normal(2), M=0.2), 20_000, np.random.default_rng(4), workers=3)
    assert [c.name for c in report.checks] == ["bounded", "entropy", "local_log_ratio", "moment"]
    assert report.passed
    assert report.failing == []
    assert report.get("moment").estimate > 0


def test_report_independent_of_workers():
    spec = F0Spec(density=standard_normal(1))
    one = check_f0(spec, 5_000, np.random.default_rng(5), workers=1)
    many = check_f0(spec, 5_000, np.random.default_rng(5), workers=3)
    assert [c.estimate for c in one.checks] == [c.estimate for c in many.checks]


def test_spec_serialises_density():
    dumped = F0Spec(density=standard_normal(1)).model_dump()
    assert dumped["density"]["weights"] == [1.0]


def test_fourth_moment_2d_standard_normal():
    result = check_moment(F0Spec(density=standard_normal(2), eta=1.0), 400_000, np.random.default_rng(6))
    assert result.estimate == pytest.approx(8.0, abs=4 * result.stderr)


def test_moment_grows_with_eta():
    estimates = [
        check_moment(F0Spec(density=standard_normal(2), eta=eta), 200_000, np.random.default_rng(7)).estimate
        for eta in (0.5, 1.0, 1.5, 2.0)
    ]
    assert estimates == sorted(estimates)
    # E‖X‖^{2p} = 2^p Γ(1 + p) for the 2D standard normal
    assert estimates[-1] == pytest.approx(2.0**3 * math.gamma(4.0), rel=0.05)


def test_random_mixtures_pass_all_checks():
    rng = np.random.default_rng(8)
    for _ in range(20):
        d = int(rng.integers(1, 4))
        k = int(rng.integers(1, 4))
        comps = []
        for _ in range(k):
            a = rng.standard_normal((d, d))
            comps.append(GaussianComponent(rng.normal(0.0, 2.0, d), SPDMatrix(a @ a.T / d + 0.2 * np.eye(d))))
        f = MixtureDensity(rng.dirichlet(np.ones(k)), tuple(comps))
        report = check_f0(F0Spec(density=f), 20_000, rng)
        assert report.passed, [c.detail for c in report.failing]
