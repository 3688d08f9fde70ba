import math
import os
import sys

import numpy as np
import pytest

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from Mixtures.core_math import GaussianComponent, MixtureDensity, SPDMatrix, kl_zero_mean
from Mixtures.distances import (
    DistanceMethod,
    Metric,
    csiszar_check,
    estimate_distance,
    gaussian_hellinger,
    gaussian_kl,
    grid_quadrature,
    hellinger,
    kl_mc,
    l1_distance,
    l1_mixture_upper_bound,
    sandwich_check,
)
from Mixtures.errors import InputError

# N(0, 1) vs N(1, 1): d = √(2 − 2e^{−1/8}), ‖f − g‖₁ = 2(2Φ(½) − 1), KL = ½
HELLINGER_SHIFT = math.sqrt(2.0 - 2.0 * math.exp(-0.125))
L1_SHIFT = 0.7658567
KL_SHIFT = 0.5


@pytest.fixture
def shifted_pair():
    return MixtureDensity.single([0.0], [[1.0]]), MixtureDensity.single([1.0], [[1.0]])


@pytest.fixture
def bimodal_pair():
    f = MixtureDensity(
        np.array([0.4, 0.6]),
        (
            GaussianComponent(np.array([-2.0, 0.0]), SPDMatrix.identity(2)),
            GaussianComponent(np.array([1.5, 1.0]), SPDMatrix([[1.0, 0.4], [0.4, 0.8]])),
        ),
    )
    g = MixtureDensity.single([0.0, 0.5], [[2.0, 0.0], [0.0, 1.5]])
    return f, g


def test_identical_densities_have_zero_distance(shifted_pair):
    f, _ = shifted_pair
    assert hellinger(f, f, 20_000, np.random.default_rng(0)).value == pytest.approx(0.0, abs=1e-12)
    assert l1_distance(f, f, 20_000, np.random.default_rng(0)).value == pytest.approx(0.0, abs=1e-12)


def test_hellinger_shifted_normals(shifted_pair):
    est = hellinger(*shifted_pair, 200_000, np.random.default_rng(1))
    assert est.value == pytest.approx(HELLINGER_SHIFT, abs=4 * est.stderr + 1e-3)
    assert est.method is DistanceMethod.MC_IMPORTANCE


def test_l1_shifted_normals(shifted_pair):
    est = l1_distance(*shifted_pair, 200_000, np.random.default_rng(2))
    assert est.value == pytest.approx(L1_SHIFT, abs=0.01)


def test_kl_shifted_normals(shifted_pair):
    est = kl_mc(*shifted_pair, 200_000, np.random.default_rng(3))
    assert est.value == pytest.approx(KL_SHIFT, abs=0.02)


def test_closed_forms(shifted_pair):
    f, g = shifted_pair
    assert gaussian_hellinger(f.components[0], g.components[0]) == pytest.approx(HELLINGER_SHIFT)
    assert gaussian_kl(f.components[0], g.components[0]) == pytest.approx(KL_SHIFT)


def test_quadrature_matches_closed_form(shifted_pair):
    assert grid_quadrature(*shifted_pair, Metric.HELLINGER).value == pytest.approx(HELLINGER_SHIFT, abs=1e-6)
    assert grid_quadrature(*shifted_pair, "l1").value == pytest.approx(L1_SHIFT, abs=1e-5)
    assert grid_quadrature(*shifted_pair, Metric.KL).value == pytest.approx(KL_SHIFT, abs=1e-5)


def test_monte_carlo_agrees_with_quadrature_in_two_dimensions(bimodal_pair):
    reference = grid_quadrature(*bimodal_pair, Metric.HELLINGER, points=401).value
    est = estimate_distance("hellinger", *bimodal_pair, 100_000, np.random.default_rng(4))
    assert est.value == pytest.approx(reference, abs=4 * est.stderr + 2e-3)


def test_hellinger_is_symmetric(bimodal_pair):
    f, g = bimodal_pair
    for estimator in (hellinger, l1_distance):
        a = estimator(f, g, 20_000, np.random.default_rng(1))
        b = estimator(g, f, 20_000, np.random.default_rng(1))
        assert a.value == b.value
        assert a.stderr == b.stderr


def test_distance_bounds(bimodal_pair):
    est = hellinger(*bimodal_pair, 20_000, np.random.default_rng(6))
    assert 0.0 <= est.value <= math.sqrt(2.0)
    assert 0.0 <= l1_distance(*bimodal_pair, 20_000, np.random.default_rng(6)).value <= 2.0


def test_truncated_mixture_normalised():
    comp = GaussianComponent(np.zeros(1), SPDMatrix.identity(1))
    truncated = MixtureDensity(np.array([0.7]), (comp,))
    full = MixtureDensity.single([0.0], [[1.0]])
    assert hellinger(truncated, full, 20_000, np.random.default_rng(0)).value == pytest.approx(0.0, abs=1e-12)


def test_dimension_mismatch_rejected(shifted_pair, bimodal_pair):
    with pytest.raises(InputError):
        hellinger(shifted_pair[0], bimodal_pair[0], 20_000, np.random.default_rng(0))


def test_budget_floor(shifted_pair):
    with pytest.raises(InputError):
        l1_distance(*shifted_pair, 100, np.random.default_rng(0))


def test_sandwich_inequalities(bimodal_pair):
    check = sandwich_check(*bimodal_pair, 50_000, np.random.default_rng(7))
    assert check.lower_holds and check.upper_holds


def test_csiszar_inequality(shifted_pair):
    assert csiszar_check(*shifted_pair, 100_000, np.random.default_rng(8)).holds


def test_l1_upper_bound_dominates_estimate(bimodal_pair):
    f, _ = bimodal_pair
    g = MixtureDensity(
        np.array([0.5, 0.5]),
        (
            GaussianComponent(np.array([-1.8, 0.1]), SPDMatrix([[1.2, 0.0], [0.0, 0.9]])),
            GaussianComponent(np.array([1.5, 1.2]), SPDMatrix([[1.0, 0.3], [0.3, 0.9]])),
        ),
    )
    bound = l1_mixture_upper_bound(f, g, [0, 1], 2)
    est = l1_distance(f, g, 50_000, np.random.default_rng(9))
    assert est.value <= bound + 3 * est.stderr


def test_l1_upper_bound_rejects_repeated_pairing(bimodal_pair):
    f, _ = bimodal_pair
    with pytest.raises(InputError):
        l1_mixture_upper_bound(f, f, [0, 0], 2)


def random_spd(rng, d):
    a = rng.standard_normal((d, d))
    return SPDMatrix(a @ a.T / d + 0.3 * np.eye(d))


def random_mixture(rng, d=2, k=2, spread=2.0):
    weights = rng.dirichlet(np.ones(k))
    comps = tuple(GaussianComponent(rng.normal(0.0, spread, d), random_spd(rng, d)) for _ in range(k))
    return MixtureDensity(weights, comps)


def perturbed(rng, f, scale=0.5):
    comps = tuple(
        GaussianComponent(c.mean + rng.normal(0.0, scale, c.dim), SPDMatrix(c.cov.entries * rng.uniform(0.7, 1.4)))
        for c in f.components
    )
    weights = rng.dirichlet(np.ones(f.size))
    return MixtureDensity(weights, comps)


def test_l1_upper_bound_dominates_random_pairs():
    rng = np.random.default_rng(2024)
    for _ in range(100):
        f = random_mixture(rng)
        g = perturbed(rng, f)
        bound = l1_mixture_upper_bound(f, g, [0, 1], 2)
        est = l1_distance(f, g, 10_000, rng)
        assert est.value <= bound + 3 * est.stderr


def test_csiszar_and_sandwich_on_random_pairs():
    rng = np.random.default_rng(2025)
    for _ in range(100):
        f = random_mixture(rng)
        g = perturbed(rng, f, scale=1.0)
        assert csiszar_check(f, g, 10_000, rng).holds
        check = sandwich_check(f, g, 10_000, rng)
        assert check.lower_holds and check.upper_holds


def test_zero_mean_kl_matches_monte_carlo():
    rng = np.random.default_rng(2026)
    for _ in range(50):
        d = int(rng.integers(1, 4))
        s1, s2 = random_spd(rng, d), random_spd(rng, d)
        exact = kl_zero_mean(s1, s2)
        f = MixtureDensity.single(np.zeros(d), s1.entries)
        g = MixtureDensity.single(np.zeros(d), s2.entries)
        est = kl_mc(f, g, 20_000, rng)
        assert est.value == pytest.approx(exact, abs=4 * est.stderr + 0.02)


def test_bhattacharyya_hellinger_matches_monte_carlo():
    rng = np.random.default_rng(2027)
    for _ in range(20):
        c1 = GaussianComponent(rng.normal(0.0, 1.0, 2), random_spd(rng, 2))
        c2 = GaussianComponent(rng.normal(0.0, 1.0, 2), random_spd(rng, 2))
        exact = gaussian_hellinger(c1, c2)
        f = MixtureDensity.single(c1.mean, c1.cov.entries)
        g = MixtureDensity.single(c2.mean, c2.cov.entries)
        est = hellinger(f, g, 40_000, rng)
        assert est.value == pytest.approx(exact, abs=4 * est.stderr + 0.01)
