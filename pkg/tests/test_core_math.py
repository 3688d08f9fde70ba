import os
import sys

import numpy as np
import pytest

# Ensure repository root is on sys.path for imports
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from Mixtures.core_math import (
    GaussianComponent,
    MixtureDensity,
    SPDMatrix,
    StickBreaking,
    condition_number,
    eval_gaussian,
    eval_mixture,
    kl_zero_mean,
    mixture_log_grad,
    ordered_eigvals,
    spectral_reconstruction_error,
)
from Mixtures.errors import DomainError, InputError, ParameterError


def test_eigenvalues_sorted_descending():
    m = SPDMatrix([[4.0, 0.0], [0.0, 1.0]])
    assert np.allclose(ordered_eigvals(m), [4.0, 1.0])
    assert condition_number(m) == pytest.approx(4.0)


def test_condition_number_same_for_inverse():
    m = SPDMatrix([[3.0, 1.0], [1.0, 2.0]])
    assert condition_number(m.inverse()) == pytest.approx(condition_number(m))


def test_spectral_decomposition_reconstructs():
    rng = np.random.default_rng(3)
    a = rng.standard_normal((4, 4))
    m = SPDMatrix(a @ a.T + 4 * np.eye(4))
    assert spectral_reconstruction_error(m) < 1e-10
    first_nonzero = m.eigvecs[np.argmax(np.abs(m.eigvecs) > 1e-12, axis=0), np.arange(4)]
    assert np.all(first_nonzero > 0)


def test_asymmetric_matrix_rejected():
    with pytest.raises(DomainError):
        SPDMatrix([[1.0, 0.5], [0.0, 1.0]])


def test_indefinite_matrix_rejected():
    with pytest.raises(DomainError):
        SPDMatrix([[1.0, 2.0], [2.0, 1.0]])


def test_non_square_rejected():
    with pytest.raises(InputError):
        SPDMatrix(np.ones((2, 3)))


def test_standard_normal_density_at_origin():
    c = GaussianComponent(np.zeros(1), SPDMatrix.identity(1))
    assert eval_gaussian(np.zeros(1), c) == pytest.approx(0.3989422804014327)


def test_bivariate_density_at_origin():
    c = GaussianComponent(np.zeros(2), SPDMatrix.identity(2))
    assert eval_gaussian(np.zeros(2), c) == pytest.approx(1.0 / (2 * np.pi))


def test_gaussian_dimension_mismatch():
    c = GaussianComponent(np.zeros(2), SPDMatrix.identity(2))
    with pytest.raises(InputError):
        eval_gaussian(np.zeros(3), c)


def test_mixture_evaluates_weighted_sum():
    f = MixtureDensity(
        np.array([0.3, 0.7]),
        (
            GaussianComponent(np.zeros(1), SPDMatrix.identity(1)),
            GaussianComponent(np.ones(1), SPDMatrix.identity(1)),
        ),
    )
    x = np.array([[0.2], [-1.0], [2.5]])
    expected = 0.3 * eval_gaussian(x, f.components[0]) + 0.7 * eval_gaussian(x, f.components[1])
    assert np.allclose(eval_mixture(x, f), expected)


def test_mixture_weight_sum_above_one_rejected():
    comp = GaussianComponent(np.zeros(1), SPDMatrix.identity(1))
    with pytest.raises(InputError):
        MixtureDensity(np.array([0.6, 0.6]), (comp, comp))


def test_mixture_remainder_is_carried():
    comp = GaussianComponent(np.zeros(1), SPDMatrix.identity(1))
    f = MixtureDensity(np.array([0.5, 0.3]), (comp, comp))
    assert f.remainder == pytest.approx(0.2)
    assert eval_mixture(np.zeros(1), f) == pytest.approx(0.8 * 0.3989422804014327)
    assert f.normalized().remainder == pytest.approx(0.0)


def test_mixture_json_round_trip_preserves_density():
    f = MixtureDensity.single([1.0, -1.0], [[2.0, 0.3], [0.3, 1.0]])
    g = MixtureDensity.from_dict(f.to_dict())
    x = np.array([[0.0, 0.0], [1.0, 2.0]])
    assert np.allclose(eval_mixture(x, f), eval_mixture(x, g))


def test_mixture_json_missing_key():
    with pytest.raises(InputError):
        MixtureDensity.from_dict({"weights": [1.0], "means": [[0.0]]})


def test_log_gradient_of_standard_normal():
    f = MixtureDensity.single([0.0, 0.0], np.eye(2))
    x = np.array([[1.0, -2.0]])
    assert np.allclose(mixture_log_grad(x, f), -x)


def test_kl_zero_mean_identity_is_zero():
    assert kl_zero_mean(np.eye(3), np.eye(3)) == pytest.approx(0.0)
    assert kl_zero_mean(np.eye(1), 2 * np.eye(1)) == pytest.approx(0.5 * (2.0 - np.log(2.0) - 1.0))


def test_stick_weights_plus_remainder_sum_to_one():
    sb = StickBreaking.draw(1.5, 25, np.random.default_rng(0))
    assert sb.weights().sum() + sb.remainder == pytest.approx(1.0)
    assert sb.truncation == 25


def test_stick_breaking_mean_first_weight():
    rng = np.random.default_rng(1)
    first = [StickBreaking.draw(2.0, 1, rng).weights()[0] for _ in range(4000)]
    assert np.mean(first) == pytest.approx(1.0 / 3.0, abs=0.02)


def test_stick_breaking_rejects_bad_mass():
    with pytest.raises(ParameterError):
        StickBreaking.draw(0.0, 5, np.random.default_rng(0))
    with pytest.raises(ParameterError):
        StickBreaking.draw(1.0, 0, np.random.default_rng(0))


def test_small_scale_asymmetry_rejected():
    with pytest.raises(DomainError):
        SPDMatrix([[1e-6, 1e-9], [0.0, 1e-6]])
    small = SPDMatrix([[1e-6, 2e-7], [2e-7, 1e-6]])
    assert small.entries[0, 1] == small.entries[1, 0]


def test_large_scale_rounding_accepted():
    base = np.array([[4.0, 1.0], [1.0, 3.0]]) * 1e8
    nudged = base.copy()
    nudged[0, 1] += 1e-5
    assert SPDMatrix(nudged).entries[0, 1] == pytest.approx(1e8)


def test_stick_breaking_mean_remainder():
    rng = np.random.default_rng(2)
    alpha, H = 1.5, 4
    remainders = [StickBreaking.draw(alpha, H, rng).remainder for _ in range(20_000)]
    se = np.std(remainders) / np.sqrt(len(remainders))
    assert np.mean(remainders) == pytest.approx((alpha / (1 + alpha)) ** H, abs=4 * se)
