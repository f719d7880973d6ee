import math

import numpy as np
import pytest
from scipy.integrate import quad

from schauder.estimator import estimate
from schauder.exceptions import ValidationError
from schauder.faber import coeffs_from_function
from schauder.generators import (
    FunctionSpec,
    TakagiSpec,
    sample_F,
    takagi_expected_estimate,
    takagi_f,
    takagi_f_schauder,
    takagi_F,
    takagi_true_coeffs,
)


def random_takagi(rng, max_M=40):
    M = int(rng.integers(1, max_M + 1))
    c = rng.uniform(-1, 1, M + 1) * 2.0 ** (-rng.uniform(0, 1.5) * np.arange(M + 1))
    return TakagiSpec(tuple(c))


class TestTakagiFunction:
    def test_single_tent(self):
        assert takagi_f(TakagiSpec((1,)), 0.25) == 0.25

    def test_two_terms(self):
        assert takagi_f(TakagiSpec((1, 0.5)), 0.25) == 0.5

    def test_series_representations_agree(self):
        spec = random_takagi(np.random.default_rng(1), 12)
        t = np.linspace(0, 1, 1001)
        np.testing.assert_allclose(takagi_f(spec, t), takagi_f_schauder(spec, t), atol=1e-14)

    def test_antiderivative_at_half(self):
        assert takagi_F(TakagiSpec((1,)), 0.5) == 0.125

    @pytest.mark.parametrize("t", [0.3, 0.5, 0.71, 1.0])
    def test_antiderivative_matches_quadrature(self, t):
        spec = TakagiSpec((1.0, -0.4, 0.3, 0.2))
        breaks = np.arange(17) / 16
        expected, _ = quad(lambda s: takagi_f(spec, s), 0, t, points=breaks[breaks < t], limit=200)
        assert takagi_F(spec, t) == pytest.approx(expected, abs=1e-13)

    def test_antiderivative_matches_trapezoid_on_fine_grid(self):
        # f is piecewise linear on level M + 1, so the trapezoid rule there is exact
        spec = TakagiSpec((0.7, 0.2, -0.5, 0.1, 0.05))
        level = 8
        t = np.arange(2**level + 1) / 2**level
        f = takagi_f(spec, t)
        F_trap = np.concatenate([[0.0], np.cumsum(0.5 * (f[1:] + f[:-1]) / 2**level)])
        np.testing.assert_allclose(takagi_F(spec, t), F_trap, atol=1e-15)

    def test_out_of_range(self):
        with pytest.raises(ValidationError):
            takagi_f(TakagiSpec((1,)), 1.5)

    def test_empty_spec(self):
        with pytest.raises(ValidationError):
            TakagiSpec(())


class TestTakagiCoefficients:
    def test_true_coeffs(self):
        c = takagi_true_coeffs(TakagiSpec((1, 0.5, 0.25)), 1)
        np.testing.assert_allclose(c.generation(1), math.sqrt(2) * 0.5)
        assert c.get(-1) == 0.0

    def test_beyond_truncation(self):
        c = takagi_true_coeffs(TakagiSpec((1, 0.5, 0.25)), 5)
        assert np.all(c.generation(5) == 0)

    def test_match_interpolation_coefficients(self):
        spec = TakagiSpec((1, 0.5, 0.25, -0.3))
        coeffs, f0 = coeffs_from_function(takagi_f(spec, np.arange(2**10 + 1) / 2**10))
        assert f0 == 0.0
        np.testing.assert_allclose(coeffs.values, takagi_true_coeffs(spec, 9).values, atol=1e-12)

    def test_expected_estimate_geometric(self):
        spec = TakagiSpec.geometric(0.5, 30)
        expected = takagi_expected_estimate(spec, 4)
        # 2^2 * sum_{m=4}^{30} 2^-m
        np.testing.assert_allclose(expected.generation(4), 4 * (2.0**-3 - 2.0**-30), rtol=1e-14)

    def test_expected_estimate_single_term(self):
        expected = takagi_expected_estimate(TakagiSpec((1,)), 2)
        np.testing.assert_array_equal(expected.values, [0, 1, 0, 0, 0, 0, 0, 0])

    @pytest.mark.parametrize("seed", range(20))
    def test_estimator_reproduces_expected(self, seed):
        rng = np.random.default_rng(seed)
        spec = random_takagi(rng)
        n = int(rng.integers(2, 9))
        got = estimate(sample_F(spec, n + 1)).coeffs.values
        want = takagi_expected_estimate(spec, n).values
        assert np.max(np.abs(got - want)) / np.max(np.abs(want)) < 1e-10


class TestFunctionSpec:
    def test_cos_samples(self):
        np.testing.assert_allclose(sample_F(FunctionSpec.cos_pi(), 1).values, [0, 1, 2], atol=1e-15)

    def test_takagi_samples(self):
        np.testing.assert_array_equal(sample_F(TakagiSpec((1,)), 1).values, [0, 1 / 8, 1 / 4])

    def test_poly_samples(self):
        np.testing.assert_allclose(sample_F(FunctionSpec.poly([0, 1]), 2).values, [0, 1 / 32, 1 / 8, 9 / 32, 1 / 2])

    def test_sin(self):
        spec = FunctionSpec.sin_pi()
        assert spec.f(0.5) == pytest.approx(1.0)
        assert spec.F(1.0) == pytest.approx(2 / math.pi)

    def test_poly_derivative(self):
        spec = FunctionSpec.poly([1, -2, 3])
        t = np.linspace(0.05, 0.95, 10)
        h = 1e-6
        np.testing.assert_allclose((spec.F(t + h) - spec.F(t - h)) / (2 * h), spec.f(t), atol=1e-6)

    def test_sampled_kind(self):
        values = np.arange(9.0) ** 2
        spec = FunctionSpec.sampled(values)
        np.testing.assert_array_equal(spec.F_grid(2), values[::2])
        assert not spec.has_derivative
        with pytest.raises(ValidationError):
            spec.f(0.5)
        with pytest.raises(ValidationError):
            spec.F_grid(4)

    def test_unknown_kind(self):
        with pytest.raises(ValidationError):
            FunctionSpec("spline")

    def test_sample_unsupported(self):
        with pytest.raises(ValidationError):
            sample_F("sin", 3)

    def test_smooth_true_coeffs_independent_of_level(self):
        spec = FunctionSpec.sin_pi()
        a = spec.true_coeffs(4)
        b = spec.true_coeffs(4, level=12)
        np.testing.assert_allclose(a.values, b.values, atol=1e-15)
