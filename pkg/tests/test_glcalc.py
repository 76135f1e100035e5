import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from scipy.special import binom, gamma

from fracreg.glcalc import SampledSignal, gl_apply, gl_coefficients, gl_series


def binom_oracle(order, j):
    """Independent weight formula (-1)^j C(order, j) via scipy's binomial."""
    return (-1.0) ** j * binom(order, j)


class TestGlCoefficients:
    def test_first_difference(self):
        table = gl_coefficients(1.0, 3)
        assert table.coeffs == pytest.approx([1.0, -1.0, 0.0, 0.0], abs=0)

    def test_second_difference(self):
        table = gl_coefficients(2.0, 4)
        assert table.coeffs == pytest.approx([1.0, -2.0, 1.0, 0.0, 0.0], abs=0)

    def test_half_order(self):
        # (-1)^j C(0.5, j) computed from the Gamma function
        expected = [1.0, -0.5, -0.125, -0.0625]
        table = gl_coefficients(0.5, 3)
        assert table.coeffs == pytest.approx(expected, rel=1e-14)

    def test_leading_weight_is_exactly_one(self):
        assert gl_coefficients(0.37, 5).coeffs[0] == 1.0

    @pytest.mark.parametrize("order", [-1.2, 0.3, 0.5, 1.5, 2.2])
    def test_matches_gamma_binomial(self, order):
        coeffs = gl_coefficients(order, 64).coeffs
        for j in range(65):
            expected = binom_oracle(order, j)
            assert coeffs[j] == pytest.approx(expected, rel=1e-10, abs=1e-300)

    @given(order=st.floats(-2, 3))
    @settings(max_examples=60)
    def test_binomial_equivalence_random_orders(self, order):
        # near-integer orders make the Gamma-function oracle itself cancel
        assume(abs(order - round(order)) > 1e-3)
        coeffs = gl_coefficients(order, 64).coeffs
        expected = binom_oracle(order, np.arange(65))
        np.testing.assert_allclose(coeffs, expected, rtol=1e-10, atol=1e-280)

    @given(order=st.floats(-3, 3, allow_nan=False), count=st.integers(0, 40))
    @settings(max_examples=60)
    def test_recurrence_invariant(self, order, count):
        coeffs = gl_coefficients(order, count).coeffs
        assert coeffs[0] == 1.0
        for j in range(1, count + 1):
            step = (1.0 - (1.0 + order) / j) * coeffs[j - 1]
            assert coeffs[j] == pytest.approx(step, rel=1e-15, abs=1e-300)

    @pytest.mark.parametrize("order", [float("nan"), float("inf")])
    def test_nonfinite_order_rejected(self, order):
        with pytest.raises(ValueError):
            gl_coefficients(order, 4)

    def test_negative_count_rejected(self):
        with pytest.raises(ValueError):
            gl_coefficients(0.5, -1)


class TestGlApply:
    def test_zeroth_order_is_identity(self):
        sig = SampledSignal(step=0.2, values=np.full(17, 3.7))
        assert gl_apply(sig, 0.0) == pytest.approx(3.7, abs=0)

    def test_first_derivative_of_ramp(self):
        t = np.arange(0, 1.0 + 1e-12, 0.01)
        assert gl_apply(SampledSignal(step=0.01, values=t), 1.0) == pytest.approx(1.0, abs=0.02)

    def test_half_derivative_of_square(self):
        # D^0.5 t^2 = Gamma(3)/Gamma(2.5) t^1.5
        h = 0.001
        t = np.arange(0, 1.0 + h / 2, h)
        expected = gamma(3) / gamma(2.5)
        assert gl_apply(SampledSignal(step=h, values=t ** 2), 0.5) == pytest.approx(expected, abs=0.01)

    def test_full_memory_equals_large_memory_len(self):
        rng = np.random.default_rng(7)
        sig = SampledSignal(step=0.05, values=rng.normal(size=40))
        full = gl_apply(sig, 0.7)
        assert gl_apply(sig, 0.7, memory_len=10.0) == full

    def test_bad_memory_len(self):
        sig = SampledSignal(step=0.1, values=[1.0, 2.0])
        with pytest.raises(ValueError):
            gl_apply(sig, 0.5, memory_len=0.0)

    @pytest.mark.parametrize("order", [0.3, 0.5, 1.5])
    def test_first_order_convergence(self, order):
        # error at t=1 for f(t) = t^2 roughly halves when h halves
        exact = gamma(3) / gamma(3 - order)

        def err(h):
            t = np.arange(0, 1.0 + h / 2, h)
            return abs(gl_apply(SampledSignal(step=h, values=t ** 2), order) - exact)

        ratio = err(0.002) / err(0.001)
        assert 1.7 <= ratio <= 2.3

    @given(
        a=st.floats(-3, 3),
        b=st.floats(-3, 3),
        order=st.floats(-1.5, 2.5),
        seed=st.integers(0, 2 ** 16),
    )
    @settings(max_examples=40)
    def test_linearity(self, a, b, order, seed):
        rng = np.random.default_rng(seed)
        f = rng.normal(size=30)
        g = rng.normal(size=30)
        h = 0.05
        lhs = gl_apply(SampledSignal(h, a * f + b * g), order)
        rhs = a * gl_apply(SampledSignal(h, f), order) + b * gl_apply(SampledSignal(h, g), order)
        assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-6)


class TestGlSeries:
    def test_zeroth_order_keeps_step(self):
        step = np.ones(25)
        out = gl_series(SampledSignal(0.1, step), 0.0)
        np.testing.assert_array_equal(out.values, step)
        assert out.step == 0.1

    def test_integral_of_step_is_ramp(self):
        h = 0.1
        out = gl_series(SampledSignal(h, np.ones(51)), -1.0)
        t = h * np.arange(51)
        assert np.max(np.abs(out.values - t)) <= 0.1 + 1e-12

    def test_half_derivative_of_square_pointwise(self):
        h = 0.001
        t = np.arange(0, 1.0 + h / 2, h)
        out = gl_series(SampledSignal(h, t ** 2), 0.5)
        expected = gamma(3) / gamma(2.5) * t ** 1.5
        mask = t >= 0.1
        rel = np.abs(out.values[mask] - expected[mask]) / expected[mask]
        assert np.max(rel) <= 0.01

    def test_memory_truncation_exact_when_covering(self):
        rng = np.random.default_rng(3)
        sig = SampledSignal(0.02, rng.normal(size=60))
        full = gl_series(sig, 0.8)
        trunc = gl_series(sig, 0.8, memory_len=sig.duration + 1.0)
        np.testing.assert_array_equal(full.values, trunc.values)


class TestSampledSignal:
    def test_rejects_nonpositive_step(self):
        with pytest.raises(ValueError):
            SampledSignal(step=0.0, values=[1.0])

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            SampledSignal(step=0.1, values=[])
