"""Tests for similarity charts, the reduced ODE, its quadrature and constant fitting."""

import math
from fractions import Fraction

import pytest
from scipy.special import erf as scipy_erf

from analytic import ThermalConfig, temp_ibvp1, temp_ibvp2
from errors import FitFailure, NonphysicalParams, NotScaling, UnsupportedExponent
from reduction import (
    ClosedForm,
    ClosedFormTerm,
    ReducedODE,
    XiPolynomial,
    fit_constants,
    integrate_reduced,
    reduce_pde,
    reduce_problem,
    similarity_chart,
)

X3 = (0, 0, 1, 0, 0, 0)
X3_X6 = (0, 0, 1, 0, 0, 1)


class TestChart:
    def test_scaling(self):
        chart = similarity_chart(X3)
        assert chart.n == 0
        assert chart.v_def == "T"
        assert chart.xi_def == "x^2/t"

    def test_scaling_with_amplitude(self):
        assert similarity_chart(X3_X6).v_def == "T/x"

    def test_double_amplitude(self):
        chart = similarity_chart((0, 0, 1, 0, 0, 2))
        assert chart.n == 2
        assert chart.v_def == "T/x^2"

    def test_rescaled_operator_gives_same_chart(self):
        assert similarity_chart((0, 0, 3, 0, 0, 3)).n == 1

    @pytest.mark.parametrize("v", [
        (1, 0, 1, 0, 0, 0),
        (0, 0, 0, 0, 0, 1),
        (0, 0, 2, 0, 0, 1),
        (0, 0, 1, 0, 0, -1),
        (0, 0, 1, 0, 1, 0),
    ])
    def test_not_scaling(self, v):
        with pytest.raises(NotScaling):
            similarity_chart(v)


class TestReducedODE:
    def test_constant_surface_temperature(self):
        ode = reduce_pde(similarity_chart(X3))
        assert str(ode) == "4*xi*V'' + (2 + alpha_inv*xi)*V' = 0"
        assert ode.C.is_zero()

    def test_constant_surface_flux(self):
        ode = reduce_pde(similarity_chart(X3_X6))
        assert ode.A.coefficient(1) == 4
        assert ode.B.coefficient(0) == 6
        assert ode.B.coefficient(1, -1) == 1

    def test_higher_amplitude_has_V_term(self):
        ode = reduce_pde(similarity_chart((0, 0, 1, 0, 0, 2)))
        assert not ode.C.is_zero()

    def test_constant_solves_n0(self):
        ode = reduce_pde(similarity_chart(X3))
        assert ode.residual(xi=0.3, alpha=1e-5, v=7.0, dv=0.0, d2v=0.0) == 0.0

    def test_erf_solves_n0(self):
        # V = erf(sqrt(xi / 4 alpha)); V' = exp(-xi/4a) / sqrt(4 pi a xi)
        ode = reduce_pde(similarity_chart(X3))
        alpha, xi = 2.0, 0.7
        dv = math.exp(-xi / (4 * alpha)) / math.sqrt(4 * math.pi * alpha * xi)
        d2v = dv * (-1 / (4 * alpha) - 1 / (2 * xi))
        assert ode.residual(xi, alpha, 0.0, dv, d2v) == pytest.approx(0.0, abs=1e-14)

    def test_xi_polynomial_printing(self):
        poly = XiPolynomial.from_dict({(0, 0): Fraction(2), (1, -1): Fraction(1)})
        assert str(poly) == "2 + alpha_inv*xi"
        assert str(XiPolynomial()) == "0"
        assert poly(2.0, 4.0) == pytest.approx(2.5)


class TestClosedForm:
    def test_erf_form(self):
        cf = integrate_reduced(reduce_pde(similarity_chart(X3)), 0)
        assert cf.formula_id == "ibvp1_erf"
        assert cf.sqrt_rate == Fraction(1, 2)
        assert str(cf) == "T = 2*c1*sqrt(pi)*sqrt(alpha)*erf(x/(2*sqrt(alpha*t))) + c2"

    def test_erf_form_matches_reference(self):
        cf = integrate_reduced(reduce_pde(similarity_chart(X3)), 0)
        alpha, x, t = 4e-6, 0.01, 120.0
        expected = 2 * math.sqrt(alpha * math.pi) * scipy_erf(x / (2 * math.sqrt(alpha * t))) + 5.0
        assert cf.evaluate(x, t, alpha, c1=1.0, c2=5.0) == pytest.approx(expected, rel=1e-12)

    def test_flux_form_matches_reference(self):
        cf = integrate_reduced(reduce_pde(similarity_chart(X3_X6)), 1)
        assert cf.formula_id == "ibvp2_flux"
        alpha, x, t, c1, c2 = 4e-6, 0.02, 300.0, 0.7, -2.0
        y = x / (2 * math.sqrt(alpha * t))
        expected = (
            -2 * c1 * math.sqrt(t) * math.exp(-y * y)
            - c1 * x * math.sqrt(math.pi / alpha) * scipy_erf(y)
            + c2 * x
        )
        assert cf.evaluate(x, t, alpha, c1=c1, c2=c2) == pytest.approx(expected, rel=1e-12)

    def test_zero_c1_is_constant(self):
        cf = integrate_reduced(reduce_pde(similarity_chart(X3)), 0)
        for x, t in [(0.0, 1.0), (0.3, 10.0), (5.0, 2.0)]:
            assert cf.evaluate(x, t, 1e-5, c1=0.0, c2=42.0) == 42.0

    def test_unfitted_evaluation_needs_constants(self):
        cf = integrate_reduced(reduce_pde(similarity_chart(X3)), 0)
        with pytest.raises(FitFailure):
            cf.evaluate(0.1, 1.0, 1e-5)

    def test_unsupported_exponent(self):
        chart = similarity_chart((0, 0, 1, 0, 0, 2))
        with pytest.raises(UnsupportedExponent):
            integrate_reduced(reduce_pde(chart), chart.n)

    def test_growing_kernel_rejected(self):
        ode = ReducedODE(
            XiPolynomial.from_dict({(1, 0): Fraction(4)}),
            XiPolynomial.from_dict({(0, 0): Fraction(2), (1, -1): Fraction(-1)}),
        )
        with pytest.raises(UnsupportedExponent):
            integrate_reduced(ode, 0)


class TestFitting:
    def test_constant_surface_temperature(self, steel):
        cf = reduce_problem("ibvp1", steel).closed_form
        assert cf.c2 == pytest.approx(900.0)
        assert cf.c1 == pytest.approx(-600.0 / (2 * math.sqrt(steel.alpha * math.pi)))
        for x, t in [(0.0, 60.0), (0.01, 600.0), (0.05, 3600.0)]:
            assert cf.evaluate(x, t, steel.alpha) == pytest.approx(temp_ibvp1(x, t, steel), abs=1e-9)

    def test_equal_temperatures_give_constant(self):
        cfg = ThermalConfig(T_i=500.0, T_s=500.0)
        cf = reduce_problem("ibvp1", cfg).closed_form
        assert cf.c1 == pytest.approx(0.0, abs=1e-9)
        assert cf.evaluate(0.02, 100.0, cfg.alpha) == pytest.approx(500.0)

    def test_constant_surface_flux(self, steel):
        cf = reduce_problem("ibvp2", steel).closed_form
        q_over_k = 5000.0 / 18.2
        assert cf.c2 == pytest.approx(-q_over_k)
        assert cf.c1 == pytest.approx(-q_over_k * math.sqrt(steel.alpha / math.pi))
        t = 600.0
        surface = 2 * q_over_k * math.sqrt(steel.alpha * t / math.pi)
        assert cf.evaluate(0.0, t, steel.alpha) == pytest.approx(surface, rel=1e-12)
        assert cf.evaluate(0.03, t, steel.alpha) == pytest.approx(temp_ibvp2(0.03, t, steel), rel=1e-9)

    def test_fit_accepts_mapping(self):
        cf = integrate_reduced(reduce_pde(similarity_chart(X3)), 0)
        fitted = fit_constants(cf, "ibvp1", {"alpha": 1e-5, "kcond": 1.0, "T_i": 0.0, "T_s": 1.0, "q0pp": 0.0})
        assert fitted.fitted
        assert fitted.c2 == pytest.approx(1.0)
        assert "c1" not in str(fitted)

    def test_nonphysical_diffusivity(self):
        cf = integrate_reduced(reduce_pde(similarity_chart(X3)), 0)
        with pytest.raises(NonphysicalParams):
            fit_constants(cf, "ibvp1", {"alpha": -1.0, "kcond": 1.0, "T_i": 0.0, "T_s": 1.0})

    def test_mismatched_closed_form(self, steel):
        cf = ClosedForm(n=0, sqrt_rate=Fraction(1, 2), terms=(ClosedFormTerm("c2", Fraction(1)),),
                        formula_id="constant")
        with pytest.raises(FitFailure):
            fit_constants(cf, "ibvp1", steel)


def test_reduce_problem_without_parameters():
    result = reduce_problem("ibvp2")
    assert result.chart.n == 1
    assert str(result.ode) == "4*xi*V'' + (6 + alpha_inv*xi)*V' = 0"
    assert not result.closed_form.fitted
