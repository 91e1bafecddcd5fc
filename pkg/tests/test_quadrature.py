import math

import numpy as np
import pytest

from gammasum import quadrature as quad
from gammasum import specfun
from gammasum.exceptions import ConvergenceError, DivergentError, DomainError
from gammasum.quadrature import QuadConfig

# mpmath (30 digits) reference values, frozen
LHS_INTEGRAL = [
    (1, 1, 1, 1.4144925756517743),
    (2, 1, 4, 0.75844220254543848),
    (0.5, 0.5, 1, 0.32649416640520196),
    (3, 0.25, 0.25, 0.26303954993612422),
    (0.3, 1, 2, 1.1934203030539969),
    (2.2, 0.75, 1, 0.29622072360392687),
    (5, 1, 0.5, 1.0603543043174037),
]
RHS_INTEGRAL = [
    (1, 1, 2, 0.35742934273771132),
    (0.5, 1, 2, 0.058163552549484472),
    (0.25, 4, 10, 0.00061007849415130485),
    (0.75, 0.25, 4 / 3, 0.48996579348682956),
    (1, 4, 1.25, 0.7727329572293129),
]
POWER_EXP = [
    (2, 0.5, 1, 0.051759913341269607),
    (1, 0.5, 4, 0.011022932457097866),
    (1.5, 1, 1, 0.36812047800884579),
    (3, 0.25, 0.5, 0.047987697786127687),
]
BESSEL_K_REP = [
    (0.25, 1, 2, 0.069726651806232456),
    (-0.5, 1, 1, 0.2398755439361229),
    (1.7, 0.5, 3, 0.039630505213566883),
]


def test_engine_basic_integrals():
    r = quad.integrate_zero_to_inf(lambda x: np.exp(-x))
    assert r.value == pytest.approx(1.0, rel=1e-14)
    assert r.est_abs_error < 1e-10
    r = quad.integrate_zero_to_inf(lambda x: np.exp(-x * x - 1 / (x * x)))
    assert r.value == pytest.approx(math.sqrt(math.pi) / 2 * math.exp(-2), rel=1e-13)
    r = quad.integrate_zero_to_inf(lambda x: x ** -0.5 * np.exp(-x))
    assert r.value == pytest.approx(math.sqrt(math.pi), rel=1e-13)


def test_engine_lower_limit():
    r = quad.integrate_lower_to_inf(lambda u: np.exp(-u), 1.0)
    assert r.value == pytest.approx(math.exp(-1), rel=1e-14)
    r = quad.integrate_lower_to_inf(lambda u: 1 / (1 + u * u), 0.0)
    assert r.value == pytest.approx(math.pi / 2, rel=1e-10)


def test_engine_interval_and_scalar_callable():
    r = quad.integrate_interval(math.sin, 0.0, math.pi, vectorized=False)
    assert r.value == pytest.approx(2.0, rel=1e-14)


def test_error_estimate_brackets_truth():
    exact = math.sqrt(math.pi)
    r = quad.integrate_zero_to_inf(lambda x: x ** -0.5 * np.exp(-x))
    assert abs(r.value - exact) <= r.est_abs_error


def test_nonconvergence_carries_partial_result():
    cfg = QuadConfig(target_rel_tol=1e-15, max_levels=3)
    with pytest.raises(ConvergenceError) as info:
        quad.integrate_zero_to_inf(lambda x: np.abs(np.sin(40 * x)) * np.exp(-x), cfg)
    assert isinstance(info.value.result, quad.QuadResult)


def test_nonfinite_integrand_rejected():
    with pytest.raises(ConvergenceError):
        quad.integrate_zero_to_inf(lambda x: np.full_like(x, np.nan))


def test_config_validation():
    with pytest.raises(DomainError):
        QuadConfig(target_rel_tol=0.0)
    with pytest.raises(DomainError):
        QuadConfig(max_levels=0)
    with pytest.raises(DomainError):
        QuadConfig(split_point=-1.0)


@pytest.mark.parametrize("A, B, expected", [
    (1, 1, math.sqrt(math.pi) / 2 * math.exp(-2)),
    (0.25, 1, math.sqrt(math.pi) * math.exp(-1)),
])
def test_laplace_integral(A, B, expected):
    assert quad.laplace_integral(A, B) == pytest.approx(expected, rel=1e-15)
    r = quad.integrate_zero_to_inf(lambda x: np.exp(-A * x * x - B / (x * x)))
    assert r.value == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("s, a, b, expected", LHS_INTEGRAL)
def test_lhs_integral_reference(s, a, b, expected):
    r = quad.lhs_integral(s, a, b)
    assert r.value == pytest.approx(expected, rel=1e-10)
    assert r.slow_tail == (a == 1)


def test_lhs_integral_matches_rational_form():
    for s, b in [(1, 1), (2, 4), (0.7, 0.5)]:
        lhs = quad.lhs_integral(s, 1, b)
        rat = quad.rational_exp_integral(s, b)
        assert lhs.value == pytest.approx(2 * math.sqrt(math.pi) * rat.value, rel=1e-7)
    r = quad.lhs_integral(2, 1, 4)
    assert r.est_abs_error <= 1e-8 * r.value


def test_lhs_integral_domain():
    for args in [(0, 1, 1), (1, 0, 1), (1, 1.5, 1), (1, 1, 0)]:
        with pytest.raises(DomainError):
            quad.lhs_integral(*args)


def test_lhs_integrand_is_log_of_direct_formula():
    s, a, b = 2.5, 0.5, 1.0
    x = np.array([0.3, 1.0, 4.0])
    direct = np.exp(a * x - b / x) * x ** (s - 1.5) * specfun.upper_gamma_array(1 - s, x)
    assert np.allclose(np.exp(quad.lhs_integrand_log(s, a, b, x)), direct, rtol=1e-13)


def test_rational_exp_integral_limits():
    assert quad.rational_exp_integral(1e-12, 1).value == pytest.approx(0.5, rel=1e-9)
    v = quad.rational_exp_integral(3, 1).value
    assert 0 < v < 0.5


@pytest.mark.parametrize("a, b, c, expected", RHS_INTEGRAL)
def test_rhs_integral_reference(a, b, c, expected):
    assert quad.rhs_integral(a, b, c).value == pytest.approx(expected, rel=1e-11)


def test_rhs_integral_at_c_equal_one_over_a():
    # the denominator collapses to c u^2
    lo = math.sqrt(0.5)
    alt = quad.integrate_lower_to_inf(lambda u: np.exp(-2 * u) / (u * u), lo)
    assert quad.rhs_integral(0.5, 1, 2).value == pytest.approx(0.5 * alt.value, rel=1e-12)


def test_rhs_integral_domain():
    with pytest.raises(DivergentError):
        quad.rhs_integral(1, 1, 1)
    with pytest.raises(DomainError):
        quad.rhs_integral(0.5, 1, 1.5)


def test_rhs_integral_vs_direct_quadrature_at_a1():
    direct = quad.integrate_lower_to_inf(lambda u: np.exp(-2 * u) / (2 * u * u + 1), 0.0)
    assert quad.rhs_integral(1, 1, 2).value == pytest.approx(direct.value, rel=1e-12)


@pytest.mark.parametrize("s, a, b, expected", POWER_EXP)
def test_power_exp_integral_reference(s, a, b, expected):
    assert quad.power_exp_integral(s, a, b).value == pytest.approx(expected, rel=1e-11)


@pytest.mark.parametrize("A, b, u, expected", BESSEL_K_REP)
def test_bessel_k_representation(A, b, u, expected):
    assert quad.bessel_k_representation(A, b, u) == pytest.approx(expected, rel=1e-9)


def test_bessel_k_representation_half_order_collapse():
    assert quad.bessel_k_representation(-0.5, 1, 1) == pytest.approx(
        math.sqrt(math.pi) * math.exp(-2), rel=1e-12)
