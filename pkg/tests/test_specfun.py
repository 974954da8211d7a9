import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import bessel_scaled_oracle
from udcoherence.specfun import (
    BESSEL_SERIES_SWITCH,
    QuadratureError,
    QuadratureResult,
    bessel_i_scaled,
    gamma_real,
    integrate_adaptive,
    integrate_halfline_sqrt_singularity,
)


# -- gamma -------------------------------------------------------------------

def test_gamma_known_values():
    assert gamma_real(1) == 1.0
    assert gamma_real(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-14)
    # mpmath at 30 digits: 3.62560990822190831193
    assert gamma_real(0.25) == pytest.approx(3.6256099082219083, rel=1e-13)


def test_gamma_against_high_precision():
    xs = np.concatenate([np.geomspace(1e-3, 50, 300), np.linspace(0.4, 0.6, 21)])
    with mpmath.workdps(30):
        worst = max(abs(gamma_real(x) / float(mpmath.gamma(x)) - 1) for x in xs)
    assert worst < 1e-12


@pytest.mark.parametrize("x", [0.0, -1.0, -0.5, float("nan"), float("inf")])
def test_gamma_domain(x):
    with pytest.raises(ValueError):
        gamma_real(x)


# -- scaled Bessel -----------------------------------------------------------

def test_bessel_order_zero_at_origin():
    assert bessel_i_scaled(0.0, 1e-12) == pytest.approx(1.0, abs=1e-12)


def test_bessel_large_argument_leading_term():
    z = 1e4
    assert bessel_i_scaled(-0.25, z) * math.sqrt(2 * math.pi * z) == pytest.approx(1.0, abs=1e-3)


def test_bessel_value_at_one():
    # extended-precision series: 0.484774198669056960680
    assert bessel_i_scaled(-0.25, 1.0) == pytest.approx(0.48477419866905696, rel=1e-13)


def test_bessel_scaled_consistency_with_direct_series():
    for z in np.linspace(0.1, 30, 60):
        with mpmath.workdps(30):
            direct = mpmath.nsum(
                lambda m: (mpmath.mpf(z) / 2) ** (2 * m - 0.25)
                / (mpmath.factorial(m) * mpmath.gamma(m + 0.75)), [0, mpmath.inf])
            direct = float(direct)
        assert bessel_i_scaled(-0.25, z) * math.exp(z) == pytest.approx(direct, rel=1e-10)


def test_bessel_continuity_at_switchover():
    z0 = BESSEL_SERIES_SWITCH
    below = bessel_i_scaled(-0.25, z0)
    above = bessel_i_scaled(-0.25, np.nextafter(z0, np.inf))
    assert abs(above / below - 1) < 1e-10
    assert below == pytest.approx(bessel_scaled_oracle(-0.25, z0), rel=1e-12)


@pytest.mark.parametrize("nu", [0.0, 0.5, 1.7, -0.9])
def test_bessel_other_orders(nu):
    for z in [1e-4, 0.3, 5.0, 29.0, 31.0, 200.0]:
        assert bessel_i_scaled(nu, z) == pytest.approx(bessel_scaled_oracle(nu, z), rel=1e-10)


def test_bessel_half_order_closed_form():
    # I_{1/2}(z) = sqrt(2/(pi z)) sinh z
    for z in [0.01, 1.0, 10.0, 45.0]:
        expect = math.sqrt(2 / (math.pi * z)) * (-math.expm1(-2 * z)) / 2
        assert bessel_i_scaled(0.5, z) == pytest.approx(expect, rel=1e-13)


@pytest.mark.parametrize("z", [0.0, -1.0, float("nan")])
def test_bessel_domain(z):
    with pytest.raises(ValueError):
        bessel_i_scaled(-0.25, z)


def test_bessel_order_domain():
    with pytest.raises(ValueError):
        bessel_i_scaled(-1.0, 1.0)


# -- adaptive quadrature -----------------------------------------------------

def test_polynomial():
    res = integrate_adaptive(lambda x: x ** 2, 0.0, 1.0)
    assert res.value == pytest.approx(1 / 3, rel=1e-15)
    assert res.evaluations == 21


def test_kronrod_rule_is_exact_to_degree_31():
    for deg in range(0, 32):
        res = integrate_adaptive(lambda x: x ** deg, -1.0, 1.0, rel_tol=1.0)
        expect = 0.0 if deg % 2 else 2.0 / (deg + 1)
        assert res.value == pytest.approx(expect, abs=1e-14)
        assert res.evaluations == 21


def test_normalised_gaussian_switching():
    t = 1.7
    res = integrate_adaptive(
        lambda x: np.exp(-x * x / (2 * t * t)) / math.sqrt(2 * math.pi * t * t),
        -8 * t, 8 * t, rel_tol=1e-14)
    assert res.value == pytest.approx(1.0, abs=1e-12)


def test_damped_oscillation():
    res = integrate_adaptive(lambda x: np.exp(-x) * np.cos(10 * x), 0.0, 50.0, rel_tol=1e-12)
    assert res.value == pytest.approx(1 / 101, rel=1e-10)
    assert abs(res.value - 1 / 101) <= res.err_estimate + 1e-15


def test_complex_integrand():
    res = integrate_adaptive(lambda x: np.exp(1j * x), 0.0, math.pi)
    assert res.value == pytest.approx(2j, abs=1e-14)


def test_error_bound_holds():
    res = integrate_adaptive(lambda x: np.sqrt(x), 0.0, 1.0, rel_tol=1e-8)
    assert abs(res.value - 2 / 3) <= res.err_estimate


def test_budget_exhaustion_carries_best_estimate():
    with pytest.raises(QuadratureError) as info:
        integrate_adaptive(lambda x: np.sin(1 / x), 1e-6, 1.0, rel_tol=1e-14,
                           max_evaluations=500)
    best = info.value.result
    assert isinstance(best, QuadratureResult)
    assert math.isfinite(best.value) and best.err_estimate > 0


def test_invalid_interval():
    with pytest.raises(ValueError):
        integrate_adaptive(np.sin, 1.0, 1.0)
    with pytest.raises(ValueError):
        integrate_adaptive(np.sin, 0.0, math.inf)


@settings(max_examples=40, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(0.2, 4), st.floats(0.1, 10))
def test_linearity(alpha, beta, width, freq):
    f = lambda x: np.exp(-x * x / width)
    g = lambda x: np.cos(freq * x) / (1 + x * x)
    rf = integrate_adaptive(f, -2.0, 3.0, rel_tol=1e-12)
    rg = integrate_adaptive(g, -2.0, 3.0, rel_tol=1e-12)
    rc = integrate_adaptive(lambda x: alpha * f(x) + beta * g(x), -2.0, 3.0,
                            rel_tol=1e-12, abs_tol=1e-14)
    bound = abs(alpha) * rf.err_estimate + abs(beta) * rg.err_estimate + rc.err_estimate + 1e-13
    assert abs(rc.value - (alpha * rf.value + beta * rg.value)) <= bound


# -- half line with sqrt singularity ------------------------------------------

def test_halfline_exponential():
    res = integrate_halfline_sqrt_singularity(lambda k: np.exp(-k))
    assert res.value == pytest.approx(math.sqrt(math.pi), rel=1e-12)


def test_halfline_gaussian():
    # Gamma(1/4) / (2 beta^{1/4}), beta = 1/2
    expect = gamma_real(0.25) * 2 ** 0.25 / 2
    assert expect == pytest.approx(2.1558005495409279, rel=1e-13)
    res = integrate_halfline_sqrt_singularity(lambda k: np.exp(-k * k / 2))
    assert res.value == pytest.approx(expect, rel=1e-12)


def test_halfline_zero():
    assert integrate_halfline_sqrt_singularity(lambda k: 0 * k).value == 0.0


def _brute_halfline(g, eps=1e-10, k_max=12.0):
    # midpoint sums on a geometric grid, Richardson over two resolutions;
    # the missing [0, eps] piece is 2 g(0) sqrt(eps)
    def mid(n):
        edges = np.geomspace(eps, k_max, n + 1)
        k = 0.5 * (edges[1:] + edges[:-1])
        return np.sum(g(k) / np.sqrt(k) * np.diff(edges))
    coarse, fine = mid(200_000), mid(400_000)
    return (4 * fine - coarse) / 3 + 2 * g(0.0) * math.sqrt(eps)


@pytest.mark.parametrize("width", [0.5, 1.0, 3.0])
def test_halfline_against_brute_force(width):
    g = lambda k: np.exp(-k * k / (2 * width * width))
    brute = _brute_halfline(g, k_max=12 * width)
    res = integrate_halfline_sqrt_singularity(g)
    assert res.value == pytest.approx(brute, rel=1e-6)
