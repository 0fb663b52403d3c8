import numpy as np
import pytest

from crnoma.special import expint_e1, expint_Ei, exp_times_Ei, exp_times_Ei_asymptotic

from oracles import ei_quadrature

# frozen from ei_quadrature (30-digit adaptive quadrature)
EI_MINUS_1 = -0.21938393439552027
EI_MINUS_10 = -4.156968929685324e-06


def test_frozen_values_come_from_oracle():
    assert ei_quadrature(-1.0) == pytest.approx(EI_MINUS_1, rel=1e-14)
    assert ei_quadrature(-10.0) == pytest.approx(EI_MINUS_10, rel=1e-14)


@pytest.mark.parametrize("x, expected", [(-1.0, EI_MINUS_1), (-10.0, EI_MINUS_10)])
def test_known_values(x, expected):
    assert expint_Ei(x) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("x", [-1e-3, -0.3, -0.999, -1.0, -1.001, -2.5, -7.0, -29.9, -30.1, -49.0])
def test_against_quadrature(x):
    assert expint_Ei(x) == pytest.approx(ei_quadrature(x), rel=1e-10)


def test_negative_and_increasing():
    xs = -np.logspace(-4, 2.5, 300)
    vals = np.array([expint_Ei(float(x)) for x in xs])
    assert np.all(vals < 0)
    # x runs from -1e-4 down to about -316; Ei rises towards 0
    assert np.all(np.diff(vals) > 0)


def test_domain_and_underflow():
    with pytest.raises(ValueError):
        expint_Ei(0.0)
    with pytest.raises(ValueError):
        expint_Ei(2.0)
    with pytest.raises(ValueError):
        expint_e1(-1.0)
    assert expint_Ei(-701.0) == 0.0
    assert str(expint_Ei(-800.0)) == "-0.0"


@pytest.mark.parametrize("a", [30.5, 40.0, 100.0, 1e3, 1e6])
def test_fused_product_matches_asymptotic(a):
    assert exp_times_Ei(a) == pytest.approx(exp_times_Ei_asymptotic(a), abs=1e-8)


@pytest.mark.parametrize("a", [1e-6, 0.2, 1.0, 1.5, 5.0, 20.0])
def test_fused_product_matches_separate_factors(a):
    assert exp_times_Ei(a) == pytest.approx(np.exp(a) * expint_Ei(-a), rel=1e-12)


def test_fused_product_finite_where_factors_overflow():
    val = exp_times_Ei(2000.0)
    assert np.isfinite(val) and val == pytest.approx(-1 / 2001.0, rel=1e-6)
