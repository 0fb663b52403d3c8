"""Exponential integral for negative arguments.

Only Ei(-a), a > 0, is needed, i.e. -E1(a). E1 uses its power series for
a <= 1 and a modified-Lentz continued fraction above that. The continued fraction
yields e^a * E1(a) directly, which is what the outage CDFs need: e^a Ei(-a)
stays finite for large a while each factor over/underflows.
"""
from __future__ import annotations

import math

EULER_GAMMA = 0.57721566490153286061

_EPS = 1e-16
_TINY = 1e-300
_MAX_ITER = 500
_SERIES_LIMIT = 1.0
_UNDERFLOW = 700.0


def _e1_series(a: float) -> float:
    # E1(a) = -gamma - ln a - sum_{k>=1} (-a)^k / (k k!)
    total = 0.0
    term = 1.0
    for k in range(1, _MAX_ITER):
        term *= -a / k
        delta = term / k
        total += delta
        if abs(delta) < abs(total) * _EPS:
            break
    return -EULER_GAMMA - math.log(a) - total


def _scaled_e1_cf(a: float) -> float:
    """e^a E1(a) by continued fraction (modified Lentz), a > 1."""
    b = a + 1.0
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER):
        an = -float(i * i)
        b += 2.0
        d = 1.0 / (an * d + b)
        c = b + an / c
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    raise ArithmeticError(f"E1 continued fraction did not converge for a={a!r}")


def expint_e1(a: float) -> float:
    if not a > 0:
        raise ValueError(f"E1 needs a positive argument, got {a!r}")
    if a <= _SERIES_LIMIT:
        return _e1_series(a)
    if a > _UNDERFLOW:
        return 0.0
    return _scaled_e1_cf(a) * math.exp(-a)


def expint_Ei(x: float) -> float:
    """Ei(x) for x < 0; returns -0.0 once e^x underflows (x < -700)."""
    if not x < 0:
        raise ValueError(f"Ei is only provided for negative arguments, got {x!r}")
    if x < -_UNDERFLOW:
        return -0.0
    return -expint_e1(-x)


def exp_times_Ei(a: float) -> float:
    """e^a * Ei(-a) for a > 0, without forming either factor separately when a is large."""
    if not a > 0:
        raise ValueError(f"argument must be positive, got {a!r}")
    if a <= _SERIES_LIMIT:
        return -math.exp(a) * _e1_series(a)
    return -_scaled_e1_cf(a)


def exp_times_Ei_asymptotic(a: float, terms: int = 12) -> float:
    """Asymptotic series -(1/a) * sum_k (-1)^k k! / a^k; only meaningful for large a."""
    total = 0.0
    term = 1.0
    for k in range(terms):
        total += term
        term *= -(k + 1) / a
    return -total / a
