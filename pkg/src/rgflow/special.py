"""Principal-value exponential integral Ei(x) for real x.

Three representations are used, each where it converges fastest:

* the power series ``gamma + ln|x| + sum x**k / (k k!)`` for
  ``-1 <= x <= 40``;
* the continued fraction for ``E1(-x)`` (``Ei(x) = -E1(-x)``) for
  ``x < -1``;
* the asymptotic series ``e**x / x * sum k! / x**k`` for ``x > 40``,
  truncated at its smallest term.

The branches are public so the overlap regions can be checked against
each other.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import DomainZero, EiOverflow

EULER_GAMMA = 0.57721566490153286060651209008240243
SERIES_MAX = 40.0
CF_BELOW = -1.0
EI_MAX = 700.0
_EPS = 2.0 ** -53


def ei_series(x: float) -> float:
    if x == 0.0:
        raise DomainZero("Ei(0) is -infinity")
    term, total = 1.0, 0.0
    k = 0
    while True:
        k += 1
        term *= x / k
        contrib = term / k
        total += contrib
        if abs(contrib) <= _EPS * abs(total) and k > abs(x):
            break
    return EULER_GAMMA + math.log(abs(x)) + total


def ei_continued_fraction(x: float) -> float:
    """Ei(x) = -E1(-x) for ``x < 0`` via the modified Lentz algorithm."""
    if x >= 0.0:
        raise ValueError("continued fraction branch needs x < 0")
    z = -x
    # E1(z) = e^-z / (z + 1 - 1^2/(z + 3 - 2^2/(z + 5 - ...)))
    tiny = 1e-300
    b = z + 1.0
    c = 1.0 / tiny
    d = 1.0 / b
    f = d
    for i in range(1, 10000):
        a = -float(i * i)
        b += 2.0
        d = 1.0 / (a * d + b)
        c = b + a / c
        delta = c * d
        f *= delta
        if abs(delta - 1.0) <= _EPS:
            break
    return -f * math.exp(-z)


def ei_asymptotic(x: float) -> float:
    """Asymptotic series for positive ``x``; accurate only for large ``x``."""
    if x <= 0.0:
        raise ValueError("asymptotic branch needs x > 0")
    term, total = 1.0, 1.0
    k = 0
    while True:
        k += 1
        nxt = term * k / x
        if nxt >= term or nxt <= _EPS * total:
            break
        term = nxt
        total += term
    return math.exp(x) / x * total


def ei(x: float) -> float:
    """Exponential integral ``Ei(x) = PV int_{-inf}^{x} e**t / t dt``.

    Raises
    ------
    DomainZero
        At ``x = 0``.
    EiOverflow
        For ``x > 700``, where the result leaves double range.
    """
    x = float(x)
    if x == 0.0:
        raise DomainZero("Ei(0) is -infinity")
    if x > EI_MAX:
        raise EiOverflow(f"Ei({x}) overflows")
    if x < CF_BELOW:
        return ei_continued_fraction(x)
    if x <= SERIES_MAX:
        return ei_series(x)
    return ei_asymptotic(x)


ei_array = np.vectorize(ei, otypes=[float])
