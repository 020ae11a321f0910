"""Upper-tail probabilities of the Student t and F distributions.

Both reduce to the regularized incomplete beta function ``I_x(a, b)``,
evaluated here with the modified Lentz algorithm on its continued fraction.
"""

from __future__ import annotations

import math

_EPS = 1e-16
_TINY = 1e-300
_MAX_ITER = 100_000


def _log_beta(a: float, b: float) -> float:
    return math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)


def _beta_cf(a: float, b: float, x: float) -> float:
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for k in range(1, _MAX_ITER + 1):
        k2 = 2 * k
        # even step
        aa = k * (b - k) * x / ((qam + k2) * (a + k2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        # odd step
        aa = -(a + k) * (qab + k) * x / ((a + k2) * (qap + k2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    raise ArithmeticError(f"incomplete beta continued fraction did not converge (a={a}, b={b}, x={x})")


def betainc_regularized(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta ``I_x(a, b)`` for a, b > 0 and 0 <= x <= 1."""
    if a <= 0 or b <= 0:
        raise ValueError(f"shape parameters must be positive, got a={a}, b={b}")
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x must lie in [0, 1], got {x}")
    if x == 0.0 or x == 1.0:
        return x
    log_front = a * math.log(x) + b * math.log1p(-x) - _log_beta(a, b)
    # the continued fraction converges fast only below the mean; use symmetry above it
    if x < (a + 1.0) / (a + b + 2.0):
        return math.exp(log_front) * _beta_cf(a, b, x) / a
    return 1.0 - math.exp(log_front) * _beta_cf(b, a, 1.0 - x) / b


def _check_df(*dfs: float) -> None:
    for df in dfs:
        if not (df > 0 and math.isfinite(df)):
            raise ValueError(f"degrees of freedom must be positive and finite, got {df}")


def _beta_tail(a: float, b: float, num: float, den: float) -> float:
    """I_x(a, b) at x = num / (num + den), computed without forming 1 - x."""
    total = num + den
    x = num / total
    if x <= 0.5:
        return betainc_regularized(a, b, x)
    # x close to 1 has lost the digits of den; use the complement directly
    return 1.0 - betainc_regularized(b, a, den / total)


def t_sf(t: float, df: float) -> float:
    """P(T > t) for Student's t with ``df`` degrees of freedom."""
    _check_df(df)
    if math.isnan(t):
        return math.nan
    if math.isinf(t):
        return 0.0 if t > 0 else 1.0
    tail = 0.5 * _beta_tail(0.5 * df, 0.5, df, t * t)
    return tail if t >= 0 else 1.0 - tail


def t_two_sided_p(t: float, df: float) -> float:
    """P(|T| >= |t|)."""
    _check_df(df)
    if math.isnan(t):
        return math.nan
    if math.isinf(t):
        return 0.0
    return _beta_tail(0.5 * df, 0.5, df, t * t)


def f_sf(f: float, df1: float, df2: float) -> float:
    """P(F > f) for the F distribution with (df1, df2) degrees of freedom."""
    _check_df(df1, df2)
    if math.isnan(f):
        return math.nan
    if f < 0:
        raise ValueError(f"F statistic must be non-negative, got {f}")
    if math.isinf(f):
        return 0.0
    if f == 0:
        return 1.0
    return _beta_tail(0.5 * df2, 0.5 * df1, df2, df1 * f)
