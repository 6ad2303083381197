"""Standard and variance-inflated F-statistics for one line versus two.

The single-line model has ``p1 = 2`` parameters and the two-line model
``p2 = 4``.  With ``RSS1`` the residual sum of squares of one line through
``curr | buff`` and ``RSS2 = RSS_curr + RSS_buff``::

    F_standard = ((RSS1 - RSS2) / (p2 - p1)) / (RSS2 / (n - p2))
    F_modified = ((RSS1 - RSS2) / (p2 - p1)) / ((RSS2 + delta2 * n) / (n - p2))

``delta2`` inflates the error variance of the two-line fit so that nearly
linear stretches stop producing breakpoints.  The p-value is the upper tail
of an F(p2 - p1, n - p2) distribution and ``H0`` is rejected when it is
strictly below ``alpha``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConfigError, ContractError, DegenerateFitError, InsufficientDataError

__all__ = [
    "FTestConfig",
    "FTestResult",
    "f_standard",
    "f_modified",
    "f_survival",
    "log_beta",
    "betainc_regularized",
]


@dataclass(frozen=True)
class FTestConfig:
    alpha: float = 0.001
    delta2: float = 0.0
    p1: int = 2
    p2: int = 4

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ConfigError(f"alpha must lie in (0, 1), got {self.alpha}")
        if not (self.delta2 >= 0.0 and math.isfinite(self.delta2)):
            raise ConfigError(f"delta2 must be a finite value >= 0, got {self.delta2}")
        if (self.p1, self.p2) != (2, 4):
            raise ConfigError("the line-versus-two-lines test has p1 = 2, p2 = 4")


@dataclass(frozen=True)
class FTestResult:
    f_stat: float
    p_value: float
    reject: bool
    rss1: float
    rss2: float
    n_total: int


def _numerator(rss1, rss2, cfg):
    diff = rss1 - rss2
    # round-off can push rss2 above rss1
    if diff < 0.0:
        diff = 0.0
    return diff / (cfg.p2 - cfg.p1)


def f_standard(rss1: float, rss2: float, n_total: int, cfg: FTestConfig) -> float:
    if n_total <= cfg.p2:
        raise InsufficientDataError(f"need more than {cfg.p2} points, got {n_total}")
    if rss2 <= 0.0:
        raise DegenerateFitError("two-line RSS is zero; F is undefined")
    return _numerator(rss1, rss2, cfg) / (rss2 / (n_total - cfg.p2))


def f_modified(rss1: float, rss2: float, n_total: int, cfg: FTestConfig) -> FTestResult:
    """Variance-inflated F-test of one line against two.

    If the inflated error term is exactly zero (``rss2 == 0`` and
    ``delta2 == 0``) a positive ``rss1`` gives ``f_stat = inf`` and a
    rejection, while ``rss1 == 0`` means both fits are perfect and nothing
    is rejected.
    """
    if n_total <= cfg.p2:
        raise InsufficientDataError(f"need more than {cfg.p2} points, got {n_total}")
    d1 = cfg.p2 - cfg.p1
    d2 = n_total - cfg.p2
    error_ss = rss2 + cfg.delta2 * n_total
    if error_ss <= 0.0:
        if rss1 > 0.0:
            return FTestResult(math.inf, 0.0, True, rss1, rss2, n_total)
        return FTestResult(0.0, 1.0, False, rss1, rss2, n_total)
    f = _numerator(rss1, rss2, cfg) / (error_ss / d2)
    p = f_survival(f, d1, d2)
    return FTestResult(f, p, p < cfg.alpha, rss1, rss2, n_total)


def f_survival(f: float, d1: int, d2: int) -> float:
    """P(X > f) for X ~ F(d1, d2)."""
    if d1 < 1 or d2 < 1:
        raise ContractError(f"degrees of freedom must be >= 1, got ({d1}, {d2})")
    if not f >= 0.0:
        raise ContractError(f"F must be >= 0, got {f}")
    if f == 0.0:
        return 1.0
    if math.isinf(f):
        return 0.0
    ratio = d1 * f / d2
    if d1 == 2:
        # I_x(d2/2, 1) = x**(d2/2) with x = 1 / (1 + ratio)
        return math.exp(-0.5 * d2 * math.log1p(ratio))
    return _f_upper_tail(ratio, d1, d2)


def _f_upper_tail(ratio, d1, d2):
    # P(X > f) = I_x(d2/2, d1/2) with x = d2 / (d2 + d1 f) = 1 / (1 + ratio)
    log_x = -math.log1p(ratio)
    log_1mx = math.log(ratio / (1.0 + ratio))
    x = 1.0 / (1.0 + ratio)
    return betainc_regularized(0.5 * d2, 0.5 * d1, x, log_x, log_1mx)


# --- incomplete beta -------------------------------------------------------

_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def _stirling_tail(x):
    """lgamma(x) minus its Stirling approximation, for x >= 10."""
    x2 = 1.0 / (x * x)
    return (
        1.0 / 12.0
        - x2 * (1.0 / 360.0 - x2 * (1.0 / 1260.0 - x2 * (1.0 / 1680.0 - x2 / 1188.0)))
    ) / x


def log_beta(a: float, b: float) -> float:
    """log B(a, b), accurate when one or both arguments are large."""
    if a <= 0.0 or b <= 0.0:
        raise ContractError("log_beta needs positive arguments")
    small, large = (a, b) if a <= b else (b, a)
    if large < 10.0:
        return math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)
    total = small + large
    corr = _stirling_tail(large) - _stirling_tail(total)
    if small < 10.0:
        # lgamma(large) - lgamma(large + small) without cancelling two huge terms
        diff = (
            -(total - 0.5) * math.log1p(small / large)
            - small * math.log(large)
            + small
            + corr
        )
        return math.lgamma(small) + diff
    return (
        _HALF_LOG_2PI
        + small * math.log(small / total)
        + large * math.log(large / total)
        + 0.5 * math.log(total / (small * large))
        + _stirling_tail(small)
        + corr
    )


def _beta_cf(a, b, x, max_iter=100_000, tol=1e-16):
    """Continued fraction for I_x(a, b), modified Lentz evaluation."""
    tiny = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, max_iter + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        d = tiny if abs(d) < tiny else d
        c = 1.0 + aa / c
        c = tiny if abs(c) < tiny else c
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        d = tiny if abs(d) < tiny else d
        c = 1.0 + aa / c
        c = tiny if abs(c) < tiny else c
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < tol:
            return h
    raise ArithmeticError(f"incomplete beta did not converge (a={a}, b={b}, x={x})")


def betainc_regularized(a, b, x, log_x=None, log_1mx=None):
    """Regularised incomplete beta I_x(a, b).

    ``log_x`` and ``log_1mx`` may be passed when they are known more
    accurately than ``log(x)`` and ``log1p(-x)``.
    """
    if not 0.0 <= x <= 1.0:
        raise ContractError(f"x must lie in [0, 1], got {x}")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    if log_x is None:
        log_x = math.log(x)
    if log_1mx is None:
        log_1mx = math.log1p(-x)
        one_minus_x = 1.0 - x
    else:
        one_minus_x = math.exp(log_1mx)
    log_front = a * log_x + b * log_1mx - log_beta(a, b)
    if x < (a + 1.0) / (a + b + 2.0):
        return math.exp(log_front) * _beta_cf(a, b, x) / a
    return 1.0 - math.exp(log_front) * _beta_cf(b, a, one_minus_x) / b
