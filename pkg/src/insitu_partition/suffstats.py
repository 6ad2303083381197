"""Constant-size sufficient statistics for a simple linear regression line.

A line over the points ``(t_i, y_i)`` is summarised by five running sums and
a count::

    theta     = sum t        big_theta = sum t**2
    psi       = sum y        big_psi   = sum y**2
    tau       = sum t*y      count     = number of points

From these the least-squares line and its residual sum of squares follow
in closed form, so the raw points never need to be kept.

Internally the sums are taken about the first accumulated point ``(t0, y0)``
and the three sums involving ``y`` carry a Neumaier compensation term.  The
residual sum of squares is a small difference of large sums; measured about a
far-away origin (late time steps, large offsets) the five global sums round
away the very digits it is made of.  About ``(t0, y0)`` the same formula
loses nothing to the offset, and when the remaining difference is still
badly cancelled it is evaluated exactly from the stored values.  The global
sums above are available as properties and are what gets serialised.

All values are immutable; every operation returns a new object.  The
statistics types share a small method protocol (``add``, ``merge``, ``rss``,
``coefficients``, ``rss_floor``, ``empty``) so that :class:`SuffStats` and
the rotation-based :class:`insitu_partition.stable.RotatedStats` are
interchangeable inside the partitioner.
"""
from __future__ import annotations

import math
import sys
from typing import Iterable, NamedTuple

from .errors import ContractError, DataQualityError

__all__ = [
    "SamplePoint",
    "SuffStats",
    "LineFit",
    "accumulate",
    "batch",
    "merge",
    "remove_oldest_shift",
    "rss",
    "coefficients",
    "roundoff_floor",
]

_EPS = sys.float_info.epsilon
_fsum = math.fsum


class SamplePoint(NamedTuple):
    t: int
    y: float


class LineFit(NamedTuple):
    beta0: float
    beta1: float

    def __call__(self, t):
        return self.beta0 + self.beta1 * t


def _check_finite(t, y):
    if not math.isfinite(y):
        raise DataQualityError(t, y)


def _split(parts):
    """Sum ``parts`` into an unevaluated pair ``hi + lo``."""
    hi = _fsum(parts)
    return hi, _fsum(list(parts) + [-hi])


# An RSS evaluated in floating point is trusted when it exceeds this fraction
# of the spread it was computed from (relative error below ~1e-10).
_FAST_MARGIN = 1e-5

# Relative size of the round-off an exactly evaluated RSS can still carry:
# the rounded products y*y and t*y, and the rounded differences y - y0.
ROUNDOFF_FACTOR = 16 * _EPS


def _dyadic(*values):
    """Integers ``m`` and a power of two ``d`` with ``values[i] == m[i] / d``."""
    ratios = [v.as_integer_ratio() if isinstance(v, float) else (int(v), 1) for v in values]
    d = max(den for _, den in ratios)
    return [num * (d // den) for num, den in ratios], d


def roundoff_floor(spread: float) -> float:
    """RSS values at or below this are indistinguishable from zero.

    ``spread`` is the sum of squared deviations of ``y`` from the first
    value of the line.
    """
    return ROUNDOFF_FACTOR * spread


class SuffStats(NamedTuple):
    count: int = 0
    t0: float = 0
    y0: float = 0.0
    # sums of dt = t - t0 and dy = y - y0
    st: float = 0
    stt: float = 0
    sy: float = 0.0
    syy: float = 0.0
    sty: float = 0.0
    # compensation terms of sy, syy, sty
    cy: float = 0.0
    cyy: float = 0.0
    cty: float = 0.0

    @classmethod
    def empty(cls) -> "SuffStats":
        return _EMPTY

    @classmethod
    def from_totals(cls, theta, big_theta, psi, big_psi, tau, count) -> "SuffStats":
        """Rebuild from the five global sums (origin at ``t = 0, y = 0``)."""
        return cls(count, 0, 0.0, theta, big_theta, psi, big_psi, tau)

    # --- the five global sums -------------------------------------------------

    @property
    def theta(self):
        return self.count * self.t0 + self.st

    @property
    def big_theta(self):
        n, t0 = self.count, self.t0
        return _fsum((n * t0 * t0, 2 * t0 * self.st, self.stt))

    @property
    def psi(self) -> float:
        return _fsum((self.count * self.y0, self.sy, self.cy))

    @property
    def big_psi(self) -> float:
        n, y0 = self.count, self.y0
        return _fsum((n * y0 * y0, 2 * y0 * self.sy, 2 * y0 * self.cy, self.syy, self.cyy))

    @property
    def tau(self) -> float:
        n, t0, y0 = self.count, self.t0, self.y0
        return _fsum((n * t0 * y0, t0 * self.sy, t0 * self.cy, y0 * self.st, self.sty, self.cty))

    def totals(self) -> tuple:
        """``(theta, big_theta, psi, big_psi, tau, count)``."""
        return (self.theta, self.big_theta, self.psi, self.big_psi, self.tau, self.count)

    @property
    def spread(self) -> float:
        """Sum of squared deviations of ``y`` from the first value."""
        return self.syy + self.cyy

    # --- updates --------------------------------------------------------------

    def add(self, t, y) -> "SuffStats":
        _check_finite(t, y)
        n, t0, y0, st, stt, sy, syy, sty, cy, cyy, cty = self
        if n == 0:
            return _new(self.__class__, (1, t, y, 0 * t, 0 * t, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0))
        dt = t - t0
        dy = y - y0
        # Neumaier summation for the three y sums
        s = sy + dy
        cy += (sy - s) + dy if abs(sy) >= abs(dy) else (dy - s) + sy
        sy = s
        q = dy * dy
        s = syy + q
        cyy += (syy - s) + q if syy >= q else (q - s) + syy
        syy = s
        q = dt * dy
        s = sty + q
        cty += (sty - s) + q if abs(sty) >= abs(q) else (q - s) + sty
        sty = s
        return _new(self.__class__, (n + 1, t0, y0, st + dt, stt + dt * dt, sy, syy, sty, cy, cyy, cty))

    def merge(self, other: "SuffStats") -> "SuffStats":
        if other.count == 0:
            return self
        if self.count == 0:
            return other
        # re-express the other's sums about this origin
        m = other.count
        dt = other.t0 - self.t0
        dy = other.y0 - self.y0
        o_sy = (other.sy, other.cy)
        sy, cy = _split((self.sy, self.cy) + o_sy + (m * dy,))
        syy, cyy = _split(
            (self.syy, self.cyy, other.syy, other.cyy, 2 * dy * other.sy, 2 * dy * other.cy, m * dy * dy)
        )
        sty, cty = _split(
            (self.sty, self.cty, other.sty, other.cty, dt * other.sy, dt * other.cy, dy * other.st, m * dt * dy)
        )
        st = self.st + other.st + m * dt
        stt = self.stt + other.stt + 2 * dt * other.st + m * dt * dt
        return _new(self.__class__, (self.count + m, self.t0, self.y0, st, stt, sy, syy, sty, cy, cyy, cty))

    # --- derived quantities ---------------------------------------------------

    def _centred(self):
        n = self.count
        sy = self.sy + self.cy
        ctt = (n * self.stt - self.st * self.st) / n
        cyy = (self.syy + self.cyy) - sy * sy / n
        cty = (self.sty + self.cty) - self.st * sy / n
        return ctt, cyy, cty, sy

    def rss(self) -> float:
        n = self.count
        if n < 2:
            raise ContractError(f"RSS needs at least 2 points, got {n}")
        ctt, cyy, cty, _ = self._centred()
        value = cyy - cty * cty / ctt
        if value > _FAST_MARGIN * self.spread:
            return value
        return self._rss_exact()

    def _rss_exact(self) -> float:
        """RSS of the stored sums in exact integer arithmetic.

        Every stored value is a dyadic rational, so with the ``t`` sums over
        a common denominator ``e`` and the ``y`` sums over ``d`` the RSS is
        ``(Y*A - C*C) / (n*A*d*d)`` for the integers built below.
        """
        n = self.count
        (st, stt), e = _dyadic(self.st, self.stt)
        (sy, cy, syy, cyy, sty, cty), d = _dyadic(self.sy, self.cy, self.syy, self.cyy, self.sty, self.cty)
        sy, syy, sty = sy + cy, syy + cyy, sty + cty
        a = n * stt * e - st * st
        c = n * sty * e - st * sy
        y = n * syy * d - sy * sy
        num = y * a - c * c
        # round-off in the stored products can still leave a tiny negative
        return num / (n * a * d * d) if num > 0 else 0.0

    def rss_floor(self) -> float:
        return roundoff_floor(self.spread)

    def coefficients(self) -> LineFit:
        n = self.count
        if n < 2:
            raise ContractError(f"a line needs at least 2 points, got {n}")
        ctt, _, cty, sy = self._centred()
        slope = cty / ctt
        # intercept at t = 0 in the global time axis
        return LineFit(self.y0 + sy / n - slope * (self.t0 + self.st / n), slope)


_new = tuple.__new__
_EMPTY = SuffStats()


def accumulate(stats, point) -> SuffStats:
    """Add one ``(t, y)`` point; rejects non-finite ``y``."""
    t, y = point
    return stats.add(t, y)


def batch(points: Iterable, kind=SuffStats):
    """Accumulate ``points`` left to right into fresh statistics of type ``kind``."""
    stats = kind.empty()
    for t, y in points:
        stats = stats.add(t, y)
    return stats


def merge(a, b):
    """Combine statistics of two disjoint point sets."""
    return a.merge(b)


def remove_oldest_shift(curr, union, old, new):
    """Advance the window by one step.

    ``old`` (the oldest buffered point) moves into ``curr`` and ``new`` joins
    ``curr | buff``; the buffer statistics themselves are recomputed by the
    caller from the raw buffer.
    """
    return accumulate(curr, old), accumulate(union, new)


def rss(stats) -> float:
    return stats.rss()


def coefficients(stats) -> LineFit:
    return stats.coefficients()
