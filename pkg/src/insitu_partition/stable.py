"""Rotation-updated line statistics for nearly perfect fits.

Even about a shifted origin, the running sums leave the RSS with an error of
order ``eps`` times the spread of ``y``.  That is harmless for noisy data but
large in relative terms when a long line fits almost perfectly.
:class:`RotatedStats` instead keeps the 2x2 triangular factor of the design
matrix ``[1, t - t0]``, updated one row at a time with Givens rotations, and
accumulates the residual sum of squares directly.  Memory per line stays
constant, as with the sums.

The five global sums are carried along too, so a ``RotatedStats`` serialises
to the same segment record as :class:`~insitu_partition.suffstats.SuffStats`;
only ``rss`` and ``coefficients`` come from the factor.
"""
from __future__ import annotations

import math
from typing import NamedTuple

from .errors import ContractError
from .suffstats import LineFit, SuffStats, _check_finite, roundoff_floor

__all__ = ["RotatedStats"]

_new = tuple.__new__


def _rotate(r11, r12, r22, z1, z2, ssr, x1, x2, y):
    """Fold the weighted row ``(x1, x2 | y)`` into the factor."""
    if x1 != 0.0:
        r = math.hypot(r11, x1)
        c, s = r11 / r, x1 / r
        r11, r12, x2 = r, c * r12 + s * x2, c * x2 - s * r12
        z1, y = c * z1 + s * y, c * y - s * z1
    if x2 != 0.0:
        r = math.hypot(r22, x2)
        c, s = r22 / r, x2 / r
        r22 = r
        z2, y = c * z2 + s * y, c * y - s * z2
    return r11, r12, r22, z1, z2, ssr + y * y


class RotatedStats(NamedTuple):
    theta: float = 0.0
    big_theta: float = 0.0
    psi: float = 0.0
    big_psi: float = 0.0
    tau: float = 0.0
    count: int = 0
    # factor of the design in the shifted time axis t - t0
    t0: float = 0.0
    r11: float = 0.0
    r12: float = 0.0
    r22: float = 0.0
    z1: float = 0.0
    z2: float = 0.0
    ssr: float = 0.0
    # first y and sum of (y - y0)**2, the scale of the round-off floor
    y0: float = 0.0
    spread: float = 0.0

    @classmethod
    def empty(cls) -> "RotatedStats":
        return _EMPTY

    @property
    def sums(self) -> SuffStats:
        return SuffStats.from_totals(*self[:6])

    def add(self, t, y) -> "RotatedStats":
        _check_finite(t, y)
        t0, y0 = (t, y) if self.count == 0 else (self.t0, self.y0)
        factor = _rotate(*self[7:13], 1.0, float(t - t0), y)
        return _new(
            RotatedStats,
            (
                self.theta + t,
                self.big_theta + t * t,
                self.psi + y,
                self.big_psi + y * y,
                self.tau + t * y,
                self.count + 1,
                t0,
            )
            + factor
            + (y0, self.spread + (y - y0) ** 2),
        )

    def merge(self, other: "RotatedStats") -> "RotatedStats":
        if other.count == 0:
            return self
        if self.count == 0:
            return other
        # re-express the other factor's rows in this factor's time origin
        shift = other.t0 - self.t0
        dy = other.y0 - self.y0
        factor = self[7:13]
        factor = _rotate(*factor, other.r11, other.r12 + other.r11 * shift, other.z1)
        factor = _rotate(*factor, 0.0, other.r22, other.z2)
        r11, r12, r22, z1, z2, ssr = factor
        return _new(
            RotatedStats,
            (
                self.theta + other.theta,
                self.big_theta + other.big_theta,
                self.psi + other.psi,
                self.big_psi + other.big_psi,
                self.tau + other.tau,
                self.count + other.count,
                self.t0,
                r11,
                r12,
                r22,
                z1,
                z2,
                ssr + other.ssr,
                self.y0,
                self.spread + other.spread + 2 * dy * (other.psi - other.count * other.y0) + other.count * dy * dy,
            ),
        )

    def rss(self) -> float:
        if self.count < 2:
            raise ContractError(f"RSS needs at least 2 points, got {self.count}")
        return self.ssr

    def rss_floor(self) -> float:
        return roundoff_floor(self.spread)

    def coefficients(self) -> LineFit:
        if self.count < 2:
            raise ContractError(f"a line needs at least 2 points, got {self.count}")
        slope = self.z2 / self.r22
        intercept = (self.z1 - self.r12 * slope) / self.r11
        return LineFit(intercept - slope * self.t0, slope)


_EMPTY = RotatedStats()
