"""Rebuild the piecewise-linear approximation from saved segments.

Also provides the conventional alternative, saving ``k`` evenly spaced time
steps and interpolating linearly between them, so both can be compared on
the same footing: number of partitions against total RSS.
"""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, IntegrityError
from .partitioner import Segment
from .suffstats import LineFit, batch

__all__ = [
    "Reconstruction",
    "ComparisonReport",
    "from_segments",
    "evaluate",
    "evaluate_all",
    "audit",
    "evenly_spaced_indices",
    "evenly_spaced_baseline",
    "compare",
]


@dataclass(frozen=True)
class Reconstruction:
    segments: tuple
    rss_total: float
    n_partitions: int
    _starts: list = field(default_factory=list, init=False, repr=False, compare=False)

    def __post_init__(self):
        self._starts.extend(s.start_t for s in self.segments)

    @property
    def length(self) -> int:
        return self.segments[-1].end_t if self.segments else 0

    @property
    def breakpoints(self) -> list[int]:
        return [s.end_t for s in self.segments[:-1]]


def _check_tiling(segments):
    if not segments:
        raise IntegrityError("no segments")
    expected = 1
    for seg in segments:
        if seg.start_t != expected:
            raise IntegrityError(f"segment {seg.index} starts at t={seg.start_t}, expected {expected}")
        if seg.end_t < seg.start_t:
            raise IntegrityError(f"segment {seg.index} is empty")
        expected = seg.end_t + 1


def from_segments(segments, n_partitions=None) -> Reconstruction:
    """Wrap segments that must tile 1..T without gaps or overlaps."""
    segments = tuple(segments)
    _check_tiling(segments)
    total = math.fsum(s.rss for s in segments)
    n = len(segments) if n_partitions is None else n_partitions
    return Reconstruction(segments, total, n)


def evaluate(recon: Reconstruction, t: int) -> float:
    """Value of the fitted line of the segment containing ``t``."""
    if not 1 <= t <= recon.length:
        raise IndexError(f"t={t} outside 1..{recon.length}")
    seg = recon.segments[bisect.bisect_right(recon._starts, t) - 1]
    return seg.fit.beta0 + seg.fit.beta1 * t


def evaluate_all(recon: Reconstruction) -> np.ndarray:
    """Reconstructed values for t = 1..T."""
    out = np.empty(recon.length)
    for seg in recon.segments:
        t = np.arange(seg.start_t, seg.end_t + 1)
        out[seg.start_t - 1 : seg.end_t] = seg.fit.beta0 + seg.fit.beta1 * t
    return out


def audit(recon: Reconstruction, y) -> list[tuple[int, float, float]]:
    """Recompute each segment's residual sum from raw values.

    Returns ``(index, stored_rss, audited_rss)`` per segment.
    """
    y = np.asarray(y, dtype=float)
    if len(y) != recon.length:
        raise ConfigError(f"raw series has {len(y)} steps, segments cover {recon.length}")
    fitted = evaluate_all(recon)
    rows = []
    for seg in recon.segments:
        r = y[seg.start_t - 1 : seg.end_t] - fitted[seg.start_t - 1 : seg.end_t]
        rows.append((seg.index, seg.rss, float(np.dot(r, r))))
    return rows


def evenly_spaced_indices(length: int, k: int) -> list[int]:
    """``round(1 + (i-1)(T-1)/(k-1))`` for i = 1..k, halves rounded up."""
    if k < 2:
        raise ConfigError(f"need k >= 2 saved steps, got {k}")
    if k > length:
        raise ConfigError(f"cannot save {k} steps out of {length}")
    return [int(math.floor(1 + i * (length - 1) / (k - 1) + 0.5)) for i in range(k)]


def evenly_spaced_baseline(values, k: int) -> Reconstruction:
    """Save ``k`` evenly spaced steps and interpolate linearly between them.

    Each gap between saved steps becomes one piece; the first piece includes
    both of its end points.  ``n_partitions`` is reported as ``k``, the
    number of saved steps.
    """
    y = np.asarray(values, dtype=float)
    idx = evenly_spaced_indices(len(y), k)
    segments = []
    for j, (a, b) in enumerate(zip(idx, idx[1:])):
        slope = (y[b - 1] - y[a - 1]) / (b - a)
        fit = LineFit(float(y[a - 1] - slope * a), float(slope))
        lo = a if j == 0 else a + 1
        t = np.arange(lo, b + 1)
        r = y[lo - 1 : b] - (fit.beta0 + fit.beta1 * t)
        stats = batch(zip(t.tolist(), y[lo - 1 : b].tolist()))
        segments.append(Segment(j, lo, b, stats, float(np.dot(r, r)), fit))
    return from_segments(segments, n_partitions=k)


@dataclass(frozen=True)
class ComparisonReport:
    n_partitions: tuple[int, int]
    rss_total: tuple[float, float]
    worst_a: list
    worst_b: list

    @property
    def delta_partitions(self) -> int:
        return self.n_partitions[1] - self.n_partitions[0]

    @property
    def delta_rss(self) -> float:
        return self.rss_total[1] - self.rss_total[0]

    def lines(self, top=5):
        out = [
            f"n_partitions  {self.n_partitions[0]:>10d}  {self.n_partitions[1]:>10d}",
            f"rss_total     {self.rss_total[0]:>10.6g}  {self.rss_total[1]:>10.6g}",
        ]
        for label, worst in (("a", self.worst_a), ("b", self.worst_b)):
            for start, end, value in worst[:top]:
                out.append(f"worst[{label}]  t={start}..{end}  rss={value:.6g}")
        return out


def _ranking(recon):
    ranked = sorted(recon.segments, key=lambda s: (-s.rss, s.start_t))
    return [(s.start_t, s.end_t, s.rss) for s in ranked]


def compare(a: Reconstruction, b: Reconstruction) -> ComparisonReport:
    """Side-by-side fidelity of two reconstructions of the same series.

    Segments of each are ranked by RSS, worst first, to point at stretches
    worth revisiting.
    """
    if a.length != b.length:
        raise ConfigError(f"reconstructions cover {a.length} and {b.length} steps")
    return ComparisonReport(
        (a.n_partitions, b.n_partitions),
        (a.rss_total, b.rss_total),
        _ranking(a),
        _ranking(b),
    )
