"""Greedy online partitioning of a scalar series into linear segments.

Three regions are tracked while the series streams in:

* ``buff`` -- the last ``B`` raw points, the only raw data ever held;
* ``curr`` -- the open segment, kept as sufficient statistics only;
* ``past`` -- closed segments, already handed back to the caller.

Once the buffer is full, every incoming point first triggers a test of
``H0: one line fits curr | buff`` against ``H1: separate lines for curr and
buff``.  Failing to reject moves the oldest buffered point into ``curr`` and
appends the new one.  Rejecting closes ``curr`` with a breakpoint at its last
time step, turns the buffer's statistics into the new ``curr`` and refills
the buffer with the next ``B`` points before testing again.

Example::

    >>> cfg = PartitionerConfig(buffer_size_b=5, alpha=1e-3, delta2=1e-3)
    >>> segments = partition_values(cfg, y)          # doctest: +SKIP
    >>> [s.end_t for s in segments[:-1]]             # doctest: +SKIP
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple

from .errors import ConfigError, ContractError, SequencingError
from .ftest import FTestConfig, FTestResult, f_modified
from .stable import RotatedStats
from .suffstats import (
    LineFit,
    SamplePoint,
    SuffStats,
    _check_finite,
    batch,
    remove_oldest_shift,
)

__all__ = [
    "PartitionerConfig",
    "PartitionerState",
    "Segment",
    "TestRecord",
    "Partitioner",
    "init",
    "step",
    "finish",
    "run_series",
    "partition_values",
    "breakpoints",
    "make_segment",
    "check_state",
]


@dataclass(frozen=True)
class PartitionerConfig:
    """Tuning parameters.

    ``stable=True`` swaps the plain sums for rotation-updated statistics
    (:class:`~insitu_partition.stable.RotatedStats`), for very long segments.
    """

    buffer_size_b: int = 5
    alpha: float = 0.001
    delta2: float = 0.001
    stable: bool = False

    def __post_init__(self):
        if int(self.buffer_size_b) != self.buffer_size_b or self.buffer_size_b < 3:
            raise ConfigError(f"buffer size B must be an integer >= 3, got {self.buffer_size_b}")
        # validates alpha and delta2
        FTestConfig(self.alpha, self.delta2)

    @property
    def ftest(self) -> FTestConfig:
        return FTestConfig(self.alpha, self.delta2)

    @property
    def stats_kind(self):
        return RotatedStats if self.stable else SuffStats


@dataclass(frozen=True)
class Segment:
    index: int
    start_t: int
    end_t: int
    stats: SuffStats
    rss: float
    fit: LineFit

    @property
    def count(self) -> int:
        return self.stats.count


def make_segment(index, start_t, end_t, stats) -> Segment:
    """Close a segment, recovering its RSS and line from ``stats``."""
    if stats.count >= 2:
        return Segment(index, start_t, end_t, stats, stats.rss(), stats.coefficients())
    # a lone point is its own flat line
    return Segment(index, start_t, end_t, stats, 0.0, LineFit(stats.psi, 0.0))


class TestRecord(NamedTuple):
    """One hypothesis test, keyed by the newest buffered time step."""

    t: int
    candidate: int
    result: FTestResult


FILL_CURR, FILL_BUFF, TESTING = "fill_curr", "fill_buff", "testing"


@dataclass
class PartitionerState:
    cfg: PartitionerConfig
    curr_stats: object
    union_stats: object
    buffer: deque
    next_t: int = 1
    segments_emitted: int = 0
    curr_start: int = 1
    phase: str = FILL_CURR
    initialized: bool = False
    trace: list | None = field(default=None, repr=False)

    @classmethod
    def fresh(cls, cfg: PartitionerConfig, trace=False) -> "PartitionerState":
        empty = cfg.stats_kind.empty()
        return cls(
            cfg,
            empty,
            empty,
            deque(maxlen=cfg.buffer_size_b),
            trace=[] if trace else None,
        )


def _admit(state, point):
    t, y = point
    if t != state.next_t:
        raise SequencingError(f"expected time step {state.next_t}, got {t}")
    _check_finite(t, y)
    state.next_t = t + 1


def _resolved_rss(stats):
    value = stats.rss()
    return 0.0 if value <= stats.rss_floor() else value


def _test(state) -> FTestResult:
    cfg = state.cfg
    buff_stats = batch(state.buffer, cfg.stats_kind)
    rss1 = _resolved_rss(state.union_stats)
    rss2 = _resolved_rss(state.curr_stats) + _resolved_rss(buff_stats)
    result = f_modified(rss1, rss2, state.union_stats.count, cfg.ftest)
    if state.trace is not None:
        state.trace.append(TestRecord(state.buffer[-1][0], state.buffer[0][0] - 1, result))
    return result, buff_stats


def _close_curr(state) -> Segment:
    end_t = state.buffer[0][0] - 1
    seg = make_segment(state.segments_emitted, state.curr_start, end_t, state.curr_stats)
    state.segments_emitted += 1
    return seg


def _feed(state, point):
    """Feed one admitted point through the state machine."""
    b = state.cfg.buffer_size_b
    if state.phase == FILL_CURR:
        state.curr_stats = state.curr_stats.add(*point)
        state.union_stats = state.curr_stats
        if state.curr_stats.count == b:
            state.phase = FILL_BUFF
        return None
    if state.phase == FILL_BUFF:
        state.buffer.append(point)
        state.union_stats = state.union_stats.add(*point)
        if len(state.buffer) == b:
            state.phase = TESTING
            state.initialized = True
        return None

    result, buff_stats = _test(state)
    if result.reject:
        seg = _close_curr(state)
        state.curr_start = state.buffer[0][0]
        state.curr_stats = buff_stats
        state.buffer.clear()
        state.buffer.append(point)
        state.union_stats = buff_stats.add(*point)
        state.phase = FILL_BUFF
        return seg
    old = state.buffer.popleft()
    state.buffer.append(point)
    state.curr_stats, state.union_stats = remove_oldest_shift(
        state.curr_stats, state.union_stats, old, point
    )
    return None


def init(cfg: PartitionerConfig, first_2b_points, trace=False) -> PartitionerState:
    """Build the state from the first ``2B`` points of a series."""
    state = PartitionerState.fresh(cfg, trace=trace)
    points = list(first_2b_points)
    # a shorter stream is legal: it stays one segment and finish() closes it
    if len(points) > 2 * cfg.buffer_size_b:
        raise ContractError(f"init takes at most 2B = {2 * cfg.buffer_size_b} points, got {len(points)}")
    for point in points:
        _admit(state, point)
        _feed(state, point)
    return state


def step(state: PartitionerState, new_point) -> tuple[PartitionerState, Segment | None]:
    """Process one time step, mutating ``state`` in place.

    Returns the state together with the segment closed by this step, if any.
    Before the first ``2B`` points and while the buffer refills after a
    breakpoint, points are only accumulated.
    """
    point = SamplePoint(*new_point)
    _admit(state, point)
    return state, _feed(state, point)


def finish(state: PartitionerState) -> list[Segment]:
    """Close the stream, returning the final one or two segments.

    A series shorter than ``2B`` becomes one segment.  Otherwise ``curr`` is
    tested once more against whatever is buffered (at least 3 points
    needed); a rejection yields two segments, anything else one merged
    segment.
    """
    if state.phase == FILL_CURR and state.curr_stats.count == 0:
        return []
    last_t = state.next_t - 1
    idx = state.segments_emitted
    if not state.initialized:
        return [make_segment(idx, state.curr_start, last_t, state.union_stats)]
    if len(state.buffer) >= 3 and state.curr_stats.count >= 2:
        result, buff_stats = _test(state)
        if result.reject:
            first = _close_curr(state)
            second = make_segment(idx + 1, state.buffer[0][0], last_t, buff_stats)
            state.segments_emitted += 1
            return [first, second]
    state.segments_emitted += 1
    return [make_segment(idx, state.curr_start, last_t, state.union_stats)]


class Partitioner:
    """Streaming front end around :func:`step` and :func:`finish`.

    Points are pushed one value at a time; time indices are assigned
    consecutively from 1.
    """

    def __init__(self, cfg: PartitionerConfig, trace=False):
        self.cfg = cfg
        self.state = PartitionerState.fresh(cfg, trace=trace)

    def push(self, y) -> Segment | None:
        _, seg = step(self.state, (self.state.next_t, float(y)))
        return seg

    def close(self) -> list[Segment]:
        return finish(self.state)

    @property
    def trace(self):
        return self.state.trace


def _iter_segments(cfg, points, state) -> Iterator[Segment]:
    for point in points:
        _, seg = step(state, point)
        if seg is not None:
            yield seg
    yield from finish(state)


def run_series(cfg: PartitionerConfig, points: Iterable, trace=None) -> list[Segment]:
    """Partition a whole stream of ``(t, y)`` points with ``t`` = 1, 2, ...

    Pass a list as ``trace`` to collect a :class:`TestRecord` per test.
    """
    state = PartitionerState.fresh(cfg, trace=trace is not None)
    segments = list(_iter_segments(cfg, points, state))
    if trace is not None:
        trace.extend(state.trace)
    return segments


def partition_values(cfg: PartitionerConfig, values: Iterable[float], trace=None) -> list[Segment]:
    """Like :func:`run_series` for bare values indexed 1..T."""
    return run_series(cfg, ((t, float(y)) for t, y in enumerate(values, start=1)), trace=trace)


def breakpoints(segments) -> list[int]:
    return [seg.end_t for seg in segments[:-1]]


def check_state(state: PartitionerState, rel_tol=1e-9) -> None:
    """Assert the structural invariants of a live state (used by tests)."""
    assert len(state.buffer) <= state.cfg.buffer_size_b
    union = state.union_stats
    expected = state.curr_stats.merge(batch(state.buffer, state.cfg.stats_kind))
    assert expected.count == union.count
    # signed sums are compared against their Cauchy-Schwarz magnitude
    scale = {
        "theta": union.theta,
        "big_theta": union.big_theta,
        "psi": math.sqrt(union.count * union.big_psi),
        "big_psi": union.big_psi,
        "tau": math.sqrt(union.big_theta * union.big_psi),
    }
    for name, size in scale.items():
        a, b = getattr(expected, name), getattr(union, name)
        assert abs(a - b) <= rel_tol * size, name
