"""Reduce a 2D field to block means and partition each block independently.

Frames are row-major arrays of ``ny`` rows by ``nx`` columns (x varies
fastest).  Blocks tile the grid without overlap; blocks on the right and
bottom edges may be smaller and are averaged over the cells they contain.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np

from .errors import ConfigError, DataQualityError, FormatError
from .partitioner import PartitionerConfig, PartitionerState, Segment, finish, step

__all__ = ["GridSpec", "GridFrame", "BlockSummary", "GridResult", "block_means", "run_grid"]


@dataclass(frozen=True)
class GridSpec:
    nx: int
    ny: int
    bx: int
    by: int

    def __post_init__(self):
        if min(self.nx, self.ny, self.bx, self.by) < 1:
            raise ConfigError(f"grid and block sizes must be >= 1: {self}")

    @property
    def blocks_x(self) -> int:
        return math.ceil(self.nx / self.bx)

    @property
    def blocks_y(self) -> int:
        return math.ceil(self.ny / self.by)

    @property
    def blocks(self) -> int:
        return self.blocks_x * self.blocks_y

    def block_position(self, k) -> tuple[int, int]:
        """(row, col) of block ``k`` in row-major block order."""
        return divmod(k, self.blocks_x)


class GridFrame(NamedTuple):
    t: int
    values: np.ndarray


def block_means(frame, spec: GridSpec) -> np.ndarray:
    """Mean of each block, in row-major block order."""
    values = frame.values if isinstance(frame, GridFrame) else frame
    values = np.asarray(values, dtype=float)
    if values.size != spec.nx * spec.ny:
        raise FormatError(f"frame has {values.size} values, grid needs {spec.nx}x{spec.ny}")
    field_ = values.reshape(spec.ny, spec.nx)
    rows = np.arange(0, spec.ny, spec.by)
    cols = np.arange(0, spec.nx, spec.bx)
    sums = np.add.reduceat(np.add.reduceat(field_, rows, axis=0), cols, axis=1)
    counts = np.outer(np.minimum(spec.by, spec.ny - rows), np.minimum(spec.bx, spec.nx - cols))
    return (sums / counts).ravel()


class BlockSummary(NamedTuple):
    row: int
    col: int
    n_partitions: int
    rss_total: float


@dataclass
class GridResult:
    spec: GridSpec
    segments: list  # one list of Segment per block
    summary: list  # one BlockSummary per block


def run_grid(cfg: PartitionerConfig, spec: GridSpec, frames: Iterable) -> GridResult:
    """Partition every block-mean series in a single pass over the frames.

    Each frame is reduced to block means and each mean is fed to that
    block's own partitioner; blocks never share state.
    """
    states = [PartitionerState.fresh(cfg) for _ in range(spec.blocks)]
    closed = [[] for _ in range(spec.blocks)]
    for expected_t, frame in enumerate(frames, start=1):
        t = frame.t if isinstance(frame, GridFrame) else expected_t
        means = block_means(frame, spec)
        for k, state in enumerate(states):
            try:
                _, seg = step(state, (t, float(means[k])))
            except DataQualityError as exc:
                row, col = spec.block_position(k)
                raise DataQualityError(exc.t, exc.y, f"block row {row}, col {col}") from None
            if seg is not None:
                closed[k].append(seg)
    summary = []
    for k, state in enumerate(states):
        closed[k].extend(finish(state))
        row, col = spec.block_position(k)
        summary.append(BlockSummary(row, col, len(closed[k]), math.fsum(s.rss for s in closed[k])))
    return GridResult(spec, closed, summary)
