"""Tables of partition count and total RSS over a grid of (alpha, delta2)."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .partitioner import PartitionerConfig, run_series

__all__ = ["SweepCell", "run_sweep", "write_sweep_csv", "read_sweep_csv"]


@dataclass(frozen=True)
class SweepCell:
    alpha: float
    delta2: float
    n_partitions: int
    rss_total: float


def run_sweep(points, alphas: Sequence[float], delta2s: Sequence[float], buffer_size_b=5) -> list[SweepCell]:
    """One independent run per setting, alpha-major order."""
    points = list(points)
    cells = []
    for alpha in alphas:
        for delta2 in delta2s:
            segments = run_series(PartitionerConfig(buffer_size_b, alpha, delta2), points)
            cells.append(SweepCell(alpha, delta2, len(segments), math.fsum(s.rss for s in segments)))
    return cells


def write_sweep_csv(fh, cells) -> None:
    fh.write("alpha,delta2,n_partitions,rss_total\n")
    for c in cells:
        fh.write(f"{c.alpha!r},{c.delta2!r},{c.n_partitions},{c.rss_total!r}\n")


def read_sweep_csv(fh) -> list[SweepCell]:
    lines = [line.strip() for line in fh if line.strip()]
    cells = []
    for line in lines[1:]:
        a, d, n, r = line.split(",")
        cells.append(SweepCell(float(a), float(d), int(n), float(r)))
    return cells
