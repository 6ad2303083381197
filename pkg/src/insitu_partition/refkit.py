"""Reference tooling: synthetic series plus two partitioners to check against.

None of this runs in situ.  It exists to check the streaming partitioner and
to judge how good its greedy choices are.

Random numbers come from numpy's PCG64 bit generator seeded through
:class:`numpy.random.SeedSequence`; independent sub-streams are derived with
:func:`spawn_seeds`, which calls ``SeedSequence.spawn``.  PCG64 and the
ziggurat normal sampler produce the same values on every platform, so
datasets written from a seed are reproducible byte for byte.
"""
from __future__ import annotations

import math
from importlib import resources
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import stats as sps

from .errors import ConfigError
from .partitioner import PartitionerConfig, Segment
from .suffstats import LineFit, SamplePoint, batch, roundoff_floor

__all__ = [
    "SynthSpec",
    "generate",
    "rng_for",
    "spawn_seeds",
    "two_break_spec",
    "TWO_BREAK_CONFIG",
    "reference_series",
    "random_piecewise_spec",
    "direct_ols",
    "oracle_greedy",
    "optimal_segments",
    "DATASETS",
    "dataset_path",
    "load_dataset",
]


def rng_for(seed) -> np.random.Generator:
    """PCG64 generator from an integer or a :class:`~numpy.random.SeedSequence`."""
    if not isinstance(seed, np.random.SeedSequence):
        seed = np.random.SeedSequence(seed)
    return np.random.Generator(np.random.PCG64(seed))


def spawn_seeds(seed, n) -> list[np.random.SeedSequence]:
    """``n`` independent child seeds of ``seed``."""
    return np.random.SeedSequence(seed).spawn(n)


@dataclass(frozen=True)
class SynthSpec:
    """Piecewise-linear series with Gaussian noise.

    Piece ``j`` covers ``breakpoints[j-1] < t <= breakpoints[j]`` and follows
    ``intercepts[j] + slopes[j] * t`` in the global time index.
    """

    length: int
    breakpoints: tuple = ()
    slopes: tuple = (0.0,)
    intercepts: tuple = (0.0,)
    noise_sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        bps = tuple(int(b) for b in self.breakpoints)
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "slopes", tuple(float(s) for s in self.slopes))
        object.__setattr__(self, "intercepts", tuple(float(s) for s in self.intercepts))
        if self.length < 1:
            raise ConfigError(f"length must be >= 1, got {self.length}")
        if any(b2 <= b1 for b1, b2 in zip(bps, bps[1:])):
            raise ConfigError("breakpoints must be strictly increasing")
        if bps and (bps[0] < 1 or bps[-1] >= self.length):
            raise ConfigError("breakpoints must lie in 1..length-1")
        pieces = len(bps) + 1
        if len(self.slopes) != pieces or len(self.intercepts) != pieces:
            raise ConfigError(f"need {pieces} slopes and intercepts")
        if not self.noise_sigma >= 0.0:
            raise ConfigError("noise_sigma must be >= 0")

    def truth(self) -> np.ndarray:
        t = np.arange(1, self.length + 1, dtype=float)
        piece = np.searchsorted(np.asarray(self.breakpoints), t, side="left")
        return np.asarray(self.intercepts)[piece] + np.asarray(self.slopes)[piece] * t


def generate(spec: SynthSpec) -> list[SamplePoint]:
    y = spec.truth()
    if spec.noise_sigma > 0.0:
        y = y + spec.noise_sigma * rng_for(spec.seed).standard_normal(spec.length)
    return [SamplePoint(t, float(v)) for t, v in enumerate(y, start=1)]


def two_break_spec() -> SynthSpec:
    """Small demonstration series with true breaks after t=9 and t=25."""
    return SynthSpec(
        length=40,
        breakpoints=(9, 25),
        slopes=(0.6, -0.1, 0.35),
        intercepts=(0.0, 6.3, -4.95),
        noise_sigma=0.3,
        seed=TWO_BREAK_SEED,
    )


# first seed in 0..399 for which TWO_BREAK_CONFIG fails to reject with the buffer
# ending at t=26, rejects at t=27 and yields breakpoints {9, 22}
TWO_BREAK_SEED = 49
TWO_BREAK_CONFIG = PartitionerConfig(buffer_size_b=5, alpha=0.01, delta2=0.0)


def random_piecewise_spec(rng: np.random.Generator, length: int) -> SynthSpec:
    """Random mixture of flat and sloped pieces, with or without noise."""
    n_breaks = int(rng.integers(0, max(1, length // 40) + 1))
    bps = np.sort(rng.choice(np.arange(1, length), size=min(n_breaks, length - 1), replace=False))
    pieces = len(bps) + 1
    slopes = rng.choice([0.0, 1.0], size=pieces) * rng.normal(0.0, 0.5, size=pieces)
    levels = rng.normal(0.0, 5.0, size=pieces)
    # intercepts in the global time axis, so the level holds at each piece start
    starts = np.concatenate([[1], bps + 1])
    intercepts = levels - slopes * starts
    sigma = float(rng.choice([0.0, 1e-3, 0.1, 1.0]))
    return SynthSpec(length, tuple(bps), tuple(slopes), tuple(intercepts), sigma, int(rng.integers(2**32)))


def reference_series(seed: int = 20151208, length: int = 2000) -> np.ndarray:
    """A smooth, strongly autocorrelated series shaped like a log-pressure trace.

    A quiet start with a subtle slope change rises sharply into an active
    stretch, which later collapses to exactly zero.
    """
    rng = rng_for(seed)
    t = np.arange(1, length + 1, dtype=float)
    s = t / length
    base = 1.0 + 0.02 * s + 0.06 * np.clip(s - 0.12, 0.0, None)
    rise = 5.0 / (1.0 + np.exp(-(s - 0.39) / 0.006))
    plateau = 1.2 * np.clip((s - 0.52) / 0.04, 0.0, 1.0) - 2.0 * np.exp(-(((s - 0.625) / 0.02) ** 2))
    wiggle = 0.8 * np.sin(2 * np.pi * (s - 0.40) / 0.11) * ((s > 0.40) & (s < 0.62))
    y = base + rise + plateau + wiggle
    # AR(1) perturbation, scaled up with the activity of the signal
    ar = np.empty(length)
    acc = 0.0
    for i, e in enumerate(rng.standard_normal(length)):
        acc = 0.995 * acc + e
        ar[i] = acc
    y = y + 2e-4 * ar * (1.0 + 40.0 * ((s > 0.38) & (s < 0.8)))
    # steep collapse over a few dozen steps, then exactly zero
    y = y * np.clip((0.86 - s) / 0.012, 0.0, 1.0) ** 2
    return y


# --- bundled datasets ----------------------------------------------------------

# file name -> generator; the committed CSVs are these outputs written with repr
DATASETS = {
    "two_break_demo.csv": lambda: generate(two_break_spec()),
    "reference_series.csv": lambda: [SamplePoint(t, float(v)) for t, v in enumerate(reference_series(), start=1)],
}


def dataset_path(name):
    if name not in DATASETS:
        raise ConfigError(f"unknown dataset {name!r}; choose from {sorted(DATASETS)}")
    return resources.files("insitu_partition") / "data" / name


def load_dataset(name) -> list[SamplePoint]:
    from .formats import read_series_csv

    with resources.as_file(dataset_path(name)) as path:
        return read_series_csv(path)


# --- full-data oracle ---------------------------------------------------------


def direct_ols(t: np.ndarray, y: np.ndarray) -> tuple[float, LineFit]:
    """Least squares on raw points via centred normal equations."""
    tc = t - t.mean()
    ym = y.mean()
    slope = float(np.dot(tc, y - ym) / np.dot(tc, tc))
    resid = y - ym - slope * tc
    return float(np.dot(resid, resid)), LineFit(float(ym - slope * t.mean()), slope)


@dataclass
class _OracleTest:
    t: int
    candidate: int
    p_value: float
    reject: bool


def _oracle_decide(t, y, cs, ce, be, cfg):
    def line_rss(lo, hi):
        # measured from the first value, as the accumulators do; RSS is
        # unchanged by the shift and a constant stretch gives exactly 0
        dev = y[lo:hi] - y[lo]
        value, _ = direct_ols(t[lo:hi], dev)
        return 0.0 if value <= roundoff_floor(float(np.dot(dev, dev))) else value

    n = be - cs
    rss1 = line_rss(cs, be)
    rss2 = line_rss(cs, ce) + line_rss(ce, be)
    error_ss = rss2 + cfg.delta2 * n
    if error_ss <= 0.0:
        p = 0.0 if rss1 > 0.0 else 1.0
    else:
        f = max(rss1 - rss2, 0.0) / 2.0 / (error_ss / (n - 4))
        p = float(sps.f.sf(f, 2, n - 4))
    return p


def _oracle_segment(index, t, y, lo, hi):
    stats = batch(zip(t[lo:hi].tolist(), y[lo:hi].tolist()))
    if hi - lo >= 2:
        value, fit = direct_ols(t[lo:hi], y[lo:hi])
    else:
        value, fit = 0.0, LineFit(float(y[lo]), 0.0)
    return Segment(index, int(t[lo]), int(t[hi - 1]), stats, value, fit)


def oracle_greedy(cfg: PartitionerConfig, points, trace: list | None = None) -> list[Segment]:
    """The greedy algorithm recomputed from raw data at every step.

    Keeps the whole series in memory and fits every line by direct least
    squares on the raw points.  Decisions must match the streaming
    partitioner; ``trace`` collects one record per test.
    """
    pts = list(points)
    if not pts:
        return []
    t = np.array([p[0] for p in pts], dtype=float)
    y = np.array([p[1] for p in pts], dtype=float)
    n = len(y)
    b = cfg.buffer_size_b
    if n < 2 * b:
        return [_oracle_segment(0, t, y, 0, n)]

    # half-open index ranges: curr = [cs, ce), buff = [ce, be)
    segments = []
    cs, ce, be = 0, b, 2 * b

    def test():
        p = _oracle_decide(t, y, cs, ce, be, cfg)
        reject = p < cfg.alpha
        if trace is not None:
            trace.append(_OracleTest(int(t[be - 1]), int(t[ce - 1]), p, reject))
        return reject

    for i in range(2 * b, n):
        if be - ce == b:
            if test():
                segments.append(_oracle_segment(len(segments), t, y, cs, ce))
                cs, ce = ce, be
            else:
                ce += 1
        be = i + 1

    if be - ce >= 3 and test():
        segments.append(_oracle_segment(len(segments), t, y, cs, ce))
        segments.append(_oracle_segment(len(segments), t, y, ce, be))
    else:
        segments.append(_oracle_segment(len(segments), t, y, cs, be))
    return segments


# --- offline optimum ------------------------------------------------------------


def _segment_costs(t, y, min_len):
    """cost[i, j] = OLS RSS of points i..j inclusive (inf if too short)."""
    n = len(y)
    cost = np.full((n, n), np.inf)
    for i in range(n):
        tt = t[i:] - t[i]
        yy = y[i:] - y[i]
        k = np.arange(1, n - i + 1, dtype=float)
        st, sy = np.cumsum(tt), np.cumsum(yy)
        stt, syy, sty = np.cumsum(tt * tt), np.cumsum(yy * yy), np.cumsum(tt * yy)
        ctt = stt - st * st / k
        cty = sty - st * sy / k
        cyy = syy - sy * sy / k
        with np.errstate(divide="ignore", invalid="ignore"):
            r = cyy - np.where(ctt > 0, cty * cty / ctt, 0.0)
        r = np.maximum(r, 0.0)
        r[: min_len - 1] = np.inf
        cost[i, i:] = r
    return cost


def optimal_segments(points, m: int, min_len: int = 2) -> list[Segment]:
    """Exactly ``m`` contiguous segments of minimum total RSS (dynamic programme).

    Segments hold at least ``min_len`` points.  Among equal totals the
    earliest breakpoints win.  Cost is O(T^2 m) time and O(T^2) memory,
    so keep T to a few thousand.
    """
    pts = list(points)
    n = len(pts)
    if m < 1 or m * min_len > n:
        raise ConfigError(f"cannot split {n} points into {m} segments of >= {min_len}")
    t = np.array([p[0] for p in pts], dtype=float)
    y = np.array([p[1] for p in pts], dtype=float)
    cost = _segment_costs(t, y, min_len)

    # best[k, j]: min RSS of points 0..j split into k+1 segments
    best = np.full((m, n), np.inf)
    back = np.zeros((m, n), dtype=int)
    best[0] = cost[0]
    for k in range(1, m):
        for j in range(n):
            # last segment starts at i+1, previous ones cover 0..i
            cand = best[k - 1, :j] + cost[1 : j + 1, j]
            if cand.size:
                i = int(np.argmin(cand))
                best[k, j] = cand[i]
                back[k, j] = i
    ends = [n - 1]
    for k in range(m - 1, 0, -1):
        ends.append(back[k, ends[-1]])
    ends.reverse()
    segments = []
    lo = 0
    for idx, end in enumerate(ends):
        segments.append(_oracle_segment(idx, t, y, lo, end + 1))
        lo = end + 1
    return segments
