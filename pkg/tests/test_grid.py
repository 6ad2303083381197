import math

import numpy as np
import pytest

from insitu_partition import ConfigError, DataQualityError, FormatError, PartitionerConfig, run_series
from insitu_partition.grid import GridFrame, GridSpec, block_means, run_grid

CFG = PartitionerConfig(5, 0.001, 0.001)


def test_gridspec():
    spec = GridSpec(5, 4, 2, 2)
    assert (spec.blocks_x, spec.blocks_y, spec.blocks) == (3, 2, 6)
    assert spec.block_position(4) == (1, 1)
    with pytest.raises(ConfigError):
        GridSpec(4, 4, 0, 2)


def test_block_means_fixture():
    means = block_means(GridFrame(1, np.arange(16.0)), GridSpec(4, 4, 2, 2))
    assert means.tolist() == [2.5, 4.5, 10.5, 12.5]


def test_constant_field():
    means = block_means(np.full(35, 2.25), GridSpec(7, 5, 3, 2))
    assert np.all(means == 2.25)


def test_partial_edge_blocks():
    spec = GridSpec(5, 4, 2, 2)
    field = np.arange(20.0).reshape(4, 5)
    means = block_means(field.ravel(), spec)
    assert len(means) == 6
    # right-hand column of blocks holds x = 4 only: two cells each
    assert means[2] == pytest.approx((field[0, 4] + field[1, 4]) / 2)
    assert means[5] == pytest.approx((field[2, 4] + field[3, 4]) / 2)


def test_block_means_linear_and_permutation_invariant():
    rng = np.random.default_rng(3)
    spec = GridSpec(6, 6, 3, 3)
    a, b = rng.normal(size=36), rng.normal(size=36)
    assert np.allclose(block_means(2 * a - b, spec), 2 * block_means(a, spec) - block_means(b, spec), atol=1e-14)
    f = a.reshape(6, 6).copy()
    f[:3, :3] = f[:3, :3].ravel()[::-1].reshape(3, 3)
    assert block_means(f.ravel(), spec)[0] == pytest.approx(block_means(a, spec)[0], abs=1e-15)


def test_dimension_mismatch():
    with pytest.raises(FormatError):
        block_means(np.zeros(15), GridSpec(4, 4, 2, 2))


def _frames(n_t, spec, active=None, seed=0):
    rng = np.random.default_rng(seed)
    for t in range(1, n_t + 1):
        field = np.full((spec.ny, spec.nx), 1.0)
        if active is not None:
            r, c = active
            step = 0.0 if t <= n_t // 2 else 3.0
            field[r * spec.by : (r + 1) * spec.by, c * spec.bx : (c + 1) * spec.bx] += step + 0.01 * rng.normal()
        yield GridFrame(t, field.ravel())


def test_constant_frames_one_partition_each():
    spec = GridSpec(8, 6, 4, 3)
    result = run_grid(CFG, spec, _frames(300, spec))
    assert len(result.summary) == 4
    assert all(s.n_partitions == 1 for s in result.summary)
    assert all(s.rss_total <= 1e-12 for s in result.summary)


def test_one_active_block_isolated():
    spec = GridSpec(8, 6, 4, 3)
    result = run_grid(CFG, spec, _frames(300, spec, active=(1, 0)))
    counts = {(s.row, s.col): s.n_partitions for s in result.summary}
    assert counts[(1, 0)] > 1
    assert all(v == 1 for k, v in counts.items() if k != (1, 0))


def test_decomposition_bit_identical():
    spec = GridSpec(10, 7, 4, 3)
    rng = np.random.default_rng(5)
    frames = []
    for t in range(1, 401):
        base = np.sin(t / 40.0 + np.arange(70) / 9.0) + (t > 200) * np.linspace(0, 2, 70)
        frames.append(GridFrame(t, base + 0.05 * rng.normal(size=70)))
    result = run_grid(CFG, spec, frames)
    means = np.array([block_means(f, spec) for f in frames])
    for k in range(spec.blocks):
        expected = run_series(CFG, [(t, float(v)) for t, v in enumerate(means[:, k], start=1)])
        assert result.segments[k] == expected
        assert result.summary[k].rss_total == math.fsum(s.rss for s in expected)


def test_nonfinite_names_block():
    spec = GridSpec(4, 4, 2, 2)
    frames = list(_frames(20, spec))
    bad = frames[12].values.copy()
    bad[15] = np.nan
    frames[12] = GridFrame(13, bad)
    with pytest.raises(DataQualityError, match=r"t=13.*row 1, col 1"):
        run_grid(CFG, spec, frames)
