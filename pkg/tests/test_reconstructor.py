import numpy as np
import pytest

from insitu_partition import ConfigError, IntegrityError, PartitionerConfig, run_series
from insitu_partition.formats import read_segments, record_to_segment, write_segments
from insitu_partition.reconstructor import (
    audit,
    compare,
    evaluate,
    evaluate_all,
    evenly_spaced_baseline,
    evenly_spaced_indices,
    from_segments,
)
from insitu_partition.refkit import TWO_BREAK_CONFIG, generate, random_piecewise_spec, rng_for


def test_evaluate_exact_line():
    segs = run_series(PartitionerConfig(5), [(t, 2.0 * t + 1.0) for t in range(1, 31)])
    recon = from_segments(segs)
    assert evaluate(recon, 10) == pytest.approx(21.0, rel=1e-13)
    with pytest.raises(IndexError):
        evaluate(recon, 0)
    with pytest.raises(IndexError):
        evaluate(recon, 31)


def test_evaluate_uses_each_segment_line(two_break_points):
    recon = from_segments(run_series(TWO_BREAK_CONFIG, two_break_points))
    values = evaluate_all(recon)
    for seg in recon.segments:
        for t in (seg.start_t, seg.end_t):
            assert evaluate(recon, t) == seg.fit.beta0 + seg.fit.beta1 * t == values[t - 1]
    # no continuity constraint across the breakpoint
    assert evaluate(recon, 9) != pytest.approx(recon.segments[1].fit(9))


def test_audit_matches_stored_rss():
    for seed in range(20):
        pts = generate(random_piecewise_spec(rng_for(seed), 700))
        recon = from_segments(run_series(PartitionerConfig(5, 1e-3, 1e-3), pts))
        for _, stored, audited in audit(recon, [y for _, y in pts]):
            assert stored == pytest.approx(audited, rel=1e-6, abs=1e-9 * max(1.0, abs(audited)))


def test_rss_total_additive():
    pts = generate(random_piecewise_spec(rng_for(4), 2000))
    recon = from_segments(run_series(PartitionerConfig(5, 1e-2, 0.0), pts))
    assert recon.rss_total == pytest.approx(sum(s.rss for s in recon.segments), rel=1e-12)
    assert recon.n_partitions == len(recon.segments)


def test_tiling_enforced(two_break_points):
    segs = run_series(TWO_BREAK_CONFIG, two_break_points)
    with pytest.raises(IntegrityError):
        from_segments(segs[1:])
    with pytest.raises(IntegrityError):
        from_segments([segs[0], segs[2]])
    with pytest.raises(IntegrityError):
        from_segments([])


def test_round_trip_bit_identical(two_break_points, tmp_path):
    segs = run_series(TWO_BREAK_CONFIG, two_break_points)
    for fmt in ("csv", "json"):
        path = tmp_path / f"segments.{fmt}"
        write_segments(path, segs, "demo", fmt)
        back = from_segments([record_to_segment(r) for r in read_segments(path)])
        assert np.array_equal(evaluate_all(back), evaluate_all(from_segments(segs)))
        # the file carries the global sums, not the accumulator's origin
        key = lambda s: (s.index, s.start_t, s.end_t, s.rss, s.fit, s.stats.totals())
        assert [key(s) for s in back.segments] == [key(s) for s in segs]


def test_evenly_spaced_indices():
    assert evenly_spaced_indices(5, 2) == [1, 5]
    assert evenly_spaced_indices(10, 10) == list(range(1, 11))
    assert evenly_spaced_indices(2000, 25)[:3] == [1, 84, 168]
    idx = evenly_spaced_indices(2000, 25)
    assert idx[-1] == 2000 and len(set(idx)) == 25
    with pytest.raises(ConfigError):
        evenly_spaced_indices(5, 6)
    with pytest.raises(ConfigError):
        evenly_spaced_indices(5, 1)


def test_baseline_examples():
    assert evenly_spaced_baseline([0, 0, 4, 0, 0], 2).rss_total == 16.0
    recon = evenly_spaced_baseline([3.0 - 0.5 * t for t in range(1, 101)], 7)
    assert recon.rss_total == pytest.approx(0.0, abs=1e-20)
    assert recon.n_partitions == 7 and recon.length == 100
    with pytest.raises(ConfigError):
        evenly_spaced_baseline([1.0, 2.0], 3)


def test_baseline_interpolates_through_saved_steps():
    rng = np.random.default_rng(0)
    y = rng.normal(0, 1, 97)
    recon = evenly_spaced_baseline(y, 9)
    values = evaluate_all(recon)
    for i in evenly_spaced_indices(97, 9):
        assert values[i - 1] == pytest.approx(y[i - 1], abs=1e-12)


def test_reference_dataset_k25(reference_points):
    # this tuning yields exactly 25 partitions on the committed dataset
    recon = from_segments(run_series(PartitionerConfig(5, 1e-3, 5e-4), reference_points))
    assert recon.n_partitions == 25
    base = evenly_spaced_baseline([y for _, y in reference_points], 25)
    assert base.rss_total > recon.rss_total


def test_compare_report(reference_points):
    recon = from_segments(run_series(PartitionerConfig(5, 1e-3, 1e-3), reference_points))
    same = compare(recon, recon)
    assert same.delta_partitions == 0 and same.delta_rss == 0.0
    fewer = from_segments(run_series(PartitionerConfig(5, 1e-7, 1e-1), reference_points))
    report = compare(recon, fewer)
    assert report.n_partitions[1] < report.n_partitions[0]
    assert report.rss_total[1] > report.rss_total[0]
    for worst in (report.worst_a, report.worst_b):
        values = [r for _, _, r in worst]
        assert values == sorted(values, reverse=True)
    assert report.lines()[0].startswith("n_partitions")
    short = evenly_spaced_baseline([y for _, y in reference_points[:100]], 5)
    with pytest.raises(ConfigError):
        compare(recon, short)
