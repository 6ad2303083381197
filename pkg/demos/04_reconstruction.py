"""Rebuild a series from its saved segments and compare with the usual practice.

Saving every k-th step and interpolating costs the same number of stored
records as k partitions.  Here both are measured by total RSS against the
original reference series, alongside the best possible k-segment fit
found offline by dynamic programming.
"""
import math

import numpy as np

from insitu_partition import PartitionerConfig, run_series
from insitu_partition.reconstructor import audit, compare, evaluate_all, evenly_spaced_baseline, from_segments
from insitu_partition.refkit import load_dataset, optimal_segments

points = load_dataset("reference_series.csv")
y = np.array([p.y for p in points])

segments = run_series(PartitionerConfig(5, alpha=1e-3, delta2=1e-3), points)
recon = from_segments(segments)
k = recon.n_partitions
baseline = evenly_spaced_baseline(y, k)
best = math.fsum(s.rss for s in optimal_segments(points, k))

# the stored RSS values agree with the ones recomputed from the raw data
worst = max(abs(a - s) / max(a, s) for _, s, a in audit(recon, y) if a != s)
print(f"audit: stored vs recomputed RSS agree to {worst:.1e}\n")

print(f"k = {k} partitions")
print(f"  online partitioner   rss_total = {recon.rss_total:10.4f}")
print(f"  evenly spaced k      rss_total = {baseline.rss_total:10.4f}  ({baseline.rss_total / recon.rss_total:.0f}x worse)")
print(f"  offline optimum      rss_total = {best:10.4f}")

err = np.abs(evaluate_all(recon) - y)
print(f"\nlargest pointwise error {err.max():.4f} at t={int(err.argmax()) + 1}")
print("\nworst segments of each (a = partitioner, b = evenly spaced):")
for line in compare(recon, baseline).lines(top=3):
    print("  " + line)
