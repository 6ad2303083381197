"""How alpha and delta2 trade partitions against fidelity.

The reference series opens with a long, nearly flat stretch and ends in a
tail that is exactly zero, with all the activity in between.  With delta2 = 0 the F-test keeps finding
"significant" wiggles in the quiet stretch; inflating the error term by
delta2 * n makes those tiny improvements irrelevant.
"""
from insitu_partition import PartitionerConfig, breakpoints, run_series
from insitu_partition.refkit import load_dataset
from insitu_partition.sweep import run_sweep

points = load_dataset("reference_series.csv")
alphas = [1e-2, 1e-6, 1e-10]
delta2s = [0.0, 1e-7, 1e-3]

print(f"{'alpha':>8} {'delta2':>8} {'partitions':>11} {'rss_total':>12}")
for cell in run_sweep(points, alphas, delta2s, buffer_size_b=5):
    print(f"{cell.alpha:8.0e} {cell.delta2:8.0e} {cell.n_partitions:11d} {cell.rss_total:12.5g}")

quiet = range(1, 701)
print("\nBreakpoints inside the quiet opening (t <= 700):")
for alpha in alphas:
    counts = []
    for delta2 in delta2s:
        bps = breakpoints(run_series(PartitionerConfig(5, alpha, delta2), points))
        counts.append(sum(b in quiet for b in bps))
    print(f"  alpha={alpha:.0e}: " + ", ".join(f"delta2={d:.0e} -> {c}" for d, c in zip(delta2s, counts)))
