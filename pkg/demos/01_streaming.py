"""Watch the partitioner work on a short series, one value at a time.

The bundled 40-step series has true slope changes after t=9 and t=25.
Values are pushed as a simulation would produce them; a segment is reported
the moment a test rejects the single-line hypothesis.
"""
from insitu_partition import Partitioner, PartitionerConfig
from insitu_partition.refkit import load_dataset

points = load_dataset("two_break_demo.csv")
cfg = PartitionerConfig(buffer_size_b=5, alpha=0.01, delta2=0.0)
part = Partitioner(cfg, trace=True)

print(f"B={cfg.buffer_size_b}, alpha={cfg.alpha}, delta2={cfg.delta2}\n")
for t, y in points:
    seg = part.push(y)
    if seg is not None:
        print(f"t={t:2d}  closed segment {seg.index}: t={seg.start_t}..{seg.end_t}, "
              f"y ~ {seg.fit.beta0:+.3f} {seg.fit.beta1:+.3f} t, rss={seg.rss:.4f}")
for seg in part.close():
    print(f"end   closed segment {seg.index}: t={seg.start_t}..{seg.end_t}, "
          f"y ~ {seg.fit.beta0:+.3f} {seg.fit.beta1:+.3f} t, rss={seg.rss:.4f}")

# Each test compares one line over curr+buff with separate lines for curr
# and buff.  The second true break is at 25, but the buffer has to hold
# enough of the new slope before the test notices.
print("\nLast tests before the second breakpoint:")
for rec in part.trace:
    if 22 <= rec.t <= 27:
        r = rec.result
        print(f"  buffer ends t={rec.t}  candidate break {rec.candidate}  "
              f"F={r.f_stat:8.3f}  p={r.p_value:.4g}  {'REJECT' if r.reject else 'keep'}")
