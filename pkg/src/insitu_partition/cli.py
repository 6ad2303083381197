"""Command-line front end.

    insitu-partition partition   --input series.csv --b 5 --alpha 1e-3 --delta2 1e-3 --output seg.csv
    insitu-partition sweep       --input series.csv --alphas 1e-2,1e-6 --delta2s 0,1e-3
    insitu-partition grid        --input frames.isp --grid 100,100,50,50 --output outdir
    insitu-partition reconstruct --segments seg.csv --input series.csv --baseline-k 25
    insitu-partition synth       --length 40 --breakpoints 9,25 --slopes ... --output series.csv

Data go to files or standard output, diagnostics to standard error.  Exit
status is 0 on success, 1 for bad data and 2 for bad usage.
"""
from __future__ import annotations

import argparse
import logging
import math
import sys
from pathlib import Path

from . import formats
from .errors import ConfigError, PartitionError
from .grid import GridSpec, run_grid
from .partitioner import PartitionerConfig, breakpoints, run_series
from .reconstructor import audit, compare, evaluate_all, evenly_spaced_baseline, from_segments
from .refkit import SynthSpec, generate
from .sweep import run_sweep, write_sweep_csv

log = logging.getLogger("insitu_partition")

AUDIT_RTOL = 1e-6


def _floats(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _ints(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _tuning(p, with_alpha=True):
    p.add_argument("--b", type=int, default=5, help="buffer size B (>= 3)")
    if with_alpha:
        p.add_argument("--alpha", type=float, default=0.001)
        p.add_argument("--delta2", type=float, default=0.001)
    p.add_argument("--stable", action="store_true", help="rotation-updated statistics")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="insitu-partition", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("partition", help="partition one series")
    p.add_argument("--input", required=True)
    p.add_argument("--format", choices=("csv", "raw"), default="csv")
    p.add_argument("--output", help="segment file to write")
    p.add_argument("--json", action="store_true", help="write segments as JSON")
    p.add_argument("--series-id", default="0")
    _tuning(p)

    p = sub.add_parser("sweep", help="partition count and RSS over an (alpha, delta2) grid")
    p.add_argument("--input", required=True)
    p.add_argument("--format", choices=("csv", "raw"), default="csv")
    p.add_argument("--alphas", type=_floats, required=True)
    p.add_argument("--delta2s", type=_floats, required=True)
    p.add_argument("--output", help="CSV table (default: standard output)")
    _tuning(p, with_alpha=False)

    p = sub.add_parser("grid", help="partition block means of a frame file")
    p.add_argument("--input", required=True)
    p.add_argument("--grid", type=_ints, required=True, metavar="NX,NY,BX,BY")
    p.add_argument("--output", required=True, help="directory for per-block files")
    _tuning(p)

    p = sub.add_parser("reconstruct", help="rebuild and audit a saved partition")
    p.add_argument("--segments", required=True)
    p.add_argument("--input", help="raw series for the audit and baseline")
    p.add_argument("--format", choices=("csv", "raw"), default="csv")
    p.add_argument("--baseline-k", type=int)
    p.add_argument("--output", help="CSV of reconstructed values t,y_hat")

    p = sub.add_parser("synth", help="write a synthetic piecewise-linear series")
    p.add_argument("--length", type=int, required=True)
    p.add_argument("--breakpoints", type=_ints, default=[])
    p.add_argument("--slopes", type=_floats, default=[0.0])
    p.add_argument("--intercepts", type=_floats, default=[0.0])
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", help="CSV file (default: standard output)")
    return parser


def _config(parser, args):
    try:
        return PartitionerConfig(args.b, args.alpha, args.delta2, args.stable)
    except ConfigError as exc:
        parser.error(str(exc))


def _check_tiles(points):
    for expected, (t, _) in enumerate(points, start=1):
        if t != expected:
            raise PartitionError(f"time steps must run 1, 2, ...; found t={t} where {expected} was expected")


def _write_breakpoints(out, bps):
    out.write(" ".join(["breakpoints"] + [str(b) for b in bps]) + "\n")


def cmd_partition(parser, args, out):
    cfg = _config(parser, args)
    points = formats.read_series(args.input, args.format)
    _check_tiles(points)
    segments = run_series(cfg, points)
    if args.output:
        formats.write_segments(args.output, segments, args.series_id, "json" if args.json else "csv")
    total = math.fsum(s.rss for s in segments)
    out.write(f"n_partitions {len(segments)}\n")
    out.write(f"rss_total {total!r}\n")
    _write_breakpoints(out, breakpoints(segments))
    return 0


def cmd_sweep(parser, args, out):
    for a in args.alphas:
        if not 0.0 < a < 1.0:
            parser.error(f"alpha must lie in (0, 1), got {a}")
    try:
        PartitionerConfig(args.b, 0.5, 0.0)
    except ConfigError as exc:
        parser.error(str(exc))
    if any(not d >= 0.0 for d in args.delta2s):
        parser.error("delta2 values must be >= 0")
    points = formats.read_series(args.input, args.format)
    _check_tiles(points)
    cells = run_sweep(points, args.alphas, args.delta2s, args.b)
    if args.output:
        with open(args.output, "w") as fh:
            write_sweep_csv(fh, cells)
    else:
        write_sweep_csv(out, cells)
    return 0


def cmd_grid(parser, args, out):
    cfg = _config(parser, args)
    if len(args.grid) != 4:
        parser.error("--grid takes nx,ny,bx,by")
    try:
        spec = GridSpec(*args.grid)
    except ConfigError as exc:
        parser.error(str(exc))
    (nx, ny, count), frames = formats.read_frames(args.input)
    if (nx, ny) != (spec.nx, spec.ny):
        raise formats.FormatError(f"frame file is {nx}x{ny}, --grid says {spec.nx}x{spec.ny}")
    result = run_grid(cfg, spec, frames)
    outdir = Path(args.output)
    outdir.mkdir(parents=True, exist_ok=True)
    for k, segments in enumerate(result.segments):
        row, col = spec.block_position(k)
        formats.write_segments(outdir / f"block_r{row}_c{col}.csv", segments, f"r{row}c{col}")
    lines = ["row,col,n_partitions,rss_total"]
    lines += [f"{s.row},{s.col},{s.n_partitions},{s.rss_total!r}" for s in result.summary]
    (outdir / "summary.csv").write_text("\n".join(lines) + "\n")
    out.write("\n".join(lines) + "\n")
    log.info("%d frames, %d blocks", count, spec.blocks)
    return 0


def cmd_reconstruct(parser, args, out):
    records = formats.read_segments(args.segments)
    recon = from_segments([formats.record_to_segment(r) for r in records])
    out.write(f"n_partitions {recon.n_partitions}\n")
    out.write(f"rss_total {recon.rss_total!r}\n")
    _write_breakpoints(out, recon.breakpoints)
    status = 0
    if args.input:
        points = formats.read_series(args.input, args.format)
        _check_tiles(points)
        y = [p.y for p in points]
        rows = audit(recon, y)
        worst = max(
            (abs(a - s) / max(abs(a), abs(s), sys.float_info.min) if a != s else 0.0 for _, s, a in rows),
            default=0.0,
        )
        ok = worst <= AUDIT_RTOL
        out.write(f"audit {'ok' if ok else 'MISMATCH'} max_rel_diff {worst!r}\n")
        if not ok:
            status = 1
        if args.baseline_k:
            try:
                base = evenly_spaced_baseline(y, args.baseline_k)
            except ConfigError as exc:
                parser.error(str(exc))
            report = compare(recon, base)
            out.write(f"baseline_k {args.baseline_k}\n")
            out.write(f"baseline_rss_total {base.rss_total!r}\n")
            for line in report.lines(top=3):
                out.write(line + "\n")
    elif args.baseline_k:
        log.warning("no raw series given; baseline skipped")
    if args.output:
        values = evaluate_all(recon)
        with open(args.output, "w") as fh:
            fh.write("t,y_hat\n")
            for t, v in enumerate(values.tolist(), start=1):
                fh.write(f"{t},{v!r}\n")
    return status


def cmd_synth(parser, args, out):
    if args.length < 1:
        parser.error("--length must be >= 1")
    try:
        spec = SynthSpec(args.length, tuple(args.breakpoints), tuple(args.slopes),
                         tuple(args.intercepts), args.noise, args.seed)
    except ConfigError as exc:
        parser.error(str(exc))
    points = generate(spec)
    if args.output:
        formats.write_series_csv(args.output, points)
    else:
        formats.write_series_csv(out, points)
    return 0


COMMANDS = {
    "partition": cmd_partition,
    "sweep": cmd_sweep,
    "grid": cmd_grid,
    "reconstruct": cmd_reconstruct,
    "synth": cmd_synth,
}


def main(argv=None, out=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    out = sys.stdout if out is None else out
    try:
        return COMMANDS[args.command](parser, args, out)
    except (PartitionError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
