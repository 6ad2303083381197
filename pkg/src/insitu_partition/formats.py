"""File formats read and written by the command-line tools.

Series input
    CSV with one ``t,y`` pair per line (an optional header line is skipped),
    or a raw stream of little-endian float64 values with ``t`` implicit
    (1..T).

Segment file
    CSV with the header ``series_id,segment_index,start_t,end_t,count,theta,
    big_theta,psi,big_psi,tau,rss,beta0,beta1``.  Floats are written with
    ``repr``, the shortest decimal that reads back to the same double, so a
    round trip is exact.  A JSON list of the same records is also supported.

Frame file
    ``b"ISP1"``, then ``nx``, ``ny``, ``T`` as little-endian uint32, then
    ``T`` frames of ``nx * ny`` little-endian float64 values in row-major
    order.
"""
from __future__ import annotations

import csv
import io
import json
import math
import struct
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Iterator

import numpy as np

from .errors import DataQualityError, FormatError
from .grid import GridFrame
from .partitioner import Segment
from .suffstats import LineFit, SamplePoint, SuffStats

__all__ = [
    "SegmentRecord",
    "read_series",
    "read_series_csv",
    "read_series_raw",
    "write_series_csv",
    "segment_to_record",
    "record_to_segment",
    "write_segments",
    "read_segments",
    "FRAME_MAGIC",
    "write_frames",
    "read_frames",
    "read_frame_header",
]


@dataclass(frozen=True)
class SegmentRecord:
    series_id: str
    segment_index: int
    start_t: int
    end_t: int
    count: int
    theta: float
    big_theta: float
    psi: float
    big_psi: float
    tau: float
    rss: float
    beta0: float
    beta1: float


RECORD_FIELDS = [f.name for f in fields(SegmentRecord)]
_INT_FIELDS = {"segment_index", "start_t", "end_t", "count"}


# --- series ---------------------------------------------------------------------


def _is_header(row):
    try:
        float(row[0])
        return False
    except ValueError:
        return True


def read_series_csv(path) -> list[SamplePoint]:
    """Read ``t,y`` rows.  Raises FormatError / DataQualityError with the line number."""
    points = []
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not c.strip() for c in row):
                continue
            if lineno == 1 and _is_header(row):
                continue
            if len(row) != 2:
                raise FormatError(f"{path}:{lineno}: expected 't,y', got {len(row)} fields")
            try:
                t_val = float(row[0])
                y = float(row[1])
            except ValueError:
                raise FormatError(f"{path}:{lineno}: cannot parse {row!r}") from None
            if not math.isfinite(t_val) or t_val != int(t_val):
                raise FormatError(f"{path}:{lineno}: time index {row[0]!r} is not an integer")
            t = int(t_val)
            if not math.isfinite(y):
                raise DataQualityError(t, y)
            points.append(SamplePoint(t, y))
    return points


def read_series_raw(path) -> list[SamplePoint]:
    data = Path(path).read_bytes()
    if len(data) % 8:
        raise FormatError(f"{path}: {len(data)} bytes is not a whole number of float64 values")
    values = np.frombuffer(data, dtype="<f8")
    bad = np.flatnonzero(~np.isfinite(values))
    if bad.size:
        raise DataQualityError(int(bad[0]) + 1, float(values[bad[0]]))
    return [SamplePoint(t, float(v)) for t, v in enumerate(values, start=1)]


def read_series(path, fmt="csv") -> list[SamplePoint]:
    if fmt == "csv":
        return read_series_csv(path)
    if fmt == "raw":
        return read_series_raw(path)
    raise FormatError(f"unknown series format {fmt!r}")


def write_series_csv(path_or_file, points, header=True) -> None:
    own = not hasattr(path_or_file, "write")
    fh = open(path_or_file, "w", newline="") if own else path_or_file
    try:
        if header:
            fh.write("t,y\n")
        for t, y in points:
            fh.write(f"{int(t)},{float(y)!r}\n")
    finally:
        if own:
            fh.close()


# --- segments -------------------------------------------------------------------


def segment_to_record(seg: Segment, series_id="0") -> SegmentRecord:
    s = seg.stats
    return SegmentRecord(
        str(series_id),
        seg.index,
        seg.start_t,
        seg.end_t,
        s.count,
        float(s.theta),
        float(s.big_theta),
        float(s.psi),
        float(s.big_psi),
        float(s.tau),
        float(seg.rss),
        float(seg.fit.beta0),
        float(seg.fit.beta1),
    )


def record_to_segment(rec: SegmentRecord) -> Segment:
    stats = SuffStats.from_totals(rec.theta, rec.big_theta, rec.psi, rec.big_psi, rec.tau, rec.count)
    return Segment(rec.segment_index, rec.start_t, rec.end_t, stats, rec.rss, LineFit(rec.beta0, rec.beta1))


def _format_value(v):
    return repr(v) if isinstance(v, float) else str(v)


def write_segments(path_or_file, segments, series_id="0", fmt="csv") -> None:
    """Write segments (or SegmentRecords) as CSV or JSON."""
    records = [s if isinstance(s, SegmentRecord) else segment_to_record(s, series_id) for s in segments]
    own = not hasattr(path_or_file, "write")
    fh = open(path_or_file, "w", newline="") if own else path_or_file
    try:
        if fmt == "json":
            json.dump([asdict(r) for r in records], fh, indent=1)
            fh.write("\n")
        elif fmt == "csv":
            fh.write(",".join(RECORD_FIELDS) + "\n")
            for r in records:
                fh.write(",".join(_format_value(getattr(r, k)) for k in RECORD_FIELDS) + "\n")
        else:
            raise FormatError(f"unknown segment format {fmt!r}")
    finally:
        if own:
            fh.close()


def _coerce(rec: dict, where) -> SegmentRecord:
    try:
        values = {
            k: (str(rec[k]) if k == "series_id" else int(rec[k]) if k in _INT_FIELDS else float(rec[k]))
            for k in RECORD_FIELDS
        }
    except (KeyError, ValueError, TypeError) as exc:
        raise FormatError(f"{where}: bad segment record ({exc})") from None
    return SegmentRecord(**values)


def read_segments(path) -> list[SegmentRecord]:
    text = Path(path).read_text()
    if text.lstrip().startswith("["):
        try:
            rows = json.loads(text)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}: {exc}") from None
        return [_coerce(r, f"{path}[{i}]") for i, r in enumerate(rows)]
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames != RECORD_FIELDS:
        raise FormatError(f"{path}: header must be {','.join(RECORD_FIELDS)}")
    return [_coerce(r, f"{path}:{i}") for i, r in enumerate(reader, start=2)]


# --- frames ---------------------------------------------------------------------

FRAME_MAGIC = b"ISP1"
_HEADER = struct.Struct("<4sIII")


def write_frames(path, frames, nx, ny) -> None:
    frames = [np.asarray(f, dtype="<f8").ravel() for f in frames]
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(FRAME_MAGIC, nx, ny, len(frames)))
        for f in frames:
            if f.size != nx * ny:
                raise FormatError(f"frame has {f.size} values, expected {nx * ny}")
            fh.write(f.tobytes())


def read_frame_header(fh) -> tuple[int, int, int]:
    head = fh.read(_HEADER.size)
    if len(head) != _HEADER.size:
        raise FormatError("frame file is shorter than its header")
    magic, nx, ny, count = _HEADER.unpack(head)
    if magic != FRAME_MAGIC:
        raise FormatError(f"bad magic {magic!r}, expected {FRAME_MAGIC!r}")
    return nx, ny, count


def read_frames(path) -> tuple[tuple[int, int, int], Iterator[GridFrame]]:
    """Header ``(nx, ny, T)`` plus a lazy iterator over the frames."""
    with open(path, "rb") as fh:
        header = read_frame_header(fh)

    def frames():
        nx, ny, count = header
        size = nx * ny * 8
        with open(path, "rb") as fh:
            fh.seek(_HEADER.size)
            for t in range(1, count + 1):
                chunk = fh.read(size)
                if len(chunk) != size:
                    raise FormatError(f"{path}: frame {t} truncated ({len(chunk)} of {size} bytes)")
                yield GridFrame(t, np.frombuffer(chunk, dtype="<f8"))
            if fh.read(1):
                raise FormatError(f"{path}: trailing bytes after {count} frames")

    return header, frames()
