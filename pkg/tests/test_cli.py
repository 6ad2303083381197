import io
import subprocess
import sys

import numpy as np
import pytest

from insitu_partition.cli import main
from insitu_partition.formats import read_segments, write_frames, write_series_csv
from insitu_partition.refkit import dataset_path
from insitu_partition.sweep import read_sweep_csv


def run(argv):
    out = io.StringIO()
    code = main([str(a) for a in argv], out=out)
    return code, out.getvalue()


def summary(text):
    rows = {key: rest for key, *rest in (line.split() for line in text.splitlines())}
    return int(rows["n_partitions"][0]), float(rows["rss_total"][0]), [int(b) for b in rows["breakpoints"]]


@pytest.fixture
def two_break_csv():
    return dataset_path("two_break_demo.csv")


def test_partition_constant(tmp_path):
    path = tmp_path / "c.csv"
    write_series_csv(path, [(t, 1.5) for t in range(1, 101)])
    code, out = run(["partition", "--input", path, "--b", 5, "--output", tmp_path / "seg.csv"])
    assert code == 0
    assert summary(out) == (1, 0.0, [])
    assert len(read_segments(tmp_path / "seg.csv")) == 1


def test_partition_constant_inexact_values(tmp_path):
    # 0.1 is not a binary fraction, so the sums carry round-off
    path = tmp_path / "c.csv"
    write_series_csv(path, [(t, 0.1) for t in range(1, 101)])
    n, rss_total, _ = summary(run(["partition", "--input", path])[1])
    assert n == 1 and rss_total <= 1e-9 * 100 * 0.01


def test_partition_two_break(two_break_csv):
    code, out = run(["partition", "--input", two_break_csv, "--b", 5, "--alpha", 0.01, "--delta2", 0])
    assert code == 0 and summary(out)[2] == [9, 22]


def test_partition_raw_and_json(tmp_path):
    y = np.concatenate([np.zeros(40), np.arange(1.0, 41.0)])
    raw = tmp_path / "s.f64"
    raw.write_bytes(y.astype("<f8").tobytes())
    code, out = run(["partition", "--input", raw, "--format", "raw", "--delta2", 0, "--json",
                     "--output", tmp_path / "seg.json", "--series-id", "probe"])
    assert code == 0
    assert (tmp_path / "seg.json").read_text().lstrip().startswith("[")
    records = read_segments(tmp_path / "seg.json")
    assert records[0].series_id == "probe" and len(records) == summary(out)[0]


@pytest.mark.parametrize("argv", [["--b", 2], ["--alpha", 0], ["--alpha", 1.5], ["--delta2", -1]])
def test_usage_errors(two_break_csv, argv, capsys):
    with pytest.raises(SystemExit) as info:
        run(["partition", "--input", two_break_csv] + argv)
    assert info.value.code == 2


def test_malformed_input_exit_1(tmp_path, capsys):
    path = tmp_path / "bad.csv"
    path.write_text("t,y\n1,1\n2,oops\n")
    assert run(["partition", "--input", path])[0] == 1
    assert "bad.csv:3" in capsys.readouterr().err
    path.write_text("1,1\n2,2\n3,nan\n")
    assert run(["partition", "--input", path])[0] == 1
    assert "t=3" in capsys.readouterr().err
    path.write_text("1,1\n3,2\n")
    assert run(["partition", "--input", path])[0] == 1
    assert run(["partition", "--input", tmp_path / "missing.csv"])[0] == 1


def test_sweep_1x1_matches_partition(two_break_csv, tmp_path):
    _, out = run(["partition", "--input", two_break_csv, "--alpha", 0.01, "--delta2", 0.001])
    n, total, _ = summary(out)
    code, table = run(["sweep", "--input", two_break_csv, "--alphas", "0.01", "--delta2s", "0.001"])
    assert code == 0
    (cell,) = read_sweep_csv(io.StringIO(table))
    assert (cell.n_partitions, cell.rss_total) == (n, total)
    code, _ = run(["sweep", "--input", two_break_csv, "--alphas", "0.01,1e-6", "--delta2s", "0,1e-3",
                   "--output", tmp_path / "t.csv"])
    cells = read_sweep_csv(open(tmp_path / "t.csv"))
    assert [(c.alpha, c.delta2) for c in cells] == [(0.01, 0.0), (0.01, 1e-3), (1e-6, 0.0), (1e-6, 1e-3)]


def test_sweep_usage_errors(two_break_csv):
    for argv in (["--alphas", "2"], ["--alphas", "x"], ["--delta2s", "-1"], ["--b", "2"]):
        args = {"--alphas": "0.01", "--delta2s": "0"}
        extra = []
        for k, v in zip(argv[::2], argv[1::2]):
            if k in args:
                args[k] = v
            else:
                extra += [k, v]
        with pytest.raises(SystemExit) as info:
            run(["sweep", "--input", two_break_csv, *sum(args.items(), ()), *extra])
        assert info.value.code == 2


def _write_grid(path, n_t=200, active=None):
    frames = []
    for t in range(1, n_t + 1):
        f = np.full((6, 8), 2.0)
        if active is not None and t > n_t // 2:
            f[3:6, 0:4] += 5.0 + 0.01 * np.sin(t)
        frames.append(f)
    write_frames(path, frames, nx=8, ny=6)


def test_grid_constant(tmp_path):
    _write_grid(tmp_path / "f.isp")
    code, out = run(["grid", "--input", tmp_path / "f.isp", "--grid", "8,6,4,3", "--output", tmp_path / "o"])
    assert code == 0
    lines = (tmp_path / "o" / "summary.csv").read_text().splitlines()
    assert lines[0] == "row,col,n_partitions,rss_total"
    assert len(lines) - 1 == 4
    assert all(line.split(",")[2] == "1" for line in lines[1:])
    assert len(list((tmp_path / "o").glob("block_*.csv"))) == 4


def test_grid_partial_blocks_row_count(tmp_path):
    _write_grid(tmp_path / "f.isp", n_t=30)
    run(["grid", "--input", tmp_path / "f.isp", "--grid", "8,6,3,4", "--output", tmp_path / "o"])
    lines = (tmp_path / "o" / "summary.csv").read_text().splitlines()
    assert len(lines) - 1 == 3 * 2


def test_grid_isolates_active_block(tmp_path):
    _write_grid(tmp_path / "f.isp", active=True)
    run(["grid", "--input", tmp_path / "f.isp", "--grid", "8,6,4,3", "--output", tmp_path / "o"])
    rows = [line.split(",") for line in (tmp_path / "o" / "summary.csv").read_text().splitlines()[1:]]
    counts = {(int(r), int(c)): int(n) for r, c, n, _ in rows}
    assert counts[(1, 0)] > 1 and all(v == 1 for k, v in counts.items() if k != (1, 0))


def test_grid_dimension_mismatch(tmp_path, capsys):
    _write_grid(tmp_path / "f.isp", n_t=5)
    code, _ = run(["grid", "--input", tmp_path / "f.isp", "--grid", "6,8,3,4", "--output", tmp_path / "o"])
    assert code == 1 and "8x6" in capsys.readouterr().err
    with pytest.raises(SystemExit):
        run(["grid", "--input", tmp_path / "f.isp", "--grid", "8,6,4", "--output", tmp_path / "o"])


def test_reconstruct_round_trip(tmp_path):
    ref = dataset_path("reference_series.csv")
    run(["partition", "--input", ref, "--output", tmp_path / "seg.csv"])
    code, out = run(["reconstruct", "--segments", tmp_path / "seg.csv", "--input", ref, "--baseline-k", 21,
                     "--output", tmp_path / "values.csv"])
    assert code == 0
    assert "audit ok" in out and "baseline_rss_total" in out
    assert len((tmp_path / "values.csv").read_text().splitlines()) == 2001


def test_reconstruct_hand_baseline(tmp_path):
    path = tmp_path / "s.csv"
    write_series_csv(path, list(enumerate([0.0, 0.0, 4.0, 0.0, 0.0], start=1)))
    run(["partition", "--input", path, "--b", 3, "--output", tmp_path / "seg.csv"])
    code, out = run(["reconstruct", "--segments", tmp_path / "seg.csv", "--input", path, "--baseline-k", 2])
    assert code == 0 and "baseline_rss_total 16.0" in out


def test_reconstruct_without_raw_series(tmp_path):
    run(["partition", "--input", dataset_path("two_break_demo.csv"), "--output", tmp_path / "seg.csv"])
    code, out = run(["reconstruct", "--segments", tmp_path / "seg.csv", "--baseline-k", 5])
    assert code == 0 and "baseline" not in out and "audit" not in out


def test_reconstruct_integrity_error(tmp_path, capsys):
    run(["partition", "--input", dataset_path("reference_series.csv"), "--output", tmp_path / "seg.csv"])
    lines = (tmp_path / "seg.csv").read_text().splitlines()
    (tmp_path / "gap.csv").write_text("\n".join(lines[:2] + lines[3:]) + "\n")
    code, _ = run(["reconstruct", "--segments", tmp_path / "gap.csv"])
    assert code == 1 and "starts at" in capsys.readouterr().err


def test_reconstruct_audit_mismatch(tmp_path):
    ref = dataset_path("reference_series.csv")
    run(["partition", "--input", ref, "--output", tmp_path / "seg.csv"])
    y = [(t, 1.0 + (t % 7)) for t in range(1, 2001)]
    write_series_csv(tmp_path / "other.csv", y)
    code, out = run(["reconstruct", "--segments", tmp_path / "seg.csv", "--input", tmp_path / "other.csv"])
    assert code == 1 and "MISMATCH" in out


SYNTH = ["synth", "--length", 300, "--breakpoints", "100,200", "--slopes", "0.5,-1,0",
         "--intercepts", "0,150,-50", "--seed", 3]


def test_synth_byte_identical(tmp_path):
    run(SYNTH + ["--noise", 0.2, "--output", tmp_path / "a.csv"])
    run(SYNTH + ["--noise", 0.2, "--output", tmp_path / "b.csv"])
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    code, out = run(SYNTH + ["--noise", 0.2])
    assert out == (tmp_path / "a.csv").read_text()


def test_synth_noise_free_recovered(tmp_path):
    run(SYNTH + ["--output", tmp_path / "s.csv"])
    _, out = run(["partition", "--input", tmp_path / "s.csv", "--b", 5, "--delta2", 0])
    bps = summary(out)[2]
    assert len(bps) == 2
    assert 95 <= bps[0] <= 100 and 195 <= bps[1] <= 200


@pytest.mark.parametrize("argv", [["--length", 0], ["--length", 10, "--breakpoints", "12"]])
def test_synth_usage_errors(argv):
    with pytest.raises(SystemExit) as info:
        run(["synth"] + argv)
    assert info.value.code == 2


def test_deterministic_output(tmp_path):
    ref = dataset_path("reference_series.csv")
    outs = []
    for name in ("a", "b"):
        _, out = run(["partition", "--input", ref, "--output", tmp_path / f"{name}.csv"])
        outs.append(out)
    assert outs[0] == outs[1]
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_module_entry_point(tmp_path):
    done = subprocess.run(
        [sys.executable, "-m", "insitu_partition", "partition", "--input", str(dataset_path("two_break_demo.csv")),
         "--alpha", "0.01", "--delta2", "0"],
        capture_output=True, text=True, check=False,
    )
    assert done.returncode == 0 and "breakpoints 9 22" in done.stdout
    done = subprocess.run([sys.executable, "-m", "insitu_partition", "synth", "--length", "0"],
                          capture_output=True, text=True, check=False)
    assert done.returncode == 2 and "usage" in done.stderr
