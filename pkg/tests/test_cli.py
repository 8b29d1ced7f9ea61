import csv
import io
import subprocess
import sys

import pytest

from fastgreen.cli import run
from fastgreen.table import read_table_dump


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def sweep(capsys, *extra):
    assert run(["sweep-error", "--lambda0", "1", "--r-min", "1e-4", "--r-max", "1", "--probes", "10000", *extra]) == 0
    return capsys.readouterr().out


def test_sweep_has_four_rows(capsys):
    out = sweep(capsys)
    table = rows(out)
    assert [(r["kernel"], r["method"]) for r in table] == [
        ("exp", "linear"), ("exp", "lagrange3"), ("green", "linear"), ("green", "lagrange3"),
    ]
    assert all(r["probes"] == "10000" for r in table)


def test_refinement_gain_through_cli(capsys):
    on = rows(sweep(capsys, "--refine", "on"))
    off = rows(sweep(capsys, "--refine", "off"))
    for a, b in zip(on, off):
        for col in ("max_rel_re", "max_rel_im"):
            assert float(a[col]) <= 0.1 * float(b[col])


def test_identical_flags_identical_bytes(capsys):
    assert sweep(capsys) == sweep(capsys)


def test_sweep_to_file(tmp_path, capsys):
    path = tmp_path / "s.csv"
    assert run(["sweep-error", "--probes", "500", "--out", str(path)]) == 0
    summary = capsys.readouterr().out
    assert len(rows(path.read_text())) == 4
    assert "lagrange3" in summary and "max rel" in summary


def test_bench_fill_call_count(capsys):
    assert run(["bench-fill", "--sphere-subdiv", "2", "--outer-m", "4", "--inner-n", "3", "--repeats", "1"]) == 0
    (row,) = rows(capsys.readouterr().out)
    assert row["N"] == "320"
    assert int(row["actual_calls"]) == 3_674_880
    assert int(row["predicted_calls"]) == 3_686_400
    assert float(row["max_rel_re"]) < 1e-2


def test_gen_mesh_then_bench(tmp_path, capsys):
    off = tmp_path / "s.off"
    assert run(["gen-mesh", "--sphere-subdiv", "1", "--sphere-radius", "0.4", "--out", str(off)]) == 0
    out_csv = tmp_path / "b.csv"
    assert run(["bench-fill", "--mesh", str(off), "--repeats", "1", "--out", str(out_csv)]) == 0
    summary = capsys.readouterr().out
    assert "80 triangles" in summary and "speedup" in summary
    (row,) = rows(out_csv.read_text())
    assert int(row["actual_calls"]) == 3 * 4 * 3 * 80 * 79


def test_build_table_dumps(tmp_path, capsys):
    plan_csv = tmp_path / "plan.csv"
    dump = tmp_path / "t.bin"
    argv = ["build-table", "--kernel", "exp", "--dump-plan", str(plan_csv), "--dump-table", str(dump)]
    assert run(argv) == 0
    assert "zero crossings sampled: 4" in capsys.readouterr().out
    lines = plan_csv.read_text().splitlines()
    assert lines[0] == "index,r,is_zero,gap_to_next"
    with open(dump, "rb") as fh:
        kind, k, r, values = read_table_dump(fh)
    assert kind.label == "exp" and r.size == len(lines) - 1


@pytest.mark.parametrize(
    "argv",
    [
        ["bogus"],
        ["sweep-error", "--no-such-flag"],
        ["bench-fill", "--mesh", "a.off", "--sphere-subdiv", "2"],
        ["bench-fill", "--mesh", "/nonexistent/mesh.off"],
        ["bench-fill", "--r-max", "2"],
        ["sweep-error", "--refine", "maybe"],
        ["sweep-error", "--probes", "0"],
        ["sweep-error", "--r-min", "-1"],
        ["sweep-error", "--lambda0", "0"],
        ["gen-mesh"],
    ],
)
def test_usage_errors_exit_2(argv, capsys):
    assert run(argv) == 2
    err = capsys.readouterr().err
    assert err.strip() and err.count("\n") <= 3


def test_runtime_failure_exit_1(tmp_path, capsys):
    bad = tmp_path / "quad.off"
    bad.write_text("OFF\n4 1 0\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n4 0 1 2 3\n")
    assert run(["bench-fill", "--mesh", str(bad)]) == 1
    assert "line 7" in capsys.readouterr().err
    assert run(["gen-mesh", "--out", str(tmp_path / "missing" / "x.off")]) == 1


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "fastgreen", "sweep-error", "--probes", "100"], capture_output=True, text=True, check=False
    )
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[0] == "kernel,method,probes,max_rel_re,max_rel_im,max_abs,worst_r"
    proc = subprocess.run([sys.executable, "-m", "fastgreen"], capture_output=True, text=True, check=False)
    assert proc.returncode == 2
