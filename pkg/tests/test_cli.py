import csv
import subprocess
import sys

import pytest

from invloc.cli import main
from conftest import DATA

CIRCLE4 = str(DATA / "circle4.inst")
P18 = str(DATA / "points18.inst")
RUSPINI = str(DATA / "ruspini.txt")


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    assert code in {0, 2, 3, 4, 5}
    if code == 0:
        assert err == ""
    return code, out, err


def test_forward_circle4(capsys, tmp_path):
    code, out, _ = run(capsys, "forward", CIRCLE4, "--objective", "minisum", "--p", "2",
                       "--out", tmp_path / "f.txt")
    assert code == 0
    assert "x*: (0, -1)" in out and "f(x*): 0" in out
    assert (tmp_path / "f.txt").read_text().splitlines()[0] == "x 0"


def test_forward_single_site(capsys, tmp_path):
    f = tmp_path / "one.inst"
    f.write_text("INVLOC 1\nminimax 1 3\n2.5 -1 4 0 0 0 0\n")
    code, out, _ = run(capsys, "forward", f)
    assert code == 0 and "(2.5, -1)" in out


def test_forward_corrupt(capsys, tmp_path):
    f = tmp_path / "bad.inst"
    f.write_text("INVLOC 1\nminisum 2 2\n0 0 1 1 1 1 1\n")
    code, _, err = run(capsys, "forward", f)
    assert code == 2 and "n=2" in err


def test_inverse_circle4(capsys, tmp_path):
    trace, plan = tmp_path / "t.csv", tmp_path / "p.plan"
    code, out, _ = run(capsys, "inverse", CIRCLE4, "--xbar", 0, 0, "--eps", 0.01,
                       "--trace", trace, "--out", plan)
    assert code == 0
    cost = float(out.split("C*: ")[1].split()[0])
    t = int(out.split("t: ")[1].split()[0])
    assert 39.5 <= cost <= 40.05 and t <= 30
    rows = list(csv.reader(trace.open()))
    assert rows[0] == ["k", "x", "y", "cost", "delta_w"]
    assert len(rows) - 1 == t + 1
    code, out, _ = run(capsys, "verify", CIRCLE4, plan, "--xbar", 0, 0)
    assert code == 0 and out.strip().endswith("pass")


def test_inverse_points18(capsys):
    code, out, _ = run(capsys, "inverse", P18, "--xbar", 3, 5)
    assert code == 0
    assert 71 <= float(out.split("C*: ")[1].split()[0]) <= 74


def test_inverse_outside_hull(capsys):
    code, out, _ = run(capsys, "inverse", P18, "--xbar", 100, 100)
    assert code == 4 and "infeasible" in out


def test_inverse_iteration_limit(capsys):
    code, _, _ = run(capsys, "inverse", P18, "--xbar", 3, 5, "--max-iter", 1)
    assert code == 3


def test_gen_is_deterministic(capsys, tmp_path):
    a, b = tmp_path / "a.inst", tmp_path / "b.inst"
    assert run(capsys, "gen", RUSPINI, "--seed", 1, "--out", a)[0] == 0
    assert run(capsys, "gen", RUSPINI, "--seed", 1, "--out", b)[0] == 0
    assert a.read_bytes() == b.read_bytes()
    from invloc import parse_instance

    inst = parse_instance(a.read_text())
    assert inst.n == 75 and all(1 <= s.w < 10 for s in inst.sites)


def test_gen_empty(capsys, tmp_path):
    f = tmp_path / "empty.txt"
    f.write_text("")
    assert run(capsys, "gen", f)[0] == 2


def test_verify_original_weights_fails(capsys, tmp_path):
    plan = tmp_path / "id.plan"
    plan.write_text("INVLOC-PLAN 1 4 0\n0 0 0\n0 0 0\n0 0 0\n7.0710678 0 0\n")
    assert run(capsys, "verify", CIRCLE4, plan, "--xbar", 0, 0)[0] == 5


def test_verify_optimum(capsys, tmp_path):
    plan = tmp_path / "opt.plan"
    plan.write_text("INVLOC-PLAN 1 4 40\n0 0 0\n5 5 0\n5 5 0\n7.0710678 0 0\n")
    assert run(capsys, "verify", CIRCLE4, plan, "--xbar", 0, 0)[0] == 0


def test_verify_length_mismatch(capsys, tmp_path):
    plan = tmp_path / "short.plan"
    plan.write_text("INVLOC-PLAN 1 2 0\n0 0 0\n0 0 0\n")
    assert run(capsys, "verify", CIRCLE4, plan, "--xbar", 0, 0)[0] == 2


def test_missing_file(capsys):
    assert run(capsys, "forward", "/nonexistent/x.inst")[0] == 2


def test_usage_error_exits_2():
    with pytest.raises(SystemExit) as err:
        main(["inverse", CIRCLE4])
    assert err.value.code == 2


def test_batch(capsys, tmp_path):
    src = tmp_path / "runs"
    src.mkdir()
    (src / "ex1.inst").write_text((DATA / "circle4.inst").read_text())
    (src / "p18.inst").write_text((DATA / "points18.inst").read_text())
    code, out, _ = run(capsys, "inverse", "--batch", src, "--xbar", 0, 0,
                       "--out", tmp_path / "res")
    # x_bar = (0,0) lies outside the 18-point hull
    assert code == 4
    assert (tmp_path / "res" / "ex1.trace.csv").exists()
    assert (tmp_path / "res" / "ex1.plan").exists()
    assert "[p18] outcome: infeasible" in out


def test_console_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "invloc.cli", "inverse", CIRCLE4, "--xbar", "0",
                           "0"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stderr == ""
