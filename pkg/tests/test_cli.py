"""End-to-end command line checks, all through subprocess."""

import csv
import json
import math
import os
import subprocess
import sys

import numpy as np
import pytest

CMD = [sys.executable, "-m", "spiralsheet"]


def run(*args, env_extra=None, check=False):
    env = dict(os.environ)
    if env_extra:
        env.update(env_extra)
    proc = subprocess.run(
        CMD + list(args), capture_output=True, text=True, env=env
    )
    if check and proc.returncode != 0:
        raise AssertionError(f"exit {proc.returncode}: {proc.stderr}")
    return proc


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_solve_prints_solution_and_exits_zero():
    proc = run("solve", "--a", "1.0", check=True)
    out = proc.stdout
    assert "mu" in out and "g" in out
    mu_line = [ln for ln in out.splitlines() if ln.startswith("mu")][0]
    assert abs(float(mu_line.split()[-1])) < 1e-12


def test_solve_family():
    proc = run("solve", "--a", "0.8", "--thetas", "0,3.14159265", check=True)
    assert "g[0]" in proc.stdout and "g[1]" in proc.stdout
    assert "residual_norm" in proc.stdout


def test_solve_strict_tolerance_fails_exit_code():
    # an over-determined family never hits an exactly zero residual, so a
    # ridiculous tolerance must flip the exit code
    proc = run("solve", "--a", "0.8", "--thetas", "0,1.0,2.0", "--tol", "1e-30")
    assert proc.returncode == 1


def test_usage_errors_exit_two():
    assert run("solve", "--a", "-1").returncode == 2
    assert run("solve", "--a", "0.8", "--g", "1.0").returncode == 2  # solve computes g
    assert run("solve", "--a", "0.8", "--thetas", "0,7.0").returncode == 2
    assert run("eval", "--a", "0.8", "--points", "zzz").returncode == 2
    assert run("eval", "--a", "0.8", "--points", "1,0", "--g", "2.0").returncode == 2
    assert run("grid", "--a", "0.8").returncode == 2  # missing bounds


def test_eval_csv_schema(tmp_path):
    out = tmp_path / "pts.csv"
    run(
        "eval", "--a", "0.8", "--points", "1.5,0.0;0.0,2.0;0.0,0.0",
        "--out", str(out), check=True,
    )
    rows = read_csv(out)
    assert [c for c in rows[0]] == ["x", "y", "u", "v", "speed", "winding", "flag"]
    assert rows[0]["flag"] == ""
    assert rows[2]["flag"] == "origin"
    assert rows[2]["u"] == ""
    speed = math.hypot(float(rows[0]["u"]), float(rows[0]["v"]))
    assert abs(speed - float(rows[0]["speed"])) < 1e-12 * speed


def test_eval_on_sheet_flag(tmp_path):
    out = tmp_path / "sheet.csv"
    run("eval", "--a", "0.8", "--points", "1.0,0.0", "--out", str(out), check=True)
    rows = read_csv(out)
    assert rows[0]["flag"] == "on_sheet"


def test_eval_strip_frame(tmp_path):
    out = tmp_path / "strip.csv"
    run(
        "eval", "--a", "0.8", "--frame", "strip",
        "--points=-1.0,0.5;0.5,0.0", "--out", str(out), check=True,
    )
    rows = read_csv(out)
    assert rows[0]["flag"] == ""
    assert rows[0]["winding"] == ""  # no winding number in the strip frame
    assert rows[1]["flag"] == "outside"


def test_grid_csv_deterministic(tmp_path):
    argv = [
        "grid", "--a", "0.8", "--bounds=-2,2,-2,2", "--res", "40,40",
    ]
    f1, f2 = tmp_path / "g1.csv", tmp_path / "g2.csv"
    run(*argv, "--out", str(f1), check=True)
    run(*argv, "--out", str(f2), check=True)
    assert f1.read_bytes() == f2.read_bytes()


def test_grid_thread_count_invariance(tmp_path):
    argv = ["grid", "--a", "0.8", "--bounds=-2,2,-2,2", "--res", "50,50"]
    f1, f2 = tmp_path / "t1.csv", tmp_path / "t2.csv"
    run(*argv, "--out", str(f1), env_extra={"SPIRALSHEET_THREADS": "1"}, check=True)
    run(*argv, "--out", str(f2), env_extra={"SPIRALSHEET_THREADS": "7"}, check=True)
    assert f1.read_bytes() == f2.read_bytes()


def test_grid_backend_invariant_flags(tmp_path):
    # flags and winding numbers must not depend on the backend
    argv = ["grid", "--a", "0.8", "--bounds=-1.5,1.5,-1.5,1.5", "--res", "30,30"]
    f1, f2 = tmp_path / "b1.csv", tmp_path / "b2.csv"
    run(*argv, "--out", str(f1), check=True)
    run(*argv, "--out", str(f2), env_extra={"SPIRALSHEET_PURE": "1"}, check=True)
    r1, r2 = read_csv(f1), read_csv(f2)
    assert [r["flag"] for r in r1] == [r["flag"] for r in r2]
    assert [r["winding"] for r in r1] == [r["winding"] for r in r2]
    vals = [
        (float(a["u"]), float(b["u"]))
        for a, b in zip(r1, r2) if a["flag"] == ""
    ]
    rel = max(abs(x - y) / (1.0 + abs(x)) for x, y in vals)
    assert rel < 1e-13


def test_grid_json_format(tmp_path):
    out = tmp_path / "g.json"
    run(
        "grid", "--a", "0.8", "--bounds=-1,1,-1,1", "--res", "8,8",
        "--format", "json", "--out", str(out), check=True,
    )
    doc = json.loads(out.read_text())
    assert doc["a"] == 0.8
    assert doc["columns"] == ["x", "y", "u", "v", "speed", "winding", "flag"]
    assert len(doc["rows"]) == 64
    assert len(doc["rows"][0]) == 7


def test_grid_strip_frame_marks_outside(tmp_path):
    out = tmp_path / "gs.csv"
    run(
        "grid", "--a", "0.8", "--frame", "strip", "--bounds=-3,1,-1,1",
        "--res", "24,8", "--out", str(out), check=True,
    )
    flags = {r["flag"] for r in read_csv(out)}
    assert "outside" in flags and "" in flags


def test_verify_all_pass(tmp_path):
    out = tmp_path / "report.json"
    proc = run("verify", "--a", "0.8", "--out", str(out))
    assert proc.returncode == 0, proc.stderr
    reports = json.loads(out.read_text())
    assert all(r["pass"] for r in reports)
    names = {r["name"] for r in reports}
    assert {"conformal_round_trip", "winding_indicator", "jump_tangential"} <= names


def test_verify_family_stdout():
    proc = run("verify", "--a", "0.8", "--thetas", "0,3.141592653589793")
    assert proc.returncode == 0, proc.stderr
    reports = json.loads(proc.stdout)
    assert all(r["pass"] for r in reports)
    # per-line summary goes to stderr, data to stdout
    assert "conformal_round_trip" in proc.stderr


def test_verify_nonuniform_family_fails_honestly():
    # unequal spacing leaves the matching system over-determined, so the
    # velocity-matching and line-condition checks must report the miss
    proc = run("verify", "--a", "0.8", "--thetas", "0,2.0")
    assert proc.returncode == 1
    reports = {r["name"]: r for r in json.loads(proc.stdout)}
    assert not reports["velocity_matching"]["pass"]
    assert not reports["line_conditions"]["pass"]
    assert reports["conformal_round_trip"]["pass"]


def test_verify_deterministic(tmp_path):
    f1, f2 = tmp_path / "v1.json", tmp_path / "v2.json"
    run("verify", "--a", "1.2", "--out", str(f1), check=True)
    run("verify", "--a", "1.2", "--out", str(f2), check=True)
    assert f1.read_bytes() == f2.read_bytes()


def test_advect_schema_and_determinism(tmp_path):
    argv = [
        "advect", "--a", "1.0", "--points=-1.5,0.0;0.0,2.5",
        "--t1", "2.0", "--dt", "0.05",
    ]
    f1, f2 = tmp_path / "a1.csv", tmp_path / "a2.csv"
    run(*argv, "--out", str(f1), check=True)
    run(*argv, "--out", str(f2), check=True)
    assert f1.read_bytes() == f2.read_bytes()
    rows = read_csv(f1)
    assert [c for c in rows[0]] == ["t", "particle", "x", "y", "flag"]
    parts = {r["particle"] for r in rows}
    assert parts == {"0", "1"}
    assert float(rows[-1]["t"]) == 2.0


def test_advect_conserves_stream_function(tmp_path):
    # at a = 1 the exponent is zero, so trajectories follow level sets of
    # the imaginary part of the potential
    from spiralsheet import SpiralParams, complex_potential, solve_matching

    out = tmp_path / "traj.csv"
    run(
        "advect", "--a", "1.0", "--points=-1.5,0.0", "--t1", "8.0",
        "--dt", "0.005", "--out", str(out), check=True,
    )
    rows = [r for r in read_csv(out) if r["flag"] == ""]
    mu, g = solve_matching(1.0)
    p = SpiralParams(1.0, mu, g)
    z0 = complex(float(rows[0]["x"]), float(rows[0]["y"]))
    z1 = complex(float(rows[-1]["x"]), float(rows[-1]["y"]))
    assert abs(z1 - z0) > 0.08  # it actually moved
    psi0 = complex_potential(z0, p).imag
    psi1 = complex_potential(z1, p).imag
    assert abs(psi1 - psi0) < 5e-4 * (1.0 + abs(psi0))


def test_advect_halts_near_sheet(tmp_path):
    out = tmp_path / "halt.csv"
    run(
        "advect", "--a", "0.8", "--points", "1.0000001,0.0",
        "--t1", "1.5", "--dt", "0.01", "--out", str(out), check=True,
    )
    rows = read_csv(out)
    assert any(r["flag"] == "near_sheet" for r in rows)
    # frozen particles keep their last position
    frozen = [r for r in rows if r["flag"] == "near_sheet"]
    assert len({(r["x"], r["y"]) for r in frozen}) == 1


def test_domain_errors_exit_one():
    proc = run("eval", "--a", "0.8", "--frame", "strip", "--points", "0.5,0.0",
               "--format", "json")
    # outside-strip points are flagged, not fatal
    assert proc.returncode == 0
    # a pitch too small for the matching system is a runtime failure
    proc = run("solve", "--a", "1e-9")
    assert proc.returncode == 1
    assert proc.stderr.strip() != ""
