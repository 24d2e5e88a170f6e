import json
import math
import subprocess
import sys

import numpy as np
import pytest

from cvpsi.cli import main


def run(capsys, *args):
    code = main(list(args))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def data(tmp_path):
    x = np.random.default_rng(2).normal(size=150)
    p = tmp_path / "x.csv"
    p.write_text("value\n" + "\n".join(repr(float(v)) for v in x) + "\n")
    th = np.random.default_rng(2).vonmises(0, 2, 150) % (2 * math.pi)
    q = tmp_path / "c.csv"
    q.write_text("\n".join(repr(float(v)) for v in th) + "\n")
    return p, q


def test_difficulty(capsys):
    code, out, _ = run(capsys, "difficulty", "--density", "1")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "id,Q" and abs(float(lines[1].split(",")[1]) - 1.99) < 0.02


@pytest.mark.parametrize("method", ["ct", "entropy", "theta1", "theta2", "js", "shd"])
def test_estimate_methods(capsys, data, method):
    code, out, _ = run(capsys, "estimate", "--input", str(data[0]), "--method", method)
    doc = json.loads(out)
    assert code == 0 and doc["n"] == 150 and math.isfinite(doc["estimate"])


def test_estimate_verbose_trace(capsys, data):
    _, out, _ = run(capsys, "estimate", "--input", str(data[0]), "--method", "shd", "--verbose")
    doc = json.loads(out)
    assert doc["trace"]["method"] == "shd" and "psi4" in doc["trace"]["functionals"]


def test_circular_validation(capsys, data):
    code, out, _ = run(capsys, "estimate", "--input", str(data[1]), "--method", "circular")
    assert code == 0 and json.loads(out)["estimate"] > 0
    code, _, err = run(capsys, "estimate", "--input", str(data[0]), "--method", "circular")
    assert code == 2 and "[0, 2*pi)" in err


@pytest.mark.parametrize("method", ["scv", "histcv", "histscv"])
def test_bandwidth(capsys, data, method):
    code, out, _ = run(capsys, "bandwidth", "--input", str(data[0]), "--method", method)
    doc = json.loads(out)
    assert code == 0 and doc["parameter"] > 0 and set(doc) == {"parameter", "criterion_min", "n"}


def test_curves(capsys):
    _, out, _ = run(capsys, "curves", "--density", "1", "--n", "80", "--seed", "1")
    assert out.splitlines()[0] == "g,cv,mise_exact,mse_exact"
    _, out, _ = run(capsys, "curves", "--kind", "mse", "--density", "2", "--n", "50", "--points", "5")
    rows = [list(map(float, r.split(","))) for r in out.strip().splitlines()[1:]]
    assert len(rows) == 5
    for g, b, v, m, mise in rows:
        assert m == pytest.approx(b * b + v, abs=1e-12) and b == pytest.approx(-mise, abs=1e-12)


def test_curves_bandwidth(capsys):
    _, out, _ = run(capsys, "curves", "--kind", "bandwidth", "--density", "1", "--n", "60")
    assert out.splitlines()[0] == "h,m_hat,mise_exact"


def test_equivalence(capsys):
    _, out, _ = run(capsys, "equivalence", "--n", "100,1000")
    rows = out.strip().splitlines()
    assert rows[0] == "n,g_mse,g_mise,ratio,scaled_gap"
    assert float(rows[1].split(",")[3]) == pytest.approx(1.530, abs=1e-3)


def test_simulate_module_entry(tmp_path):
    cfg = tmp_path / "cfg.txt"
    cfg.write_text("densities=1\nn=40\nB=2\n")
    out = tmp_path / "o"
    r = subprocess.run([sys.executable, "-m", "cvpsi", "simulate", "--config", str(cfg), "--seed", "5",
                        "--out", str(out), "--json"], capture_output=True, text=True)
    assert r.returncode == 0, r.stderr
    assert {p.name for p in out.iterdir()} == {"summary.csv", "cells.csv", "reldist.csv", "failures.csv", "results.json"}


def test_missing_file(capsys, tmp_path):
    code, _, err = run(capsys, "estimate", "--input", str(tmp_path / "nope.csv"))
    assert code == 2 and "nope.csv" in err
