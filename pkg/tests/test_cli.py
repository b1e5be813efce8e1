import csv
import io
import json
import math
import shutil
import subprocess

import numpy as np
import pytest

from alpharep import alpha as arep
from alpharep import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def read_csv(text):
    rows = list(csv.reader(io.StringIO(text)))
    return rows[0], np.array(rows[1:], dtype=float)


def test_figure_one(tmp_path, capsys):
    out = tmp_path / "fig1.csv"
    code, _, _ = run(capsys, "figure", "--id", "1", "--alpha", "1", "--out", str(out))
    assert code == 0
    header, rows = read_csv(out.read_text())
    assert header[0] == "n" and len(header) == 2
    assert np.array_equal(rows[:, 0], np.arange(31))
    assert rows[1, 1] == 0
    assert np.allclose(rows[:, 1], arep.prob_row(1, 1.0, 30), rtol=1e-11, atol=0)
    meta = json.loads((tmp_path / "fig1.csv.meta.json").read_text())
    assert meta["params"]["id"] == "1" and "formula" in meta and "version" in meta


def test_figure_three_normalized(capsys):
    code, text, _ = run(capsys, "figure", "--id", "3", "--delta", "1", "--r", "0.5")
    assert code == 0
    header, rows = read_csv(text)
    assert len(header) == 2
    assert rows[:, 1].sum() >= 1 - 1e-6


def test_figure_seven_columns(capsys):
    code, text, _ = run(capsys, "figure", "--id", "7", "--delta", "1", "--k-max", "7")
    assert code == 0
    header, rows = read_csv(text)
    assert header == ["s"] + [f"P1/P{k}" for k in range(2, 8)]
    assert rows.shape == (50, 7)
    assert np.allclose(rows[:, 0], np.arange(1, 51) * 0.02)


def test_figure_json_and_twelve_digits(capsys):
    code, text, _ = run(capsys, "figure", "--id", "4", "--alpha", "1", "--format", "json", "--no-timestamp")
    assert code == 0
    doc = json.loads(text)
    assert doc["rows"][0][1] == f"{math.exp(-1) * 2:.12g}"
    assert "generated_at" not in doc["metadata"]


def test_matrix_identity(tmp_path, capsys):
    out = tmp_path / "m.csv"
    code, _, _ = run(capsys, "matrix", "--alpha", "0", "--cutoff", "10", "--out", str(out))
    assert code == 0
    header, rows = read_csv(out.read_text())
    re = rows[:, 1::2]
    im = rows[:, 2::2]
    assert np.array_equal(re, np.eye(10)) and not im.any()
    meta = json.loads((tmp_path / "m.csv.meta.json").read_text())
    assert meta["prefactor"] == "1" and float(meta["unitarity_residual"]) < 1e-12


def test_matrix_row_one(capsys):
    code, text, _ = run(capsys, "matrix", "--alpha", "0.8", "--cutoff", "16")
    _, rows = read_csv(text)
    row = rows[1, 1::2]
    assert row[0] == pytest.approx(0.8)
    for n in range(1, 10):
        assert row[n] == pytest.approx((-0.8) ** (n - 1) * (n - 0.64) / math.sqrt(math.factorial(n)), abs=1e-11)


def test_matrix_guard_exit(capsys):
    code, _, err = run(capsys, "matrix", "--alpha", "2", "--cutoff", "10")
    assert code == 3 and "guard" in err


def test_gate_cz(capsys):
    code, text, _ = run(capsys, "gate", "cz")
    assert code == 0
    doc = json.loads(text)
    assert {"kind", "params", "success_probability", "fidelity", "ideal_description", "warnings"} <= set(doc)
    assert float(doc["fidelity"]) >= 0.99
    assert doc["params"]["s"] == "0.1"


@pytest.mark.parametrize("kind", ["hadamard", "macro-micro", "reverse"])
def test_gate_hadamard_kinds(capsys, kind):
    a = f"{1 / math.sqrt(2)}"
    code, text, _ = run(capsys, "gate", kind, "--a", a, "--b", a)
    assert code == 0
    assert float(json.loads(text)["fidelity"]) >= 0.98


def test_gate_invalid_splitter(capsys):
    code, _, err = run(capsys, "gate", "cz", "--bs-r", "0")
    assert code == 2 and "bs_r" in err


def test_gate_truncated_cutoffs(capsys):
    code, _, _ = run(capsys, "gate", "cz", "--cutoffs", "40,8,8,8")
    assert code == 3


def test_gate_config_file(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# reference run\ns = 0.1\nbs_r = 0.05\na = 0.6\nb = 0.8  # control\n")
    code, text, _ = run(capsys, "gate", "cz", "--config", str(cfg), "--no-timestamp")
    assert code == 0
    doc = json.loads(text)
    assert doc["params"]["a"] == "0.6" and doc["params"]["b"] == "0.8"
    code, text, _ = run(capsys, "gate", "cz", "--config", str(cfg), "--a", "1", "--b", "0", "--no-timestamp")
    assert json.loads(text)["params"]["b"] == "0"


def test_deterministic_output(tmp_path, capsys):
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for p in paths:
        run(capsys, "figure", "--id", "2", "--no-timestamp", "--out", str(p))
    assert paths[0].read_bytes() == paths[1].read_bytes()
    assert (tmp_path / "a.csv.meta.json").read_bytes() == (tmp_path / "b.csv.meta.json").read_bytes()


def test_unwritable_path(tmp_path, capsys):
    code, _, err = run(capsys, "figure", "--id", "1", "--out", str(tmp_path / "missing" / "x.csv"))
    assert code == 2 and "cannot write" in err


def test_bad_figure_id(capsys):
    assert run(capsys, "figure", "--id", "6")[0] == 2


def test_selftest_detects_injected_fault(capsys):
    code, text, _ = run(capsys, "selftest", "--inject-fault")
    assert code == 1
    assert "oracle equivalence" in text and "FAIL" in text.splitlines()[1]


def test_selftest_table(capsys):
    code, text, _ = run(capsys, "selftest")
    lines = text.splitlines()
    status = {ln.split("  ")[0].strip(): ln for ln in lines[1:-1]}
    for name in ("oracle equivalence", "alpha-matrix unitarity", "normalizations", "symmetries",
                 "squeezed-pair closed form", "figure peak counts"):
        assert "PASS" in status[name]
    # the low-squeezing ratio bound is reported with its actual value
    assert "P1/P2(s=0.03) = 635" in status["detector ratio curves"]
    assert code == (0 if all("PASS" in v for v in status.values()) else 1)


@pytest.mark.skipif(shutil.which("alpharep") is None, reason="console script not installed")
def test_console_script():
    res = subprocess.run(["alpharep", "gate", "cz", "--bs-r", "0"], capture_output=True, text=True)
    assert res.returncode == 2 and res.stderr
