import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from beable.cli import (
    CommandConfig, ResultTable, UsageError, emit, format_csv, format_json, parse_config, parse_csv, run,
)
from beable.errors import DomainError


def call(argv):
    buf = io.StringIO()
    code = run(argv, buf)
    return code, buf.getvalue()


# ------------------------------------------------------------ tables

def test_table_row_length_checked():
    t = ResultTable([("a", "1"), ("b", "1")])
    with pytest.raises(DomainError):
        t.add(1.0)
    with pytest.raises(DomainError):
        ResultTable([("a", "1")], rows=[(1.0, 2.0)])


def test_csv_format():
    t = ResultTable([("t", "time"), ("E", "energy")])
    t.add(0.1, 1 / 3)
    text = format_csv(t)
    assert text == "t(time),E(energy)\n1.0000000000000001e-01,3.3333333333333331e-01\n"
    assert "\r" not in text


def test_empty_table_header_only(tmp_path):
    p = tmp_path / "e.csv"
    emit(ResultTable([("x", "1")]), CommandConfig("kernel", {}, str(p)))
    assert p.read_bytes() == b"x(1)\n"


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(allow_nan=False, allow_infinity=False), min_size=2, max_size=2))
def test_csv_round_trip_bit_exact(vals):
    t = ResultTable([("a", "1"), ("b", "length")])
    t.add(*vals)
    back = parse_csv(format_csv(t))
    assert back.columns == t.columns
    assert [v.hex() for v in back.rows[0]] == [float(v).hex() for v in vals]


def test_json_nan_is_null():
    t = ResultTable([("a", "1")], metadata={"k": 1})
    t.add(math.nan)
    doc = json.loads(format_json(t))
    assert doc["rows"] == [[None]]
    assert doc["columns"] == [{"name": "a", "unit": "1"}]
    assert doc["metadata"] == {"k": 1}


def test_unwritable_path_exit_2(tmp_path):
    code, _ = call(["kernel", "-o", str(tmp_path / "missing" / "x.csv")])
    assert code == 2


# ------------------------------------------------------------ dispatch

def test_empty_argv_usage():
    assert call([])[0] == 1


def test_unknown_command():
    assert call(["frobnicate"])[0] == 1


def test_bad_flag_value():
    assert call(["kernel", "--N", "-3"])[0] == 1
    assert call(["kernel", "--format", "xml"])[0] == 1


def test_help_exit_0(capsys):
    assert call(["kernel", "--help"])[0] == 0


def test_validation_error_exit_1():
    # omega T = 1 with a bad tau: weight constructor rejects tau <= 0
    assert call(["weights", "--tau", "0"])[0] == 1


def test_numeric_error_exit_2():
    assert call(["drift", "--alpha", "1e300", "--nmax", "6", "--steps", "2"])[0] == 2
    assert call(["weights", "--omegas", "1e-9"])[0] == 2


def test_kernel_values():
    code, out = call(["kernel", "--N", "3"])
    assert code == 0
    t = parse_csv(out)
    assert [c for c, _ in t.columns] == ["n", "D", "Dbar", "Dbarbar"]
    assert t.rows == [(1, 0, 1, 2), (2, 0, 1, 3), (3, 0, 1, 4)]


def test_kernel_json_metadata():
    code, out = call(["kernel", "--N", "2", "--format", "json"])
    doc = json.loads(out)
    md = doc["metadata"]
    assert md["threshold_holds"] is False
    assert md["lam"] == pytest.approx(0.25)
    assert md["threshold_bound"] == pytest.approx(0.5)
    assert md["command"] == "beable kernel --N 2 --format json"
    assert md["seed"] == 0


def test_drift_slope():
    code, out = call(["drift", "--alpha", "0.8", "--omega", "1", "--nmax", "40", "--t", "5", "--steps", "100",
                      "--format", "json"])
    assert code == 0
    doc = json.loads(out)
    assert doc["metadata"]["fitted_slope"] == pytest.approx(0.2, rel=1e-6)
    slopes = np.array([r[2] for r in doc["rows"]])
    assert np.allclose(slopes[1:-1], 0.2, rtol=1e-5)


def test_drift_modified_conserves():
    code, out = call(["drift", "--formalism", "modified", "--nmax", "20", "--t", "2", "--steps", "20",
                      "--format", "json"])
    doc = json.loads(out)
    E = np.array([r[1] for r in doc["rows"]])
    assert np.ptp(E) < 1e-10
    assert all(r[3] is None for r in doc["rows"])


def test_oracle_feynman_converges():
    t = parse_csv(call(["oracle", "--mode", "feynman", "--Ns", "32,64,128"])[1])
    err = [r[1] for r in t.rows]
    assert err[0] / err[1] == pytest.approx(2.0, rel=0.05)
    assert err[-1] < 2e-3


def test_weights_and_bounds():
    t = parse_csv(call(["weights", "--omegas", "0.1"])[1])
    assert t.rows[0][1] == pytest.approx(0.2120820967524, rel=1e-9)
    assert t.rows[0][4] == 1.0
    doc = json.loads(call(["bounds", "--format", "json"])[1])
    assert doc["rows"][0][5] == 1.0
    assert 4e-15 <= doc["rows"][0][4] <= 6e-15


def test_demo_measurement():
    t = parse_csv(call(["demo-measurement", "--trials", "5"])[1])
    assert t.rows[0][1] < 1e-10
    assert t.rows[0][5] == 1.0


# ------------------------------------------------------- configuration

def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "k.cfg"
    cfg.write_text("N = 4\nomega = 2.0\n")
    c, ns = parse_config(["kernel", "--config", str(cfg)])
    assert ns.N == 4 and ns.omega == 2.0
    c, ns = parse_config(["kernel", "--config", str(cfg), "--N", "6"])
    assert ns.N == 6 and ns.omega == 2.0


def test_config_list_and_bool(tmp_path):
    cfg = tmp_path / "o.cfg"
    cfg.write_text("Ns = 8,16\nimaginary-mass = yes\n")
    _, ns = parse_config(["oracle", "--config", str(cfg)])
    assert ns.Ns == [8, 16] and ns.imaginary_mass is True


@pytest.mark.parametrize("text", ["bogus = 1\n", "N = three\n", "mode = loud\n", "N\n"])
def test_config_rejects(tmp_path, text):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text(text)
    cmd = "oracle" if "mode" in text else "kernel"
    with pytest.raises(UsageError):
        parse_config([cmd, "--config", str(cfg)])
    assert call([cmd, "--config", str(cfg)])[0] == 1


def test_seed_from_env(monkeypatch):
    monkeypatch.setenv("BEABLE_SEED", "42")
    assert parse_config(["kernel"])[0].seed == 42
    assert parse_config(["kernel", "--seed", "3"])[0].seed == 3
    monkeypatch.setenv("BEABLE_SEED", "x")
    assert call(["kernel"])[0] == 1
    monkeypatch.delenv("BEABLE_SEED")
    assert parse_config(["kernel"])[0].seed == 0


def test_seed_changes_bruteforce_draw():
    a = json.loads(call(["oracle", "--mode", "bruteforce", "--points", "9", "--seed", "1", "--format", "json"])[1])
    b = json.loads(call(["oracle", "--mode", "bruteforce", "--points", "9", "--seed", "2", "--format", "json"])[1])
    assert a["metadata"]["xi"] != b["metadata"]["xi"]


@pytest.mark.parametrize("fmt", ["csv", "json"])
def test_determinism_byte_identical(tmp_path, fmt):
    argv = ["oracle", "--mode", "lowfreq", "--Ns", "16,32", "--seeds", "4", "--seed", "9", "--format", fmt]
    p = tmp_path / "out"
    assert run(argv + ["-o", str(p)]) == 0
    first = p.read_bytes()
    assert run(argv + ["-o", str(p)]) == 0
    assert p.read_bytes() == first


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "beable", "kernel", "--N", "2"], capture_output=True, text=True)
    assert r.returncode == 0
    assert r.stdout.startswith("n(1),D(1),Dbar(1),Dbarbar(1)\n")
    r = subprocess.run([sys.executable, "-m", "beable"], capture_output=True, text=True)
    assert r.returncode == 1
