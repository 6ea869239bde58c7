import json
import math
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from su11wigner.io import (
    SpecError,
    field_to_gridfile,
    format_float,
    format_gridfile,
    parse_complex,
    parse_gridfile,
    spec_from_json,
    spec_to_json,
)
from su11wigner.states import build_tmsv, decompose
from su11wigner.wigner import GridSpec, wigner_grid


def run_cli(*args, cwd=None):
    return subprocess.run([sys.executable, "-m", "su11wigner", *args], capture_output=True, text=True, cwd=cwd)


def write_json(path, doc):
    path.write_text(json.dumps(doc))
    return str(path)


class TestSpecs:
    @pytest.mark.parametrize(
        "doc",
        [
            {"variant": "tmsv", "params": {"xi": [0.485, 0]}, "cutoff": 60},
            {"variant": "tmsv", "params": {"xi": 0.2}},
            {"variant": "coherent_times_squeezed", "params": {"alpha": 1, "xi": [4, 0.5]}, "cutoff": "auto"},
            {"variant": "coherent_times_squeezed", "params": {"alpha": [0, 1], "xi": 0.1}, "cutoff": [5, 9]},
            {"variant": "su11_coherent", "params": {"k": "3/2", "xi": [0.1, -0.2]}},
            {"variant": "raw_amplitudes", "params": {"entries": [[0, 0, 0.6, 0], [1, 2, 0, 0.8]]}},
            {"variant": "raw_amplitudes", "params": {"entries": []}},
        ],
    )
    def test_round_trip(self, doc):
        spec = spec_from_json(doc)
        again = spec_from_json(spec_to_json(spec))
        assert spec_to_json(again) == spec_to_json(spec)

    @pytest.mark.parametrize(
        "doc",
        [
            {"variant": "tmsv", "params": {"xi": [1.2, 0]}},
            {"variant": "tmsv", "params": {}},
            {"variant": "tmsv", "params": {"xi": 0.1, "alpha": 1}},
            {"variant": "tmsv", "params": {"xi": 0.1}, "cutoff": "auto"},
            {"variant": "squeezed", "params": {}},
            {"variant": "su11_coherent", "params": {"k": "1/3", "xi": 0.1}},
            {"variant": "su11_coherent", "params": {"k": "0", "xi": 0.1}},
            {"variant": "raw_amplitudes", "params": {"entries": [[0, -1, 1, 0]]}},
            {"params": {}},
        ],
    )
    def test_rejects(self, doc):
        with pytest.raises(SpecError):
            spec_from_json(doc)

    def test_parse_complex(self):
        assert parse_complex([1, 2]) == 1 + 2j and parse_complex(0.5) == 0.5


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_float_format_round_trips(x):
    assert float(format_float(x)) == x


def test_gridfile_round_trip_is_byte_equal():
    f = wigner_grid(decompose(build_tmsv(0.3, cutoff=20)), GridSpec.polar(3, 5, 1.0))
    text = format_gridfile(field_to_gridfile(f, {"note": "x"}))
    parsed = parse_gridfile(text)
    assert format_gridfile(parsed) == text
    assert parsed.header_dict()["convention"] == "literal"
    assert GridSpec.from_dict(parsed.header_dict()["grid"]) == f.grid
    np.testing.assert_array_equal(parsed.data[:, 4] + 1j * parsed.data[:, 5], f.values)


def test_gridfile_parse_errors():
    with pytest.raises(ValueError):
        parse_gridfile("# a: 1\n")
    with pytest.raises(ValueError):
        parse_gridfile("a,b\n1\n")
    with pytest.raises(ValueError):
        parse_gridfile("#nokey\na\n1\n")


class TestCli:
    def test_dfunc_delta_pattern(self):
        r = run_cli("dfunc", "--k", "1/2", "--tau", "0", "--count", "4")
        assert r.returncode == 0
        rows = [line.split(",") for line in r.stdout.strip().splitlines()[1:]]
        assert len(rows) == 16
        for tk, tm, tmp, tau, d in rows:
            assert float(d) == (1.0 if tm == tmp else 0.0)

    def test_dfunc_closed_form(self):
        r = run_cli("dfunc", "--k", "1/2", "--mu", "1/2", "--mu-prime", "1/2", "--tau", "1.0")
        assert r.returncode == 0
        assert float(r.stdout.splitlines()[1].split(",")[-1]) == pytest.approx(1 / math.cosh(0.5), rel=1e-15)

    @pytest.mark.parametrize("args", [("--k", "1/3", "--tau", "0"), ("--k", "1", "--mu", "3/2", "--tau", "1"), ("--k", "1", "--tau", "-1")])
    def test_dfunc_usage_errors(self, args):
        r = run_cli("dfunc", *args)
        assert r.returncode == 2 and "error" in r.stderr

    def test_wigner_tmsv_peak_and_determinism(self, tmp_path):
        spec = write_json(tmp_path / "s.json", {"variant": "tmsv", "params": {"xi": [0.485, 0]}, "cutoff": 60})
        out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
        assert run_cli("wigner", spec, "--n", "201", "--out", str(out1), "--no-timestamp").returncode == 0
        assert run_cli("wigner", spec, "--n", "201", "--out", str(out2), "--no-timestamp").returncode == 0
        text = out1.read_text()
        assert text == out2.read_text()
        gf = parse_gridfile(text)
        hdr = gf.header_dict()
        assert hdr["convention"] == "per_irrep_normalized"
        assert hdr["state"]["cutoffs"] == [60, 60] and "boundary_mass" in hdr["state"]
        best = gf.data[np.argmax(gf.data[:, 6])]
        cell = 2 * 0.99 / 200
        assert abs(best[0] - 0.485) <= cell and abs(best[1]) <= cell
        assert format_gridfile(gf) == text

    def test_timestamp_header(self, tmp_path):
        spec = write_json(tmp_path / "s.json", {"variant": "tmsv", "params": {"xi": 0.1}})
        out = tmp_path / "a.csv"
        assert run_cli("wigner", spec, "--n", "5", "--out", str(out)).returncode == 0
        assert "created" in parse_gridfile(out.read_text()).header_dict()

    def test_wigner_empty_state(self, tmp_path):
        spec = write_json(tmp_path / "s.json", {"variant": "raw_amplitudes", "params": {"entries": []}})
        out = tmp_path / "e.csv"
        assert run_cli("wigner", spec, "--grid", "polar", "--n-tau", "4", "--n-chi", "6", "--out", str(out)).returncode == 0
        data = parse_gridfile(out.read_text()).data
        assert data.shape == (24, 7) and not data[:, 4:].any()

    @pytest.mark.parametrize(
        "doc", [{"variant": "tmsv", "params": {"xi": [1.5, 0]}}, {"variant": "tmsv", "params": {"z": 0}}]
    )
    def test_wigner_bad_spec(self, tmp_path, doc):
        spec = write_json(tmp_path / "s.json", doc)
        r = run_cli("wigner", spec, "--out", str(tmp_path / "x.csv"))
        assert r.returncode == 2 and "error" in r.stderr

    def test_wigner_missing_file(self, tmp_path):
        r = run_cli("wigner", str(tmp_path / "nope.json"), "--out", str(tmp_path / "x.csv"))
        assert r.returncode == 2

    def test_state_summary(self, tmp_path):
        spec = write_json(tmp_path / "s.json", {"variant": "raw_amplitudes", "params": {"entries": [[0, 0, 0.6, 0], [2, 1, 0, 0.8]]}})
        r = run_cli("state", spec)
        doc = json.loads(r.stdout)
        assert [b["k"] for b in doc["blocks"]] == ["1/2", "1"]
        assert doc["norm_squared"] == pytest.approx(1.0)

    def test_interferometer_routes(self, tmp_path):
        spec = write_json(tmp_path / "s.json", {"variant": "tmsv", "params": {"xi": 0.5}})
        common = ["--gain", "0.5", "--phase", repr(math.pi / 2), "--n", "41", "--no-timestamp", "--convention", "literal"]
        files = {}
        for route in ("covariant", "direct"):
            fi, fo = tmp_path / f"{route}_in.csv", tmp_path / f"{route}_out.csv"
            r = run_cli("interferometer", spec, *common, "--route", route, "--out-input", str(fi), "--out-output", str(fo))
            assert r.returncode == 0, r.stderr
            files[route] = (parse_gridfile(fi.read_text()), parse_gridfile(fo.read_text()))
        cov, direct = files["covariant"][1], files["direct"][1]
        assert cov.header_dict()["interferometer"]["gain"] == 0.5
        assert np.abs(cov.data[:, 4:6] - direct.data[:, 4:6]).max() <= 1e-6

    def test_interferometer_zero_phase(self, tmp_path):
        spec = write_json(tmp_path / "s.json", {"variant": "su11_coherent", "params": {"k": 1, "xi": 0.3}})
        cfg = write_json(tmp_path / "c.json", {"gain": 0.8, "pump_phase": 0.3, "total_phase": 0})
        fi, fo = tmp_path / "i.csv", tmp_path / "o.csv"
        r = run_cli("interferometer", spec, "--config", cfg, "--n", "21", "--out-input", str(fi), "--out-output", str(fo))
        assert r.returncode == 0, r.stderr
        a, b = parse_gridfile(fi.read_text()).data, parse_gridfile(fo.read_text()).data
        assert np.array_equal(a[:, 4:], b[:, 4:])

    def test_interferometer_needs_gain(self, tmp_path):
        spec = write_json(tmp_path / "s.json", {"variant": "tmsv", "params": {"xi": 0.5}})
        r = run_cli("interferometer", spec, "--out-input", "a", "--out-output", "b", cwd=tmp_path)
        assert r.returncode == 2

    def test_verify_dfunc(self, tmp_path):
        out = tmp_path / "r.json"
        r = run_cli("verify", "--suite", "dfunc", "--out", str(out))
        assert r.returncode == 0
        rep = json.loads(out.read_text())
        s = rep["suites"]["dfunc"]
        assert rep["passed"] and s["max_residual"] <= 1e-8 and s["gate"]["passed"]

    def test_verify_wigner(self):
        r = run_cli("verify", "--suite", "wigner")
        rep = json.loads(r.stdout)
        assert r.returncode == 0 and rep["suites"]["wigner"]["max_residual"] <= 1e-6

    def test_verify_unknown_suite(self):
        r = run_cli("verify", "--suite", "bogus")
        assert r.returncode == 2 and "unknown suite" in r.stderr

    def test_no_command(self):
        assert run_cli().returncode == 2


def test_verify_breach_exits_one(tmp_path, monkeypatch):
    from su11wigner import cli, verify

    monkeypatch.setitem(verify.TOLERANCES, "dfunc", 0.0)
    out = tmp_path / "r.json"
    assert cli.main(["verify", "--suite", "dfunc", "--out", str(out)]) == 1
    rep = json.loads(out.read_text())
    assert not rep["passed"] and rep["suites"]["dfunc"]["failing_case"]["k"]
