import csv
import io
import json
import math
import subprocess
import sys
from pathlib import Path

import jsonschema
import pytest

from casimir_stress.analytic import EdgeLaw, near_edge_stress
from casimir_stress.cli import main

ROOT = Path(__file__).resolve().parents[1]
CONFIGS = ROOT / "configs"
SCHEMA = json.loads((ROOT / "docs" / "stress_output_schema.json").read_text())
GOLDEN = ROOT / "src" / "casimir_stress" / "data" / "bessel_golden.csv"


def _run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def _parse_csv(text):
    lines = text.split("\r\n")
    meta = {}
    body = []
    for line in lines:
        if line.startswith("# "):
            key, val = line[2:].split(": ", 1)
            meta[key] = json.loads(val)
        elif line:
            body.append(line)
    rows = list(csv.reader(io.StringIO("\n".join(body))))
    return meta, rows[0], rows[1:]


def test_stress_csv(capsys):
    code, out, _ = _run(capsys, "stress", "--profile", CONFIGS / "soft_wall.json", "--z", -0.9, -0.8, "--workers", 1)
    assert code == 0
    assert "\r\n" in out and "\n" not in out.replace("\r\n", "")
    meta, header, rows = _parse_csv(out)
    assert header == ["z", "sigma_zz", "err", "converged"]
    assert [float(r[0]) for r in rows] == [-0.9, -0.8]
    assert all(r[3] == "true" for r in rows)
    assert float(rows[0][1]) > float(rows[1][1]) > 0
    assert meta["quadrature"]["rtol"] == 1e-6
    assert "hbar" in meta["units"]


def test_stress_json_matches_schema(tmp_path, capsys):
    out = tmp_path / "s.json"
    code, _, _ = _run(capsys, "stress", "--profile", CONFIGS / "fig2.json", "--z", 0.2, 0.5, "--workers", 1, "--out", out)
    assert code == 0
    doc = json.loads(out.read_text())
    jsonschema.validate(doc, SCHEMA)
    assert [r["z"] for r in doc["rows"]] == [0.2, 0.5]


def test_grid_from_range(capsys):
    code, out, _ = _run(
        capsys, "stress", "--profile", CONFIGS / "uniform.json", "--zmin", -0.5, "--zmax", 0.5, "--points", 5, "--workers", 1
    )
    assert code == 0
    _, _, rows = _parse_csv(out)
    assert len(rows) == 5
    assert all(float(r[1]) == 0.0 for r in rows)


def test_not_converged_exit_code(capsys):
    code, out, err = _run(
        capsys, "stress", "--profile", CONFIGS / "fig2.json", "--z", 0.3,
        "--rtol", 1e-14, "--max-evaluations", 100, "--workers", 1,
    )
    assert code == 2
    assert "did not converge" in err
    assert _parse_csv(out)[2][0][3] == "false"


@pytest.mark.parametrize(
    "argv",
    [
        ["stress", "--profile", "no_such_file.json", "--z", "0.1"],
        ["stress", "--profile", str(CONFIGS / "soft_wall.json"), "--z", "-1.0", "--workers", "1"],
        ["stress", "--profile", str(CONFIGS / "soft_wall.json"), "--z", "0.5", "--workers", "1"],
        ["stress", "--profile", str(CONFIGS / "soft_wall.json"), "--z", "-0.5", "--rtol", "0"],
        ["edge-law", "--a", "0"],
        ["edge-law", "--a", "0.1", "--n0", "0.5"],
    ],
    ids=["missing", "on-edge", "beyond-pole", "bad-rtol", "zero-a", "bad-n0"],
)
def test_error_exit_code(capsys, argv):
    code, _, err = _run(capsys, *argv)
    assert code == 1
    assert err.startswith("error:")


def test_bad_profile_reports_error(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"segments": [{"kind": "uniform", "zmin": 0.0, "zmax": -1.0, "params": {"eps": 1.0}}]}))
    code, _, err = _run(capsys, "stress", "--profile", bad, "--z", 0.0)
    assert code == 1 and err.startswith("error:")


def test_edge_law_values(capsys):
    code, out, _ = _run(capsys, "edge-law", "--a", 0.1, 1.0, "--b", 2.0, "--n0", 1.5)
    assert code == 0
    _, header, rows = _parse_csv(out)
    assert header == ["a", "sigma_zz"]
    for (a, s) in rows:
        assert float(s) == near_edge_stress(EdgeLaw(float(a), 2.0, 1.5))
    assert float(rows[0][1]) == pytest.approx(float(rows[1][1]) * 100, rel=1e-14)


def test_edge_law_unit_value(capsys):
    _, out, _ = _run(capsys, "edge-law", "--a", 1.0, "--format", "json")
    doc = json.loads(out)
    assert doc["rows"][0]["sigma_zz"] == pytest.approx(23 / (960 * math.pi**2), rel=1e-15)


def test_compare_soft_wall(capsys):
    code, out, err = _run(
        capsys, "compare", "--profile", CONFIGS / "soft_wall.json",
        "--z", -0.98, -0.95, -0.9, -0.5, "--workers", 1, "--format", "json",
    )
    assert code == 0
    doc = json.loads(out)
    (edge,) = doc["edges"]
    assert edge["z_edge"] == -1.0
    lo, hi = edge["window_a"]
    assert lo == pytest.approx(0.02) and hi >= 0.05
    assert "edge z=-1" in err


def test_compare_refuses_profile_without_edges(capsys):
    code, _, err = _run(capsys, "compare", "--profile", CONFIGS / "uniform.json", "--z", 0.0)
    assert code == 1
    assert "no edges" in err


@pytest.fixture(scope="module")
def validate_report(tmp_path_factory):
    out = tmp_path_factory.mktemp("v") / "report.json"
    code = main(["validate", "--out", str(out)])
    return code, json.loads(out.read_text())


def test_validate_passes(validate_report):
    code, doc = validate_report
    assert code == 0 and doc["passed"]
    names = {c["name"] for c in doc["checks"]}
    assert {"bessel_golden", "bessel_wronskian", "mirror_lifshitz", "uniform_nullity"} <= names


def test_validate_detects_perturbed_golden(tmp_path, capsys):
    lines = GOLDEN.read_text().splitlines()
    nu, x, i_val, k_val = lines[3].split(",")
    lines[3] = ",".join((nu, x, repr(float(i_val) * (1 + 1e-6)), k_val))
    bad = tmp_path / "golden.csv"
    bad.write_text("\n".join(lines) + "\n")
    code, out, _ = _run(capsys, "validate", "--golden", bad)
    assert code == 1
    failed = [c["name"] for c in json.loads(out)["checks"] if not c["passed"]]
    assert failed == ["bessel_golden"]


def test_workers_env(monkeypatch, capsys):
    argv = ["stress", "--profile", CONFIGS / "fig2.json", "--z", 0.1, 0.4, 0.7]
    monkeypatch.setenv("CASIMIR_WORKERS", "2")
    code2, out2, _ = _run(capsys, *argv)
    monkeypatch.setenv("CASIMIR_WORKERS", "1")
    code1, out1, _ = _run(capsys, *argv)
    assert code1 == code2 == 0
    assert out1 == out2


def test_bad_workers_env(monkeypatch, capsys):
    monkeypatch.setenv("CASIMIR_WORKERS", "many")
    code, _, err = _run(capsys, "stress", "--profile", CONFIGS / "soft_wall.json", "--z", -0.5)
    assert code == 1 and "CASIMIR_WORKERS" in err


def test_console_script_byte_identical(tmp_path):
    cmd = [sys.executable, "-m", "casimir_stress.cli", "stress", "--profile", str(CONFIGS / "soft_wall.json"),
           "--z", "-0.9", "-0.7", "--workers", "1"]
    outs = []
    for j in range(2):
        path = tmp_path / f"run{j}.csv"
        subprocess.run(cmd + ["--out", str(path)], check=True)
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]
