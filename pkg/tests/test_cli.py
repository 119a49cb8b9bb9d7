# SPDX-FileCopyrightText: 2024-2025 ModelCloud.ai
# SPDX-FileCopyrightText: 2024-2025 qubitium@modelcloud.ai
# SPDX-License-Identifier: Apache-2.0
# Contact: qubitium@modelcloud.ai, x.com/qubitium

import csv
import io
import json
import math
import re
from contextlib import redirect_stderr

import pytest

from sdlab.cli import main

ANSI_ESCAPE_RE = re.compile(r"\x1b\[[0-9;?]*[ -/]*[@-~]")


def run(*argv):
    buffer = io.StringIO()
    with redirect_stderr(buffer):
        code = main([str(a) for a in argv])
    return code, ANSI_ESCAPE_RE.sub("", buffer.getvalue())


def read_rows(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


@pytest.fixture(autouse=True)
def _clean_env(monkeypatch):
    monkeypatch.delenv("SDL_THREADS", raising=False)
    monkeypatch.delenv("SDL_EPS", raising=False)


def test_profile_classical_matches_closed_forms(tmp_path):
    out = tmp_path / "classical.csv"
    code, _ = run("profile", "--p", "classical", "--out", out)
    assert code == 0
    summary = json.loads(out.with_suffix(".json").read_text(encoding="utf-8"))
    assert summary["schema"] == 1
    assert summary["p_kind"] == "classical_nehari"
    assert summary["max_abs_dev_F"] < 1e-7
    assert summary["max_abs_dev_G"] < 1e-7
    rows = read_rows(out)
    assert list(rows[0]) == ["x", "u", "du", "F", "dF", "uG", "G", "dG"]
    assert float(rows[0]["x"]) == pytest.approx(-0.999)


def test_profile_pokornyi(tmp_path):
    out = tmp_path / "pokornyi.csv"
    code, _ = run("profile", "--p", "pokornyi", "--out", out)
    assert code == 0
    summary = json.loads(out.with_suffix(".json").read_text(encoding="utf-8"))
    assert summary["max_abs_dev_F"] < 1e-5
    assert summary["max_abs_dev_G"] is None


def test_bad_p_file_is_a_config_error(tmp_path):
    table = tmp_path / "p.txt"
    table.write_text("0.0 2.0\n0.5 -1.0\n", encoding="utf-8")
    code, err = run("profile", "--p-file", table, "--out", tmp_path / "p.csv")
    assert code == 2
    assert "p must be positive" in err


def test_unknown_weight_is_a_config_error(tmp_path):
    code, err = run("profile", "--p", "hyperbolic", "--out", tmp_path / "x.csv")
    assert code == 2
    assert "unknown p kind" in err


def test_two_point_bound_on_extremal_curve(tmp_path):
    out = tmp_path / "t2.json"
    code, _ = run("verify", "--theorem", "2", "--map", "line_F", "--p", "pi2", "--pairs", 50, "--nodes", 401, "--out", out)
    assert code == 0
    doc = json.loads(out.read_text(encoding="utf-8"))
    assert doc["ok"] and doc["hypothesis_ok"]
    assert len(doc["samples"]) == 50
    assert abs(doc["min_margin"]) < 1e-7


def test_koebe_fails_the_criterion():
    code, err = run("verify", "--theorem", "3", "--map", "koebe", "--pairs", 10)
    assert code == 4
    assert "HypothesisFailed" in err


def test_covering_bound_for_gstar(tmp_path):
    out = tmp_path / "t4.json"
    code, _ = run("verify", "--theorem", "4", "--map", "gstar", "--radii", "0.5,0.9", "--resolution", 201, "--out", out)
    assert code == 0
    doc = json.loads(out.read_text(encoding="utf-8"))
    assert doc["theorem"] == "4"
    assert doc["covering_radius_R"] == pytest.approx(math.sqrt(2.0) / 4.0, rel=1e-9)
    assert doc["radii"] == [0.5, 0.9]


def test_verify_needs_a_map():
    code, err = run("verify", "--theorem", "3")
    assert code == 2
    assert "--map" in err


def test_obj_format_belongs_to_mesh():
    code, _ = run("verify", "--theorem", "2", "--map", "tanh", "--format", "obj")
    assert code == 2


def test_argparse_errors_return_usage_code():
    with redirect_stderr(io.StringIO()):
        assert main(["verify"]) == 2


def test_lift_mesh_identity_is_flat(tmp_path):
    out = tmp_path / "identity.obj"
    code, _ = run("lift-mesh", "--map", "identity", "--rings", 3, "--sectors", 8, "--out", out)
    assert code == 0
    lines = out.read_text(encoding="utf-8").splitlines()
    vertices = [line for line in lines if line.startswith("v ")]
    assert len(vertices) == 3 * 8 + 1
    for line in vertices:
        coords = [float(token) for token in line.split()[1:]]
        assert len(coords) == 3 and coords[2] == 0.0
    assert any(line.startswith("f ") for line in lines)
    rows = read_rows(out.with_suffix(".csv"))
    assert len(rows) == 25
    assert all(float(row["W"]) == 0.0 for row in rows)


def test_lift_mesh_enneper_has_nonpositive_curvature(tmp_path):
    out = tmp_path / "enneper.obj"
    code, _ = run("lift-mesh", "--map", "enneper_eps", "--rings", 4, "--sectors", 12, "--radius", 0.8, "--out", out)
    assert code == 0
    vertices = [line.split()[1:] for line in out.read_text(encoding="utf-8").splitlines() if line.startswith("v ")]
    assert len(vertices) == 4 * 12 + 1
    assert all(len(v) == 3 and all(math.isfinite(float(c)) for c in v) for v in vertices)
    rows = read_rows(out.with_suffix(".csv"))
    assert len(rows) == 4 * 12 + 1
    assert all(float(row["K"]) <= 0.0 for row in rows)
    assert all(float(row["criterion_margin"]) >= -1e-9 for row in rows)


def test_reports_are_reproducible_across_worker_counts(tmp_path):
    def body(path):
        return [line for line in path.read_text(encoding="utf-8").splitlines() if '"generated_at"' not in line]

    serial, threaded = tmp_path / "serial.json", tmp_path / "threaded.json"
    args = ("verify", "--theorem", "2", "--map", "tanh", "--pairs", 20, "--nodes", 201, "--seed", 3)
    assert run(*args, "--out", serial)[0] == 0
    assert run(*args, "--workers", 2, "--out", threaded)[0] == 0
    assert body(serial) == body(threaded)
