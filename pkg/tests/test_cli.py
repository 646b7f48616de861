import csv
import json
import subprocess
import sys

import pytest

from arithokounkov.cli import EXIT_BUDGET, EXIT_CONFIG, EXIT_OK, main


def run(tmp_path, *argv, name="out.json"):
    out = tmp_path / name
    code = main([*argv, "--json", str(out)])
    return code, (json.loads(out.read_text()) if out.exists() else None)


def test_verify_filtration_empty(tmp_path):
    code, rep = run(tmp_path, "verify-filtration", "--field", "Q", "--instances", "0")
    assert code == EXIT_OK
    rows = list(csv.reader(open(tmp_path / "out.csv")))
    assert len(rows) == 1  # header only
    assert rep["summaries"][0]["completed"] == 0


def test_verify_filtration_gaussian_rows(tmp_path):
    code, rep = run(tmp_path, "verify-filtration", "--field", "Q(sqrt(-1))", "--instances", "8",
                    "--seed", "42")
    assert code == EXIT_OK
    rows = list(csv.DictReader(open(tmp_path / "out.csv")))
    assert len(rows) == 8 and {r["kappa"] for r in rows} == {"2"}
    assert rep["max_minimal_C"] >= 0 and rep["status"] == "ok"


def test_verify_filtration_deterministic_across_workers(tmp_path):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    args = ["verify-filtration", "--field", "Q", "--instances", "6", "--seed", "5", "--csv",
            str(tmp_path / "rows.csv")]
    assert main([*args, "--workers", "1", "--json", str(a)]) == EXIT_OK
    first_csv = (tmp_path / "rows.csv").read_bytes()
    assert main([*args, "--workers", "2", "--json", str(b)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()
    assert (tmp_path / "rows.csv").read_bytes() == first_csv


@pytest.mark.parametrize("argv", [
    ["verify-filtration", "--field", "Q(sqrt(4))"],
    ["verify-filtration", "--instances", "-1"],
    ["body", "--p", "4"],
    ["body", "--bundle", "cone:1"],
    ["body", "--kmax", "2"],
    ["bc-compare", "--grid", "2"],
])
def test_config_errors(tmp_path, argv):
    assert main([*argv, "--json", str(tmp_path / "x.json")]) == EXIT_CONFIG


def test_config_file_overrides_and_rejects_unknown(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"instances": 0, "field": ["Q"]}))
    code, rep = run(tmp_path, "verify-filtration", "--config", str(cfg), "--instances", "50")
    assert code == EXIT_OK and rep["config"]["instances"] == 0
    cfg.write_text(json.dumps({"colour": "red"}))
    assert main(["verify-filtration", "--config", str(cfg)]) == EXIT_CONFIG


def test_body_unit_box(tmp_path):
    svg = tmp_path / "hull.svg"
    code, rep = run(tmp_path, "body", "--p", "2", "--point", "0", "--bundle", "box:1,1",
                    "--kmax", "6", "--svg", str(svg))
    assert code == EXIT_OK and rep["big"]
    assert set(rep["volumes"]) == {"area_log_p", "count_ratio_log_p", "half_volume"}
    assert all(v > 0 for v in rep["volumes"].values())
    assert svg.read_text().startswith("<svg")
    code3, rep3 = run(tmp_path, "body", "--p", "3", "--kmax", "6", name="p3.json")
    assert code3 == EXIT_OK
    assert rep3["identity"]["hull"] != rep["identity"]["hull"]
    assert rep3["volumes"]["half_volume"] == rep["volumes"]["half_volume"]


def test_body_not_big(tmp_path):
    code, rep = run(tmp_path, "body", "--bundle", "box:1/2,1/2", "--kmax", "4")
    assert code == EXIT_OK and rep["big"] is False
    assert all(v == 0 for v in rep["volumes"].values())


def test_body_budget_exit(tmp_path):
    code, rep = run(tmp_path, "body", "--bundle", "fs:-1", "--kmax", "4", "--budget", "1000")
    assert code == EXIT_BUDGET


def test_bc_compare(tmp_path):
    code, rep = run(tmp_path, "bc-compare", "--k", "6", "--grid", "16")
    assert code == EXIT_OK
    s = rep["summary"]
    assert not s["empty"] and s["archimedean_volume"] > 0 and s["finite_volume"] > 0
    assert s["gap"] == pytest.approx(abs(s["archimedean_volume"] - s["finite_volume"]))
    code2, rep2 = run(tmp_path, "bc-compare", "--k", "6", "--grid", "32", name="g32.json")
    assert abs(rep2["summary"]["archimedean_volume"] - s["archimedean_volume"]) <= s["refinement_bound"]


def test_bc_compare_empty(tmp_path):
    code, rep = run(tmp_path, "bc-compare", "--bundle", "box:1/2,1/2", "--k", "4")
    assert code == EXIT_OK and rep["summary"]["empty"]


def test_console_entry_point(tmp_path):
    out = subprocess.run([sys.executable, "-m", "arithokounkov.cli", "--version"],
                         capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout.strip()
