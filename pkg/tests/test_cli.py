"""CLI: exit codes, output schemas, determinism, bundled fixtures, and
config handling."""

import json
import os
import subprocess
import sys

import polybubble
from polybubble.cli import main

FIXTURES = os.path.join(os.path.dirname(polybubble.__file__), "fixtures")


def run_cli(args, tmp_path, name="runs"):
    out = str(tmp_path / name)
    code = main(["--out", out] + args)
    return code, out


def test_bubble_check_single_pair(tmp_path):
    code, out = run_cli(["bubble-check", "--n", "7", "--k", "1"], tmp_path)
    assert code == 0
    rep = json.loads(open(os.path.join(out, "bubble-check",
                                       "bubble_check.json")).read())
    assert rep["cases"][0]["symbolic_pass"]
    assert rep["cases"][0]["numeric_residual"] < 1e-9
    assert rep["failures"] == []


def test_bubble_check_invalid_pair_usage_error(tmp_path):
    code, _ = run_cli(["bubble-check", "--n", "2", "--k", "1"], tmp_path)
    assert code == 2


def test_no_command_is_usage_error(capsys):
    assert main([]) == 2


def test_cayley_green_small(tmp_path):
    code, out = run_cli(["cayley-green", "--n", "3", "--k", "1",
                         "--pairs", "20"], tmp_path)
    assert code == 0
    rep = json.loads(open(os.path.join(out, "cayley-green",
                                       "cayley_green.json")).read())
    assert rep["distance_identity_max_residual"] < 1e-12
    assert rep["green_conjugation_max_residual"] < 1e-10
    assert all(r["passed"] for r in rep["norm_invariance"])


def test_cayley_green_zero_pairs_usage(tmp_path):
    code, _ = run_cli(["cayley-green", "--n", "3", "--k", "1",
                       "--pairs", "0"], tmp_path)
    assert code == 2


def test_tree_fixture_tower(tmp_path):
    code, out = run_cli(["tree", os.path.join(FIXTURES, "tower.json")],
                        tmp_path)
    assert code == 0
    inf = json.loads(open(os.path.join(out, "tree", "influence.json")).read())
    assert inf["interacting"]["0"] == [1]
    csv_text = open(os.path.join(out, "tree", "tree_ratios.csv")).read()
    assert csv_text.startswith("kind,")
    assert "interaction" in csv_text


def test_tree_fixture_separated_has_no_interacting(tmp_path):
    code, out = run_cli(["tree", os.path.join(FIXTURES, "separated.json")],
                        tmp_path)
    assert code == 0
    inf = json.loads(open(os.path.join(out, "tree", "influence.json")).read())
    assert inf["interacting"]["0"] == [] and inf["interacting"]["1"] == []


def test_tree_malformed_config(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not valid json")
    code, _ = run_cli(["tree", str(bad)], tmp_path)
    assert code == 2
    code2, _ = run_cli(["tree", str(tmp_path / "missing.json")], tmp_path)
    assert code2 == 2


def test_pohozaev_manufactured_suite(tmp_path):
    code, out = run_cli(["pohozaev", "--k", "2", "--n", "5"], tmp_path)
    assert code == 0
    rep = json.loads(open(os.path.join(out, "pohozaev",
                                       "pohozaev_manufactured.json")).read())
    assert all(r["residual_rel"] < 1e-6 for r in rep)


def test_pohozaev_unknown_suite(tmp_path):
    code, _ = run_cli(["pohozaev", "--suite", "nope"], tmp_path)
    assert code == 2


def test_solve_and_determinism(tmp_path):
    args = ["solve", "--n", "7", "--k", "1", "--p", "0",
            "--mu-grid", "-0.5", "-0.25"]
    code1, out1 = run_cli(args, tmp_path, "runA")
    code2, out2 = run_cli(args, tmp_path, "runB")
    assert code1 == 0 and code2 == 0
    csv1 = open(os.path.join(out1, "solve", "branch.csv")).read()
    csv2 = open(os.path.join(out2, "solve", "branch.csv")).read()
    assert csv1 == csv2  # byte-identical branch output
    man = json.loads(open(os.path.join(out1, "solve",
                                       "solve_manifest.json")).read())
    assert man["flag"] == "complete"
    lines = csv1.splitlines()
    assert lines[0] == "mu_param,sup_norm,energy,mu_fit,fit_residual,poho_term"
    sups = [float(l.split(",")[1]) for l in lines[1:]]
    assert sups[1] > sups[0]


def test_solve_empty_grid_usage(tmp_path):
    code, _ = run_cli(["solve", "--mu-grid"], tmp_path)
    assert code == 2


def test_config_file_and_flag_override(tmp_path):
    cfgfile = tmp_path / "cfg.json"
    cfgfile.write_text(json.dumps({"n": 7, "k": 1}))
    out = str(tmp_path / "cfgd")
    code = main(["--config", str(cfgfile), "--out", out, "bubble-check"])
    assert code == 0
    man = json.loads(open(os.path.join(out, "bubble-check",
                                       "manifest.json")).read())
    assert man["params"]["n"] == 7 and "timestamp" in man


def test_console_entry_point(tmp_path):
    """python -m polybubble.cli works as a process."""
    proc = subprocess.run(
        [sys.executable, "-m", "polybubble.cli", "--out",
         str(tmp_path / "proc"), "bubble-check", "--n", "5", "--k", "2"],
        capture_output=True, text=True)
    assert proc.returncode == 0
