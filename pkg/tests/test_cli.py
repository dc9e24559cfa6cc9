import json
import subprocess
import sys

import pytest

from ondomset.cli import OK, USAGE, VIOLATION, main


@pytest.fixture
def star_file(tmp_path):
    path = tmp_path / "star.json"
    path.write_text(json.dumps({"parents": [None, 1, 2, 2]}))
    return str(path)


def run_json(capsys, argv):
    code = main(argv)
    return code, json.loads(capsys.readouterr().out)


def test_validate_ok(capsys, star_file):
    code, out = run_json(capsys, ["validate", "--input", star_file])
    assert code == OK and out["ok"]


def test_validate_violation(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("[0, 3, 1]")
    code, out = run_json(capsys, ["validate", "--input", str(bad)])
    assert code == VIOLATION and not out["ok"]


def test_run_ra(capsys, star_file):
    code, out = run_json(capsys, ["run", "--input", star_file, "--alg", "ra"])
    assert code == OK and out["expected_cost"] == "5/2"


def test_run_deterministic(capsys, star_file):
    code, out = run_json(capsys, ["run", "--input", star_file, "--alg", "greedy"])
    assert out["selected"] == [1, 3, 4]


def test_opt_enumerate(capsys, star_file):
    code, out = run_json(capsys, ["opt", "--input", star_file, "--enumerate"])
    assert out["size"] == 1 and out["all_optimal"] == [[2]]


def test_blocks(capsys, star_file):
    code, out = run_json(capsys, ["blocks", "--input", star_file])
    assert code == OK and out["counts"]["b10"] == 1 and out["measured_ratio"] == "5/2"


def test_check_lemmas(capsys, star_file):
    code, out = run_json(capsys, ["check-lemmas", "--input", star_file, "--all-opt"])
    assert code == OK and out["ra_ratio"] == "5/2" and out["membership_table"]["ok"]


def test_normalize(capsys, tmp_path):
    path = tmp_path / "two.json"
    path.write_text("[0, 1]")
    code, out = run_json(capsys, ["normalize", "--input", str(path), "--target", "P3", "--optset", "1"])
    assert code == OK and out["applied"] and out["derived"][0]["parents"] == [0, 1, 1, 1]


def test_normalize_not_applicable(capsys, star_file):
    code, out = run_json(capsys, ["normalize", "--input", star_file, "--target", "p3"])
    assert code == OK and not out["applied"]


def test_adversary_det(capsys):
    code, out = run_json(capsys, ["adversary-det", "--alg", "always-new"])
    assert code == OK and out["certificate"]["ratio"] == "3/1" and out["case_label"] == "2-1"


def test_adversary_det_bad_params(capsys):
    assert main(["adversary-det", "--alg", "a", "--max-length", "10"]) == USAGE


def test_adversary_rand(capsys):
    code, out = run_json(capsys, ["adversary-rand", "--m", "5"])
    assert code == OK and out["evaluation"]["ratio"] == "8/5"


def test_generate(capsys):
    code, out = run_json(capsys, ["generate", "--kind", "star", "--n", "4"])
    assert out == {"parents": [0, 1, 2, 2]}


def test_generate_infeasible(capsys):
    assert main(["generate", "--kind", "degree13-tree", "--n", "5"]) == USAGE


def test_sweep(capsys):
    code, out = run_json(capsys, ["sweep", "--max-n", "5"])
    assert code == OK and out["ok"] and out["rows"][-1]["max_ratio"] == "5/2"


def test_experiment_csv_to_file(tmp_path, capsys):
    target = tmp_path / "report.csv"
    argv = ["experiment", "--count", "5", "--max-n", "12", "--seed", "3", "--format", "csv", "--output", str(target)]
    assert main(argv) == OK
    first = target.read_text()
    assert main(argv) == OK and target.read_text() == first
    assert first.startswith("instance,")


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["run", "--alg", "ra"],
        ["run", "--input", "/nonexistent.json", "--alg", "ra"],
        ["frobnicate"],
        ["sweep", "--max-n", "13"],
        ["experiment", "--kinds", "blob"],
    ],
)
def test_usage_errors(argv, capsys):
    assert main(argv) == USAGE


def test_stdin_and_console_script():
    out = subprocess.run(
        [sys.executable, "-m", "ondomset.cli", "run", "--input", "-", "--alg", "a"],
        input="[0, 1, 2, 3]",
        capture_output=True,
        text=True,
    )
    assert out.returncode == 0 and json.loads(out.stdout)["selected"] == [1, 2, 4]
