import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from pfkit import save_system, three_point_system, two_atom_swap
from pfkit.cli import main


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def system_file(tmp_path):
    space, phi = three_point_system()
    named = {
        "A1": space.set_of(["1"]),
        "A12": space.set_of(["1", "2"]),
        "A13": space.set_of(["1", "3"]),
    }
    path = tmp_path / "three_point.json"
    save_system(path, space, phi, named)
    return str(path)


@pytest.fixture
def swap_file(tmp_path):
    space, phi = two_atom_swap()
    path = tmp_path / "swap.json"
    save_system(path, space, phi)
    return str(path)


def test_classify(runner, system_file):
    result = runner.invoke(main, ["classify", system_file, "--set", "A1", "--n-max", "2"])
    assert result.exit_code == 0
    doc = json.loads(result.output)
    assert doc["ergodic"] is False
    assert doc["powers_converge"] is True
    assert doc["defects"] == ["1/4", "1/4", "1/4"]
    assert doc["witness"] == {"D": ["1"], "c": "1"}
    assert len(doc["input_digest"]) == 64


def test_classify_default_target(runner, system_file):
    result = runner.invoke(main, ["classify", system_file])
    assert result.exit_code == 0
    assert json.loads(result.output)["defects"][0] == "1/4"


def test_orbit_csv(runner, system_file):
    result = runner.invoke(main, ["orbit", system_file, "--set", "A12"])
    assert result.exit_code == 0
    assert result.output.splitlines() == [
        "n,set,measure,d_to_limit",
        "0,1|2,1/2,1/2",
        "1,1|3,1,0",
        "2,1|3,1,0",
    ]


def test_orbit_labels_as_set_spec(runner, system_file):
    result = runner.invoke(main, ["orbit", system_file, "--set", "1,2", "--steps", "1"])
    assert result.exit_code == 0
    assert "0,1|2,1/2,1/2" in result.output


def test_orbit_backward(runner, system_file):
    result = runner.invoke(
        main, ["orbit", system_file, "--set", "3", "--direction", "backward"]
    )
    assert result.exit_code == 0
    lines = result.output.splitlines()
    assert lines[1] == "0,3,1/2,0"
    assert lines[2] == "1,2|3,1/2,0"


def test_limit_json(runner, system_file):
    result = runner.invoke(main, ["limit", system_file])
    assert result.exit_code == 0
    doc = json.loads(result.output)
    assert doc["converges"] is True
    assert doc["limit"] == [["1", "0"], ["0", "1"]]


def test_limit_csv(runner, system_file):
    result = runner.invoke(main, ["limit", system_file, "--format", "csv"])
    assert result.exit_code == 0
    assert result.output.splitlines() == ["i,j,p", "0,0,1", "1,1,1"]


def test_limit_csv_without_limit_is_an_error(runner, swap_file):
    result = runner.invoke(main, ["limit", swap_file, "--format", "csv"])
    assert result.exit_code == 2
    doc = json.loads(result.output)
    assert doc["error"]["type"] == "ParseError"


def test_mixing_profile_kinds(runner, system_file):
    base = ["mixing-profile", system_file, "--set", "A1", "--n-max", "1"]
    for extra, rows in [
        ([], ["0,1/4", "1,1/4"]),
        (["--kind", "trace", "--trace", "3"], ["0,1/4", "1,1/4"]),
        (["--kind", "lower", "--trace", "3", "--c", "1/2"], ["0,-1/4", "1,-1/4"]),
        (["--kind", "image"], ["0,1/4", "1,1/4"]),
    ]:
        result = runner.invoke(main, base + extra)
        assert result.exit_code == 0, result.output
        assert result.output.splitlines() == ["n,defect"] + rows


def test_mixing_profile_trace_required(runner, system_file):
    result = runner.invoke(
        main, ["mixing-profile", system_file, "--set", "A1", "--kind", "trace"]
    )
    assert result.exit_code == 2
    assert json.loads(result.output)["error"]["type"] == "ParseError"


def test_unknown_set_spec(runner, system_file):
    result = runner.invoke(main, ["classify", system_file, "--set", "nope"])
    assert result.exit_code == 2
    assert json.loads(result.output)["error"]["type"] == "ParseError"


def test_invalid_system_file(runner, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"atoms": ["a"], "masses": ["1"], "map": ["z"]}))
    result = runner.invoke(main, ["classify", str(bad)])
    assert result.exit_code == 2
    assert json.loads(result.output)["error"]["type"] == "ParseError"


def test_non_measure_preserving_file(runner, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(
        json.dumps(
            {"atoms": ["a", "b"], "masses": ["1/2", "1/2"], "map": ["a", "a"]}
        )
    )
    result = runner.invoke(main, ["classify", str(bad)])
    assert result.exit_code == 2
    assert json.loads(result.output)["error"]["type"] == "NotMeasurePreservingError"


def test_dyadic_profile(runner):
    result = runner.invoke(main, ["dyadic", "--set", "0:1/4"])
    assert result.exit_code == 0
    assert result.output.splitlines() == [
        "n,defect",
        "0,3/16",
        "1,1/8",
        "2,0",
        "3,0",
        "4,0",
    ]


def test_dyadic_image_profile(runner):
    result = runner.invoke(main, ["dyadic", "--set", "0:1/4", "--kind", "image", "--n-max", "2"])
    assert result.exit_code == 0
    assert result.output.splitlines() == ["n,defect", "0,3/4", "1,1/2", "2,0"]


def test_dyadic_rejects_non_dyadic(runner):
    result = runner.invoke(main, ["dyadic", "--set", "0:1/3"])
    assert result.exit_code == 2
    assert json.loads(result.output)["error"]["type"] == "DyadicValueError"


def test_ulam_verdicts(runner):
    result = runner.invoke(
        main,
        ["ulam", "--map", "doubling", "--bins", "16", "--target-bins", "0:8", "--n-max", "8"],
    )
    assert result.exit_code == 0
    doc = json.loads(result.output)
    assert doc["verdict"] == "exact-like"

    result = runner.invoke(
        main,
        [
            "ulam",
            "--map",
            "rotation",
            "--bins",
            "16",
            "--alpha",
            "1/4",
            "--target-bins",
            "0:8",
        ],
    )
    assert json.loads(result.output)["verdict"] == "non-mixing"


def test_ulam_matrix_export(runner, tmp_path):
    out = tmp_path / "matrix.csv"
    result = runner.invoke(
        main,
        ["ulam", "--map", "doubling", "--bins", "4", "--matrix-out", str(out)],
    )
    assert result.exit_code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "i,j,p"
    assert lines[1] == "0,0,0.5"


def test_ulam_bad_bins(runner):
    result = runner.invoke(main, ["ulam", "--map", "doubling", "--bins", "1"])
    assert result.exit_code == 2
    assert json.loads(result.output)["error"]["type"] == "BadBinCountError"


def test_audit_command(runner):
    result = runner.invoke(main, ["audit", "--theorem", "main", "--count", "20", "--seed", "3"])
    assert result.exit_code == 0
    doc = json.loads(result.output)
    assert doc["theorem"] == "main"
    assert doc["seed"] == 3
    assert doc["count"] == 20
    assert doc["failures"] == []
    assert "elapsed_ms" in doc


def test_audit_seed_from_environment(runner):
    result = runner.invoke(
        main,
        ["audit", "--theorem", "main", "--count", "5"],
        env={"PFKIT_SEED": "77"},
    )
    assert result.exit_code == 0
    assert json.loads(result.output)["seed"] == 77


def test_audit_out_file(runner, tmp_path):
    out = tmp_path / "report.json"
    result = runner.invoke(
        main,
        ["audit", "--theorem", "thm22", "--count", "10", "--seed", "1", "--out", str(out)],
    )
    assert result.exit_code == 0
    assert json.loads(out.read_text())["theorem"] == "thm22"


def test_orbit_out_file(runner, system_file, tmp_path):
    out = tmp_path / "orbit.csv"
    result = runner.invoke(
        main, ["orbit", system_file, "--set", "A12", "--out", str(out)]
    )
    assert result.exit_code == 0
    assert out.read_text().startswith("n,set,measure,d_to_limit")
