"""Command-line front end: flags, exit codes, and byte-stable output."""

import json
from pathlib import Path

import pytest

from timac.cli import main
from timac.topology import StateDistribution

DISTS = Path(__file__).resolve().parent.parent / "dists"


def run_cli(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_states_table(capsys):
    code, out, err = run_cli(capsys, ["states"])
    assert code == 0 and err == ""
    lines = out.splitlines()
    assert len(lines) == 28  # header + 27 states
    assert lines[0].startswith("state")
    assert any(line.startswith("H1") and "Tx2" in line for line in lines)


def test_states_single_and_dot(capsys):
    code, out, _ = run_cli(capsys, ["states", "--name", "H1"])
    assert code == 0 and len(out.splitlines()) == 2

    code, out, _ = run_cli(capsys, ["states", "--name", "H1", "--format", "dot"])
    assert code == 0
    assert out.startswith("digraph H1") and out.count("dashed") == 3

    code, out, _ = run_cli(capsys, ["states", "--format", "json"])
    assert code == 0
    assert json.loads(out)["states"]["H1"] == [2, 3, 1]


def test_states_unknown_name_exits_1(capsys):
    code, out, err = run_cli(capsys, ["states", "--name", "Z9"])
    assert code == 1 and "Z9" in err
    code, out, err = run_cli(capsys, ["states", "--format", "dot"])
    assert code == 1  # dot requires --name


def test_simulate_headline_json(capsys):
    code, out, err = run_cli(
        capsys,
        ["simulate", "--uniform", "--rounds", "1", "--mode", "joint",
         "--seed", "7", "--q", "257", "--format", "json"],
    )
    assert code == 0
    obj = json.loads(out)
    assert obj["uses"] == 27
    assert obj["symbols_delivered"] == 57
    assert obj["failures"] == 0
    assert obj["exact_dof"] == "19/9"
    assert obj["empirical_dof"] == "19/9"


def test_simulate_separate_text(capsys):
    code, out, _ = run_cli(
        capsys, ["simulate", "--rounds", "1", "--mode", "separate", "--seed", "7"]
    )
    assert code == 0
    assert "exact_dof         2" in out


def test_simulate_exit_codes_on_failures(capsys, tmp_path):
    dist = tmp_path / "h1.json"
    dist.write_text(StateDistribution.point_mass("H1").to_json())
    argv = ["simulate", "--dist", str(dist), "--mode", "separate",
            "--rounds", "4", "--q", "5", "--format", "json"]
    code, out, _ = run_cli(capsys, argv + ["--seed", "0"])
    assert code == 2  # failures observed, reported, not fatal
    assert json.loads(out)["failures"] >= 1
    code, out, _ = run_cli(capsys, argv + ["--seed", "5"])
    assert code == 0
    assert json.loads(out)["failures"] == 0


def test_simulate_config_errors_exit_1(capsys):
    code, _, err = run_cli(capsys, ["simulate", "--q", "10"])
    assert code == 1 and "prime" in err
    code, _, err = run_cli(capsys, ["simulate", "--rounds", "0"])
    assert code == 1
    code, _, err = run_cli(
        capsys, ["simulate", "--rounds", "1", "--n-uses", "5"]
    )
    assert code == 1  # mutually exclusive
    code, _, err = run_cli(capsys, ["simulate", "--mode", "sideways"])
    assert code == 1
    code, _, err = run_cli(capsys, ["simulate", "--dist", "/no/such/file.json"])
    assert code == 1 and "cannot read" in err


def test_unknown_flags_rejected(capsys):
    code, _, err = run_cli(capsys, ["simulate", "--frobnicate"])
    assert code == 1
    code, _, err = run_cli(capsys, ["transmogrify"])
    assert code == 1


def test_bad_distribution_contents_exit_1(capsys, tmp_path):
    short = tmp_path / "short.json"
    short.write_text('{"states": {"A": "9/10"}}')
    code, _, err = run_cli(capsys, ["bound", "--dist", str(short)])
    assert code == 1 and "sum" in err

    garbage = tmp_path / "garbage.json"
    garbage.write_text("{nope")
    code, _, err = run_cli(capsys, ["bound", "--dist", str(garbage)])
    assert code == 1


def test_bound_and_report(capsys):
    code, out, _ = run_cli(capsys, ["bound"])
    assert code == 0 and out == "upper_bound = 19/9\n"

    code, out, _ = run_cli(capsys, ["bound", "--format", "json", "--float"])
    obj = json.loads(out)
    assert obj["upper"] == "19/9" and abs(obj["upper_float"] - 19 / 9) < 1e-12

    code, out, _ = run_cli(capsys, ["report", "--format", "json"])
    obj = json.loads(out)
    assert obj["tight"] is True and obj["achievable_separate"] == "2"

    code, out, _ = run_cli(
        capsys, ["report", "--dist", str(DISTS / "only_b1.json")]
    )
    assert code == 0 and "tight               no" in out and "5/2" in out

    code, out, _ = run_cli(
        capsys, ["bound", "--dist", str(DISTS / "only_e3.json")]
    )
    assert out == "upper_bound = 2\n"


def test_verify_builtins(capsys):
    code, out, _ = run_cli(
        capsys,
        ["verify", "--builtin", "quadruple1", "--draws", "100", "--seed", "1"],
    )
    assert code == 0 and "all: 100/100" in out

    code, out, _ = run_cli(
        capsys,
        ["verify", "--builtin", "naive-h", "--draws", "100", "--seed", "1",
         "--format", "json"],
    )
    assert code == 2
    obj = json.loads(out)
    assert obj["all_ok"] == 0 and obj["per_rx"] == [0, 0, 0]

    code, out, _ = run_cli(
        capsys,
        ["verify", "--builtin", "h-repetition", "--draws", "500", "--q", "5",
         "--seed", "3", "--format", "json"],
    )
    assert code == 2  # singular systems occur at tiny q
    obj = json.loads(out)
    assert 0 < obj["all_ok"] < 500


def test_verify_scheme_file_round_trip(capsys, tmp_path):
    from timac.coding import builtin_scheme, scheme_to_json
    from timac.galois import field_new

    path = tmp_path / "quad.json"
    path.write_text(scheme_to_json(builtin_scheme("quadruple1", field_new(257))))
    code, out, _ = run_cli(
        capsys, ["verify", "--scheme", str(path), "--draws", "50", "--seed", "2"]
    )
    assert code == 0 and "all: 50/50" in out

    code, _, err = run_cli(
        capsys,
        ["verify", "--scheme", str(path), "--q", "11", "--draws", "5"],
    )
    assert code == 1 and "conflicts" in err

    code, _, err = run_cli(
        capsys, ["verify", "--scheme", "/no/such/scheme.json"]
    )
    assert code == 1

    bad = tmp_path / "bad.json"
    bad.write_text('{"q": 4, "states": [], "tx": [[], [], []]}')
    code, _, err = run_cli(capsys, ["verify", "--scheme", str(bad)])
    assert code == 1


def test_verify_zero_message_scheme_vacuous(capsys, tmp_path):
    path = tmp_path / "empty.json"
    path.write_text('{"q": 7, "states": ["H1"], "tx": [[[]], [[]], [[]]]}')
    code, out, _ = run_cli(
        capsys, ["verify", "--scheme", str(path), "--draws", "10", "--seed", "0"]
    )
    assert code == 0 and "all: 10/10" in out


def test_seed_env_var(capsys, monkeypatch):
    monkeypatch.setenv("TIMAC_SEED", "7")
    code, by_env, _ = run_cli(
        capsys, ["simulate", "--rounds", "1", "--format", "json"]
    )
    assert code == 0
    monkeypatch.delenv("TIMAC_SEED")
    code, by_flag, _ = run_cli(
        capsys, ["simulate", "--rounds", "1", "--seed", "7", "--format", "json"]
    )
    assert by_env == by_flag

    monkeypatch.setenv("TIMAC_SEED", "not-a-number")
    code, _, err = run_cli(capsys, ["simulate", "--rounds", "1"])
    assert code == 1 and "TIMAC_SEED" in err


def test_out_writes_file(capsys, tmp_path):
    target = tmp_path / "report.json"
    code, out, _ = run_cli(
        capsys,
        ["simulate", "--rounds", "1", "--seed", "7", "--format", "json",
         "--out", str(target)],
    )
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["symbols_delivered"] == 57


def test_repo_distribution_files_round_trip():
    files = sorted(DISTS.glob("*.json"))
    assert len(files) == 5
    for path in files:
        original = path.read_text()
        assert StateDistribution.from_json(original).to_json() == original


def test_csv_output(capsys):
    code, out, _ = run_cli(
        capsys,
        ["simulate", "--rounds", "1", "--seed", "7", "--format", "csv"],
    )
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("index,kind,states")
    assert len(lines) == 1 + 21  # 2 quadruples + 1 full + 18 silence
