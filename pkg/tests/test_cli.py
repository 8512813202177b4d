import json

import pytest

from obschain.cli import main


def test_closed_form_prints_json_document(run_cli):
    code, doc = run_cli(["closed-form", "--d", "2", "--n", "1", "--k", "1", "--encoding", "symmetric"])
    assert code == 0
    assert doc["header"]["params"]["encoding"] == "symmetric-copies"
    assert doc["header"]["version"]
    assert doc["rows"][0]["fidelity"] == pytest.approx(2.0 / 3.0, abs=1e-15)


def test_egalitarian_single_observer(run_cli):
    code, doc = run_cli(["egalitarian", "--d", "2", "--observers", "1"])
    assert code == 0
    assert [row["epsilon"] for row in doc["rows"]] == [1.0]
    assert doc["rows"][0]["fidelity"] == pytest.approx(2.0 / 3.0, abs=1e-14)


def test_unknown_flag_exits_with_usage_error(capsys):
    with pytest.raises(SystemExit) as excinfo:
        main(["closed-form", "--frobnicate", "1"])
    assert excinfo.value.code == 2
    assert "usage" in capsys.readouterr().err


def test_conflicting_system_flags_exit_2(run_cli, capsys):
    code = main(["egalitarian", "--d", "2", "--n", "3", "--observers", "2"])
    assert code == 2
    assert "exactly one of" in capsys.readouterr().err


def test_invalid_request_maps_422_to_exit_2(capsys):
    code = main(["closed-form", "--d", "2", "--n", "3", "--encoding", "optimal-qubit"])
    assert code == 2
    assert "invalid request" in capsys.readouterr().err


def test_simulate_requires_system(run_cli, capsys):
    code = main(["simulate", "--d", "2", "--epsilon", "1.0"])
    assert code == 2
    assert "--system" in capsys.readouterr().err


def test_simulate_with_explicit_strengths(run_cli, tmp_path):
    out = tmp_path / "sim.json"
    code, doc = run_cli(
        [
            "simulate",
            "--system",
            "qudit",
            "--d",
            "2",
            "--observers",
            "2",
            "--strengths",
            "0.5,1.0",
            "--trials",
            "500",
            "--seed",
            "7",
            "--output",
            str(out),
        ]
    )
    assert code == 0
    assert [row["epsilon"] for row in doc["rows"]] == [0.5, 1.0]
    on_disk = json.loads(out.read_bytes())
    assert on_disk == doc


def test_output_to_missing_directory_exits_2(capsys, tmp_path):
    target = tmp_path / "nope" / "out.json"
    code = main(["egalitarian", "--d", "2", "--observers", "1", "--output", str(target)])
    assert code == 2
    assert "does not exist" in capsys.readouterr().err


def test_config_file_supplies_defaults_and_flags_win(run_cli, tmp_path):
    config = tmp_path / "run.json"
    config.write_text(json.dumps({"d": 3, "observers": 2}))
    code, doc = run_cli(["egalitarian", "--config", str(config)])
    assert code == 0
    assert doc["header"]["params"]["d"] == 3
    assert len(doc["rows"]) == 2
    code, doc = run_cli(["egalitarian", "--config", str(config), "--observers", "4"])
    assert code == 0
    assert len(doc["rows"]) == 4


def test_figure1_csv_formatting(run_cli, tmp_path):
    out = tmp_path / "sweep.csv"
    code, _ = run_cli(["figure1", "--n", "20", "--k-grid", "1,10", "--output", str(out)])
    assert code == 0
    text = out.read_text()
    lines = text.split("\n")
    assert lines[0] == "K,delta_exact,delta_asym_large_k,delta_asym_large_n,delta_stochastic"
    assert text.endswith("\n") and "\r" not in text
    first = lines[1].split(",")
    assert first[0] == "1"
    assert first[1] == format(20.0 / 22.0, ".17g")
    assert float(first[4]) == pytest.approx(20.0 / 22.0, abs=1e-15)


def test_figure1_json_format_flag(run_cli, tmp_path):
    out = tmp_path / "sweep.json"
    code, doc = run_cli(
        ["figure1", "--n", "10", "--k-grid", "1,5", "--output", str(out), "--format", "json"]
    )
    assert code == 0
    assert json.loads(out.read_bytes()) == doc


def test_repeated_runs_write_identical_bytes(run_cli, tmp_path):
    args = ["figure1", "--n", "30", "--k-grid", "log:1..300:6"]
    first = tmp_path / "a.csv"
    second = tmp_path / "b.csv"
    assert run_cli(args + ["--output", str(first)])[0] == 0
    assert run_cli(args + ["--output", str(second)])[0] == 0
    assert first.read_bytes() == second.read_bytes()

    sim_args = [
        "simulate", "--system", "spin", "--n", "2", "--observers", "2",
        "--epsilon", "1.0", "--trials", "400", "--seed", "11",
    ]
    sim_first = tmp_path / "sim_a.json"
    sim_second = tmp_path / "sim_b.json"
    assert run_cli(sim_args + ["--output", str(sim_first)])[0] == 0
    assert run_cli(sim_args + ["--output", str(sim_second)])[0] == 0
    assert sim_first.read_bytes() == sim_second.read_bytes()


def test_numeric_failure_maps_to_exit_3(capsys, monkeypatch):
    import obschain.strategies
    from obschain.errors import NumericError

    def boom(n_copies, ks):
        raise NumericError("synthetic convergence failure")

    monkeypatch.setattr(obschain.strategies, "figure1_sweep", boom)
    code = main(["figure1", "--n", "10", "--k-grid", "1,2"])
    assert code == 3
    assert "numeric failure" in capsys.readouterr().err


def test_verify_subcommand_round_trip(run_cli):
    code, doc = run_cli(
        ["verify", "--check", "channel-r", "--d", "2", "--epsilon", "1.0", "--samples", "4000", "--seed", "5"]
    )
    assert code == 0
    row = doc["rows"][0]
    assert row["target"] == pytest.approx(1.0 / 3.0, abs=1e-12)
    assert row["sigma_ratio"] <= 4.0
    assert doc["header"]["seed"] == 5


def test_privileged_subcommand(run_cli):
    code, doc = run_cli(["privileged", "--n", "10", "--observers", "3", "--epsilon", "1.0"])
    assert code == 0
    assert doc["rows"][0]["delta"] == pytest.approx((10.0 / 12.0) ** 3, abs=1e-12)
