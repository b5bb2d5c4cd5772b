"""CLI tests: subcommands, exit codes, env overrides, CSV outputs."""

import csv
import json

import pytest

from ulsched.cli import main


def test_example_table5(capsys):
    assert main(["example", "table5"]) == 0
    out = capsys.readouterr().out
    assert "Total Transmitted 1192" in out
    assert "Total Drop 238" in out
    assert "RESULT ok scenario=table5" in out


def test_example_table4(capsys):
    assert main(["example", "table4"]) == 0
    out = capsys.readouterr().out
    assert "Total Transmitted 1010" in out
    assert "Total Drop 420" in out


def test_example_table3(capsys):
    assert main(["example", "table3"]) == 0
    assert "RESULT ok scenario=table3" in capsys.readouterr().out


def test_example_objectives(capsys):
    assert main(["example", "sec2-objective"]) == 0
    out = capsys.readouterr().out
    assert "schedule UE1: objective 45" in out
    assert "schedule UE2: objective -5" in out
    assert "schedule UE3: objective 102" in out
    assert "selected UE3" in out


def test_example_unknown_name_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["example", "table9"])
    assert exc.value.code == 2


def test_missing_subcommand_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2


def test_validate_default_config(capsys):
    assert main(["validate"]) == 0
    assert "RESULT ok" in capsys.readouterr().out


def test_validate_bad_config_names_key(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"buffer_capacity": 1000, "buffer_threshold": 2000}))
    assert main(["validate", "--config", str(bad)]) == 1
    assert "buffer_threshold" in capsys.readouterr().err


def test_run_writes_csv_and_is_repeatable(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "policy": "darts", "seed": 3, "tti_count": 120, "n_ues": 4,
        "loads_mbps": {"voice": 1.0, "video": 0.0, "data": 0.0}}))
    out1 = tmp_path / "o1"
    out2 = tmp_path / "o2"
    assert main(["run", "--config", str(cfg), "--out", str(out1)]) == 0
    assert main(["run", "--config", str(cfg), "--out", str(out2)]) == 0
    rows1 = list(csv.DictReader(open(out1 / "run_darts_strict_seed3.csv")))
    rows2 = list(csv.DictReader(open(out2 / "run_darts_strict_seed3.csv")))
    assert rows1 == rows2
    assert rows1[0]["conservation_ok"] == "1"
    line = capsys.readouterr().out
    assert "RESULT ok" in line and "mac_mbps=" in line


def test_run_seed_override_changes_output(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "policy": "dham", "seed": 3, "tti_count": 120, "n_ues": 4,
        "loads_mbps": {"voice": 1.0, "video": 0.0, "data": 0.0}}))
    main(["run", "--config", str(cfg), "--out", str(tmp_path / "a")])
    main(["run", "--config", str(cfg), "--seed", "9", "--out", str(tmp_path / "b")])
    a = list(csv.DictReader(open(tmp_path / "a" / "run_dham_strict_seed3.csv")))[0]
    b = list(csv.DictReader(open(tmp_path / "b" / "run_dham_strict_seed9.csv")))[0]
    assert a["transmitted_bytes"] != b["transmitted_bytes"]


def test_run_env_override(tmp_path, monkeypatch):
    monkeypatch.setenv("ULSCHED_SEED", "77")
    monkeypatch.setenv("ULSCHED_TTIS", "90")
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "policy": "dham", "tti_count": 5000, "n_ues": 3,
        "loads_mbps": {"voice": 0.5, "video": 0.0, "data": 0.0}}))
    assert main(["run", "--config", str(cfg), "--out", str(tmp_path)]) == 0
    rows = list(csv.DictReader(open(tmp_path / "run_dham_strict_seed77.csv")))
    assert rows[0]["seed"] == "77"
    assert rows[0]["tti_count"] == "90"


def test_run_trace_flag(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "policy": "dham", "seed": 1, "tti_count": 50, "n_ues": 3,
        "loads_mbps": {"voice": 0.5, "video": 0.0, "data": 0.0}}))
    assert main(["run", "--config", str(cfg), "--out", str(tmp_path), "--trace"]) == 0
    trace = list(csv.reader(open(tmp_path / "trace_dham_seed1.csv")))
    assert trace[0][0] == "tti"
    assert len(trace) == 51


def test_sweep_row_per_point_and_seed(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "policy": "dham", "tti_count": 80, "n_ues": 3,
        "loads_mbps": {"voice": 0.5, "video": 0.0, "data": 0.0},
        "sweep": {"vary": "voice", "points_mbps": [0.5, 1.0], "seeds": [1, 2, 3]}}))
    assert main(["sweep", "--config", str(cfg), "--out", str(tmp_path)]) == 0
    rows = list(csv.DictReader(open(tmp_path / "sweep_dham_strict.csv")))
    assert len(rows) == 6
    assert {(r["voice_mbps"], r["seed"]) for r in rows} == {
        (str(p), str(s)) for p in (0.5, 1.0) for s in (1, 2, 3)}


def test_golden_mismatch_exit_code(monkeypatch, capsys):
    import ulsched.cli as cli
    from ulsched.golden import run_scenario
    trace = run_scenario("table5")
    monkeypatch.setitem(cli.__dict__, "verify_scenario",
                        lambda name: (trace, ["forced mismatch"]))
    assert main(["example", "table5"]) == 3
    assert "RESULT golden-mismatch" in capsys.readouterr().out
