import json
import os

import pytest

from redusim.cli import main, parse_seeds, run_batch
from redusim.config import (RECIPE_NAMES, ConfigError, load_scenario, recipe,
                            run_scenario, scenario_from_dict)
from redusim.simcore import records_to_csv

MINIMAL = {
    "topology": {"kind": "edges", "nodes": 2,
                 "links": [[0, 1, 1.0, 1.0], [1, 0, 1.0, 1.0]]},
    "policies": {"gold": {"priority": "priority", "hard_limit_ms": 100.0,
                          "soft_fraction": 0.5, "mode": "clone"}},
    "workload": [{"count": 1, "length_packets": 3, "policy": "gold",
                  "origin_destination": {"pairs": [[0, 1]]},
                  "release": {"kind": "at", "time_ms": 0.0}}],
    "engine": {"horizon_ms": 1000.0},
}


def write_scenario(tmp_path, raw, name="scenario.json"):
    path = tmp_path / name
    path.write_text(json.dumps(raw), encoding="utf-8")
    return str(path)


def test_minimal_two_node_scenario_valid(tmp_path):
    scenario = load_scenario(write_scenario(tmp_path, MINIMAL))
    result = run_scenario(scenario, seed=1)
    assert len(result.records) == 1
    assert result.records[0].completed_us is not None


def test_unknown_policy_reference_names_the_key(tmp_path):
    raw = json.loads(json.dumps(MINIMAL))
    raw["workload"][0]["policy"] = "missing"
    with pytest.raises(ConfigError) as exc:
        load_scenario(write_scenario(tmp_path, raw))
    assert any("workload[0].policy" in e and "missing" in e
               for e in exc.value.errors)


def test_soft_fraction_out_of_range_rejected(tmp_path):
    raw = json.loads(json.dumps(MINIMAL))
    raw["policies"]["gold"]["soft_fraction"] = 1.2
    with pytest.raises(ConfigError) as exc:
        load_scenario(write_scenario(tmp_path, raw))
    assert any("soft_fraction" in e for e in exc.value.errors)


def test_all_errors_reported_not_just_first(tmp_path):
    raw = json.loads(json.dumps(MINIMAL))
    raw["policies"]["gold"]["soft_fraction"] = 1.2
    raw["engine"]["base_algorithm"] = "magic"
    raw["workload"][0]["count"] = 0
    with pytest.raises(ConfigError) as exc:
        load_scenario(write_scenario(tmp_path, raw))
    assert len(exc.value.errors) >= 3


def test_parse_error_reports_line(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{\n  "topology": }\n', encoding="utf-8")
    with pytest.raises(ConfigError) as exc:
        load_scenario(str(path))
    assert "line 2" in exc.value.errors[0]


def test_round_trip_serialization(tmp_path):
    scenario = recipe("long_flows_divert")
    path = tmp_path / "echo.json"
    path.write_text(scenario.serialize(), encoding="utf-8")
    again = load_scenario(str(path))
    assert again.raw == scenario.raw


@pytest.mark.parametrize("name", RECIPE_NAMES)
def test_recipes_validate_under_loader_rules(name):
    scenario = recipe(name)
    assert scenario_from_dict(scenario.raw).raw == scenario.raw


def test_recipe_unknown_name_rejected():
    with pytest.raises(ConfigError):
        recipe("nope")


def test_parse_seeds_forms():
    assert parse_seeds("1..4") == [1, 2, 3, 4]
    assert parse_seeds("3,5,9") == [3, 5, 9]
    assert parse_seeds("1..3,7") == [1, 2, 3, 7]
    with pytest.raises(ValueError):
        parse_seeds(" ")


def test_single_seed_batch_aggregate_equals_run(tmp_path):
    scenario = scenario_from_dict(MINIMAL)
    out = run_batch(scenario, [1], str(tmp_path / "b"), parallelism=1)
    single = run_scenario(scenario, 1)
    with open(out["seed_1"], encoding="utf-8") as fh:
        assert fh.read() == records_to_csv(single.records)


def test_batch_parallelism_bit_identical(tmp_path):
    scenario = recipe("short_flows_clone_replicate")
    scenario.raw["workload"][0]["count"] = 40  # trim for test runtime
    seq_dir, par_dir = str(tmp_path / "seq"), str(tmp_path / "par")
    run_batch(scenario, [1, 2, 3, 4], seq_dir, parallelism=1)
    run_batch(scenario, [1, 2, 3, 4], par_dir, parallelism=4)
    for name in sorted(os.listdir(seq_dir)):
        with open(os.path.join(seq_dir, name), encoding="utf-8") as a, \
                open(os.path.join(par_dir, name), encoding="utf-8") as b:
            assert a.read() == b.read(), name


def test_compare_mode_writes_paired_base_runs(tmp_path):
    scenario = scenario_from_dict(MINIMAL)
    out = run_batch(scenario, [5], str(tmp_path / "c"), compare=True)
    assert "base_seed_5" in out
    with open(out["aggregate"], encoding="utf-8") as fh:
        text = fh.read()
    assert "do_no_harm_counterexamples = 0" in text


# -- cli ----------------------------------------------------------------------------

def test_cli_validate_ok(tmp_path, capsys):
    path = write_scenario(tmp_path, MINIMAL)
    assert main(["validate", path]) == 0
    assert capsys.readouterr().out.strip() == "ok"


def test_cli_validate_bad_exit_code_and_json_errors(tmp_path, capsys):
    raw = json.loads(json.dumps(MINIMAL))
    raw["policies"]["gold"]["mode"] = "teleport"
    path = write_scenario(tmp_path, raw)
    assert main(["validate", path]) == 2
    err = json.loads(capsys.readouterr().err)
    assert any("mode" in e for e in err["errors"])


def test_cli_run_writes_csv_and_summary(tmp_path, capsys):
    path = write_scenario(tmp_path, MINIMAL)
    out_dir = str(tmp_path / "out")
    assert main(["run", path, "--seed", "7", "--out", out_dir]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert os.path.exists(lines[0]) and lines[0].endswith(".csv")
    assert os.path.exists(lines[1]) and lines[1].endswith("summary.txt")
    with open(lines[0], encoding="utf-8") as fh:
        assert fh.readline().startswith("flow_id,priority,mode")


def test_cli_run_base_only_flag(tmp_path, capsys):
    path = write_scenario(tmp_path, MINIMAL)
    out_dir = str(tmp_path / "out")
    assert main(["run", path, "--seed", "7", "--out", out_dir,
                 "--base-only"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert "base" in os.path.basename(lines[0])


def test_cli_recipe_emits_valid_config(tmp_path, capsys):
    target = str(tmp_path / "r.json")
    assert main(["recipe", "long_flows_clone", "--emit", target]) == 0
    assert load_scenario(target).raw == recipe("long_flows_clone").raw


def test_cli_batch_end_to_end(tmp_path, capsys):
    path = write_scenario(tmp_path, MINIMAL)
    out_dir = str(tmp_path / "batch")
    assert main(["batch", path, "--seeds", "1..3", "--out", out_dir]) == 0
    assert os.path.exists(os.path.join(out_dir, "aggregate_summary.txt"))
    assert os.path.exists(os.path.join(out_dir, "seed_2.csv"))


def test_cli_missing_file_fails_cleanly(tmp_path, capsys):
    assert main(["validate", str(tmp_path / "absent.json")]) == 2
    err = json.loads(capsys.readouterr().err)
    assert err["errors"]


# -- recipe behavior ---------------------------------------------------------------

def test_ecmp_recipe_rescues_hashed_flows():
    # flows pinned to the slowed ECMP path get replicated onto an alternative
    # that ECMP already had available; the rest never trigger
    scenario = recipe("ecmp_clone_replicate")
    scenario.raw["workload"][0]["count"] = 120
    base = run_scenario(scenario, seed=3, enhancements=False)
    enh = run_scenario(scenario, seed=3)
    base_viol = {r.flow_id for r in base.records if r.sla_violated}
    enh_viol = {r.flow_id for r in enh.records if r.sla_violated}
    assert base_viol, "some flows must hash onto the slowed path"
    assert len(base_viol) < 120, "ECMP must spread flows off the slowed path"
    assert enh_viol <= base_viol
    assert len(enh_viol) <= 1  # at most the first reporter
    rescued = [r for r in enh.records
               if r.flow_id in base_viol and r.mode == "replicate"]
    assert rescued


def test_short_flow_recipe_registry_ttl_key_roundtrip(tmp_path):
    raw = json.loads(json.dumps(MINIMAL))
    raw["engine"]["registry_ttl_ms"] = 500.0
    raw["policies"]["gold"]["controller_latency_ms"] = 5.0
    scenario = load_scenario(write_scenario(tmp_path, raw))
    result = run_scenario(scenario, 1)
    assert result.records[0].completed_us is not None


def test_policy_controller_latency_validation(tmp_path):
    raw = json.loads(json.dumps(MINIMAL))
    raw["policies"]["gold"]["controller_latency_ms"] = -1
    with pytest.raises(ConfigError) as exc:
        load_scenario(write_scenario(tmp_path, raw))
    assert any("controller_latency_ms" in e for e in exc.value.errors)
