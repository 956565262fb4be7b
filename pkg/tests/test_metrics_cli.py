"""Metric accumulation, file outputs, sweep scenarios, and the CLI."""
import os

import pytest

from scfto.cli import main
from scfto.config import ConfigError, SimConfig
from scfto.metrics import (MetricsAccumulator, ScenarioSpec, apply_sweep,
                           parse_scenario_text, run_sweep, run_to_files,
                           simulate)
from scfto.phy import ChannelState
from scfto.protocol import RoundReport


def report(idx, **kw):
    defaults = dict(round_idx=idx, channel=ChannelState.GOOD)
    defaults.update(kw)
    return RoundReport(**defaults)


# ------------------------------------------------------------- accumulator

def test_accumulator_totals_and_cycles():
    acc = MetricsAccumulator(cycle_len=2)
    acc.add(report(0, drop_attacks=1, delay_attacks=2, packets_delivered=5,
                   energy_spent_j=0.5, malicious_cluster_count=0,
                   clusters=[], alive_end=10))
    acc.add(report(1, drop_attacks=3, packets_delivered=5, energy_spent_j=0.25,
                   malicious_cluster_count=2, clusters=[(1, (2,)), (3, (4,))],
                   alive_end=10))
    acc.add(report(2, deaths=[7], alive_end=9))
    assert acc.rounds_seen == 3
    assert acc.total_drop_attacks == 4
    assert acc.total_delay_attacks == 2
    assert acc.total_packets == 10
    assert acc.total_energy_j == pytest.approx(0.75)
    assert acc.first_death_round == 2
    assert acc.all_dead_round is None
    assert acc.cycle_averages() == [1.0, 0.0]  # [mean(0,2), mean(0)]


def test_accumulator_rejects_out_of_order():
    acc = MetricsAccumulator(cycle_len=50)
    acc.add(report(0, alive_end=1))
    with pytest.raises(ValueError):
        acc.add(report(2, alive_end=1))


def test_accumulator_rejects_impossible_malicious_count():
    acc = MetricsAccumulator(cycle_len=50)
    with pytest.raises(ValueError):
        acc.add(report(0, malicious_cluster_count=1, clusters=[], alive_end=1))


def test_accumulator_records_network_death():
    acc = MetricsAccumulator(cycle_len=50)
    acc.add(report(0, deaths=[0, 1], alive_end=0))
    assert acc.first_death_round == 0
    assert acc.all_dead_round == 0


def test_simulate_yields_every_round():
    cfg = SimConfig(node_count=10, rounds=5, seed=1)
    rounds = [rep.round_idx for rep, _ in simulate(cfg)]
    assert rounds == [0, 1, 2, 3, 4]


# ------------------------------------------------------------ file outputs

def test_run_outputs_and_determinism(tmp_path):
    cfg = SimConfig(node_count=20, rounds=30, seed=11, malicious_fraction=0.3)
    a, b = tmp_path / "a", tmp_path / "b"
    run_to_files(cfg, str(a))
    run_to_files(cfg, str(b))
    for name in ("rounds.csv", "summary.csv", "manifest.txt"):
        assert (a / name).read_bytes() == (b / name).read_bytes()
    header = (a / "rounds.csv").read_text().splitlines()[0]
    assert header.startswith("round,channel,")
    assert len((a / "rounds.csv").read_text().splitlines()) == 31


def test_different_seed_changes_rounds_csv(tmp_path):
    base = SimConfig(node_count=20, rounds=30, seed=11, malicious_fraction=0.3)
    other = SimConfig(node_count=20, rounds=30, seed=12, malicious_fraction=0.3)
    a, b = tmp_path / "a", tmp_path / "b"
    run_to_files(base, str(a))
    run_to_files(other, str(b))
    assert (a / "rounds.csv").read_bytes() != (b / "rounds.csv").read_bytes()


def test_optional_dumps(tmp_path):
    cfg = SimConfig(node_count=10, rounds=5, seed=1)
    run_to_files(cfg, str(tmp_path), dump_trust=True, dump_outlier=True)
    assert (tmp_path / "trust.csv").exists()
    assert (tmp_path / "outlier.csv").exists()


# ----------------------------------------------------------------- sweeps

def test_parse_scenario_text():
    spec = parse_scenario_text(
        "config = base.cfg\n"
        "seeds = 1,2,3\n"
        "sweep_key = malicious_fraction\n"
        "sweep_values = 0.1,0.2\n"
        "output = results  # trailing comment\n")
    assert spec.config_path == "base.cfg"
    assert spec.seeds == (1, 2, 3)
    assert spec.sweep_key == "malicious_fraction"
    assert spec.sweep_values == ("0.1", "0.2")
    assert spec.output_dir == "results"


def test_scenario_requires_seeds():
    with pytest.raises(ConfigError):
        parse_scenario_text("sweep_key = rounds\nsweep_values = 5\n")


def test_scenario_rejects_unknown_sweep_key():
    with pytest.raises(ConfigError):
        parse_scenario_text("seeds = 1\nsweep_key = bogus\n")


def test_apply_sweep_nested_and_flat():
    cfg = SimConfig()
    assert apply_sweep(cfg, "malicious_fraction", "0.4").malicious_fraction == 0.4
    assert apply_sweep(cfg, "rounds", "7").rounds == 7
    assert apply_sweep(cfg, "p_sf", "0.05").attack.p_sf == 0.05
    assert apply_sweep(cfg, "p_df", "0.05").attack.p_df == 0.05
    with pytest.raises(ConfigError):
        apply_sweep(cfg, "malicious_fraction", "1.5")  # out of [0,1]


def test_run_sweep_layout(tmp_path):
    spec = ScenarioSpec(config_path=None, seeds=(1, 2), sweep_key="rounds",
                        sweep_values=("3", "4"),
                        output_dir=str(tmp_path / "sw"))
    base = SimConfig(node_count=10, rounds=3, seed=0)
    summary = run_sweep(spec, base=base)
    lines = open(summary).read().splitlines()
    assert len(lines) == 5  # header + 2 values x 2 seeds
    for value in ("3", "4"):
        for seed in (1, 2):
            d = tmp_path / "sw" / f"run_{value}_{seed}"
            assert (d / "rounds.csv").exists()
            assert (d / "manifest.txt").exists()


# -------------------------------------------------------------------- CLI

def test_cli_run_smoke(tmp_path, capsys):
    out = tmp_path / "out"
    rc = main(["run", "--seed", "5", "--rounds", "10", "--out", str(out)])
    assert rc == 0
    assert (out / "rounds.csv").exists()
    assert "run complete: 10 rounds" in capsys.readouterr().out


def test_cli_run_with_config_file(tmp_path):
    cfg_file = tmp_path / "small.cfg"
    cfg_file.write_text("node_count = 15\nrounds = 8\nseed = 3\n")
    out = tmp_path / "out"
    rc = main(["run", "--config", str(cfg_file), "--out", str(out)])
    assert rc == 0
    assert len((out / "rounds.csv").read_text().splitlines()) == 9


def test_cli_bad_config_is_error_code_2(tmp_path, capsys):
    cfg_file = tmp_path / "bad.cfg"
    cfg_file.write_text("node_count = -5\n")
    rc = main(["run", "--config", str(cfg_file), "--out", str(tmp_path / "o")])
    assert rc == 2
    assert "configuration error" in capsys.readouterr().err


def test_cli_sweep_smoke(tmp_path):
    cfg_file = tmp_path / "tiny.cfg"
    cfg_file.write_text("node_count = 10\nrounds = 3\n")
    spec_file = tmp_path / "sweep.spec"
    spec_file.write_text(f"config = {cfg_file}\nseeds = 1\n"
                         "sweep_key = rounds\nsweep_values = 2,3\n")
    out = tmp_path / "sw"
    rc = main(["sweep", str(spec_file), "--out", str(out)])
    assert rc == 0
    assert (out / "summary.csv").exists()


def test_cli_selftest(capsys):
    rc = main(["selftest"])
    captured = capsys.readouterr().out
    assert rc == 0
    assert "all selftests passed" in captured
    assert "FAIL" not in captured
