"""Command-line interface: run a scenario, sweep a parameter, or run the
built-in oracle self-tests.
"""
from __future__ import annotations

import argparse
import random
import sys
from dataclasses import replace

from . import __version__
from .config import ConfigError, SimConfig, load_config
from .fuzzy import WeightedEndpointList, reference_type_reduce, type_reduce
from .metrics import load_scenario, run_sweep, run_to_files
from .network import NodeState
from .outlier import detect_threshold
from .phy import ChannelState, sample_channel_state
from .protocol import ActionKind, head_action
from .rng import StreamFactory


def _load(args) -> SimConfig:
    config = SimConfig()
    if args.config:
        config = load_config(args.config, base=config)
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.rounds is not None:
        overrides["rounds"] = args.rounds
    if args.force_channel is not None:
        overrides["force_channel"] = args.force_channel
    if overrides:
        config = replace(config, **overrides)
    config.validate()
    return config


def cmd_run(args) -> int:
    config = _load(args)
    acc = run_to_files(config, args.out, dump_trust=args.dump_trust,
                       dump_outlier=args.dump_outlier)
    print(f"run complete: {acc.rounds_seen} rounds, "
          f"{acc.total_packets} packets delivered, "
          f"{acc.total_drop_attacks} drops, {acc.total_delay_attacks} delays, "
          f"first death at "
          f"{'-' if acc.first_death_round is None else acc.first_death_round}")
    print(f"outputs in {args.out}/")
    return 0


def cmd_sweep(args) -> int:
    spec = load_scenario(args.spec)
    if args.out:
        spec = replace(spec, output_dir=args.out)
    summary = run_sweep(spec)
    print(f"sweep complete; combined summary at {summary}")
    return 0


def cmd_selftest(args) -> int:
    failures = 0
    failures += _check("type reduction vs exhaustive switch-point search",
                       _selftest_type_reduction)
    failures += _check("channel stationary bad-state frequency",
                       _selftest_channel)
    failures += _check("per-tier attack frequency calibration",
                       _selftest_attack_rates)
    failures += _check("outlier threshold hand fixtures",
                       _selftest_outlier)
    if failures:
        print(f"{failures} selftest(s) FAILED")
        return 1
    print("all selftests passed")
    return 0


def _check(name: str, fn) -> int:
    try:
        fn()
    except AssertionError as exc:
        print(f"FAIL {name}: {exc}")
        return 1
    print(f"PASS {name}")
    return 0


def _random_endpoint_list(rng: random.Random) -> WeightedEndpointList:
    n = rng.randint(9, 16)
    def make_side():
        xs = sorted(rng.random() for _ in range(n))
        lo, hi = [], []
        for _ in range(n):
            h = rng.random()
            lo.append(h * rng.uniform(0.05, 1.0))
            hi.append(h)
        lo_sum, hi_sum = sum(lo), sum(hi)
        return [(x, a / lo_sum, b / hi_sum) for x, a, b in zip(xs, lo, hi)]
    return WeightedEndpointList(left=make_side(), right=make_side())


def _selftest_type_reduction(samples: int = 300) -> None:
    rng = random.Random(20240917)
    for _ in range(samples):
        wel = _random_endpoint_list(rng)
        got = type_reduce(wel)
        want = reference_type_reduce(wel)
        assert abs(got[0] - want[0]) < 1e-9 and abs(got[1] - want[1]) < 1e-9, \
            f"EIASC {got} != exhaustive {want}"


def _selftest_channel(draws: int = 100_000) -> None:
    config = SimConfig()
    streams = StreamFactory(7)
    bad = sum(
        sample_channel_state(config.channel, streams.stream("channel", round_idx=r))
        is ChannelState.BAD
        for r in range(draws))
    freq = bad / draws
    expect = config.channel.p_bad
    assert abs(freq - expect) < 0.02, f"bad-state frequency {freq:.4f} vs {expect}"


def _selftest_attack_rates(draws: int = 100_000) -> None:
    config = SimConfig()
    for tier in (1, 2, 3):
        node = NodeState(id=0, position=(0.0, 0.0), energy_j=1.0, tier=tier)
        rng = random.Random(40 + tier)
        drops = delays = 0
        for _ in range(draws):
            action = head_action(node, rng, config)
            drops += action.kind is ActionKind.DROP
            delays += action.kind is ActionKind.DELAY
        assert abs(drops / draws - tier * config.attack.p_sf) < 0.01, \
            f"tier {tier} drop rate {drops / draws:.4f}"
        assert abs(delays / draws - tier * config.attack.p_df) < 0.01, \
            f"tier {tier} delay rate {delays / draws:.4f}"


def _selftest_outlier() -> None:
    params = SimConfig().outlier
    got = detect_threshold([0.9, 0.905, 0.91, 0.2], params)
    assert got == 0.9, f"four-value fixture returned {got}"
    high = [0.80, 0.802, 0.804, 0.806, 0.808]
    low = [0.10, 0.102, 0.104, 0.106, 0.108]
    got = detect_threshold(high + low, params)
    assert got == 0.80, f"bimodal fixture returned {got}"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scfto",
        description="Secure clustering protocol simulator for industrial "
                    "wireless sensor networks.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one simulation")
    p_run.add_argument("--config", help="flat key-value config file")
    p_run.add_argument("--seed", type=int, help="override the master seed")
    p_run.add_argument("--rounds", type=int, help="override the round budget")
    p_run.add_argument("--force-channel", choices=("good", "bad"),
                       help="pin the channel state (testing)")
    p_run.add_argument("--out", default="out", help="output directory")
    p_run.add_argument("--dump-trust", action="store_true",
                       help="also write per-round trust tables")
    p_run.add_argument("--dump-outlier", action="store_true",
                       help="also write per-round threshold tracking")
    p_run.set_defaults(fn=cmd_run)

    p_sweep = sub.add_parser("sweep", help="run a sweep scenario file")
    p_sweep.add_argument("spec", help="scenario spec file")
    p_sweep.add_argument("--out", help="override the scenario output dir")
    p_sweep.set_defaults(fn=cmd_sweep)

    p_self = sub.add_parser("selftest", help="run built-in oracle suites")
    p_self.set_defaults(fn=cmd_selftest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
