"""One full simulation, narrated cycle by cycle.

A 100-node network with 30% malicious nodes runs for 20 cycles.  The
per-cycle average count of clusters led by a malicious head falls to zero
as members accumulate forwarding evidence, share vetted recommendations,
and converge on their adaptive trust thresholds.

Run with:  python3 demos/single_run.py [seed]
"""
import sys

from scfto.config import SimConfig
from scfto.metrics import MetricsAccumulator, simulate


def main() -> None:
    seed = int(sys.argv[1]) if len(sys.argv) > 1 else 1
    cfg = SimConfig(node_count=100, rounds=1000, seed=seed,
                    malicious_fraction=0.3)
    acc = MetricsAccumulator(cycle_len=cfg.cycle_len_rounds)
    converged_at = None
    state = None
    for report, state in simulate(cfg):
        acc.add(report)
        if converged_at is None:
            done = sum(n.tracker.converged for n in state.nodes if n.alive)
            if done >= 0.9 * report.alive_end:
                converged_at = report.round_idx

    print(f"seed {seed}: {cfg.node_count} nodes, "
          f"{cfg.malicious_fraction:.0%} malicious, {cfg.rounds} rounds")
    if converged_at is not None:
        print(f"90% of nodes had converged thresholds by round {converged_at}")
    print()
    print("cycle  avg malicious clusters/round")
    for i, avg in enumerate(acc.cycle_averages(), start=1):
        bar = "#" * round(avg * 20)
        print(f"  {i:3d}   {avg:6.3f}  {bar}")
    print()
    print(f"attacks endured: {acc.total_drop_attacks} drops, "
          f"{acc.total_delay_attacks} delays; "
          f"{acc.total_packets} packets delivered; "
          f"{len(state.alive_nodes())} nodes alive at the end")


if __name__ == "__main__":
    main()
