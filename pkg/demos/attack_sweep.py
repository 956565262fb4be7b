"""Attack pressure versus malicious population size.

Sweeps the malicious fraction from 10% to 50% (3 seeds each, 300 rounds)
and reports total dropping and delaying attacks.  Both climb with the
malicious fraction: more attackers means more attack opportunities even as
the trust system squeezes them out of head roles.

Run with:  python3 demos/attack_sweep.py
"""
import statistics

from scfto.config import SimConfig
from scfto.metrics import simulate


def main() -> None:
    seeds = (1, 2, 3)
    print("fraction  drops(avg)  delays(avg)")
    for frac in (0.1, 0.2, 0.3, 0.4, 0.5):
        drops, delays = [], []
        for seed in seeds:
            cfg = SimConfig(node_count=100, rounds=300, seed=seed,
                            malicious_fraction=frac)
            d = y = 0
            for report, _ in simulate(cfg):
                d += report.drop_attacks
                y += report.delay_attacks
            drops.append(d)
            delays.append(y)
        print(f"  {frac:.1f}     {statistics.mean(drops):8.1f}"
              f"    {statistics.mean(delays):8.1f}")


if __name__ == "__main__":
    main()
