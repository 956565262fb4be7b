"""Walk the fuzzy trust surface.

Shows how the interval type-2 controller maps forwarding evidence
(dfr = delivery rate, dfd = delay ratio) to a trust value, including the
hard-zero rule for poor forwarders and the saturation region where a
perfect forwarder earns full trust.

Run with:  python3 demos/trust_surface.py
"""
from scfto.fuzzy import FuzzyTrustEngine


def main() -> None:
    engine = FuzzyTrustEngine()

    print("Trust for a perfect forwarder:       "
          f"{engine.evaluate(0.0, 1.0):.4f}")
    print("Trust for a heavy dropper (dfr=0.1): "
          f"{engine.evaluate(0.0, 0.1):.4f}  (hard-zero rule)")
    print()

    dfds = [0.0, 0.2, 0.4, 0.6, 0.8, 1.0]
    dfrs = [0.2, 0.4, 0.6, 0.8, 1.0]
    print("trust(dfd, dfr) surface:")
    print("            " + "  ".join(f"dfr={r:.1f}" for r in dfrs))
    for dfd in dfds:
        row = "  ".join(f" {engine.evaluate(dfd, r):.4f}" for r in dfrs)
        print(f"  dfd={dfd:.1f}  {row}")

    print()
    print("Linguistic labels along dfr at dfd=0.2:")
    for r in dfrs:
        v = engine.evaluate(0.2, r)
        print(f"  dfr={r:.1f}: trust={v:.4f} -> {engine.classify_trust(v)}")


if __name__ == "__main__":
    main()
