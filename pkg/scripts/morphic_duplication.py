"""Morphic height of the duplication map against twice the canonical height."""
import argparse
from fractions import Fraction

from heightentropy.elliptic import CurvePoint, WeierstrassCurve
from heightentropy.heights import canonical_height
from heightentropy.morphic import duplication_morphism, rational_map_height


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--depth", type=int, default=7)
    args = ap.parse_args()
    E = WeierstrassCurve(0, 0, 0, -4, 4)
    Q = CurvePoint(Fraction(1), Fraction(1))
    g = duplication_morphism(E)
    target = 2 * canonical_height(E, Q, 10).estimate
    for N in range(1, args.depth + 1):
        h, _ = rational_map_height(g, Q.x, N)
        print(f"{N:3d} {h:14.10f}  gap {h - target:+.2e}")
    print(f"2 hhat: {target:.10f}")


if __name__ == "__main__":
    main()
