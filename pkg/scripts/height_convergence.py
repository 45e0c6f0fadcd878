"""Convergence of the canonical height and its local pieces on 37a, Q = (0, 0)."""
import argparse
from fractions import Fraction

from heightentropy.adelic import elliptic_adelic_entropy, elliptic_real_entropy
from heightentropy.elliptic import CurvePoint, WeierstrassCurve
from heightentropy.heights import HeightConfig, canonical_height, height_decomposition


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--depth", type=int, default=10)
    args = ap.parse_args()
    E = WeierstrassCurve(0, 0, 1, -1, 0)
    Q = CurvePoint(Fraction(0), Fraction(0))
    print(f"{'N':>3} {'hhat':>16} {'real entropy':>16} {'adelic entropy/2':>18}")
    for N in range(1, args.depth + 1):
        h = canonical_height(E, Q, N).estimate
        r = elliptic_real_entropy(E, Q, N).estimate
        a = elliptic_adelic_entropy(E, Q, N).estimate / 2
        print(f"{N:3d} {h:16.12f} {r:16.12f} {a:18.12f}")
    rep = height_decomposition(E, Q, HeightConfig(args.depth, 400))
    print(f"local sum residual at depth {args.depth}: {rep.residual:.3e}")


if __name__ == "__main__":
    main()
