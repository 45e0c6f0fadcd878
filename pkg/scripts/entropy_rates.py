"""Entropy quotients of the number-theoretic actions against the horizon N."""
import argparse

from heightentropy.adelic import NUMBER_THEORY_BUILTINS, builtin_action, entropy_trace


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--horizons", type=int, nargs="+", default=[10, 100, 1000, 10000])
    args = ap.parse_args()
    names = [n for n in NUMBER_THEORY_BUILTINS if n != "primes-up-to"]
    print(f"{'N':>7} " + " ".join(f"{n:>18}" for n in names))
    for N in args.horizons:
        row = [entropy_trace(builtin_action(n), N).estimate for n in names]
        print(f"{N:7d} " + " ".join(f"{v:18.6f}" for v in row))


if __name__ == "__main__":
    main()
