"""Periodic-point and direct estimates of the Julia local height by level."""
import argparse
import math

from heightentropy.julia import ComplexPoly, julia_local_height


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--poly", default="2,0,-1", help="coefficients, highest first")
    ap.add_argument("--q", type=complex, default=2)
    ap.add_argument("--levels", type=int, default=12)
    args = ap.parse_args()
    f = ComplexPoly.parse(args.poly)
    print(f"{'n':>3} {'root sum':>14} {'direct':>14} {'max residual':>13}")
    for n in range(1, args.levels + 1):
        r = julia_local_height(f, args.q, n)
        rs = "-" if r.root_sum is None else f"{r.root_sum:14.10f}"
        res = "-" if r.residual_max is None else f"{r.residual_max:.1e}"
        print(f"{n:3d} {rs:>14} {r.direct:14.10f} {res:>13}")
    if args.poly == "2,0,-1":
        print(f"closed form log|q + sqrt(q^2 - 1)|: {math.log(abs(args.q + (args.q**2 - 1) ** 0.5)):.10f}")


if __name__ == "__main__":
    main()
