"""Command-line front end.

    heightentropy solenoid --a 3 --b 2 --n 3
    heightentropy eds --curve 0,0,1,-1,0 --point "0;0" --n 16
    heightentropy height --curve 0,0,1,-1,0 --point "0;0" --depth 10
    heightentropy entropy --action primorial --rate nlogn --horizon 10000
    heightentropy morphic --poly 1,0,0 --q 2/3 --depth 12
    heightentropy julia --poly 2,0,-1 --q 2 --level 12

Reports are JSON (sorted keys, reals to 12 significant digits, rationals as
strings) or CSV rows ``n,quantity,value`` for the traces.  Exit status is 0
on success, 1 for a computational error and 2 for a usage or parse error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Optional

import numpy as np

from . import adelic, elliptic, heights, julia, morphic, solenoid
from .places import DomainError, Place, RateFunction, parse_rational

SIG_DIGITS = 12


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    subcommand: str
    curve: Optional[elliptic.WeierstrassCurve] = None
    point: Optional[elliptic.CurvePoint] = None
    poly: Optional[str] = None
    action: Optional[str] = None
    knobs: dict[str, Any] = field(default_factory=dict)
    fmt: str = "json"
    output: Optional[str] = None
    stride: int = 1

    def validate(self) -> None:
        for k, v in self.knobs.items():
            if isinstance(v, (int, float)) and not isinstance(v, bool) and v <= 0:
                raise UsageError(f"--{k.replace('_', '-')} must be positive, got {v}")
        if self.stride < 1:
            raise UsageError("--stride must be positive")
        if self.fmt not in ("json", "csv"):
            raise UsageError(f"unknown format {self.fmt!r}")


# -- serialization --------------------------------------------------------------

def _clean(obj):
    """JSON-safe copy: 12 significant digits, rationals and non-finite reals as strings."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return str(x)
        return float(f"{x:.{SIG_DIGITS}g}")
    if isinstance(obj, complex):
        return {"re": _clean(obj.real), "im": _clean(obj.imag)}
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(report: dict) -> str:
    return json.dumps(_clean(report), sort_keys=True, indent=2) + "\n"


def _csv_rows(report: dict) -> list[tuple]:
    """``(n, quantity, value)`` for every sequence under the ``trace`` key."""
    rows: list[tuple] = []

    def walk(prefix: str, node, index: Optional[list] = None):
        if isinstance(node, dict):
            idx = node.get("n", index)
            for k in sorted(node):
                if k == "n":
                    continue
                walk(f"{prefix}.{k}" if prefix else k, node[k], idx)
        elif isinstance(node, list):
            idx = index if index is not None and len(index) == len(node) else None
            for i, v in enumerate(node):
                rows.append((idx[i] if idx else i, prefix, v))

    walk("", report.get("trace", {}))
    return rows


def dumps_csv(report: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "quantity", "value"])
    for n, q, v in _csv_rows(_clean(report)):
        w.writerow([n, q, v])
    return buf.getvalue()


# -- parsing helpers ------------------------------------------------------------

def _parse_complex(text: str) -> complex:
    text = text.strip().replace(" ", "")
    try:
        return complex(float(Fraction(text)))
    except ValueError:
        try:
            return complex(text.replace("i", "j"))
        except ValueError as exc:
            raise DomainError(f"cannot parse complex number {text!r}") from exc


def _read_rationals(path: str) -> list[Fraction]:
    with open(path) as fh:
        tokens = fh.read().replace(",", " ").split()
    if not tokens:
        raise DomainError(f"no rationals in {path}")
    return [parse_rational(t) for t in tokens]


def _curve_point(args) -> tuple[elliptic.WeierstrassCurve, elliptic.CurvePoint]:
    if not args.curve or not args.point:
        raise UsageError("--curve and --point are required")
    E = elliptic.WeierstrassCurve.parse(args.curve)
    Q = elliptic.CurvePoint.parse(args.point)
    if not E.contains(Q):
        raise DomainError(f"point {Q} is not on {E}")
    return E, Q


def _parse_tate(specs: list[str]) -> dict[int, float]:
    """``p:k:r`` or ``p:k:0:|1-u|_p`` -> supplied local heights."""
    out = {}
    for s in specs or []:
        parts = s.split(":")
        if len(parts) not in (3, 4):
            raise DomainError(f"bad --tate spec {s!r}; want p:k:r or p:k:0:unit_dist")
        p, k, r = (int(t) for t in parts[:3])
        unit = float(parse_rational(parts[3])) if len(parts) == 4 else None
        out[p] = heights.tate_local_height(p, k, r, unit)
    return out


# -- subcommands -----------------------------------------------------------------

def run_solenoid(cfg: RunConfig) -> dict:
    k = cfg.knobs
    return solenoid.solenoid_report(k["a"], k["b"], k["n"], k["panels"]).to_dict()


def run_eds(cfg: RunConfig) -> dict:
    E, Q, N = cfg.curve, cfg.point, cfg.knobs["n"]
    seq = elliptic.division_poly_values(E, Q, N)
    res = elliptic.eds_sequences(E, Q, N, seq)
    W = [seq.W(n) for n in range(1, N + 1)]
    absW = [abs(w) for w in W]
    cong = []
    if all(w.denominator == 1 for w in absW):
        ints = [int(w) for w in absW]
        cong = [
            {"n": c.n, "total": c.total, "residue": c.residue}
            for c in (solenoid.mobius_congruence(ints, n) for n in range(1, N + 1))
        ]
    out = res.to_dict()
    out.update({
        "curve": str(E),
        "point": str(Q),
        "N": N,
        "W": [str(w) for w in W],
        "congruence_absW": cong,
        "trace": {"log_abs_W": [seq.log_abs(n) if not seq.is_zero(n) else -math.inf
                                for n in range(1, N + 1)]},
    })
    return out


def run_height(cfg: RunConfig) -> dict:
    k = cfg.knobs
    conf = heights.HeightConfig(depth=k["depth"], psi_n=k["psi_n"])
    rep = heights.height_decomposition(cfg.curve, cfg.point, conf, k.get("tate") or None)
    d = rep.to_dict(with_trace=True)
    # keep per-place psi traces under the shared trace key as well
    d["trace"] = {"hhat": rep.hhat_trace,
                  **{f"lambda_{r.place}": r.trace for r in rep.locals if r.trace}}
    for loc in d["locals"]:
        loc.pop("trace", None)
    return d


ELLIPTIC_DEFAULT_HORIZON = {"elliptic-b": 10, "elliptic-theta": 10,
                            "eds-u-inverse": 8, "flip-local": 200}


def run_entropy(cfg: RunConfig) -> dict:
    k = cfg.knobs
    name = cfg.action
    rate = RateFunction.parse(k["rate"]) if k.get("rate") else None
    pf = k.get("place_filter") or "all"
    if name in adelic.NUMBER_THEORY_BUILTINS:
        N = k.get("horizon") or 1000
        trace = adelic.entropy_trace(
            adelic.builtin_action(name, rate, adelic.PlaceFilter.parse(pf)), N)
    elif name in adelic.ELLIPTIC_BUILTINS:
        E, Q = cfg.curve, cfg.point
        if E is None:
            raise UsageError(f"action {name} needs --curve and --point")
        N = k.get("horizon") or ELLIPTIC_DEFAULT_HORIZON[name]
        trace = _elliptic_entropy(name, E, Q, N, pf, k.get("psi_n") or 200)
    else:
        path = name[1:] if name.startswith("@") else name
        if not os.path.exists(path):
            raise UsageError(f"unknown action {name!r} (not a builtin and no such file)")
        thetas = cfg.knobs["thetas"]
        N = k.get("horizon") or len(thetas)
        action = adelic.explicit_action(thetas, rate or RateFunction("n"), os.path.basename(path),
                                        adelic.PlaceFilter.parse(pf))
        trace = adelic.entropy_trace(action, N)
    return trace.to_dict(stride=cfg.stride)


def _elliptic_entropy(name, E, Q, N, pf, psi_n) -> adelic.EntropyTrace:
    depth = min(max(N, 6), heights.MAX_HEIGHT_DEPTH)
    if name == "elliptic-b":
        tr = adelic.elliptic_real_entropy(E, Q, N)
        tr.target = heights.canonical_height(E, Q, depth).estimate
    elif name == "elliptic-theta":
        tr = adelic.elliptic_adelic_entropy(E, Q, N)
        tr.target = 2 * heights.canonical_height(E, Q, depth).estimate
    elif name == "eds-u-inverse":
        mode = {"all": "all", "s": "S", "complement": "complement",
                "complement-of-s": "complement"}.get(pf.lower())
        if mode is None:
            raise DomainError("eds-u-inverse takes --place-filter all, S or complement")
        tr = adelic.eds_entropy(E, Q, N, mode)
        rep = heights.height_decomposition(E, Q, heights.HeightConfig(min(depth, 10), psi_n))
        S = adelic.singular_primes(E, Q)
        lam_S = math.fsum(rep.local(p).value for p in S)
        if mode == "all":
            tr.target = rep.local("inf").value + 0.5 * math.log(math.isqrt(Q.x.denominator))
        elif mode == "S":
            tr.target = -lam_S
        else:
            tr.target = rep.hhat
    else:
        v = Place.parse(pf) if pf != "all" else None
        if v is None:
            raise DomainError("flip-local needs a single place in --place-filter")
        tr = adelic.local_flip_entropy(E, Q, v, N)
        if v.is_archimedean or elliptic.reduction_analysis(E, Q, v.p).singular:
            lam = heights.local_height_psi_limit(E, Q, v, N).estimate
        else:
            lam = heights.local_height_nonsingular(E, Q, v.p).value
        tr.target = abs(lam)
    return tr


def run_morphic(cfg: RunConfig) -> dict:
    k = cfg.knobs
    f = morphic.PolyMap.parse(cfg.poly)
    q = k["q"]
    rep = morphic.morphic_height_report(f, q, k["depth"])
    out = rep.to_dict()
    place = k.get("place")
    pf = adelic.PlaceFilter.single(place) if place else adelic.PlaceFilter()
    if rep.depth >= 1:
        ent = morphic.morphic_entropy(f, q, k["depth"], pf)
        out["entropy"] = {"place_filter": str(pf), "estimate": ent.estimate,
                          "target": ent.target}
    if place:
        out["place"] = str(place)
        out["local_height"] = rep.locals.get(str(place), 0.0)
    return out


def run_julia(cfg: RunConfig) -> dict:
    k = cfg.knobs
    f = julia.ComplexPoly.parse(cfg.poly)
    q = k["q"]
    res = julia.julia_local_height(f, q, k["level"], k["tol"])
    out = res.to_dict()
    out.update({"poly": cfg.poly, "q": {"re": q.real, "im": q.imag}})
    if julia.is_chebyshev(f):
        out["closed_form"] = julia.chebyshev_closed_form(q)
        if not (q.imag == 0 and -1 <= q.real <= 1):
            out["arcsine_integral"] = julia.arcsine_integral(q, k["panels"])
    out["trace"] = {"n": [res.level],
                    "root_sum": [res.root_sum if res.root_sum is not None else math.nan],
                    "direct": [res.direct if res.direct is not None else math.nan]}
    return out


RUNNERS = {
    "solenoid": run_solenoid,
    "eds": run_eds,
    "height": run_height,
    "entropy": run_entropy,
    "morphic": run_morphic,
    "julia": run_julia,
}


# -- argument parsing -------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="heightentropy", description=__doc__.split("\n\n")[0])
    sub = ap.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--output", "-o", help="write the report here instead of stdout")
        p.add_argument("--stride", type=int, default=1, help="keep every k-th trace entry")

    p = sub.add_parser("solenoid", help="projective height, Jensen quadrature, periodic points")
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--b", type=int, required=True)
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--panels", type=int, default=2048)
    common(p)

    p = sub.add_parser("eds", help="division values and the elliptic divisibility sequence")
    p.add_argument("--curve", required=True, help="c1,c2,c3,c4,c6")
    p.add_argument("--point", required=True, help="x;y")
    p.add_argument("--n", type=int, default=16)
    common(p)

    p = sub.add_parser("height", help="canonical height and its local decomposition")
    p.add_argument("--curve", required=True)
    p.add_argument("--point", required=True)
    p.add_argument("--depth", type=int, default=10)
    p.add_argument("--psi-n", type=int, default=400)
    p.add_argument("--tate", action="append", metavar="p:k:r[:unit]",
                   help="supply a Tate-curve local height at a singular place")
    common(p)

    p = sub.add_parser("entropy", help="volume-growth entropy of a diagonal action")
    p.add_argument("--action", required=True,
                   help="builtin name or a file of rationals (optionally prefixed with @)")
    p.add_argument("--rate", help="n | nlogn | n2 | logn | exp:c")
    p.add_argument("--curve")
    p.add_argument("--point")
    p.add_argument("--place-filter", default="all",
                   help="all | <place> | subset:p,q | complement:p,q | S | complement")
    p.add_argument("--horizon", type=int)
    p.add_argument("--psi-n", type=int, default=200)
    common(p)

    p = sub.add_parser("morphic", help="canonical height for a polynomial map")
    p.add_argument("--poly", required=True, help="c_d,...,c_0")
    p.add_argument("--q", required=True)
    p.add_argument("--depth", type=int, default=12)
    p.add_argument("--place")
    common(p)

    p = sub.add_parser("julia", help="archimedean height from periodic points")
    p.add_argument("--poly", required=True, help="c_d,...,c_0 (complex allowed)")
    p.add_argument("--q", required=True)
    p.add_argument("--level", type=int, default=10)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--panels", type=int, default=4096)
    common(p)
    return ap


def parse_config(argv: Optional[list[str]] = None) -> RunConfig:
    """Parse arguments and every entity spec; raises UsageError or DomainError."""
    args = build_parser().parse_args(argv)
    cfg = RunConfig(args.subcommand, fmt=args.format, output=args.output, stride=args.stride)
    sc = args.subcommand
    if sc == "solenoid":
        cfg.knobs = {"a": args.a, "b": args.b, "n": args.n, "panels": args.panels}
    elif sc in ("eds", "height"):
        cfg.curve, cfg.point = _curve_point(args)
        if sc == "eds":
            cfg.knobs = {"n": args.n}
        else:
            cfg.knobs = {"depth": args.depth, "psi_n": args.psi_n}
            if args.depth > heights.MAX_HEIGHT_DEPTH:
                raise UsageError(f"--depth is capped at {heights.MAX_HEIGHT_DEPTH}")
    elif sc == "entropy":
        cfg.action = args.action
        cfg.knobs = {"horizon": args.horizon, "psi_n": args.psi_n}
        if args.rate:
            RateFunction.parse(args.rate)
            cfg.knobs["rate"] = args.rate
        cfg.knobs["place_filter"] = args.place_filter
        if args.action in adelic.ELLIPTIC_BUILTINS or args.curve:
            cfg.curve, cfg.point = _curve_point(args)
        if args.action not in adelic.NUMBER_THEORY_BUILTINS \
                and args.action not in adelic.ELLIPTIC_BUILTINS:
            path = args.action[1:] if args.action.startswith("@") else args.action
            if not os.path.exists(path):
                raise UsageError(f"unknown action {args.action!r} (not a builtin and no such file)")
            cfg.knobs["thetas"] = _read_rationals(path)
        elif args.place_filter.lower() not in ("s", "complement", "complement-of-s"):
            adelic.PlaceFilter.parse(args.place_filter)
    elif sc == "morphic":
        morphic.PolyMap.parse(args.poly)
        cfg.poly = args.poly
        cfg.knobs = {"q": parse_rational(args.q), "depth": args.depth}
        if args.place:
            cfg.knobs["place"] = Place.parse(args.place)
    else:
        julia.ComplexPoly.parse(args.poly)
        cfg.poly = args.poly
        cfg.knobs = {"q": _parse_complex(args.q), "level": args.level, "tol": args.tol,
                     "panels": args.panels}
    # the tate values are knobs too, but may legitimately be negative
    if sc == "height" and args.tate:
        tate = _parse_tate(args.tate)
        cfg.validate()
        cfg.knobs["tate"] = tate
        return cfg
    cfg.validate()
    return cfg


def run(cfg: RunConfig) -> dict:
    return RUNNERS[cfg.subcommand](cfg)


def main(argv: Optional[list[str]] = None) -> int:
    # exact denominators such as b_N^2 run to hundreds of thousands of digits
    sys.set_int_max_str_digits(0)
    try:
        cfg = parse_config(argv)
    except (UsageError, DomainError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        report = run(cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (DomainError, ArithmeticError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    text = dumps_csv(report) if cfg.fmt == "csv" else dumps(report)
    if cfg.output:
        with open(cfg.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
