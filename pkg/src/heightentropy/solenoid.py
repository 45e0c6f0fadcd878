"""Genus-0 baseline: multiplication by a/b on the solenoid."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .places import DomainError, log_plus, mobius, relevant_places

# the place-sum and log max(|a|,|b|) are both double-precision logs
PLACE_SUM_TOL = 1e-9


def _check_pair(a: int, b: int) -> None:
    if a == 0 and b == 0:
        raise DomainError("(0, 0) is not a projective point")
    if math.gcd(a, b) != 1:
        raise DomainError(f"({a}, {b}) is not coprime")


def place_sum(a: int, b: int) -> dict[str, float]:
    """``log+|a/b|_v`` at every place where it can be nonzero."""
    _check_pair(a, b)
    if b == 0:
        # the point at infinity [1, 0]
        return {"inf": 0.0}
    q = Fraction(a, b)
    if q == 0:
        return {"inf": 0.0}
    return {str(v): log_plus(q, v) for v in relevant_places([q])}


def projective_height(a: int, b: int) -> float:
    """``log max(|a|, |b|)``, cross-checked against the sum of local ``log+``."""
    _check_pair(a, b)
    h = math.log(max(abs(a), abs(b)))
    total = math.fsum(place_sum(a, b).values())
    if abs(total - h) > PLACE_SUM_TOL * max(1.0, h):
        raise ArithmeticError(f"place sum {total} disagrees with height {h}")
    return h


def jensen_quadrature(a: int, b: int, panels: int = 2048) -> float:
    """Trapezoid rule for the integral of ``log|b e(t) - a|`` over the circle.

    The integrand is analytic and periodic when ``|a| != |b|``, so the rule
    converges geometrically in ``panels``.
    """
    if abs(a) == abs(b):
        raise DomainError("logarithmic singularity on contour")
    if panels < 16:
        raise DomainError("need at least 16 panels")
    t = np.arange(panels) / panels
    z = b * np.exp(2j * np.pi * t) - a
    return float(np.mean(np.log(np.abs(z))))


def periodic_count(a: int, b: int, n: int) -> int:
    """Number of points of period ``n``: ``|a^n - b^n|``."""
    _check_pair(a, b)
    if abs(a) == abs(b):
        raise DomainError("degenerate: |a| = |b|")
    if n < 1:
        raise DomainError("n must be positive")
    return abs(a**n - b**n)


@dataclass(frozen=True)
class CongruenceResult:
    n: int
    total: int
    residue: int

    @property
    def ok(self) -> bool:
        return self.total >= 0 and self.residue == 0


def mobius_congruence(seq: Sequence[int], n: int) -> CongruenceResult:
    """``sum_{d|n} mu(n/d) seq[d]`` and its residue mod ``n``; ``seq`` is 1-indexed.

    Periodic-point counts of any map satisfy ``0 <= total == 0 (mod n)``.
    """
    if n < 1 or n > len(seq):
        raise DomainError(f"index {n} outside 1..{len(seq)}")
    total = sum(mobius(n // d) * seq[d - 1] for d in range(1, n + 1) if n % d == 0)
    return CongruenceResult(n, total, total % n)


@dataclass
class SolenoidReport:
    a: int
    b: int
    height: float
    quadrature: float
    panels: int
    place_sum: dict[str, float]
    counts: list[int]
    congruence: list[CongruenceResult]
    growth: list[float]

    def to_dict(self) -> dict:
        return {
            "a": self.a,
            "b": self.b,
            "height": self.height,
            "quadrature": self.quadrature,
            "panels": self.panels,
            "place_sum": dict(self.place_sum),
            "counts": list(self.counts),
            "congruence": [
                {"n": c.n, "total": c.total, "residue": c.residue} for c in self.congruence
            ],
            "trace": {"growth": list(self.growth)},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SolenoidReport":
        return cls(d["a"], d["b"], d["height"], d["quadrature"], d["panels"],
                   dict(d["place_sum"]), list(d["counts"]),
                   [CongruenceResult(c["n"], c["total"], c["residue"]) for c in d["congruence"]],
                   list(d["trace"]["growth"]))


def solenoid_report(a: int, b: int, n: int, panels: int = 2048) -> SolenoidReport:
    counts = [periodic_count(a, b, k) for k in range(1, n + 1)]
    return SolenoidReport(
        a=a,
        b=b,
        height=projective_height(a, b),
        quadrature=jensen_quadrature(a, b, panels),
        panels=panels,
        place_sum=place_sum(a, b),
        counts=counts,
        congruence=[mobius_congruence(counts, k) for k in range(1, n + 1)],
        growth=[math.log(c) / k if c else -math.inf for k, c in enumerate(counts, 1)],
    )
