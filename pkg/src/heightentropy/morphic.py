"""Canonical heights for polynomial maps of the projective line over Q.

Orbits are exact.  For a polynomial ``f`` of degree ``d`` the local heights
``lambda_{f,v}(q) = lim d^-n log+|f^n(q)|_v`` sum to ``hhat_f(q)``, which
vanishes exactly on pre-periodic points.  The duplication map of an elliptic
curve is a rational (not polynomial) map and only serves as a cross-check.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Optional, Union

from .adelic import DiagonalAction, EntropyTrace, PlaceFilter, _trace_from_index_one
from .elliptic import WeierstrassCurve
from .places import (
    INF,
    DomainError,
    Place,
    RateFunction,
    as_place,
    big_gcd,
    log_abs_real,
    parse_rational,
    prime_divisors,
    valuation,
)

ORBIT_BIT_GUARD = 1 << 20
# consecutive steps with h(f_{n+1}) > (d/2) h(f_n) before an orbit counts as wandering
GROWTH_STREAK = 3


def _log_plus_at(z: Fraction, v: Place) -> float:
    if z == 0:
        return 0.0
    if v.is_archimedean:
        return max(0.0, log_abs_real(z))
    return max(0, -valuation(z, v.p)) * math.log(v.p)


def _naive_log_height(z: Fraction) -> float:
    """``log max(|a|, |b|)`` for ``z = a/b``."""
    m = max(abs(z.numerator), z.denominator)
    return math.log(m) if m > 1 else 0.0


@dataclass(frozen=True)
class PolyMap:
    """``f(z) = c_d z^d + ... + c_0`` with rational coefficients (highest first)."""

    coefficients: tuple

    def __post_init__(self):
        cs = tuple(Fraction(c) for c in self.coefficients)
        while len(cs) > 1 and cs[0] == 0:
            cs = cs[1:]
        if len(cs) < 3:
            raise DomainError("polynomial map needs degree >= 2")
        object.__setattr__(self, "coefficients", cs)
        # integer form: f(a/b) = sum C_k a^k b^(d-k) / (D b^d)
        D = math.lcm(*(c.denominator for c in cs))
        object.__setattr__(self, "_D", D)
        object.__setattr__(self, "_C", tuple(int(c * D) for c in cs))

    @classmethod
    def parse(cls, text: str) -> "PolyMap":
        parts = [s for s in text.replace(" ", "").split(",") if s]
        return cls(tuple(parse_rational(s) for s in parts))

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def leading(self) -> Fraction:
        return self.coefficients[0]

    def __call__(self, z) -> Fraction:
        z = Fraction(z)
        return self._eval_homogeneous(z.numerator, z.denominator)

    def _eval_homogeneous(self, a: int, b: int) -> Fraction:
        d = self.degree
        bp = [1] * (d + 1)
        for k in range(1, d + 1):
            bp[k] = bp[k - 1] * b
        num = 0
        for i, C in enumerate(self._C):
            # the coefficient of z^(d-i) contributes C a^(d-i) b^i
            num = num * a + C * bp[i]
        den = self._D * bp[d]
        g = big_gcd(num, den)
        return _reduced(num // g, den // g)

    def __str__(self) -> str:
        return ",".join(str(c) for c in self.coefficients)


def _reduced(num: int, den: int) -> Fraction:
    """Fraction from a pair already in lowest terms (skips a second huge gcd)."""
    try:
        return Fraction(num, den, _normalize=False)
    except TypeError:  # pragma: no cover - newer Pythons dropped the flag
        return Fraction(num, den)


def _poly_call(f: PolyMap, z: Fraction) -> Fraction:
    return f._eval_homogeneous(z.numerator, z.denominator)


@dataclass
class OrbitRecord:
    q: Fraction
    values: list[Fraction]  # f_0 = q, f_1, ..., exactly
    preperiod: Optional[int] = None  # first index of the cycle
    period: Optional[int] = None
    truncated: bool = False
    wandering: bool = False

    @property
    def preperiodic(self) -> bool:
        return self.period is not None

    def value(self, n: int) -> Fraction:
        """``f^n(q)``, extending a detected cycle past the stored terms."""
        if n < len(self.values):
            return self.values[n]
        if not self.preperiodic:
            raise DomainError(f"orbit only computed to n = {len(self.values) - 1}")
        return self.values[self.preperiod + (n - self.preperiod) % self.period]


def orbit(f: PolyMap, q, N: int, bit_guard: int = ORBIT_BIT_GUARD) -> OrbitRecord:
    """Exact iterates ``f^n(q)`` for ``n = 0..N`` with cycle detection."""
    if N < 0:
        raise DomainError("orbit length must be non-negative")
    q = Fraction(q)
    values = [q]
    seen = {q: 0}
    rec = OrbitRecord(q, values)
    d = f.degree
    streak = 0
    h_prev = _naive_log_height(q)
    for n in range(1, N + 1):
        z = _poly_call(f, values[-1])
        if z in seen:
            rec.preperiod = seen[z]
            rec.period = n - seen[z]
            break
        if max(abs(z.numerator).bit_length(), z.denominator.bit_length()) > bit_guard:
            rec.truncated = True
            break
        values.append(z)
        seen[z] = n
        h = _naive_log_height(z)
        streak = streak + 1 if h_prev > 0 and h > 0.5 * d * h_prev else 0
        if streak >= GROWTH_STREAK:
            rec.wandering = True
        h_prev = h
    return rec


class LocalMorphicHeight(NamedTuple):
    estimate: float
    trace: list[float]  # trace[n] = d^-n log+|f^n(q)|_v


def _depth(rec: OrbitRecord, N: int) -> int:
    return N if rec.preperiodic or N < len(rec.values) else len(rec.values) - 1


def morphic_local_height(f: PolyMap, q, v, N: int,
                         rec: Optional[OrbitRecord] = None) -> LocalMorphicHeight:
    """``d^-N log+|f^N(q)|_v`` with its trace; exactly 0 once pre-periodicity is detected."""
    v = as_place(v)
    if rec is None:
        rec = orbit(f, q, N)
    d = f.degree
    depth = _depth(rec, N)
    trace = [_log_plus_at(rec.value(n), v) / d**n for n in range(depth + 1)]
    est = 0.0 if rec.preperiodic else trace[-1]
    return LocalMorphicHeight(est, trace)


def morphic_places(f: PolyMap, q) -> list[Place]:
    """Places where ``log+|f^n(q)|_v`` can be nonzero: primes of the denominators of q and of f, and ``inf``."""
    q = Fraction(q)
    dens = math.lcm(q.denominator, *(c.denominator for c in f.coefficients))
    primes = prime_divisors(dens) if dens > 1 else []
    return [Place(p) for p in primes] + [INF]


@dataclass
class MorphicHeightReport:
    poly: str
    q: str
    depth: int
    global_height: float
    locals: dict[str, float]
    preperiodic: bool
    wandering: bool
    truncated: bool
    period: Optional[int] = None
    preperiod: Optional[int] = None
    traces: dict[str, list[float]] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "poly": self.poly,
            "q": self.q,
            "depth": self.depth,
            "global_height": self.global_height,
            "locals": dict(self.locals),
            "preperiodic": self.preperiodic,
            "wandering": self.wandering,
            "truncated": self.truncated,
            "period": self.period,
            "preperiod": self.preperiod,
            "trace": {k: list(v) for k, v in self.traces.items()},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MorphicHeightReport":
        return cls(d["poly"], d["q"], d["depth"], d["global_height"], dict(d["locals"]),
                   d["preperiodic"], d["wandering"], d["truncated"], d["period"],
                   d["preperiod"], {k: list(v) for k, v in d["trace"].items()})


def morphic_height_report(f: PolyMap, q, N: int) -> MorphicHeightReport:
    q = Fraction(q)
    rec = orbit(f, q, N)
    locs, traces = {}, {}
    for v in morphic_places(f, q):
        lh = morphic_local_height(f, q, v, N, rec)
        locs[str(v)] = lh.estimate
        traces[str(v)] = lh.trace
    return MorphicHeightReport(
        poly=str(f), q=str(q), depth=_depth(rec, N),
        global_height=math.fsum(locs.values()), locals=locs,
        preperiodic=rec.preperiodic, wandering=rec.wandering, truncated=rec.truncated,
        period=rec.period, preperiod=rec.preperiod, traces=traces,
    )


def morphic_global_height(f: PolyMap, q, N: int) -> float:
    """``hhat_f(q)`` as the sum of local heights over the finitely many relevant places."""
    return morphic_height_report(f, q, N).global_height


def morphic_entropy(f: PolyMap, q, N: int,
                    place_filter: Union[PlaceFilter, str, None] = None) -> EntropyTrace:
    """``T_n(x) = f_n x`` on the adeles (or a place subset) with ``r(n) = d^n``.

    ``f_n = 0`` imposes no constraint on the box and is replaced by 1.
    """
    if isinstance(place_filter, str):
        place_filter = PlaceFilter.parse(place_filter)
    rec = orbit(f, q, N)
    depth = _depth(rec, N)
    if depth < 1:
        raise DomainError("orbit too short for an entropy trace")
    thetas = []
    for n in range(1, depth + 1):
        z = rec.value(n)
        thetas.append((1, 1) if z == 0 else (z.numerator, z.denominator))
    rate = RateFunction("exp", Fraction(f.degree))
    flt = place_filter or PlaceFilter()
    notes = ["f_n = 0 terms replaced by 1"] if any(z == (1, 1) for z in thetas) else []
    if rec.truncated:
        notes.append(f"orbit truncated at n = {depth} by the bit-size guard")
    target = None
    if flt.kind == "all":
        target = morphic_global_height(f, q, depth)
    elif flt.kind == "single":
        (v,) = flt.places
        target = morphic_local_height(f, q, v, depth, rec).estimate
    action = DiagonalAction("morphic", thetas, rate, flt, target, notes=notes)
    return _trace_from_index_one(action, depth)


# -- the duplication map as a rational-map cross-check ----------------------------

@dataclass(frozen=True)
class RationalMap:
    """``g(z) = P(z)/Q(z)`` with integer coefficients (highest first)."""

    num: tuple
    den: tuple

    @property
    def degree(self) -> int:
        return max(len(self.num), len(self.den)) - 1

    def homogeneous(self, a: int, b: int) -> tuple[int, int]:
        d = self.degree

        def hom(cs):
            out = 0
            pad = (0,) * (d + 1 - len(cs)) + tuple(cs)
            bp = [1] * (d + 1)
            for k in range(1, d + 1):
                bp[k] = bp[k - 1] * b
            for i, c in enumerate(pad):
                out = out * a + c * bp[i]
            return out

        return hom(self.num), hom(self.den)

    def __call__(self, z) -> Fraction:
        z = Fraction(z)
        P, Q = self.homogeneous(z.numerator, z.denominator)
        if Q == 0:
            raise DomainError(f"pole at z = {z}")
        return Fraction(P, Q)

    def iterate(self, z, n: int) -> list[Fraction]:
        out = [Fraction(z)]
        for _ in range(n):
            out.append(self(out[-1]))
        return out


def duplication_morphism(E: Union[WeierstrassCurve, tuple]) -> RationalMap:
    """``x(2Q)`` as a rational function of ``x(Q)`` on ``y^2 = x^3 + a x + b``."""
    if isinstance(E, WeierstrassCurve):
        if (E.c1, E.c2, E.c3) != (0, 0, 0):
            raise DomainError("duplication morphism needs a short Weierstrass model")
        a, b = E.c4, E.c6
    else:
        a, b = E
    if 4 * a**3 + 27 * b**2 == 0:
        raise DomainError("singular curve: 4a^3 + 27b^2 = 0")
    return RationalMap((1, 0, -2 * a, -8 * b, a * a), (4, 0, 4 * a, 4 * b))


def rational_map_height(g: RationalMap, z, N: int) -> tuple[float, list[float]]:
    """``d^-n log max(|num|, |den|)`` of ``g^n(z)`` for ``n = 0..N``."""
    trace = [_naive_log_height(w) / g.degree**n for n, w in enumerate(g.iterate(z, N))]
    return trace[-1], trace
