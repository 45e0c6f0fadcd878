"""Local and global canonical heights on elliptic curves.

Normalization: ``h_E(Q) = 1/2 log max(|a|, |b|)`` for ``x(Q) = a/b``, so that
``hhat(Q) = lim 4^-n h_E(2^n Q)``; local heights are the x-normalized ones
(``lambda_p = 1/2 log+|x|_p`` at nonsingular places) and sum to ``hhat``.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Optional

from .elliptic import (
    CurvePoint,
    DivisionSequence,
    ReductionInfo,
    TorsionError,
    WeierstrassCurve,
    division_poly_values,
    double_iterates,
    is_torsion,
    reduction_analysis,
)
from .places import INF, DomainError, Place, as_place, prime_divisors, valuation

MAX_HEIGHT_DEPTH = 12


class SingularReductionError(DomainError):
    pass


@dataclass
class HeightConfig:
    depth: int = 10  # doubling depth for hhat
    psi_n: int = 400  # division-polynomial index for psi-limit estimates


def naive_height(Q: CurvePoint) -> float:
    if Q.is_identity:
        return 0.0
    x = Q.x
    return 0.5 * math.log(max(abs(x.numerator), x.denominator))


@dataclass
class CanonicalHeight:
    estimate: float
    trace: list[float]
    torsion: bool = False

    @property
    def gaps(self) -> list[float]:
        return [abs(b - a) for a, b in zip(self.trace, self.trace[1:])]


def canonical_height(E: WeierstrassCurve, Q: CurvePoint, N: int = 10) -> CanonicalHeight:
    """``4^-n h_E(2^n Q)`` for ``n = 0..N``; the last entry is the estimate."""
    if N > MAX_HEIGHT_DEPTH:
        raise DomainError(f"depth {N} exceeds {MAX_HEIGHT_DEPTH}")
    if Q.is_identity or is_torsion(E, Q):
        return CanonicalHeight(0.0, [0.0] * (N + 1), torsion=True)
    trace = [naive_height(Q)]
    for it in double_iterates(E, Q, N):
        h = 0.5 * max(math.log(abs(it.a)) if it.a else 0.0, 2 * math.log(it.b))
        trace.append(h / 4**it.n)
    return CanonicalHeight(trace[-1], trace)


@dataclass
class LocalHeightReport:
    place: str
    value: float
    method: str  # closed-form | psi-limit | tate-formula | subtraction
    reduction: Optional[ReductionInfo] = None
    trace: list[float] = field(default_factory=list, repr=False)

    @property
    def sign(self) -> int:
        return 1 if self.value >= 0 else -1

    def to_dict(self, with_trace: bool = True) -> dict:
        out = {
            "place": self.place,
            "value": self.value,
            "method": self.method,
            "sign": self.sign,
            "reduction": asdict(self.reduction) if self.reduction else None,
        }
        if with_trace:
            out["trace"] = self.trace
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "LocalHeightReport":
        red = ReductionInfo(**d["reduction"]) if d.get("reduction") else None
        return cls(d["place"], d["value"], d["method"], red, list(d.get("trace", [])))


def local_height_nonsingular(E: WeierstrassCurve, Q: CurvePoint, p: int,
                             info: Optional[ReductionInfo] = None) -> LocalHeightReport:
    """``1/2 log+|x(Q)|_p``, valid where ``Q`` has nonsingular reduction."""
    if info is None:
        info = reduction_analysis(E, Q, p)
    if info.singular:
        raise SingularReductionError(f"Q has singular reduction at {p}; use tate/psi-limit path")
    if Q.is_identity:
        raise DomainError("local height is undefined at the identity")
    v = max(0, -valuation(Q.x, p)) if Q.x else 0
    return LocalHeightReport(str(p), v * math.log(p) / 2, "closed-form", info)


def tate_local_height(p: int, k: int, r: int, unit_dist: Optional[float] = None) -> float:
    """Local height of a point on a split multiplicative Tate curve.

    ``|l|_p = p^-k`` and ``|u|_p = p^-r`` with ``0 <= r < k``; for ``r = 0``
    pass ``unit_dist = |1 - u|_p``.
    """
    if k < 1:
        raise DomainError("k must be positive")
    if not 0 <= r < k:
        raise DomainError(f"need 0 <= r < k, got r={r}, k={k}")
    if r == 0:
        if unit_dist is None:
            raise DomainError("r = 0 needs |1 - u|_p")
        if unit_dist <= 0:
            raise DomainError("|1 - u|_p must be positive")
        return -math.log(unit_dist)
    t = Fraction(r, k)
    return -float(Fraction(k, 2) * (t - t * t)) * math.log(p)


@dataclass
class PsiLimit:
    estimate: float
    trace: list[float]  # trace[n-1] = (1/2n^2) log|W_n^2|_v


def local_height_psi_limit(E: WeierstrassCurve, Q: CurvePoint, v, N: int = 400,
                           seq: Optional[DivisionSequence] = None) -> PsiLimit:
    """``lambda_v(Q) ~ (1/2N^2) log|psi_N(Q)|_v`` with ``psi_N = W_N^2``."""
    v = as_place(v)
    if seq is None or seq.N < N:
        if is_torsion(E, Q):
            raise TorsionError("psi-limit needs a non-torsion point")
        seq = division_poly_values(E, Q, N)
    zeros = [n for n in range(1, N + 1) if seq.is_zero(n)]
    if zeros:
        raise TorsionError(f"W_n(Q) = 0 at n = {zeros[0]}")
    trace = [seq.log_abs(n, v.p) / (n * n) for n in range(1, N + 1)]
    return PsiLimit(trace[-1], trace)


def finite_places_of(E: WeierstrassCurve, Q: CurvePoint) -> list[int]:
    """Primes dividing the x-denominator of ``Q`` or the discriminant."""
    primes = set(prime_divisors(E.discriminant))
    if not Q.is_identity and Q.x.denominator > 1:
        primes.update(prime_divisors(Q.x.denominator))
    return sorted(primes)


def finite_local_heights(E: WeierstrassCurve, Q: CurvePoint, N: int = 400,
                         seq: Optional[DivisionSequence] = None,
                         supplied: Optional[dict[int, float]] = None,
                         allow_psi: bool = True) -> list[LocalHeightReport]:
    """Local heights at every finite place where one can be nonzero.

    Nonsingular places use the closed form; singular places take a
    ``supplied`` value (e.g. from :func:`tate_local_height`) or, if allowed,
    the psi-limit.
    """
    supplied = supplied or {}
    out, blocking = [], []
    for p in finite_places_of(E, Q):
        info = reduction_analysis(E, Q, p)
        if not info.singular:
            out.append(local_height_nonsingular(E, Q, p, info))
        elif p in supplied:
            out.append(LocalHeightReport(str(p), supplied[p], "tate-formula", info))
        elif allow_psi:
            if seq is None:
                seq = division_poly_values(E, Q, N)
            lim = local_height_psi_limit(E, Q, Place(p), N, seq)
            out.append(LocalHeightReport(str(p), lim.estimate, "psi-limit", info, lim.trace))
        else:
            blocking.append(p)
    if blocking:
        raise SingularReductionError(
            f"singular reduction at {blocking} with no supplied local height"
        )
    return out


def archimedean_by_subtraction(E: WeierstrassCurve, Q: CurvePoint, N: int = 10,
                               supplied: Optional[dict[int, float]] = None) -> float:
    """``lambda_inf = hhat - sum of finite local heights``."""
    hh = canonical_height(E, Q, N)
    if hh.torsion:
        return 0.0
    finite = finite_local_heights(E, Q, supplied=supplied, allow_psi=False)
    return hh.estimate - math.fsum(r.value for r in finite)


@dataclass
class GlobalHeightReport:
    curve: str
    point: str
    hhat: float
    hhat_trace: list[float]
    locals: list[LocalHeightReport]
    archimedean_subtraction: float
    archimedean_gap: float
    residual: float
    torsion: bool = False
    notes: list[str] = field(default_factory=list)

    def local(self, place) -> LocalHeightReport:
        key = str(as_place(place))
        for r in self.locals:
            if r.place == key:
                return r
        raise KeyError(key)

    @property
    def signs(self) -> dict[str, int]:
        return {r.place: r.sign for r in self.locals}

    @property
    def local_sum(self) -> float:
        return math.fsum(r.value for r in self.locals)

    def to_dict(self, with_trace: bool = True) -> dict:
        return {
            "curve": self.curve,
            "point": self.point,
            "hhat": self.hhat,
            "trace": self.hhat_trace,
            "locals": [r.to_dict(with_trace) for r in self.locals],
            "archimedean_subtraction": self.archimedean_subtraction,
            "archimedean_gap": self.archimedean_gap,
            "residual": self.residual,
            "signs": self.signs,
            "torsion": self.torsion,
            "notes": self.notes,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GlobalHeightReport":
        return cls(
            curve=d["curve"],
            point=d["point"],
            hhat=d["hhat"],
            hhat_trace=list(d["trace"]),
            locals=[LocalHeightReport.from_dict(r) for r in d["locals"]],
            archimedean_subtraction=d["archimedean_subtraction"],
            archimedean_gap=d["archimedean_gap"],
            residual=d["residual"],
            torsion=d["torsion"],
            notes=list(d["notes"]),
        )


def height_decomposition(E: WeierstrassCurve, Q: CurvePoint,
                         config: Optional[HeightConfig] = None,
                         supplied: Optional[dict[int, float]] = None) -> GlobalHeightReport:
    """``hhat(Q)`` next to its local heights; ``residual = hhat - sum lambda_v``.

    The archimedean term in the sum is the psi-limit estimate; the value
    obtained by subtraction is reported alongside with the gap between them.
    """
    config = config or HeightConfig()
    hh = canonical_height(E, Q, config.depth)
    if hh.torsion:
        return GlobalHeightReport(str(E), str(Q), 0.0, hh.trace,
                                  [LocalHeightReport("inf", 0.0, "closed-form")],
                                  0.0, 0.0, 0.0, torsion=True, notes=["torsion point"])
    seq = division_poly_values(E, Q, config.psi_n)
    finite = finite_local_heights(E, Q, config.psi_n, seq, supplied)
    arch = local_height_psi_limit(E, Q, INF, config.psi_n, seq)
    arch_rep = LocalHeightReport("inf", arch.estimate, "psi-limit", None, arch.trace)
    finite_sum = math.fsum(r.value for r in finite)
    by_subtraction = hh.estimate - finite_sum
    locals_ = finite + [arch_rep]
    notes = []
    if Q.x.denominator > 1:
        notes.append("x(Q) is not integral: the flip-entropy q_j = |W_j(Q)| differs from "
                     "the EDS q_j by a power of the denominator")
    return GlobalHeightReport(
        curve=str(E),
        point=str(Q),
        hhat=hh.estimate,
        hhat_trace=hh.trace,
        locals=locals_,
        archimedean_subtraction=by_subtraction,
        archimedean_gap=abs(by_subtraction - arch.estimate),
        residual=hh.estimate - math.fsum(r.value for r in locals_),
        notes=notes,
    )


def epsilon(E: WeierstrassCurve, Q: CurvePoint, v, N: int = 400,
            seq: Optional[DivisionSequence] = None) -> int:
    """``+1`` if ``lambda_v(Q) >= 0`` else ``-1``."""
    v = as_place(v)
    if v.is_archimedean:
        return 1 if local_height_psi_limit(E, Q, v, N, seq).estimate >= 0 else -1
    info = reduction_analysis(E, Q, v.p)
    if not info.singular:
        return 1
    return 1 if local_height_psi_limit(E, Q, v, N, seq).estimate >= 0 else -1
