"""Diagonal sequential actions ``x -> theta_n x`` on the adeles and their
volume-growth entropy.

For the box ``B = (-1, 1) x prod Z_p`` the set ``B  cap  theta_1^-1 B  cap ... cap  theta_N^-1 B``
is a product of local pieces whose log-measures are exact:

* at a prime ``p``: ``-k_p log p`` with ``k_p = max(0, max_n -v_p(theta_n))``,
* at infinity: ``log 2eps - max(0, max_n log|theta_n|)``.

So the finite part of the total is ``-log L_N`` with ``L_N`` the lcm of the
denominators, and no factorization is ever needed for the aggregate.
The ``log 2eps`` term is O(1) and is dropped from every trace, since every
rate used here diverges.

Compact-space degeneracies are not modelled: on a compact group a super-linear
rate forces zero entropy, and a circle analogue of the real-line action (with
``b_{j+1}/b_j -> oo``) has infinite entropy at linear rate.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Optional, Sequence, Union

from .elliptic import (
    CurvePoint,
    TorsionError,
    WeierstrassCurve,
    division_poly_values,
    double_iterates,
    is_torsion,
    reduction_analysis,
)
from .places import (
    INF,
    RATE_4N,
    RATE_LOGN,
    RATE_N,
    RATE_N2,
    RATE_NLOGN,
    DomainError,
    Place,
    RateFunction,
    as_place,
    int_valuation,
    log_abs_real,
)

# (numerator, denominator) with denominator > 0; not necessarily reduced
Ratio = tuple[int, int]


def _ratio(q) -> Ratio:
    if isinstance(q, tuple):
        return q
    num, den = q.numerator, q.denominator
    if num == 0:
        raise DomainError("theta_n must be nonzero")
    return (num, den)


def _log_abs(r: Ratio) -> float:
    num, den = r
    if num == 0:
        raise DomainError("theta_n must be nonzero")
    return log_abs_real(Fraction(num, den)) if max(abs(num), den) < 1 << 1000 \
        else math.log(abs(num)) - math.log(den)


def _neg_valuation(r: Ratio, p: int) -> int:
    num, den = r
    if num == 0:
        raise DomainError("theta_n must be nonzero")
    return int_valuation(den, p) - int_valuation(num, p)


def finite_log_volume_exponent(thetas: Iterable, p: int) -> int:
    """``k`` with ``log mu(Z_p cap  theta_n^-1 Z_p ...) = -k log p``."""
    k = 0
    for q in thetas:
        k = max(k, _neg_valuation(_ratio(q), p))
    return k


def finite_volume_denominator(thetas: Iterable) -> int:
    """``L`` with ``prod_p mu_p(...) = 1/L``: the lcm of the reduced denominators."""
    L = 1
    for q in thetas:
        num, den = _ratio(q)
        g = math.gcd(num, den)
        if g != 1:
            den //= g
        if den % L == 0:
            L = den
        elif L % den:
            L = L // math.gcd(L, den) * den
    return L


def local_log_volume(thetas: Sequence, v, eps: float = 1.0) -> float:
    """Exact log-measure of the local piece at ``v`` (archimedean radius ``eps``)."""
    v = as_place(v)
    if v.is_archimedean:
        m = max((_log_abs(_ratio(q)) for q in thetas), default=0.0)
        return math.log(2 * eps) - max(0.0, m)
    return -finite_log_volume_exponent(thetas, v.p) * math.log(v.p)


# -- place filters ---------------------------------------------------------------

@dataclass(frozen=True)
class PlaceFilter:
    """Which places an action runs on: all, a single place, ``S``, or the complement of ``S``."""

    kind: str = "all"  # all | single | subset | complement
    places: frozenset = frozenset()

    def __post_init__(self):
        if self.kind not in ("all", "single", "subset", "complement"):
            raise DomainError(f"unknown place filter {self.kind!r}")

    @classmethod
    def single(cls, v) -> "PlaceFilter":
        return cls("single", frozenset([as_place(v)]))

    @classmethod
    def subset(cls, places: Iterable) -> "PlaceFilter":
        return cls("subset", frozenset(as_place(v) for v in places))

    @classmethod
    def complement(cls, places: Iterable) -> "PlaceFilter":
        return cls("complement", frozenset(as_place(v) for v in places))

    @classmethod
    def parse(cls, text: str) -> "PlaceFilter":
        text = text.strip().lower()
        if text in ("", "all"):
            return cls()
        head, sep, rest = text.partition(":")
        if sep:
            places = [s for s in rest.split(",") if s]
            if head in ("s", "subset"):
                return cls.subset(places)
            if head in ("not", "complement"):
                return cls.complement(places)
            raise DomainError(f"bad place filter {text!r}")
        return cls.single(text)

    def includes(self, v: Place) -> bool:
        if self.kind == "all":
            return True
        if self.kind == "complement":
            return v not in self.places
        return v in self.places

    @property
    def finite_places(self) -> list[int]:
        return sorted(v.p for v in self.places if not v.is_archimedean)

    def __str__(self) -> str:
        if self.kind == "all":
            return "all"
        names = ",".join(str(v) for v in sorted(self.places))
        if self.kind == "single":
            return names
        return f"{'subset' if self.kind == 'subset' else 'complement'}:{names}"


# -- traces -----------------------------------------------------------------------

@dataclass
class EntropyTrace:
    """Finite-horizon volume-growth quotients ``e_n = -(1/r(n)) log mu_n``.

    ``log_volumes`` holds, per place (or the ``finite`` aggregate), the exact
    log-measure at each index in ``indices``; indices where ``r(n) = 0`` are skipped.
    """

    action: str
    rate: str
    place_filter: str
    horizon: int
    indices: list[int]
    quotients: list[float]
    log_volumes: dict[str, list[float]]
    finite_denominator: int = 1  # 1/mu of the finite part at the horizon
    finite_exponents: dict[str, int] = field(default_factory=dict)
    target: Optional[float] = None
    notes: list[str] = field(default_factory=list)

    @property
    def estimate(self) -> float:
        return self.quotients[-1] if self.quotients else 0.0

    @property
    def total_log_volume(self) -> list[float]:
        cols = list(self.log_volumes.values())
        return [math.fsum(vals) for vals in zip(*cols)]

    def subsample(self, stride: int) -> "EntropyTrace":
        """Every ``stride``-th entry, always keeping the last."""
        keep = list(range(0, len(self.indices), max(1, stride)))
        if self.indices and keep[-1] != len(self.indices) - 1:
            keep.append(len(self.indices) - 1)
        return EntropyTrace(
            self.action, self.rate, self.place_filter, self.horizon,
            [self.indices[i] for i in keep], [self.quotients[i] for i in keep],
            {k: [v[i] for i in keep] for k, v in self.log_volumes.items()},
            self.finite_denominator, dict(self.finite_exponents), self.target, list(self.notes),
        )

    def to_dict(self, stride: int = 1) -> dict:
        tr = self.subsample(stride) if stride > 1 else self
        return {
            "action": tr.action,
            "rate": tr.rate,
            "place_filter": tr.place_filter,
            "estimate": tr.estimate,
            "target": tr.target,
            "horizon": tr.horizon,
            "finite_denominator": str(tr.finite_denominator),
            "finite_exponents": dict(tr.finite_exponents),
            "trace": {
                "n": list(tr.indices),
                "quotient": list(tr.quotients),
                "log_volume": {k: list(v) for k, v in tr.log_volumes.items()},
            },
            "notes": list(tr.notes),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EntropyTrace":
        tr = d["trace"]
        return cls(
            action=d["action"],
            rate=d["rate"],
            place_filter=d["place_filter"],
            horizon=d["horizon"],
            indices=list(tr["n"]),
            quotients=list(tr["quotient"]),
            log_volumes={k: list(v) for k, v in tr["log_volume"].items()},
            finite_denominator=int(d["finite_denominator"]),
            finite_exponents=dict(d["finite_exponents"]),
            target=d["target"],
            notes=list(d["notes"]),
        )


ThetaSource = Union[Sequence, Callable[[int], Iterator]]


@dataclass
class DiagonalAction:
    """``T_n(x) = theta_n x`` on the places selected by ``place_filter``.

    ``thetas`` is either an explicit sequence or a callable ``N -> iterator``
    producing ``theta_1..theta_N`` (Fractions, ints or ``(num, den)`` pairs).
    """

    name: str
    thetas: ThetaSource
    rate: RateFunction
    place_filter: PlaceFilter = PlaceFilter()
    target: Optional[float] = None
    reduced: bool = True  # whether (num, den) pairs are already in lowest terms
    notes: list[str] = field(default_factory=list)

    def iter_thetas(self, N: int) -> Iterator:
        if callable(self.thetas):
            yield from self.thetas(N)
        else:
            if len(self.thetas) < N:
                raise DomainError(f"action {self.name} has only {len(self.thetas)} terms")
            yield from self.thetas[:N]


def entropy_trace(action: DiagonalAction, N: int) -> EntropyTrace:
    """Exact per-place log-volumes for ``n = 1..N`` and the quotients ``e_n``."""
    if N < 2:
        raise DomainError("horizon must be at least 2")
    flt = action.place_filter
    use_inf = flt.includes(INF)
    tracked = flt.finite_places if flt.kind in ("single", "subset", "complement") else []
    aggregate = flt.kind in ("all", "complement")
    logp = {p: math.log(p) for p in tracked}

    arch_max = 0.0
    L = 1
    k = {p: 0 for p in tracked}
    cols: dict[str, list[float]] = {}
    if use_inf:
        cols["inf"] = []
    if flt.kind != "complement":
        for p in tracked:
            cols[str(p)] = []
    if aggregate:
        cols["finite"] = []

    indices, quotients = [], []
    count = 0
    for n, q in enumerate(action.iter_thetas(N), start=1):
        num, den = _ratio(q)
        if num == 0:
            raise DomainError(f"theta_{n} = 0")
        count = n
        if use_inf:
            arch_max = max(arch_max, _log_abs((num, den)))
        for p in tracked:
            k[p] = max(k[p], _neg_valuation((num, den), p))
        if aggregate:
            if not action.reduced:
                den //= math.gcd(num, den)
            if den % L == 0:
                L = den
            elif L % den:
                L = L // math.gcd(L, den) * den
        if action.rate.log_value(n) == -math.inf:
            continue
        row = {}
        if use_inf:
            row["inf"] = -arch_max if arch_max else 0.0
        if flt.kind != "complement":
            for p in tracked:
                row[str(p)] = -k[p] * logp[p]
        if aggregate:
            fin = -math.log(L) if L > 1 else 0.0
            if flt.kind == "complement":
                fin += math.fsum(k[p] * logp[p] for p in tracked)
            row["finite"] = fin
        for key, val in row.items():
            cols[key].append(val)
        indices.append(n)
        quotients.append(action.rate.quotient(-math.fsum(row.values()), n))
    if count < N:
        raise DomainError(f"action {action.name} produced only {count} terms")

    if flt.kind == "complement":
        fin_den = L
        for p in tracked:
            fin_den //= p ** k[p]
    elif aggregate:
        fin_den = L
    else:
        fin_den = math.prod(p ** k[p] for p in tracked)
    notes = list(action.notes) + ["archimedean log(2 eps) term dropped"]
    return EntropyTrace(
        action=action.name,
        rate=str(action.rate),
        place_filter=str(flt),
        horizon=N,
        indices=indices,
        quotients=quotients,
        log_volumes=cols,
        finite_denominator=fin_den,
        finite_exponents={str(p): k[p] for p in tracked},
        target=action.target,
        notes=notes,
    )


# -- builtin actions from number theory --------------------------------------------

def _primes(n: int) -> list[int]:
    from sympy import prime, primerange

    return list(primerange(2, prime(n) + 1)) if n > 0 else []


def _primorials(N: int) -> Iterator[int]:
    P = 1
    for p in _primes(N):
        P *= p
        yield P


def _inverse_primorials(N: int) -> Iterator[Ratio]:
    for P in _primorials(N):
        yield (1, P)


def _primes_up_to(N: int) -> Iterator[int]:
    from sympy import isprime

    P = 1
    for j in range(1, N + 1):
        if isprime(j):
            P *= j
        yield P


def _identity_index(N: int) -> Iterator[int]:
    return iter(range(1, N + 1))


def _factorials(N: int) -> Iterator[int]:
    F = 1
    for j in range(1, N + 1):
        F *= j
        yield F


NUMBER_THEORY_BUILTINS = {
    # name: (generator, default rate, target, note)
    "primorial": (_primorials, RATE_NLOGN, 1.0, None),
    "inverse-primorial": (_inverse_primorials, RATE_NLOGN, 1.0,
                          "every single-place contribution tends to 0"),
    "primes-up-to": (_primes_up_to, RATE_N, None, "limit lies in (0, 2 log 2]"),
    "identity-index": (_identity_index, RATE_LOGN, 1.0, None),
    "factorial": (_factorials, RATE_NLOGN, 1.0, None),
}

ELLIPTIC_BUILTINS = ("elliptic-b", "elliptic-theta", "eds-u-inverse", "flip-local")


def builtin_action(name: str, rate: Optional[RateFunction] = None,
                   place_filter: Optional[PlaceFilter] = None) -> DiagonalAction:
    if name not in NUMBER_THEORY_BUILTINS:
        raise DomainError(
            f"unknown builtin action {name!r}; choose from "
            f"{sorted(NUMBER_THEORY_BUILTINS) + list(ELLIPTIC_BUILTINS)}"
        )
    gen, default_rate, target, note = NUMBER_THEORY_BUILTINS[name]
    flt = place_filter or PlaceFilter()
    if name == "inverse-primorial" and flt.kind == "single":
        target = 0.0
    if flt.kind != "all" and name != "inverse-primorial":
        target = None
    return DiagonalAction(name, gen, rate or default_rate, flt, target,
                          notes=[note] if note else [])


def explicit_action(thetas: Sequence, rate: RateFunction, name: str = "explicit",
                    place_filter: Optional[PlaceFilter] = None) -> DiagonalAction:
    thetas = [Fraction(q) for q in thetas]
    if any(q == 0 for q in thetas):
        raise DomainError("theta_n must be nonzero")
    return DiagonalAction(name, thetas, rate, place_filter or PlaceFilter())


# -- elliptic actions ---------------------------------------------------------------

def _non_torsion(E: WeierstrassCurve, Q: CurvePoint) -> None:
    if Q.is_identity or is_torsion(E, Q):
        raise TorsionError("torsion point; sequence degenerates")


def elliptic_real_entropy(E: WeierstrassCurve, Q: CurvePoint, N: int) -> EntropyTrace:
    """``T_j(x) = b_j x`` on the reals with ``r(n) = 4^n``; tends to ``hhat(Q)``."""
    _non_torsion(E, Q)
    its = double_iterates(E, Q, N)
    flt = PlaceFilter.single(INF)
    action = DiagonalAction("elliptic-b", [(it.b, 1) for it in its], RATE_4N, flt)
    return _trace_from_index_one(action, N)


def elliptic_adelic_entropy(E: WeierstrassCurve, Q: CurvePoint, N: int) -> EntropyTrace:
    """``T_n(x) = x(2^n Q) x`` on the adeles with ``r(n) = 4^n``; tends to ``2 hhat(Q)``."""
    _non_torsion(E, Q)
    its = double_iterates(E, Q, N)
    action = DiagonalAction("elliptic-theta", [(it.a, it.b * it.b) for it in its], RATE_4N)
    return _trace_from_index_one(action, N)


def _trace_from_index_one(action: DiagonalAction, N: int) -> EntropyTrace:
    if N >= 2:
        return entropy_trace(action, N)
    # horizon 1 is allowed for exponential rates, which are positive at n = 1
    padded = DiagonalAction(action.name, list(action.iter_thetas(1)) * 2, action.rate,
                            action.place_filter, action.target, action.reduced,
                            list(action.notes))
    full = entropy_trace(padded, 2)
    return EntropyTrace(full.action, full.rate, full.place_filter, 1, full.indices[:1],
                        full.quotients[:1], {k: v[:1] for k, v in full.log_volumes.items()},
                        full.finite_denominator, full.finite_exponents, full.target, full.notes)


def singular_primes(E: WeierstrassCurve, Q: CurvePoint) -> list[int]:
    """Primes where ``Q`` hits the singular point of the reduction (the set ``S``)."""
    from .places import prime_divisors

    return [p for p in prime_divisors(E.discriminant)
            if reduction_analysis(E, Q, p).singular]


def eds_entropy(E: WeierstrassCurve, Q: CurvePoint, N: int, mode: str = "all",
                S: Optional[Sequence[int]] = None) -> EntropyTrace:
    """``U_j(x) = x / u_j`` with ``r(n) = 4^n``.

    ``mode`` is ``all`` (tends to ``lambda_inf + 1/2 log b``), ``S`` (the
    singular places; tends to ``-sum_S lambda_p``) or ``complement``
    (the quotient by the ``S``-adeles; tends to ``hhat``).
    """
    _non_torsion(E, Q)
    if S is None:
        S = singular_primes(E, Q)
    seq = division_poly_values(E, Q, 2**N)
    us = []
    for m in range(1, N + 1):
        u = abs(seq.scaled[2**m])
        if u == 0:
            raise TorsionError(f"u_{m} = 0")
        us.append((1, u))
    if mode == "all":
        flt = PlaceFilter()
    elif mode == "S":
        flt = PlaceFilter.subset(S)
    elif mode in ("complement", "complement-of-S"):
        flt = PlaceFilter.complement(S)
    else:
        raise DomainError(f"unknown eds mode {mode!r}")
    action = DiagonalAction("eds-u-inverse", us, RATE_4N, flt,
                            notes=[f"S = {sorted(S)}"])
    return _trace_from_index_one(action, N)


def local_flip_entropy(E: WeierstrassCurve, Q: CurvePoint, v, N: int,
                       sign: Optional[int] = None) -> EntropyTrace:
    """``T_j(x) = q_j^eps x`` on the single place ``v`` with ``q_j = |W_j(Q)|``, ``r(n) = n^2``.

    Tends to ``eps_v(Q) lambda_v(Q) >= 0``.
    """
    from .heights import epsilon

    _non_torsion(E, Q)
    v = as_place(v)
    seq = division_poly_values(E, Q, N)
    if seq.zero_indices():
        raise TorsionError(f"W_n(Q) = 0 at n = {seq.zero_indices()[0]}")
    eps = sign if sign is not None else epsilon(E, Q, v, N, seq)
    thetas = []
    for n in range(1, N + 1):
        num, den = abs(seq.scaled[n]), seq.d ** (n * n - 1)
        thetas.append((num, den) if eps > 0 else (den, num))
    notes = [f"epsilon = {eps:+d}"]
    if Q.x.denominator > 1:
        notes.append("x(Q) not integral: q_j = |W_j(Q)| differs from the EDS q_j")
    action = DiagonalAction("flip-local", thetas, RATE_N2, PlaceFilter.single(v),
                            reduced=False, notes=notes)
    return entropy_trace(action, N)
