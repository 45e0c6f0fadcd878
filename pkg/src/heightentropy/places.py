"""Exact rationals, p-adic valuations and logarithms at the places of Q.

Rationals are ``fractions.Fraction`` (plain ``int`` is accepted wherever a
rational is expected, since ints carry ``numerator``/``denominator``).
All logarithms are natural.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Union

try:  # subquadratic gcd for very large integers
    import gmpy2 as _gmpy2
except ImportError:  # pragma: no cover
    _gmpy2 = None

Rational = Union[int, Fraction]

TRIAL_DIVISION_BOUND = 10**6
FACTOR_BIT_LIMIT = 256


class DomainError(ValueError):
    """An input lies outside the domain of an operation."""


class FactorizationError(ArithmeticError):
    pass


@dataclass(frozen=True)
class Place:
    """A place of Q: a finite prime ``p`` or the archimedean place (``p == 0``)."""

    p: int = 0

    def __post_init__(self):
        if self.p != 0 and not is_prime(self.p):
            raise DomainError(f"{self.p} is not prime")

    @property
    def is_archimedean(self) -> bool:
        return self.p == 0

    def sort_key(self):
        return (1, 0) if self.p == 0 else (0, self.p)

    def __lt__(self, other: "Place") -> bool:
        return self.sort_key() < other.sort_key()

    def __str__(self) -> str:
        return "inf" if self.p == 0 else str(self.p)

    @classmethod
    def parse(cls, text: str) -> "Place":
        text = text.strip().lower()
        if text in ("inf", "infinity", "oo", "∞"):
            return INF
        try:
            return cls(int(text))
        except ValueError as exc:
            raise DomainError(f"cannot parse place {text!r}") from exc


INF = Place(0)


def as_place(v: Union[Place, int, str]) -> Place:
    if isinstance(v, Place):
        return v
    if isinstance(v, str):
        return Place.parse(v)
    return Place(v)


def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise DomainError(f"cannot parse rational {text!r}") from exc


def format_rational(q: Rational) -> str:
    return str(Fraction(q))


# -- primes and factorization -------------------------------------------------

def is_prime(n: int) -> bool:
    from sympy import isprime

    return n >= 2 and bool(isprime(n))


@lru_cache(maxsize=4096)
def _factor_cached(n: int) -> tuple:
    from sympy import factorint

    small = factorint(n, limit=TRIAL_DIVISION_BOUND)
    rest = {}
    for q, e in small.items():
        if q > TRIAL_DIVISION_BOUND and not is_prime(q):
            # left-over cofactor from trial division; Pollard rho and friends
            for r, f in factorint(q).items():
                rest[r] = rest.get(r, 0) + e * f
        else:
            rest[q] = rest.get(q, 0) + e
    for q in rest:
        if not is_prime(q):
            raise FactorizationError(f"could not fully factor {n}: composite {q}")
    return tuple(sorted(rest.items()))


def factorize(n: int) -> dict[int, int]:
    """Prime factorization of ``|n|`` as ``{p: e}``."""
    n = abs(int(n))
    if n == 0:
        raise DomainError("cannot factor zero")
    if n.bit_length() > FACTOR_BIT_LIMIT:
        raise FactorizationError(
            f"refusing to factor a {n.bit_length()}-bit integer (limit {FACTOR_BIT_LIMIT})"
        )
    return dict(_factor_cached(n))


def prime_divisors(n: int) -> list[int]:
    return sorted(factorize(n))


def mobius(n: int) -> int:
    if n <= 0:
        raise DomainError("mobius is defined for positive integers")
    f = factorize(n) if n > 1 else {}
    if any(e > 1 for e in f.values()):
        return 0
    return -1 if len(f) % 2 else 1


# -- valuations and logarithms ------------------------------------------------

def int_valuation(n: int, p: int) -> int:
    """Exponent of ``p`` in the nonzero integer ``n``."""
    if n == 0:
        raise DomainError("valuation of zero")
    n = abs(n)
    if n % p:
        return 0
    # square the divisor while it still divides, then walk back down
    powers = [p]
    while n % (powers[-1] * powers[-1]) == 0:
        powers.append(powers[-1] * powers[-1])
    v = 0
    for k in range(len(powers) - 1, -1, -1):
        if n % powers[k] == 0:
            n //= powers[k]
            v += 1 << k
    while n % p == 0:
        n //= p
        v += 1
    return v


def valuation(q: Rational, p: int) -> int:
    q = Fraction(q)
    if q == 0:
        raise DomainError("valuation of zero")
    return int_valuation(q.numerator, p) - int_valuation(q.denominator, p)


def log_abs_real(q: Rational) -> float:
    """``log|q|`` for a nonzero rational of any size, to double precision.

    Falls back to separate integer logarithms (which CPython computes from
    the bit length and leading digits) when ``q`` leaves the float range.
    """
    q = Fraction(q)
    if q == 0:
        raise DomainError("log of zero")
    num, den = abs(q.numerator), q.denominator
    try:
        f = num / den
    except OverflowError:
        f = math.inf
    if f == math.inf or f == 0.0 or not math.isfinite(f):
        return math.log(num) - math.log(den)
    return math.log(f)


def log_abs(q: Rational, v: Union[Place, int, str]) -> float:
    v = as_place(v)
    q = Fraction(q)
    if q == 0:
        raise DomainError("log of zero")
    if v.is_archimedean:
        return log_abs_real(q)
    return -valuation(q, v.p) * math.log(v.p)


def log_plus(q: Rational, v: Union[Place, int, str]) -> float:
    q = Fraction(q)
    if q == 0:
        return 0.0
    return max(0.0, log_abs(q, v))


def relevant_places(qs: Iterable[Rational]) -> list[Place]:
    """``inf`` together with every prime dividing some numerator or denominator."""
    primes: set[int] = set()
    for q in qs:
        q = Fraction(q)
        if q == 0:
            raise DomainError("relevant_places needs nonzero rationals")
        for n in (q.numerator, q.denominator):
            if abs(n) > 1:
                primes.update(factorize(n))
    return [Place(p) for p in sorted(primes)] + [INF]


def big_gcd(a: int, b: int) -> int:
    """gcd that stays fast on integers with hundreds of thousands of digits."""
    if _gmpy2 is not None and max(abs(a), abs(b)).bit_length() > 20000:
        return int(_gmpy2.gcd(a, b))
    return math.gcd(a, b)


def denominator_lcm(qs: Iterable[Rational]) -> int:
    out = 1
    for q in qs:
        out = math.lcm(out, Fraction(q).denominator)
    return out


# -- growth rates -------------------------------------------------------------

_RATE_NAMES = ("n", "nlogn", "n2", "logn", "exp")


@dataclass(frozen=True)
class RateFunction:
    """Growth rate ``r(n)``: one of ``n``, ``nlogn``, ``n2``, ``logn`` or ``exp:c``."""

    kind: str
    base: Fraction = Fraction(0)

    def __post_init__(self):
        if self.kind not in _RATE_NAMES:
            raise DomainError(f"unknown rate {self.kind!r}")
        if self.kind == "exp" and not Fraction(self.base) > 1:
            raise DomainError("exponential rate needs a base > 1")

    @classmethod
    def parse(cls, text: str) -> "RateFunction":
        text = text.strip().lower().replace(" ", "")
        aliases = {"linear": "n", "n^2": "n2", "n**2": "n2", "n*logn": "nlogn"}
        text = aliases.get(text, text)
        if text.startswith("exp"):
            _, _, base = text.partition(":")
            return cls("exp", parse_rational(base or "2"))
        return cls(text)

    def __str__(self) -> str:
        return f"exp:{self.base}" if self.kind == "exp" else self.kind

    def log_value(self, n: int) -> float:
        """``log r(n)``; ``-inf`` where ``r(n) <= 0``."""
        if self.kind == "n":
            return math.log(n)
        if self.kind == "n2":
            return 2 * math.log(n)
        if self.kind == "nlogn":
            return math.log(n) + math.log(math.log(n)) if n >= 2 else -math.inf
        if self.kind == "logn":
            return math.log(math.log(n)) if n >= 2 else -math.inf
        return n * log_abs_real(self.base)

    def __call__(self, n: int) -> float:
        if self.kind == "exp":
            return float(Fraction(self.base) ** n)
        lv = self.log_value(n)
        return 0.0 if lv == -math.inf else math.exp(lv)

    def quotient(self, value: float, n: int) -> float:
        """``value / r(n)`` without overflowing for exponential rates."""
        lv = self.log_value(n)
        if lv == -math.inf:
            raise DomainError(f"rate {self} vanishes at n={n}")
        if value == 0:
            return 0.0
        if lv < 700:
            return value / (float(Fraction(self.base) ** n) if self.kind == "exp" else math.exp(lv))
        return math.copysign(math.exp(math.log(abs(value)) - lv), value)


RATE_N = RateFunction("n")
RATE_NLOGN = RateFunction("nlogn")
RATE_N2 = RateFunction("n2")
RATE_LOGN = RateFunction("logn")
RATE_4N = RateFunction("exp", Fraction(4))
