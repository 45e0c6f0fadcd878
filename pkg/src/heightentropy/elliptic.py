"""Elliptic curves over Q in generalized Weierstrass form.

    y^2 + c1 x y + c3 y = x^3 + c2 x^2 + c4 x + c6,   c_i in Z

The model is used as given: no minimal-model reduction is attempted, so
everything downstream (reduction types, local heights) is model-relative.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .places import DomainError, Rational, big_gcd, int_valuation, parse_rational

MAX_DOUBLINGS = 14
TORSION_BOUND = 12  # Mazur: rational torsion has order <= 12


class TorsionError(DomainError):
    pass


@dataclass(frozen=True)
class WeierstrassCurve:
    c1: int
    c2: int
    c3: int
    c4: int
    c6: int

    def __post_init__(self):
        if self.discriminant == 0:
            raise DomainError(f"singular model {self.coefficients()}")

    @classmethod
    def parse(cls, text: str) -> "WeierstrassCurve":
        parts = [s for s in text.replace(" ", "").replace("[", "").replace("]", "").split(",")]
        if len(parts) != 5:
            raise DomainError(f"curve spec needs 5 coefficients, got {text!r}")
        try:
            return cls(*(int(s) for s in parts))
        except ValueError as exc:
            raise DomainError(f"bad curve spec {text!r}") from exc

    def coefficients(self) -> tuple[int, int, int, int, int]:
        return (self.c1, self.c2, self.c3, self.c4, self.c6)

    def __str__(self) -> str:
        return ",".join(map(str, self.coefficients()))

    @property
    def b2(self) -> int:
        return self.c1 * self.c1 + 4 * self.c2

    @property
    def b4(self) -> int:
        return 2 * self.c4 + self.c1 * self.c3

    @property
    def b6(self) -> int:
        return self.c3 * self.c3 + 4 * self.c6

    @property
    def b8(self) -> int:
        c1, c2, c3, c4, c6 = self.coefficients()
        return c1 * c1 * c6 + 4 * c2 * c6 - c1 * c3 * c4 + c2 * c3 * c3 - c4 * c4

    @property
    def c4_invariant(self) -> int:
        return self.b2 * self.b2 - 24 * self.b4

    @property
    def c6_invariant(self) -> int:
        b2, b4, b6 = self.b2, self.b4, self.b6
        return -(b2**3) + 36 * b2 * b4 - 216 * b6

    @property
    def discriminant(self) -> int:
        b2, b4, b6, b8 = self.b2, self.b4, self.b6, self.b8
        return -b2 * b2 * b8 - 8 * b4**3 - 27 * b6 * b6 + 9 * b2 * b4 * b6

    @property
    def j_invariant(self) -> Fraction:
        return Fraction(self.c4_invariant**3, self.discriminant)

    def equation(self, x: Rational, y: Rational) -> Fraction:
        """Left side minus right side; zero exactly on the curve."""
        c1, c2, c3, c4, c6 = self.coefficients()
        return y * y + c1 * x * y + c3 * y - (x**3 + c2 * x * x + c4 * x + c6)

    def contains(self, P: "CurvePoint") -> bool:
        return P.is_identity or self.equation(P.x, P.y) == 0


@dataclass(frozen=True)
class CurvePoint:
    x: Optional[Fraction] = None
    y: Optional[Fraction] = None

    def __post_init__(self):
        if (self.x is None) != (self.y is None):
            raise DomainError("a point needs both coordinates or neither")
        if self.x is not None:
            object.__setattr__(self, "x", Fraction(self.x))
            object.__setattr__(self, "y", Fraction(self.y))

    @property
    def is_identity(self) -> bool:
        return self.x is None

    @classmethod
    def parse(cls, text: str) -> "CurvePoint":
        text = text.strip()
        if text.lower() in ("0", "o", "identity", "inf"):
            return IDENTITY
        sep = ";" if ";" in text else ","
        parts = text.strip("()").split(sep)
        if len(parts) != 2:
            raise DomainError(f"point spec must be 'x;y', got {text!r}")
        return cls(parse_rational(parts[0]), parse_rational(parts[1]))

    def __str__(self) -> str:
        return "identity" if self.is_identity else f"{self.x};{self.y}"


IDENTITY = CurvePoint()


def _require_on(E: WeierstrassCurve, *points: CurvePoint) -> None:
    for P in points:
        if not E.contains(P):
            raise DomainError(f"point {P} is not on the curve [{E}]")


def negate(P: CurvePoint, E: WeierstrassCurve) -> CurvePoint:
    if P.is_identity:
        return P
    return CurvePoint(P.x, -P.y - E.c1 * P.x - E.c3)


def add(P: CurvePoint, Q: CurvePoint, E: WeierstrassCurve, check: bool = True) -> CurvePoint:
    """Chord-tangent sum on a generalized Weierstrass model."""
    if check:
        _require_on(E, P, Q)
    if P.is_identity:
        return Q
    if Q.is_identity:
        return P
    c1, c2, c3, c4, c6 = E.coefficients()
    x1, y1, x2, y2 = P.x, P.y, Q.x, Q.y
    if x1 == x2:
        if y1 + y2 + c1 * x2 + c3 == 0:
            return IDENTITY
        den = 2 * y1 + c1 * x1 + c3
        lam = (3 * x1 * x1 + 2 * c2 * x1 + c4 - c1 * y1) / den
        nu = (-x1**3 + c4 * x1 + 2 * c6 - c3 * y1) / den
    else:
        lam = (y2 - y1) / (x2 - x1)
        nu = (y1 * x2 - y2 * x1) / (x2 - x1)
    x3 = lam * lam + c1 * lam - c2 - x1 - x2
    y3 = -(lam + c1) * x3 - nu - c3
    return CurvePoint(x3, y3)


def multiply(m: int, P: CurvePoint, E: WeierstrassCurve) -> CurvePoint:
    _require_on(E, P)
    if m < 0:
        return multiply(-m, negate(P, E), E)
    out, base = IDENTITY, P
    while m:
        if m & 1:
            out = add(out, base, E, check=False)
        base = add(base, base, E, check=False)
        m >>= 1
    return out


def is_torsion(E: WeierstrassCurve, Q: CurvePoint, bound: int = TORSION_BOUND) -> bool:
    """True iff ``mQ`` is the identity for some ``1 <= m <= bound``."""
    _require_on(E, Q)
    R = Q
    for _ in range(bound):
        if R.is_identity:
            return True
        R = add(R, Q, E, check=False)
    return False


def torsion_order(E: WeierstrassCurve, Q: CurvePoint, bound: int = TORSION_BOUND) -> Optional[int]:
    R = Q
    for m in range(1, bound + 1):
        if R.is_identity:
            return m
        R = add(R, Q, E, check=False)
    return None


# -- duplication ---------------------------------------------------------------

def double_x(E: WeierstrassCurve, X: int, Z: int) -> tuple[int, int]:
    """x-only duplication on ``x = X/Z``; returns the reduced pair, ``Z >= 0``.

    ``Z == 0`` on return means the double is the identity.
    """
    b2, b4, b6, b8 = E.b2, E.b4, E.b6, E.b8
    X2, Z2 = X * X, Z * Z
    XZ = X * Z
    num = X2 * X2 - b4 * X2 * Z2 - 2 * b6 * XZ * Z2 - b8 * Z2 * Z2
    den = Z * (4 * X2 * X + b2 * X2 * Z + 2 * b4 * X * Z2 + b6 * Z2 * Z)
    if den == 0:
        return (1, 0)
    g = big_gcd(num, den)
    num, den = num // g, den // g
    if den < 0:
        num, den = -num, -den
    return num, den


@dataclass(frozen=True)
class DoublingIterate:
    n: int
    a: int  # numerator of x(2^n Q)
    b: int  # x(2^n Q) = a / b^2, b > 0

    @property
    def theta(self) -> Fraction:
        return Fraction(self.a, self.b * self.b)


def double_iterates(E: WeierstrassCurve, Q: CurvePoint, N: int,
                    max_doublings: int = MAX_DOUBLINGS) -> list[DoublingIterate]:
    """``x(2^n Q) = a_n / b_n^2`` for ``n = 1..N``."""
    _require_on(E, Q)
    if N > max_doublings:
        raise DomainError(f"N={N} exceeds the doubling work bound {max_doublings}")
    if is_torsion(E, Q):
        raise TorsionError("torsion point; sequence degenerates")
    X, Z = Q.x.numerator, Q.x.denominator
    out = []
    for n in range(1, N + 1):
        X, Z = double_x(E, X, Z)
        if Z == 0:  # pragma: no cover - excluded by the torsion test
            raise TorsionError("torsion point; sequence degenerates")
        b = math.isqrt(Z)
        if b * b != Z:
            raise ArithmeticError(f"x-denominator {Z} of 2^{n}Q is not a square")
        out.append(DoublingIterate(n, X, b))
    return out


# -- division polynomial values ------------------------------------------------

@dataclass
class DivisionSequence:
    """Values ``W_n(Q)`` of the standard division polynomials, stored scaled.

    With ``x(Q) = a/d^2`` the integers ``V_n = d^(n^2-1) W_n(Q)`` satisfy the
    same recurrences as ``W_n``.  The squares ``W_n^2`` are the division
    polynomials of degree ``n^2 - 1`` with leading coefficient ``n^2``, and
    ``q_n = |d^(2(n^2-1)) W_n^2| = V_n^2``.
    """

    curve: WeierstrassCurve
    point: CurvePoint
    d: int
    scaled: list[int] = field(repr=False)  # scaled[n] = V_n, scaled[0] = 0

    @property
    def N(self) -> int:
        return len(self.scaled) - 1

    def W(self, n: int) -> Fraction:
        return Fraction(self.scaled[n], self.d ** (n * n - 1))

    def q(self, n: int) -> int:
        return self.scaled[n] ** 2

    def is_zero(self, n: int) -> bool:
        return self.scaled[n] == 0

    def valuation(self, n: int, p: int) -> int:
        """``v_p(W_n(Q))``."""
        if self.scaled[n] == 0:
            raise TorsionError(f"W_{n}(Q) = 0")
        return int_valuation(self.scaled[n], p) - (n * n - 1) * int_valuation(self.d, p)

    def log_abs(self, n: int, p: int = 0) -> float:
        """``log|W_n(Q)|_v``; ``p = 0`` is the archimedean place."""
        V = self.scaled[n]
        if V == 0:
            raise TorsionError(f"W_{n}(Q) = 0")
        if p == 0:
            return math.log(abs(V)) - (n * n - 1) * math.log(self.d)
        return -self.valuation(n, p) * math.log(p)

    def zero_indices(self) -> list[int]:
        return [n for n in range(1, self.N + 1) if self.scaled[n] == 0]


def _scaled_coordinates(Q: CurvePoint) -> tuple[int, int, int]:
    den = Q.x.denominator
    d = math.isqrt(den)
    if d * d != den:
        raise DomainError(f"x-denominator {den} is not a square; model not integral?")
    Y = Q.y * d**3
    if Y.denominator != 1:
        raise DomainError("y-denominator does not divide d^3")
    return Q.x.numerator, int(Y), d


def division_poly_values(E: WeierstrassCurve, Q: CurvePoint, N: int) -> DivisionSequence:
    """``W_1..W_N`` at ``Q`` by the duplication recurrences (never expanded)."""
    _require_on(E, Q)
    if Q.is_identity:
        raise DomainError("division values at the identity are undefined")
    if N < 1:
        raise DomainError("N must be positive")
    X, Y, d = _scaled_coordinates(Q)
    c1, c2, c3, c4, c6 = E.coefficients()
    b2, b4, b6, b8 = E.b2, E.b4, E.b6, E.b8
    dp = [d**k for k in range(13)]
    V = [0] * (max(N, 4) + 1)
    V[1] = 1
    V[2] = 2 * Y + c1 * X * dp[1] + c3 * dp[3]
    V[3] = 3 * X**4 + b2 * X**3 * dp[2] + 3 * b4 * X**2 * dp[4] + 3 * b6 * X * dp[6] + b8 * dp[8]
    V[4] = V[2] * (
        2 * X**6 + b2 * X**5 * dp[2] + 5 * b4 * X**4 * dp[4] + 10 * b6 * X**3 * dp[6]
        + 10 * b8 * X**2 * dp[8] + (b2 * b8 - b4 * b6) * X * dp[10] + (b4 * b8 - b6 * b6) * dp[12]
    )
    V2 = V[2]
    for n in range(5, N + 1):
        m = n // 2
        if n & 1:
            V[n] = V[m + 2] * V[m] ** 3 - V[m - 1] * V[m + 1] ** 3
        elif V2 == 0:
            V[n] = 0  # 2-torsion: every even multiple is the identity
        else:
            t = V[m] * (V[m + 2] * V[m - 1] ** 2 - V[m - 2] * V[m + 1] ** 2)
            V[n], r = divmod(t, V2)
            if r:
                raise ArithmeticError(f"inexact division in W_{n} recurrence")
    return DivisionSequence(E, Q, d, V[: N + 1])


@dataclass
class EDSResult:
    q: list[int]  # q[n-1] = q_n
    u: list[int]  # u[m-1] = u_m, q_{2^m} = u_m^2
    divisibility_ok: bool
    square_ok: bool

    def to_dict(self) -> dict:
        return {"q": list(self.q), "u": list(self.u),
                "divisibility_ok": self.divisibility_ok, "square_ok": self.square_ok}

    @classmethod
    def from_dict(cls, d: dict) -> "EDSResult":
        return cls([int(v) for v in d["q"]], [int(v) for v in d["u"]],
                   d["divisibility_ok"], d["square_ok"])


def eds_sequences(E: WeierstrassCurve, Q: CurvePoint, N: int,
                  seq: Optional[DivisionSequence] = None) -> EDSResult:
    """Elliptic divisibility sequence ``q_n`` and its 2-power square roots ``u_m``."""
    if seq is None or seq.N < N:
        seq = division_poly_values(E, Q, N)
    q = [seq.q(n) for n in range(1, N + 1)]
    square_ok = all(math.isqrt(v) ** 2 == v for v in q)
    divisibility_ok = all(
        q[n - 1] % q[m - 1] == 0
        for n in range(1, N + 1)
        for m in range(1, n)
        if n % m == 0 and q[m - 1] != 0
    )
    u = []
    m = 1
    while 2**m <= N:
        v = q[2**m - 1]
        r = math.isqrt(v)
        if r * r != v:
            raise ArithmeticError(f"q_{2**m} is not a perfect square")
        u.append(r)
        m += 1
    return EDSResult(q, u, divisibility_ok, square_ok)


def u_sequence(E: WeierstrassCurve, Q: CurvePoint, M: int) -> list[int]:
    """``u_1..u_M`` with ``u_m = sqrt(q_{2^m})``; only the needed indices are built."""
    return eds_sequences(E, Q, 2**M).u


# -- reduction -------------------------------------------------------------------

GOOD = "good"
SPLIT = "multiplicative-split"
NONSPLIT = "multiplicative-nonsplit"
ADDITIVE = "additive"


@dataclass(frozen=True)
class ReductionInfo:
    p: int
    curve_type: str
    point_status: str  # "nonsingular" | "singular"
    model_sensitive: bool = False

    @property
    def singular(self) -> bool:
        return self.point_status == "singular"

    @property
    def multiplicative(self) -> bool:
        return self.curve_type in (SPLIT, NONSPLIT)


def _trim(f: list[int]) -> list[int]:
    while f and f[-1] == 0:
        f.pop()
    return f


def _poly_gcd_mod(f: list[int], g: list[int], p: int) -> list[int]:
    """Monic gcd of coefficient lists (constant term first) over F_p."""
    f = _trim([c % p for c in f])
    g = _trim([c % p for c in g])
    while g:
        inv = pow(g[-1], -1, p)
        while len(f) >= len(g):
            coef = f[-1] * inv % p
            shift = len(f) - len(g)
            for i, c in enumerate(g):
                f[i + shift] = (f[i + shift] - coef * c) % p
            f = _trim(f)
            if not f:
                break
        f, g = g, f
    if not f:
        return []
    inv = pow(f[-1], -1, p)
    return [c * inv % p for c in f]


def singular_point_mod(E: WeierstrassCurve, p: int) -> Optional[tuple[int, int]]:
    """The singular point of the reduction mod ``p``, if the reduction is singular."""
    c1, c2, c3, c4, c6 = E.coefficients()
    if p == 2:
        for x in range(2):
            for y in range(2):
                fy = (2 * y + c1 * x + c3) % 2
                fx = (c1 * y - 3 * x * x - 2 * c2 * x - c4) % 2
                if fy == 0 and fx == 0 and E.equation(x, y) % 2 == 0:
                    return (x, y)
        return None
    # completing the square: singular x is a repeated root of 4x^3 + b2 x^2 + 2 b4 x + b6
    f = [E.b6, 2 * E.b4, E.b2, 4]
    df = [2 * E.b4, 2 * E.b2, 12]
    g = _poly_gcd_mod(f, df, p)
    if len(g) < 2:
        return None
    if len(g) == 2:
        x0 = (-g[0]) % p
    else:  # (x - x0)^2: cusp
        x0 = (-g[1] * pow(2, -1, p)) % p
    y0 = (-(c1 * x0 + c3) * pow(2, -1, p)) % p
    return (x0, y0)


def _is_square_mod(a: int, p: int) -> bool:
    a %= p
    return a == 0 or pow(a, (p - 1) // 2, p) == 1


def reduction_analysis(E: WeierstrassCurve, Q: CurvePoint, p: int) -> ReductionInfo:
    """Reduction type of the given model at ``p`` and whether ``Q`` hits the singular point."""
    from .places import is_prime

    if not is_prime(p):
        raise DomainError(f"{p} is not prime")
    _require_on(E, Q)
    if int_valuation(E.discriminant, p) == 0:
        return ReductionInfo(p, GOOD, "nonsingular")
    sing = singular_point_mod(E, p)
    if E.c4_invariant % p:
        x0 = sing[0] if sing else 0
        disc_roots = [m for m in range(p) if (m * m + E.c1 * m - 3 * x0 - E.c2) % p == 0] \
            if p == 2 else None
        if p == 2:
            ctype = SPLIT if disc_roots else NONSPLIT
        else:
            disc = E.c1 * E.c1 + 4 * (3 * x0 + E.c2)
            ctype = SPLIT if _is_square_mod(disc, p) and disc % p else NONSPLIT
        sensitive = False
    else:
        ctype = ADDITIVE
        sensitive = p in (2, 3)
    status = "nonsingular"
    if not Q.is_identity and Q.x.denominator % p and sing is not None:
        xr = Q.x.numerator * pow(Q.x.denominator, -1, p) % p
        yr = Q.y.numerator * pow(Q.y.denominator, -1, p) % p
        c1, c2, c3, c4, _ = E.coefficients()
        fy = (2 * yr + c1 * xr + c3) % p
        fx = (c1 * yr - 3 * xr * xr - 2 * c2 * xr - c4) % p
        if fx == 0 and fy == 0:
            status = "singular"
    return ReductionInfo(p, ctype, status, sensitive)
