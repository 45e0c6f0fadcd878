"""Archimedean morphic heights from periodic points and the Julia set.

For ``f(z) = a z^d + ...`` the ``d^n`` solutions of ``f^n(x) = x`` equidistribute
on the Julia set, so

    (1/d^n) sum log|x - q| + (1/d^n) log|B_n|,   B_n = a^(1 + d + ... + d^(n-1))

tends to ``lambda_{f,inf}(q)``.  So does ``d^-n log|f^n(q) - q|`` evaluated directly.

Roots are found by Aberth iteration on ``p(z) = f^n(z) - z``, evaluated by
running the orbit (with the chain rule for ``p'``) rather than from the
expanded coefficients, which grow doubly exponentially.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Optional

import mpmath
import numpy as np

from .places import DomainError

WORK_GUARD = 2**14
ESCAPE = 1e150
CHUNK = 512
COEFF_GUARD = 1e280


class ConvergenceError(ArithmeticError):
    pass


@dataclass(frozen=True)
class ComplexPoly:
    """Complex polynomial with coefficients highest degree first."""

    coefficients: tuple

    def __post_init__(self):
        cs = [complex(c) for c in self.coefficients]
        while len(cs) > 1 and cs[0] == 0:
            cs.pop(0)
        if len(cs) < 3:
            raise DomainError("need degree >= 2")
        if not all(cmath.isfinite(c) for c in cs):
            raise DomainError("coefficients must be finite")
        object.__setattr__(self, "coefficients", tuple(cs))

    @classmethod
    def parse(cls, text: str) -> "ComplexPoly":
        from fractions import Fraction

        out = []
        for s in text.replace(" ", "").split(","):
            if not s:
                continue
            try:
                out.append(complex(float(Fraction(s))))
            except ValueError:
                try:
                    out.append(complex(s.replace("i", "j")))
                except ValueError as exc:
                    raise DomainError(f"cannot parse coefficient {s!r}") from exc
        return cls(tuple(out))

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def leading(self) -> complex:
        return self.coefficients[0]

    @property
    def array(self) -> np.ndarray:
        return np.array(self.coefficients, dtype=complex)

    def derivative(self) -> np.ndarray:
        return np.polyder(self.array)

    def __call__(self, z):
        return np.polyval(self.array, z)

    def escape_radius(self) -> float:
        """Outside this disc ``|f(z)| > |z|``, so periodic points lie inside."""
        a = abs(self.leading)
        rest = sum(abs(c) for c in self.coefficients[1:])
        return max(1.0, (1.0 + rest) / a) * 1.01

    def log_abs_B(self, n: int) -> float:
        """``log|B_n|`` with ``B_n = a^(1+d+...+d^(n-1))``, the leading coefficient of ``f^n``."""
        d = self.degree
        return (d**n - 1) // (d - 1) * math.log(abs(self.leading))


def _guard(f: ComplexPoly, n: int) -> None:
    if n < 1:
        raise DomainError("level must be positive")
    if f.degree**n > WORK_GUARD:
        raise DomainError(f"d^n = {f.degree}^{n} exceeds the work guard {WORK_GUARD}")


def compose_self(f: ComplexPoly, n: int) -> ComplexPoly:
    """Coefficients of ``f^n`` (double precision, guarded)."""
    _guard(f, n)
    g = np.array([1.0, 0.0], dtype=complex)
    for _ in range(n):
        # f(g) by Horner in the coefficients of f
        acc = np.array([f.coefficients[0]], dtype=complex)
        for c in f.coefficients[1:]:
            acc = np.convolve(acc, g)
            acc[-1] += c
        g = acc
        if not np.all(np.isfinite(g)) or np.max(np.abs(g)) > COEFF_GUARD:
            raise DomainError("coefficient norm guard tripped during composition")
    return ComplexPoly(tuple(g))


def _newton_ratio(f: ComplexPoly, n: int, z: np.ndarray):
    """``p/p'`` and ``p`` for ``p = f^n(z) - z``, plus ``|p'|``, stable once orbits escape."""
    coef = f.array
    dcoef = f.derivative()
    d = f.degree
    w = z.copy()
    D = np.ones_like(z)
    rho = np.zeros_like(z)  # w/D for escaped orbits
    esc = np.zeros(z.shape, dtype=bool)
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(n):
            live = ~esc
            wl = w[live]
            fw = np.polyval(coef, wl)
            dw = np.polyval(dcoef, wl)
            newly = np.abs(fw) > ESCAPE
            idx = np.flatnonzero(live)
            # orbit leaves the float range next: switch to the ratio recursion
            ni = idx[newly]
            rho[ni] = (w[ni] / D[ni]) * (fw[newly] / (w[ni] * dw[newly]))
            esc[ni] = True
            keep = idx[~newly]
            D[keep] = D[keep] * dw[~newly]
            w[keep] = fw[~newly]
            rho[esc & ~np.isin(np.arange(z.size), ni)] /= d
        p = np.where(esc, np.inf, w - z)
        dp = D - 1
        ratio = np.where(esc, rho, p / dp)
    return ratio, p, np.where(esc, np.inf, np.abs(dp))


@dataclass
class PeriodicPointSet:
    level: int
    roots: np.ndarray
    residuals: np.ndarray  # |p(x)| / ((1 + |p'(x)|) max(1, |x|)), a relative forward error
    sweeps: int

    @property
    def count(self) -> int:
        return int(self.roots.size)

    @property
    def residual_max(self) -> float:
        return float(np.max(self.residuals)) if self.residuals.size else 0.0


def _preimages(f: ComplexPoly, w: np.ndarray) -> np.ndarray:
    """All ``d`` solutions of ``f(z) = w`` for each ``w``, via batched companion matrices."""
    d = f.degree
    monic = np.array(f.coefficients[1:], dtype=complex) / f.leading
    comp = np.zeros((w.size, d, d), dtype=complex)
    comp[:, 0, :] = -monic
    comp[:, 0, -1] += w / f.leading
    if d > 1:
        comp[:, np.arange(1, d), np.arange(d - 1)] = 1.0
    return np.linalg.eigvals(comp).reshape(-1)


def seed_points(f: ComplexPoly, n: int, mode: str = "preimage") -> np.ndarray:
    """Deterministic starting configuration of ``d^n`` points.

    ``circle``: equally spaced on the escape circle.  ``preimage``: the ``n``-fold
    preimages of one point of that circle, which already lie next to the Julia set.
    """
    D = f.degree**n
    R = f.escape_radius()
    if mode == "circle":
        k = np.arange(D)
        return R * np.exp(1j * (2 * np.pi * k / D + 0.4 / D + 0.25))
    if mode != "preimage":
        raise DomainError(f"unknown seeding {mode!r}")
    w = np.array([R * cmath.exp(0.25j)])
    for _ in range(n):
        w = _preimages(f, w)
    # separate exact coincidences (critical values on the backward tree)
    _, first = np.unique(np.round(w, 12), return_index=True)
    dup = np.setdiff1d(np.arange(D), first)
    w[dup] += 1e-7 * np.exp(1j * (dup + 1))
    return w


def periodic_points(f: ComplexPoly, n: int, tol: float = 1e-8,
                    max_sweeps: int = 500, seeding: str = "preimage") -> PeriodicPointSet:
    """All ``d^n`` roots of ``f^n(x) - x`` by simultaneous Aberth iteration."""
    _guard(f, n)
    D = f.degree**n
    z = seed_points(f, n, seeding)
    active = np.ones(D, dtype=bool)
    step_tol = min(tol, 1e-12)
    sweeps = 0
    for sweeps in range(1, max_sweeps + 1):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        ratio, _, _ = _newton_ratio(f, n, z[idx])
        corr = np.empty(idx.size, dtype=complex)
        for s in range(0, idx.size, CHUNK):
            rows = idx[s:s + CHUNK]
            diff = z[rows, None] - z[None, :]
            diff[np.arange(rows.size), rows] = 1.0
            inv = 1.0 / diff
            inv[np.arange(rows.size), rows] = 0.0
            corr[s:s + CHUNK] = inv.sum(axis=1)
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            step = ratio / (1.0 - ratio * corr)
        bad = ~np.isfinite(step)
        # collision with a neighbour: fall back to a damped Newton step
        step[bad] = np.where(np.isfinite(ratio[bad]), 0.5 * ratio[bad], 1e-3)
        z[idx] -= step
        done = np.abs(step) <= step_tol * np.maximum(1.0, np.abs(z[idx]))
        active[idx[done]] = False
    _, p, dp = _newton_ratio(f, n, z)
    with np.errstate(invalid="ignore"):
        res = np.abs(p) / ((1.0 + dp) * np.maximum(1.0, np.abs(z)))
    res[~np.isfinite(res)] = np.inf
    worst = float(np.max(res))
    if worst >= tol:
        raise ConvergenceError(
            f"periodic points at level {n} did not converge in {sweeps} sweeps; "
            f"worst residual {worst:.3g}"
        )
    return PeriodicPointSet(n, z, res, sweeps)


@dataclass
class JuliaHeight:
    level: int
    root_sum: Optional[float]
    direct: Optional[float]
    residual_max: Optional[float]
    principal_value: bool = False
    excluded: int = 0
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "level": self.level,
            "root_sum": self.root_sum,
            "direct": self.direct,
            "residual_max": self.residual_max,
            "principal_value": self.principal_value,
            "excluded": self.excluded,
            "notes": list(self.notes),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "JuliaHeight":
        return cls(d["level"], d["root_sum"], d["direct"], d["residual_max"],
                   d["principal_value"], d["excluded"], list(d["notes"]))


def _direct_estimate(f: ComplexPoly, q: complex, n: int) -> Optional[float]:
    """``d^-n log|f^n(q) - q|`` with unbounded exponent range."""
    with mpmath.workdps(40):
        cs = [mpmath.mpc(c.real, c.imag) for c in f.coefficients]
        w = mpmath.mpc(q.real, q.imag)
        q0 = w
        for _ in range(n):
            acc = cs[0]
            for c in cs[1:]:
                acc = acc * w + c
            w = acc
        diff = w - q0
        if diff == 0:
            return None
        return float(mpmath.log(abs(diff)) / mpmath.mpf(f.degree) ** n)


def julia_local_height(f: ComplexPoly, q: complex, n: int, tol: float = 1e-8,
                       points: Optional[PeriodicPointSet] = None) -> JuliaHeight:
    """Root-sum and direct estimates of ``lambda_{f,inf}(q)`` at level ``n``."""
    q = complex(q)
    notes = []
    direct = _direct_estimate(f, q, n)
    if direct is None:
        notes.append("q is periodic of period dividing n: direct estimate undefined")
    if f.degree**n > WORK_GUARD:
        notes.append("work guard exceeded: root-sum disabled")
        return JuliaHeight(n, None, direct, None, notes=notes)
    if points is None:
        points = periodic_points(f, n, tol)
    dist = np.abs(points.roots - q)
    near = dist <= tol * max(1.0, abs(q))
    total = float(np.sum(np.log(dist[~near])))
    D = f.degree**n
    root_sum = (total + f.log_abs_B(n)) / D
    excluded = int(np.count_nonzero(near))
    if excluded:
        notes.append(f"principal-value: {excluded} root(s) at q omitted")
    return JuliaHeight(n, root_sum, direct, points.residual_max, excluded > 0, excluded, notes)


def chebyshev_closed_form(q: complex) -> float:
    """``log+|psi(q)|`` with ``psi`` inverse to ``z -> (z + 1/z)/2``, branch with ``|psi| >= 1``."""
    q = complex(q)
    if q.imag == 0 and -1 <= q.real <= 1:
        return 0.0
    s = cmath.sqrt(q * q - 1)
    return max(0.0, math.log(max(abs(q + s), abs(q - s))))


def arcsine_integral(q: complex, K: int = 4096) -> float:
    """Integral of ``log|t - q|`` against the arcsine law on ``[-1, 1]``, via ``t = cos theta``."""
    q = complex(q)
    if q.imag == 0 and -1 <= q.real <= 1:
        raise DomainError("q lies on the segment [-1, 1]")
    if K < 16:
        raise DomainError("need at least 16 panels")
    theta = 2 * np.pi * (np.arange(K) + 0.5) / K
    return float(np.mean(np.log(np.abs(np.cos(theta) - q))))


def chebyshev_poly(d: int = 2) -> ComplexPoly:
    """The Tchebycheff polynomial ``T_d`` (``T_d(cos t) = cos dt``)."""
    from numpy.polynomial import chebyshev as C

    coeffs = C.cheb2poly([0] * d + [1])[::-1]
    return ComplexPoly(tuple(coeffs))


def is_chebyshev(f: ComplexPoly, atol: float = 1e-12) -> bool:
    g = chebyshev_poly(f.degree)
    return bool(np.allclose(f.array, g.array, atol=atol))
