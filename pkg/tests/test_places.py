import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heightentropy.places import (
    INF,
    DomainError,
    FactorizationError,
    Place,
    RateFunction,
    factorize,
    int_valuation,
    log_abs,
    log_plus,
    mobius,
    relevant_places,
    valuation,
)

nonzero_q = st.fractions(max_denominator=10**6).filter(lambda q: q != 0)
small_primes = st.sampled_from([2, 3, 5, 7, 11, 13, 97])


def naive_valuation(n, p):
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def test_examples():
    assert valuation(Fraction(12), 2) == 2
    assert valuation(Fraction(1, 9), 3) == -2
    assert log_abs(Fraction(3, 2), INF) == pytest.approx(math.log(1.5))
    assert log_plus(Fraction(1, 2), 2) == pytest.approx(math.log(2))
    assert log_plus(3, 5) == 0
    assert log_plus(0, INF) == 0
    assert relevant_places([Fraction(8, 3)]) == [Place(2), Place(3), INF]
    assert relevant_places([1]) == [INF]
    assert relevant_places([]) == [INF]
    assert [str(v) for v in relevant_places([6, Fraction(1, 10)])] == ["2", "3", "5", "inf"]
    assert [mobius(n) for n in (1, 6, 12, 30)] == [1, 1, 0, -1]


def test_errors():
    with pytest.raises(DomainError):
        valuation(0, 2)
    with pytest.raises(DomainError):
        Place(4)
    with pytest.raises(DomainError):
        mobius(0)
    with pytest.raises(FactorizationError):
        factorize(2**300 + 1)


def test_huge_logs():
    n = 3**100000
    assert log_abs(Fraction(n, 7), INF) == pytest.approx(100000 * math.log(3) - math.log(7))
    assert int_valuation(5**12345 * 7, 5) == 12345


@given(st.integers(min_value=1, max_value=10**40), small_primes)
def test_valuation_matches_naive(n, p):
    assert int_valuation(n, p) == naive_valuation(n, p)


@given(nonzero_q, nonzero_q, small_primes)
def test_valuation_additive(q, r, p):
    assert valuation(q * r, p) == valuation(q, p) + valuation(r, p)


@settings(max_examples=60)
@given(nonzero_q)
def test_product_formula(q):
    total = math.fsum(log_abs(q, v) for v in relevant_places([q]))
    assert abs(total) < 1e-9 * max(1.0, abs(math.log(abs(q))))


@given(nonzero_q, st.sampled_from([INF, Place(2), Place(3), Place(5)]))
def test_log_plus_identity(q, v):
    assert log_plus(q, v) - log_plus(1 / q, v) == pytest.approx(log_abs(q, v), abs=1e-12)


@given(st.integers(min_value=1, max_value=10**6))
def test_mobius_sums_to_delta(n):
    divisors = [d for d in range(1, math.isqrt(n) + 1) if n % d == 0]
    divisors = set(divisors) | {n // d for d in divisors}
    assert sum(mobius(d) for d in divisors) == (1 if n == 1 else 0)


def test_rates():
    assert RateFunction.parse("nlogn")(10) == pytest.approx(10 * math.log(10))
    r = RateFunction.parse("exp:4")
    assert r.quotient(4.0**3, 3) == pytest.approx(1.0)
    # huge values against a huge rate stay finite
    # 4^600 overflows a double; the quotient must not
    expected = math.exp(math.log(1e300) - 600 * math.log(4))
    assert r.quotient(1e300, 600) == pytest.approx(expected, rel=1e-12)
    assert expected > 1e-70
    assert RateFunction.parse("logn").log_value(1) == -math.inf
    with pytest.raises(DomainError):
        RateFunction.parse("exp:1")
    with pytest.raises(DomainError):
        RateFunction.parse("cubic")
