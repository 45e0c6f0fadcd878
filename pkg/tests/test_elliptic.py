import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import E37, E37_NEG, E_SHORT, E_SING3, Q37, Q_SHORT, Q_SING3
from heightentropy.elliptic import (
    ADDITIVE,
    GOOD,
    IDENTITY,
    NONSPLIT,
    SPLIT,
    CurvePoint,
    TorsionError,
    WeierstrassCurve,
    add,
    division_poly_values,
    double_iterates,
    eds_sequences,
    is_torsion,
    multiply,
    negate,
    reduction_analysis,
    singular_point_mod,
    torsion_order,
)
from heightentropy.places import DomainError, prime_divisors

CURVES = [(E37, Q37), (E_SING3, Q_SING3), (E_SHORT, Q_SHORT)]


def test_curve_invariants():
    assert E37.discriminant == 37
    for E, _ in CURVES:
        assert 4 * E.b8 == E.b2 * E.b6 - E.b4**2
        assert 1728 * E.discriminant == E.c4_invariant**3 - E.c6_invariant**2
    with pytest.raises(DomainError):
        WeierstrassCurve(0, 0, 0, 0, 0)
    assert WeierstrassCurve.parse("0,0,1,-1,0") == E37


def test_group_law_on_37a():
    P2 = add(Q37, Q37, E37)
    assert (P2.x, P2.y) == (1, 0)
    P4 = multiply(4, Q37, E37)
    assert (P4.x, P4.y) == (2, -3)
    P8 = multiply(8, Q37, E37)
    assert (P8.x, P8.y) == (Fraction(21, 25), Fraction(-69, 125))
    assert add(Q37, negate(Q37, E37), E37) is IDENTITY or add(Q37, negate(Q37, E37), E37).is_identity
    assert not is_torsion(E37, Q37)


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 6), st.integers(1, 6), st.integers(1, 6))
def test_group_law_associative(a, b, c):
    P, Q, R = (multiply(k, Q37, E37) for k in (a, b, c))
    assert add(add(P, Q, E37), R, E37) == add(P, add(Q, R, E37), E37)


def test_torsion_detection():
    # y^2 = x^3 + 1 has the 6-torsion point (2, 3)
    E = WeierstrassCurve(0, 0, 0, 0, 1)
    P = CurvePoint(Fraction(2), Fraction(3))
    assert torsion_order(E, P) == 6
    with pytest.raises(TorsionError, match="torsion point"):
        double_iterates(E, P, 3)


def test_doubling_iterates():
    its = double_iterates(E37, Q37, 4)
    assert [(it.a, it.b) for it in its] == [(1, 1), (2, 1), (21, 5), (480106, 65)]
    P = Q37
    for it in its:
        P = add(P, P, E37)
        assert P.x == it.theta


def test_division_values_37a():
    seq = division_poly_values(E37, Q37, 17)
    W = [int(seq.W(n)) for n in range(1, 18)]
    assert W == [1, 1, -1, 1, 2, -1, -3, -5, 7, -4, -23, 29, 59, 129, -314, -65, 1529]


def test_printed_eds_curve_correct_values():
    # y^2 - y = x^3 - x at (0, 0): the recurrence and the group law agree on W_5 = 2
    Q = CurvePoint(Fraction(0), Fraction(0))
    seq = division_poly_values(E37_NEG, Q, 5)
    assert [abs(int(seq.W(n))) for n in range(1, 6)] == [1, 1, 1, 1, 2]
    P5 = multiply(5, Q, E37_NEG)
    assert P5.x == Fraction(1, 4) and P5.y == Fraction(5, 8)


@pytest.mark.parametrize("E,Q", CURVES)
def test_division_values_match_group_law(E, Q):
    # x(nQ) = x - W_{n-1} W_{n+1} / W_n^2
    seq = division_poly_values(E, Q, 12)
    for n in range(2, 11):
        P = multiply(n, Q, E)
        Wn = seq.W(n)
        assert Wn != 0
        assert P.x == Q.x - seq.W(n - 1) * seq.W(n + 1) / (Wn * Wn)


def test_two_torsion_zeros():
    # (1, 0) on y^2 = x^3 - x is 2-torsion: every even W vanishes
    E = WeierstrassCurve(0, 0, 0, -1, 0)
    seq = division_poly_values(E, CurvePoint(Fraction(1), Fraction(0)), 8)
    assert seq.zero_indices() == [2, 4, 6, 8]


@pytest.mark.parametrize("E,Q", CURVES)
def test_eds_structure(E, Q):
    res = eds_sequences(E, Q, 12)
    assert res.square_ok and res.divisibility_ok
    for n in range(1, 13):
        for m in range(1, n):
            if n % m == 0:
                assert res.q[n - 1] % res.q[m - 1] == 0
    assert [u * u for u in res.u] == [res.q[2**m - 1] for m in range(1, 4)]
    assert type(res).from_dict(res.to_dict()) == res


@pytest.mark.parametrize("E,Q", CURVES)
def test_b_strong_divisibility(E, Q):
    bs = [it.b for it in double_iterates(E, Q, 8)]
    for i in range(len(bs)):
        for j in range(i, len(bs)):
            assert math.gcd(bs[i], bs[j]) == bs[i]


@pytest.mark.parametrize("E,Q", CURVES)
def test_x_denominators_square(E, Q):
    for n in range(1, 9):
        P = multiply(n, Q, E)
        d = math.isqrt(P.x.denominator)
        assert d * d == P.x.denominator
        assert (d**3) % P.y.denominator == 0


def count_points(E, p):
    n = 1
    for x in range(p):
        for y in range(p):
            if (y * y + E.c1 * x * y + E.c3 * y - x**3 - E.c2 * x * x - E.c4 * x - E.c6) % p == 0:
                n += 1
    return n


SAMPLE = [(E37, Q37), (E_SING3, Q_SING3),
          (WeierstrassCurve(0, -1, 1, -6, 6), CurvePoint(Fraction(-2), Fraction(2))),
          (WeierstrassCurve(0, -1, 0, 2, 4), CurvePoint(Fraction(6), Fraction(14)))]


@pytest.mark.parametrize("E,Q", SAMPLE)
def test_reduction_type_against_point_counts(E, Q):
    # oracle: a_p = p + 1 - #E(F_p) is 1 for split, -1 for nonsplit, 0 for additive
    for p in prime_divisors(E.discriminant):
        info = reduction_analysis(E, Q, p)
        if info.model_sensitive:
            continue
        a_p = p + 1 - count_points(E, p)
        expected = {1: SPLIT, -1: NONSPLIT, 0: ADDITIVE}[a_p]
        assert info.curve_type == expected, (p, a_p)


@pytest.mark.parametrize("E,Q", SAMPLE)
def test_singular_point_is_singular(E, Q):
    for p in prime_divisors(E.discriminant):
        x0, y0 = singular_point_mod(E, p)
        fx = (E.c1 * y0 - 3 * x0 * x0 - 2 * E.c2 * x0 - E.c4) % p
        fy = (2 * y0 + E.c1 * x0 + E.c3) % p
        f = (y0 * y0 + E.c1 * x0 * y0 + E.c3 * y0 - x0**3 - E.c2 * x0**2 - E.c4 * x0 - E.c6) % p
        assert (f, fx, fy) == (0, 0, 0)


def test_reduction_examples():
    assert reduction_analysis(E37, Q37, 5).curve_type == GOOD
    assert reduction_analysis(E_SING3, Q_SING3, 3).singular
    assert not reduction_analysis(E37, Q37, 37).singular
