from fractions import Fraction

import pytest

from heightentropy.elliptic import CurvePoint, WeierstrassCurve

# 37a: y^2 + y = x^3 - x, generator (0, 0)
E37 = WeierstrassCurve(0, 0, 1, -1, 0)
Q37 = CurvePoint(Fraction(0), Fraction(0))
# published regulator of 37a (height normalized twice ours)
HHAT37 = 0.0511114082399688 / 2

# y^2 - y = x^3 - x
E37_NEG = WeierstrassCurve(0, 0, -1, -1, 0)

# singular reduction at 3 (Q = (0, 1) meets the node), conductor-style bad primes 3, 5, 19
E_SING3 = WeierstrassCurve(0, -1, 1, -6, 2)
Q_SING3 = CurvePoint(Fraction(0), Fraction(1))

# short model used for the duplication map
E_SHORT = WeierstrassCurve(0, 0, 0, -4, 4)
Q_SHORT = CurvePoint(Fraction(1), Fraction(1))


@pytest.fixture
def e37():
    return E37, Q37
