import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heightentropy.places import DomainError
from heightentropy.solenoid import (
    jensen_quadrature,
    mobius_congruence,
    periodic_count,
    place_sum,
    projective_height,
    solenoid_report,
)


def coprime_pairs(n, seed=7):
    rng = random.Random(seed)
    out = []
    while len(out) < n:
        a, b = rng.randint(-50, 50), rng.randint(1, 50)
        if math.gcd(a, b) == 1 and abs(a) != abs(b):
            out.append((a, b))
    return out


def test_projective_examples():
    assert projective_height(3, 2) == pytest.approx(math.log(3))
    assert projective_height(1, 1) == 0
    ps = place_sum(10, 3)
    assert ps["3"] == pytest.approx(math.log(3))
    assert ps["inf"] == pytest.approx(math.log(10 / 3))
    assert projective_height(10, 3) == pytest.approx(math.log(10))
    with pytest.raises(DomainError):
        projective_height(4, 2)


@pytest.mark.parametrize("a,b", [(3, 2), (1, 2), (7, 4)])
def test_jensen_examples(a, b):
    assert jensen_quadrature(a, b, 2048) == pytest.approx(math.log(max(abs(a), abs(b))), abs=1e-6)


def test_jensen_oracle_fine_grid():
    # the K = 2^16 rule serves as the oracle for K = 2048
    assert jensen_quadrature(7, 4, 2048) == pytest.approx(jensen_quadrature(7, 4, 2**16), abs=1e-9)


def test_jensen_errors():
    with pytest.raises(DomainError, match="singularity"):
        jensen_quadrature(2, -2)
    with pytest.raises(DomainError):
        jensen_quadrature(3, 2, 8)


def test_jensen_random_pairs():
    for a, b in coprime_pairs(20):
        assert abs(jensen_quadrature(a, b, 2**16) - projective_height(a, b)) < 1e-6


def test_periodic_counts():
    assert periodic_count(3, 2, 3) == 19
    assert periodic_count(2, 1, 6) == 63
    assert periodic_count(3, 2, 1) == 1
    with pytest.raises(DomainError):
        periodic_count(1, -1, 2)


def test_growth_rate():
    for n in (500, 800):
        assert abs(math.log(periodic_count(3, 2, n)) / n - math.log(3)) < 0.01


def test_mobius_congruence_examples():
    r = mobius_congruence([1, 1, 1, 1, 5], 5)
    assert (r.total, r.residue, r.ok) == (4, 4, False)
    r = mobius_congruence([abs(2**d - 1) for d in range(1, 7)], 6)
    assert (r.total, r.residue) == (54, 0)
    assert mobius_congruence([17], 1).residue == 0


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(coprime_pairs(40, seed=3)))
def test_counts_are_realizable(pair):
    a, b = pair
    counts = [periodic_count(a, b, n) for n in range(1, 31)]
    assert all(mobius_congruence(counts, n).ok for n in range(1, 31))


def test_report():
    rep = solenoid_report(3, 2, 3)
    assert rep.counts == [1, 5, 19]
    assert all(c.residue == 0 for c in rep.congruence)
    assert type(rep).from_dict(rep.to_dict()) == rep
