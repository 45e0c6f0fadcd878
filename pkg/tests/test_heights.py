import math
from fractions import Fraction

import pytest

from conftest import E37, E_SING3, HHAT37, Q37, Q_SING3
from heightentropy.elliptic import CurvePoint, WeierstrassCurve, add, multiply
from heightentropy.heights import (
    GlobalHeightReport,
    HeightConfig,
    SingularReductionError,
    archimedean_by_subtraction,
    canonical_height,
    epsilon,
    finite_local_heights,
    height_decomposition,
    local_height_nonsingular,
    local_height_psi_limit,
    naive_height,
    tate_local_height,
)
from heightentropy.places import DomainError


def test_canonical_height_37a_literature_value():
    assert canonical_height(E37, Q37, 10).estimate == pytest.approx(HHAT37, abs=1e-7)


def test_quadratic_scaling():
    h1 = canonical_height(E37, Q37, 10).estimate
    for m in (2, 3):
        hm = canonical_height(E37, multiply(m, Q37, E37), 8).estimate
        assert hm == pytest.approx(m * m * h1, abs=1e-4)


def test_parallelogram_law():
    # P = 2Q: hhat(P + Q) + hhat(P - Q) = 2 hhat(P) + 2 hhat(Q)
    P = multiply(2, Q37, E37)
    h = {k: canonical_height(E37, multiply(k, Q37, E37), 8).estimate for k in (1, 2, 3)}
    assert add(P, Q37, E37) == multiply(3, Q37, E37)
    lhs = h[3] + h[1]
    rhs = 2 * h[2] + 2 * h[1]
    assert lhs == pytest.approx(rhs, abs=1e-4)


def test_torsion_height_zero():
    E = WeierstrassCurve(0, 0, 0, 0, 1)
    assert canonical_height(E, CurvePoint(Fraction(2), Fraction(3)), 5).estimate == 0


def test_naive_height():
    assert naive_height(CurvePoint(Fraction(21, 25), Fraction(-69, 125))) == pytest.approx(
        0.5 * math.log(25))


def test_depth_guard():
    with pytest.raises(DomainError):
        canonical_height(E37, Q37, 13)


def test_local_nonsingular_closed_form():
    P8 = multiply(8, Q37, E37)
    assert local_height_nonsingular(E37, P8, 5).value == pytest.approx(math.log(5))
    assert local_height_nonsingular(E37, Q37, 37).value == 0


def test_psi_limit_matches_closed_form():
    P8 = multiply(8, Q37, E37)
    lim = local_height_psi_limit(E37, P8, 5, 200)
    assert abs(lim.estimate - math.log(5)) < 3 / 200 * math.log(5)


def test_tate_formula():
    assert tate_local_height(3, 2, 1) == pytest.approx(-0.25 * math.log(3))
    assert tate_local_height(7, 3, 0, 1 / 7) == pytest.approx(math.log(7))
    with pytest.raises(DomainError):
        tate_local_height(3, 2, 2)
    with pytest.raises(DomainError):
        tate_local_height(3, 2, 0)


def test_psi_limit_at_singular_place_matches_tate():
    lim = local_height_psi_limit(E_SING3, Q_SING3, 3, 300)
    assert lim.estimate == pytest.approx(tate_local_height(3, 2, 1), abs=1e-3)
    with pytest.raises(SingularReductionError):
        local_height_nonsingular(E_SING3, Q_SING3, 3)
    assert epsilon(E_SING3, Q_SING3, 3, 300) == -1


def test_singular_needs_a_value():
    with pytest.raises(SingularReductionError):
        finite_local_heights(E_SING3, Q_SING3, allow_psi=False)
    supplied = {3: tate_local_height(3, 2, 1)}
    locs = finite_local_heights(E_SING3, Q_SING3, supplied=supplied, allow_psi=False)
    assert {r.place: r.method for r in locs}["3"] == "tate-formula"


def test_decomposition_37a():
    rep = height_decomposition(E37, Q37, HeightConfig(10, 400))
    assert abs(rep.residual) < 1e-4
    assert rep.archimedean_gap < 1e-4
    assert rep.local("inf").value == pytest.approx(
        archimedean_by_subtraction(E37, Q37, 10), abs=1e-4)
    assert GlobalHeightReport.from_dict(rep.to_dict()) == rep


def test_decomposition_with_supplied_tate_value():
    sup = {3: tate_local_height(3, 2, 1)}
    rep = height_decomposition(E_SING3, Q_SING3, HeightConfig(9, 300), sup)
    assert rep.local(3).method == "tate-formula"
    assert abs(rep.residual) < 1e-3
    assert rep.signs["3"] == -1
