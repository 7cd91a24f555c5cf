import cmath
import math

import pytest

from parrondo.birkhoff import (
    BirkhoffError,
    PerturbativeRegimeError,
    birkhoff_b1,
    radial_drift_oracle,
    verdict_from_v1,
)
from parrondo.catalog import B1_F1, B1_F2, F1, F2, V1_F2_F1, random_map_jet
from parrondo.jets import MapJet, jet_compose, series_compose


def test_reference_constants():
    r1, r2 = birkhoff_b1(F1()), birkhoff_b1(F2())
    assert abs(r1.b1 - B1_F1) < 1e-10 and r1.verdict == "LAS"
    assert abs(r2.b1 - B1_F2) < 1e-10 and r2.verdict == "LAS"
    r12 = birkhoff_b1(jet_compose(F2(), F1(), 3))
    assert abs(r12.v1 - V1_F2_F1) < 1e-10 and r12.verdict == "Repeller"


def test_rotation_is_inconclusive():
    rep = birkhoff_b1(MapJet(1.0, 3))
    assert rep.b1 == 0 and rep.verdict == "Inconclusive"


def test_pure_cubic_resonant_term():
    lam = cmath.exp(0.7j)
    rep = birkhoff_b1(MapJet(0.7, 3, {(2, 1): 0.3 - 0.2j}))
    assert rep.b1 == pytest.approx((0.3 - 0.2j) / lam, abs=1e-15)


def test_normal_form_is_conjugate(rng):
    F = random_map_jet(rng, 3)
    rep = birkhoff_b1(F)
    lhs = series_compose(F.series(), rep.conjugacy, 3)
    rhs = series_compose(rep.conjugacy, rep.normal_form, 3)
    assert lhs.almost_equal(rhs, 1e-10)
    for key, c in rep.normal_form.coeffs.items():
        if key not in {(1, 0), (2, 1)}:
            assert abs(c) < 1e-12


def test_quarter_turn_keeps_conjugate_cube():
    rep = birkhoff_b1(MapJet(math.pi / 2, 3, {(0, 3): 1.0, (2, 1): -0.5}))
    assert abs(rep.normal_form[(0, 3)] - 1.0) < 1e-12
    assert rep.v1 == pytest.approx((-0.5 / 1j).real)


def test_invariant_under_linear_rescaling(rng):
    # z -> s z rescales B1 by s^2 for real s
    F = random_map_jet(rng, 3)
    s = 0.5
    G = MapJet(F.alpha, 3, {(j, k): c * s ** (j + k - 1) for (j, k), c in F.coeffs.items()})
    assert birkhoff_b1(G).b1 == pytest.approx(birkhoff_b1(F).b1 * s**2, abs=1e-12)


@pytest.mark.parametrize("alpha", [2 * math.pi / 3, math.pi, 4 * math.pi / 3])
def test_low_order_roots_rejected(alpha):
    with pytest.raises(BirkhoffError, match="low-order root of unity"):
        birkhoff_b1(MapJet(alpha, 3))


def test_verdict_thresholds():
    assert verdict_from_v1(-1e-9) == "LAS"
    assert verdict_from_v1(1e-9) == "Repeller"
    assert verdict_from_v1(1e-11) == "Inconclusive"


@pytest.mark.parametrize(
    "F, expected",
    [(F1(), -0.5), (F2(), -0.5), (jet_compose(F2(), F1(), 3), V1_F2_F1)],
    ids=["F1", "F2", "F2oF1"],
)
def test_drift_oracle_agrees(F, expected):
    fit = radial_drift_oracle(F, 0.01, 5000)
    assert abs(fit - expected) < 0.15 * abs(expected)


def test_drift_oracle_rotation():
    assert abs(radial_drift_oracle(MapJet(1.0, 3), 0.01, 500)) < 1e-6


def test_drift_oracle_escape():
    with pytest.raises(PerturbativeRegimeError, match="left perturbative regime"):
        radial_drift_oracle(MapJet(1.0, 3, {(2, 1): 5.0}), 0.05, 5000)
