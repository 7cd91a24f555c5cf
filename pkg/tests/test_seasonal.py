import math

import numpy as np
import pytest

from parrondo.catalog import F1, F2, X1, X2, V1_F2_F1
from parrondo.jets import VectorFieldJet, jet_compose, jet_eval
from parrondo.seasonal import (
    SeasonSchedule,
    classify_origin,
    integrate_seasonal,
    paradox_demo,
    period_map_jet,
    period_map_numeric,
    predicted_v1,
)

ALTERNATING = SeasonSchedule.of((X1(), 1.0), (X2(), 1.0))


def test_schedule_validation():
    with pytest.raises(ValueError):
        SeasonSchedule(())
    with pytest.raises(ValueError):
        SeasonSchedule.of((X1(), 0.0))
    assert SeasonSchedule.of((X1(), 0.5), (X2(), 1.25)).period == 1.75


def test_segments_hit_every_boundary():
    s = SeasonSchedule.of((X1(), 0.3), (X2(), 1.0))
    idx, dur = s.segments(4)
    ends = np.cumsum(dur)
    assert ends[-1] == pytest.approx(1.3)
    assert np.any(np.isclose(ends, 0.3))
    for p in range(1, 4):
        assert np.any(np.isclose(ends, 1.3 * p / 4))
    assert list(idx[: np.searchsorted(ends, 0.3 + 1e-12)]) == [0]


def test_rotation_conserves_radius():
    traj = integrate_seasonal(SeasonSchedule.of((VectorFieldJet(1.3, 3), 1.0)), 0.05, 1, 1)
    assert abs(traj.final.z) == pytest.approx(0.05, abs=1e-12)
    assert traj.final.z == pytest.approx(0.05 * np.exp(1.3j), abs=1e-12)


def test_origin_is_fixed():
    traj = integrate_seasonal(ALTERNATING, 0, 3, 4)
    assert all(s.z == 0 for s in traj)


def test_samples_are_ordered_and_consistent():
    traj = integrate_seasonal(ALTERNATING, 0.03 + 0.01j, 2, 3)
    ts = [s.t for s in traj]
    assert ts == sorted(ts) and ts[-1] == pytest.approx(4.0)
    for s in traj:
        assert s.r2 == pytest.approx(s.z.real**2 + s.z.imag**2, rel=1e-15)
    # 3 phase points per period plus the switch at t = 1
    assert len(traj) == 1 + 2 * 4


def test_refining_samples_does_not_move_end_state():
    a = integrate_seasonal(ALTERNATING, 0.05, 1, 1).final.z
    b = integrate_seasonal(ALTERNATING, 0.05, 1, 37).final.z
    assert abs(a - b) < 1e-11


def test_escape_truncates():
    X = VectorFieldJet(1.0, 3, {(2, 1): 50.0})
    traj = integrate_seasonal(SeasonSchedule.of((X, 1.0)), 0.1, 5, 10)
    assert traj.escaped and abs(traj.final.z) <= 0.5 + 1e-9
    assert traj.final.t < 5.0


def test_start_radius_cap():
    with pytest.raises(ValueError):
        integrate_seasonal(ALTERNATING, 0.2, 1, 1)


def test_period_map_matches_composed_jet():
    assert period_map_jet(ALTERNATING).max_abs_diff(jet_compose(F2(), F1(), 3)) < 1e-12
    radii = np.geomspace(1e-3, 1e-2, 5)
    res = []
    J = jet_compose(F2(), F1(), 3)
    for r in radii:
        z0 = r * np.exp(2j * math.pi * (np.arange(8) + 0.3) / 8)
        res.append(np.max(np.abs(period_map_numeric(ALTERNATING, z0) - jet_eval(J, z0))))
    assert np.polyfit(np.log(radii), np.log(res), 1)[0] >= 3.7


def test_predicted_values():
    assert predicted_v1(SeasonSchedule.of((X1(), 1.0))) == pytest.approx(-0.5, abs=1e-12)
    assert predicted_v1(ALTERNATING) == pytest.approx(V1_F2_F1, abs=1e-12)
    assert predicted_v1(ALTERNATING.negated()) == pytest.approx(-V1_F2_F1, abs=1e-12)


def test_classify_single_season():
    c = classify_origin(SeasonSchedule.of((X2(), 1.0)), periods=500)
    assert c.verdict == "LAS"
    for fit in c.fits:
        assert fit.rate == pytest.approx(-fit.radius**2, rel=0.01)


def test_classify_rejects_large_radius():
    with pytest.raises(ValueError):
        classify_origin(ALTERNATING, radii=(0.01, 0.06))


def test_classify_rotation_is_inconclusive():
    c = classify_origin(SeasonSchedule.of((VectorFieldJet(1.0, 3), 1.0)), periods=50)
    assert c.verdict == "Inconclusive"


@pytest.mark.slow
@pytest.mark.parametrize("mu", [0j, 5 + 5j])
def test_paradox(mu):
    rep = paradox_demo(mu)
    assert rep.verdicts == ("LAS", "LAS", "Repeller")
    assert rep.reversed_verdicts == ("Repeller", "Repeller", "LAS")
    assert rep.agreement and rep.paradox
    for case in rep.cases:
        assert case.max_rate_error < 0.2
    d = rep.to_dict()
    assert d["verdicts"] == ["LAS", "LAS", "Repeller"]
