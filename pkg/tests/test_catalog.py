"""Closed-form coefficient formulas versus the generic solver."""

import math

import pytest

from parrondo.catalog import (
    half_turn_a21,
    half_turn_conditions,
    half_turn_printed_conditions,
    random_coeffs,
    random_field_jet,
    third_turn_a30,
)
from parrondo.flow import flow_at, flow_expand
from parrondo.inverse import Family, Obstructed, invert_map
from parrondo.jets import MapJet

HALF_FREE = {(3, 0), (1, 2), (0, 3)}


def _half_turn_time_one(rng, scale=0.5):
    X = random_field_jet(rng, 3, alpha=math.pi, scale=scale)
    return flow_at(flow_expand(X, 3), 1.0)


def test_time_one_maps_satisfy_corrected_half_turn_conditions(rng):
    for _ in range(10):
        F = _half_turn_time_one(rng)
        for key, value in half_turn_conditions(F.coeffs).items():
            assert F[key] == pytest.approx(value, abs=1e-12)


def test_time_one_maps_violate_printed_f12_condition(rng):
    # the f_{1,2} condition as usually printed uses conj(f_{0,2}) where the
    # flow produces conj(f_{2,0}); the two agree only when those coincide
    F = _half_turn_time_one(rng)
    printed = half_turn_printed_conditions(F.coeffs)
    assert F[(3, 0)] == pytest.approx(printed[(3, 0)], abs=1e-12)
    assert F[(0, 3)] == pytest.approx(printed[(0, 3)], abs=1e-12)
    assert abs(F[(1, 2)] - printed[(1, 2)]) > 1e-3


def test_corrected_conditions_give_three_parameter_family(rng):
    f = random_coeffs(rng, 3)
    f.update(half_turn_conditions(f))
    out = invert_map(MapJet(math.pi, 3, f))
    assert isinstance(out, Family)
    assert set(out.free) == HALF_FREE
    assert out.base[(2, 1)] == pytest.approx(half_turn_a21(f), abs=1e-12)
    assert out.base[(2, 0)] == pytest.approx(0.5j * math.pi * f[(2, 0)], abs=1e-12)
    assert out.base[(1, 1)] == pytest.approx(-0.5j * math.pi * f[(1, 1)], abs=1e-12)
    assert out.base[(0, 2)] == pytest.approx(-1.5j * math.pi * f[(0, 2)], abs=1e-12)


def test_printed_conditions_agree_when_the_two_terms_coincide(rng):
    f = random_coeffs(rng, 3)
    f[(0, 2)] = f[(2, 0)]
    f.update(half_turn_printed_conditions(f))
    out = invert_map(MapJet(math.pi, 3, f))
    assert isinstance(out, Family) and set(out.free) == HALF_FREE


def test_each_violated_condition_is_reported(rng):
    f = random_coeffs(rng, 3)
    f.update(half_turn_conditions(f))
    for key in HALF_FREE:
        g = dict(f)
        g[key] += 0.1
        out = invert_map(MapJet(math.pi, 3, g))
        assert isinstance(out, Obstructed) and out.at == key
        assert out.defect == pytest.approx(0.1, abs=1e-12)


def test_third_turn_a30(rng):
    alpha = 2 * math.pi / 3
    for _ in range(5):
        f = random_coeffs(rng, 3)
        f[(0, 2)] = 0j
        mu = complex(*rng.normal(size=2))
        out = invert_map(MapJet(alpha, 3, f), {(0, 2): mu})
        assert isinstance(out, Family) and out.free == ((0, 2),)
        assert out.base[(3, 0)] == pytest.approx(third_turn_a30(alpha, f, mu), abs=1e-10)
