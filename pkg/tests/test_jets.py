import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from parrondo.catalog import F1, F2, random_map_jet
from parrondo.jets import (
    JetError,
    MapJet,
    Series,
    VectorFieldJet,
    dumps_jet,
    jet_add,
    jet_compose,
    jet_conjugate,
    jet_eval,
    jet_from_dict,
    jet_mul,
    jet_to_dict,
    loads_jet,
    monomials,
    near_identity_inverse,
    series_compose,
)
from parrondo.birkhoff import birkhoff_b1


def test_add_is_coefficientwise():
    a = MapJet(1.0, 2, {(2, 0): 1.0})
    b = MapJet(1.0, 2, {(2, 0): 2.0, (1, 1): 1j})
    s = jet_add(a, b, 2)
    assert s[(2, 0)] == 3.0 and s[(1, 1)] == 1j


def test_add_zero_is_identity(rng):
    a = random_map_jet(rng, 3)
    assert jet_add(a, MapJet(a.alpha, 3), 3).almost_equal(a)


def test_add_commutes(rng):
    a = random_map_jet(rng, 3, alpha=1.2)
    b = random_map_jet(rng, 3, alpha=1.2)
    ab, ba = jet_add(a, b, 3), jet_add(b, a, 3)
    for key in monomials(3):
        assert ab[key] == ba[key]


def test_add_rejects_rotation_mismatch():
    with pytest.raises(JetError, match="incompatible rotation"):
        jet_add(MapJet(1.0, 2), MapJet(1.5, 2), 2)


def test_mul_simple_products():
    z = Series(2, {(1, 0): 1.0})
    zb = Series(2, {(0, 1): 1.0})
    assert jet_mul(z, zb, 2).coeffs == {(1, 1): 1.0}
    zz = Series(3, {(1, 0): 1.0, (2, 0): 1.0})
    assert jet_mul(zz, z, 2).coeffs == {(2, 0): 1.0}


def test_mul_matches_pointwise_product(rng):
    a, b = random_map_jet(rng, 3, alpha=0.7), random_map_jet(rng, 3, alpha=0.7)
    prod = jet_mul(a, b, 6)
    z = 0.05 * np.exp(1j * rng.uniform(0, 2 * math.pi, 10))
    np.testing.assert_allclose(prod.evaluate(z), jet_eval(a, z) * jet_eval(b, z), atol=1e-16)


def test_conjugate_of_simple_series():
    s = Series(2, {(1, 0): 1j, (2, 0): 1.0})
    c = jet_conjugate(s, 2)
    assert c.coeffs == {(0, 1): -1j, (0, 2): 1.0}
    assert jet_conjugate(c, 2).coeffs == s.coeffs


def test_conjugate_pointwise(rng):
    a = random_map_jet(rng, 3)
    z = 0.1 * rng.uniform(0, 1, 20) * np.exp(1j * rng.uniform(0, 2 * math.pi, 20))
    np.testing.assert_allclose(jet_conjugate(a, 3).evaluate(z), np.conj(jet_eval(a, z)), atol=1e-14)


def test_compose_pure_rotations():
    c = jet_compose(MapJet(1.0, 3), MapJet(2.0, 3), 3)
    assert c.alpha == pytest.approx(3.0) and not c.coeffs


def test_compose_reduces_rotation_and_rejects_identity():
    c = jet_compose(MapJet(4.0, 2), MapJet(4.0, 2), 2)
    assert c.alpha == pytest.approx(8.0 - 2 * math.pi)
    with pytest.raises(JetError, match="composition not elliptic"):
        jet_compose(MapJet(math.pi, 2), MapJet(math.pi, 2), 2)


def test_compose_of_reference_maps_is_repeller():
    v1 = birkhoff_b1(jet_compose(F2(), F1(), 3)).v1
    assert v1 == pytest.approx((3 * math.sqrt(3) - 5) / 2, abs=1e-12)


def test_compose_residual_is_fourth_order(rng):
    a, b = random_map_jet(rng, 2), random_map_jet(rng, 2)
    c = jet_compose(a, b, 3)
    errs = []
    radii = np.array([1e-3, 2e-3, 4e-3])
    for r in radii:
        z = r * np.exp(1j * np.linspace(0, 6, 7))
        errs.append(np.max(np.abs(jet_eval(c, z) - jet_eval(a, jet_eval(b, z)))))
    slope = np.polyfit(np.log(radii), np.log(errs), 1)[0]
    assert slope > 3.7


def test_near_identity_inverse(rng):
    h = Series(4, {(1, 0): 1.0, (2, 0): 0.3j, (1, 1): -0.2, (0, 3): 0.5})
    hinv = near_identity_inverse(h, 4)
    ident = series_compose(hinv, h, 4)
    assert ident.almost_equal(Series(4, {(1, 0): 1.0}))


def test_eval_reference_values():
    assert jet_eval(F1(), 0.0) == 0
    assert jet_eval(F1(), 0.1) == pytest.approx(0.02 + 0.07j, abs=1e-15)
    z = 0.3 - 0.2j
    assert jet_eval(MapJet(0.4, 3), z) == pytest.approx(cmath.exp(0.4j) * z)


def test_map_alpha_range():
    with pytest.raises(JetError):
        MapJet(0.0, 2)
    with pytest.raises(JetError):
        MapJet(2 * math.pi, 2)
    with pytest.raises(JetError):
        MapJet(1.0, 2, {(1, 0): 1.0})
    assert VectorFieldJet(-1.0, 2).alpha == -1.0


# JSON ----------------------------------------------------------------------

coeff = st.complex_numbers(max_magnitude=1e6, allow_nan=False, allow_infinity=False)


@st.composite
def jets(draw):
    degree = draw(st.integers(2, 5))
    keys = draw(st.sets(st.sampled_from(monomials(degree))))
    coeffs = {key: draw(coeff) for key in keys}
    alpha = draw(st.floats(0.01, 6.2))
    cls = draw(st.sampled_from([MapJet, VectorFieldJet]))
    return cls(alpha, degree, coeffs)


@settings(max_examples=60)
@given(jets())
def test_json_round_trip(jet):
    back = loads_jet(dumps_jet(jet))
    assert type(back) is type(jet)
    assert back.alpha == jet.alpha and back.degree == jet.degree
    assert dict(back.coeffs) == dict(jet.coeffs)


def test_json_layout():
    d = jet_to_dict(F2())
    assert d == {
        "kind": "map",
        "alpha": math.pi / 3,
        "degree": 3,
        "coeffs": [{"j": 2, "k": 1, "re": -1.0, "im": 0.0}],
    }


@pytest.mark.parametrize(
    "patch, message",
    [
        ({"extra": 1}, "unknown keys"),
        ({"kind": "thing"}, "kind"),
        ({"degree": 2.5}, "degree"),
        ({"coeffs": [{"j": 4, "k": 0, "re": 1, "im": 0}]}, r"coeffs\[0\]: j\+k=4"),
        ({"coeffs": [{"j": 1, "k": 0, "re": 1, "im": 0}]}, r"j\+k=1"),
        ({"coeffs": [{"j": 2, "k": 0, "re": "x", "im": 0}]}, r"coeffs\[0\].re"),
        ({"coeffs": [{"j": 2, "k": 0, "re": 1}]}, "expected keys"),
    ],
)
def test_json_rejects_bad_input(patch, message):
    data = jet_to_dict(F1())
    data.update(patch)
    with pytest.raises(JetError, match=message):
        jet_from_dict(data)


def test_json_syntax_error_reports_position():
    with pytest.raises(JetError, match="line 2 column"):
        loads_jet('{"kind": "map",\n  oops}')


def test_json_alpha_override():
    jet = jet_from_dict(jet_to_dict(F1()), alpha=1.0)
    assert jet.alpha == 1.0 and jet[(2, 0)] == 1 - 3j
