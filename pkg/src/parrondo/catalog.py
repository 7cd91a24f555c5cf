"""Reference maps, fields and closed-form coefficient formulas.

``F1``/``F2`` are the two cubic maps with an LAS elliptic fixed point whose
composition ``F2 o F1`` is repelling; ``X1(mu)``/``X2`` are polynomial fields
whose time-1 flows agree with them to third order. The formula helpers are
explicit closed forms for particular resonance cases and are used as
independent checks of the generic solver.
"""

from __future__ import annotations

import cmath
import math
from typing import Mapping

from .jets import Key, MapJet, VectorFieldJet, monomials

PI = math.pi
SQRT3 = math.sqrt(3.0)

B1_F1 = complex(-0.5, -5.5)
B1_F2 = complex(-0.5, SQRT3 / 2)
V1_F2_F1 = (3 * SQRT3 - 5) / 2


def F1() -> MapJet:
    """``i z + (1 - 3i) z^2 + z zbar``."""
    return MapJet(PI / 2, 3, {(2, 0): 1 - 3j, (1, 1): 1.0})


def F2() -> MapJet:
    """``(1 + i sqrt3)/2 z - z^2 zbar``."""
    return MapJet(PI / 3, 3, {(2, 1): -1.0})


def X1(mu: complex = 0j) -> VectorFieldJet:
    return VectorFieldJet(
        PI / 2,
        3,
        {
            (2, 0): -(1 - 0.5j) * PI,
            (1, 1): (0.25 - 0.25j) * PI,
            (0, 2): 0j,
            (3, 0): -(3 - 4j) * PI,
            (2, 1): complex(3 * PI / 4 - 0.5, PI / 2 - 5.5),
            (1, 2): 3 * PI / 4,
            (0, 3): complex(mu),
        },
    )


def X2() -> VectorFieldJet:
    return VectorFieldJet(PI / 3, 3, {(2, 1): complex(-0.5, SQRT3 / 2)})


def quadratic_coefficients(alpha: float, f: Mapping[Key, complex]) -> dict[Key, complex]:
    """Unique quadratic field when ``e^{i alpha}`` is not a cube root of unity."""
    w = cmath.exp(1j * alpha)
    return {
        (2, 0): 1j * alpha * f.get((2, 0), 0j) / (w * (w - 1)),
        (1, 1): 1j * alpha * f.get((1, 1), 0j) / (w - 1),
        (0, 2): 3j * alpha * w**2 * f.get((0, 2), 0j) / (w**3 - 1),
    }


def cubic_a30_generic(alpha: float, f: Mapping[Key, complex]) -> complex:
    """``a_{3,0}`` of the unique cubic field for non-resonant rotations."""
    w = cmath.exp(1j * alpha)
    f20, f11, f30 = f.get((2, 0), 0j), f.get((1, 1), 0j), f.get((3, 0), 0j)
    cf02 = complex(f.get((0, 2), 0j)).conjugate()
    p30 = (
        (cf02 * f11 - 2 * f30) * w**3
        + 2 * (cf02 * f11 + f20**2 - f30) * w**2
        + 2 * (f20**2 - f30) * w
        + 2 * f20**2
    )
    return -1j * alpha * p30 / (w**2 * (w**3 - 1) * (w + 1))


def third_turn_a30(alpha: float, f: Mapping[Key, complex], a02: complex = 0j) -> complex:
    """``a_{3,0}`` when ``e^{i alpha}`` is a primitive cube root of unity and
    ``a_{0,2}`` is the free quadratic coefficient."""
    w = cmath.exp(1j * alpha)
    f20, f11, f30 = (complex(f.get(k, 0j)) for k in ((2, 0), (1, 1), (3, 0)))
    num = complex(a02).conjugate() * f11 * (w - 1) ** 2 - 6j * alpha * f30 * w + 6j * alpha * f20**2
    return num / (3 * w * (w - 1))


def quarter_turn_compatible_f03(f: Mapping[Key, complex]) -> complex:
    """Value of ``f_{0,3}`` required for a time-1 field when ``e^{i alpha} = i``."""
    f20, f11, f02 = (complex(f.get(k, 0j)) for k in ((2, 0), (1, 1), (0, 2)))
    return 0.5 * f02 * ((2 + 2j) * f20.conjugate() + (1 - 1j) * f11)


def quarter_turn_family(f: Mapping[Key, complex], a03: complex = 0j) -> dict[Key, complex]:
    """Cubic field family for ``e^{i alpha} = i`` (free coefficient ``a_{0,3}``)."""
    f20, f11, f02, f30, f21, f12 = (
        complex(f.get(k, 0j)) for k in ((2, 0), (1, 1), (0, 2), (3, 0), (2, 1), (1, 2))
    )
    c = complex.conjugate
    return {
        (2, 0): -PI / 4 * (1 + 1j) * f20,
        (1, 1): PI / 4 * (1 - 1j) * f11,
        (0, 2): 3 * PI / 4 * (1 + 1j) * f02,
        (3, 0): -PI / 2 * (-(1 + 0.5j) * f11 * c(f02) + 1j * f20**2 + f30),
        (2, 1): 0.25 * complex(-2, PI - 2) * abs(f11) ** 2
        + 0.5 * complex(-2, 3 * PI + 2) * abs(f02) ** 2
        + 0.25 * complex(6, PI - 2) * f11 * f20
        - 1j * f21,
        (1, 2): PI / 2
        * (-(2 + 1j) * f02 * c(f11) - 0.5j * f11 * c(f20) - (2 - 1j) * f20 * f02 + 0.5j * f11**2 + f12),
        (0, 3): complex(a03),
    }


def half_turn_printed_conditions(f: Mapping[Key, complex]) -> dict[Key, complex]:
    """Compatibility values of ``f_{3,0}, f_{1,2}, f_{0,3}`` for ``e^{i alpha} = -1``,
    exactly as commonly quoted (see :func:`half_turn_conditions` for the
    ``f_{1,2}`` term that differs)."""
    f20, f11, f02 = (complex(f.get(k, 0j)) for k in ((2, 0), (1, 1), (0, 2)))
    c = complex.conjugate
    return {
        (3, 0): -0.5 * f11 * c(f02) - f20**2,
        (1, 2): -0.5 * f11**2 - 0.5 * f11 * c(f02) - f20 * f02 - f02 * c(f11),
        (0, 3): -0.5 * f02 * (2 * c(f20) + f11),
    }


def half_turn_conditions(f: Mapping[Key, complex]) -> dict[Key, complex]:
    """Compatibility values for ``e^{i alpha} = -1`` as produced by the time-1 flow.

    Differs from the printed version in the ``f_{1,2}`` condition, whose
    second term is ``-1/2 f_{1,1} conj(f_{2,0})``.
    """
    f20, f11, f02 = (complex(f.get(k, 0j)) for k in ((2, 0), (1, 1), (0, 2)))
    c = complex.conjugate
    out = half_turn_printed_conditions(f)
    out[(1, 2)] = -0.5 * f11**2 - 0.5 * f11 * c(f20) - f20 * f02 - f02 * c(f11)
    return out


def half_turn_a21(f: Mapping[Key, complex]) -> complex:
    f20, f11, f02, f21 = (complex(f.get(k, 0j)) for k in ((2, 0), (1, 1), (0, 2), (2, 1)))
    return (
        0.25 * complex(-2, PI) * abs(f11) ** 2
        + 0.5 * complex(-2, 3 * PI) * abs(f02) ** 2
        - complex(1.5, PI / 4) * f20 * f11
        - f21
    )


# --------------------------------------------------------------------------
# Seeded random jets for cross-checks
# --------------------------------------------------------------------------

def sample_alpha(rng, avoid_orders=(1, 2, 3, 4), margin: float = 0.05) -> float:
    """Rotation angle whose ``e^{i alpha}`` is at least ``margin`` away from
    every root of unity of the listed orders."""
    while True:
        alpha = float(rng.uniform(0.0, 2 * PI))
        w = cmath.exp(1j * alpha)
        ok = all(
            abs(w - cmath.exp(2j * PI * p / q)) >= margin for q in avoid_orders for p in range(q)
        )
        if ok:
            return alpha


def random_coeffs(rng, degree: int, scale: float = 1.0) -> dict[Key, complex]:
    keys = monomials(degree)
    vals = rng.uniform(-scale, scale, size=(len(keys), 2))
    return {key: complex(re, im) for key, (re, im) in zip(keys, vals)}


def random_map_jet(rng, degree: int, alpha: float | None = None, scale: float = 1.0) -> MapJet:
    if alpha is None:
        alpha = sample_alpha(rng)
    return MapJet(alpha, degree, random_coeffs(rng, degree, scale))


def random_field_jet(rng, degree: int, alpha: float | None = None, scale: float = 1.0) -> VectorFieldJet:
    if alpha is None:
        alpha = sample_alpha(rng)
    return VectorFieldJet(alpha, degree, random_coeffs(rng, degree, scale))
