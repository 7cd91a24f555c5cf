"""Vector fields whose time-1 flow realises a given map jet.

For each monomial of degree ``L`` the time-1 condition reads

    e^{i alpha} [ a_{j,k} c_{j,k} + int_0^1 b_{j,k}(s) e^{-i alpha s} ds ] = f_{j,k},

with ``c_{j,k} = 1`` when ``j = k + 1`` and
``(e^{i(j-k-1) alpha} - 1) / (i (j-k-1) alpha)`` otherwise. When ``c_{j,k}``
vanishes (a resonance) the coefficient is free provided the remaining
equation holds, otherwise the map is not a time-1 map to that order.
Free coefficients are carried symbolically into the higher-level forcings.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Mapping, Union

from .flow import ExpPoly, expand_time_jet, exppoly_integrate_twisted, level_forcing
from .jets import Key, MapJet, VectorFieldJet, monomials
from .params import ParamPoly, evaluate_scalar

RESONANCE_TOL = 1e-9
COMPATIBILITY_TOL = 1e-9


class UsageError(ValueError):
    """Invalid arguments (as opposed to a negative mathematical result)."""


def _is_resonant(alpha: float, j: int, k: int) -> bool:
    r = j - k - 1
    return r != 0 and abs(cmath.exp(1j * r * alpha) - 1) < RESONANCE_TOL


def _split_product(r: int, x: float) -> tuple[float, float]:
    """``r * x`` as an unevaluated sum ``hi + lo`` (Veltkamp split of ``x``)."""
    c = 134217729.0 * x  # 2**27 + 1
    x_hi = c - (c - x)
    return r * x_hi, r * (x - x_hi)


def _time1_factor(alpha: float, j: int, k: int) -> complex:
    """``(e^{i r alpha} - 1) / (i r alpha)`` with ``r = j - k - 1``.

    Written as ``e^{i h} sin(h) / h`` with ``h = r alpha / 2`` kept in two
    pieces, so the sine stays accurate when ``h`` is close to a multiple of
    pi (near-resonant slots).
    """
    r = j - k - 1
    if r == 0:
        return 1.0 + 0j
    hi, lo = _split_product(r, alpha)
    h, l = 0.5 * hi, 0.5 * lo
    s = math.sin(h) * math.cos(l) + math.cos(h) * math.sin(l)
    half = h + l
    return cmath.exp(1j * half) * (s / half)


# --------------------------------------------------------------------------
# Resonances
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ResonanceEntry:
    j: int
    k: int
    resonant: bool


@dataclass(frozen=True)
class ResonanceTable:
    alpha: float
    degree: int
    entries: tuple[ResonanceEntry, ...]
    orders: Mapping[int, tuple[int, ...]]

    @property
    def resonant_slots(self) -> list[Key]:
        return [(e.j, e.k) for e in self.entries if e.resonant]

    def is_resonant(self, key: Key) -> bool:
        return key in self.resonant_slots


def resonance_table(alpha: float, n: int) -> ResonanceTable:
    """Resonant monomials up to degree ``n`` for rotation ``alpha``.

    ``orders[m]`` lists the values ``|j - k - 1|`` occurring at degree ``m``.
    """
    if not 0 < alpha < 2 * math.pi:
        raise UsageError("alpha must lie in (0, 2 pi)")
    entries = tuple(ResonanceEntry(j, k, _is_resonant(alpha, j, k)) for j, k in monomials(n))
    orders = {m: tuple(sorted({abs(j - k - 1) for j, k in monomials(m, m)})) for m in range(2, n + 1)}
    return ResonanceTable(alpha, n, entries, orders)


# --------------------------------------------------------------------------
# Outcomes
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Unique:
    field: VectorFieldJet


@dataclass(frozen=True)
class Family:
    """Parametric family; ``base`` is the member at the requested free values.

    ``parametric`` holds every coefficient as a polynomial in the free
    parameters (indexed in the order of ``free``); ``dependence`` maps each
    coefficient to the free slots it involves.
    """

    base: VectorFieldJet
    free: tuple[Key, ...]
    dependence: Mapping[Key, tuple[Key, ...]]
    parametric: Mapping[Key, object] = field(repr=False, default_factory=dict)

    def at(self, free_values: Mapping[Key, complex]) -> VectorFieldJet:
        values = [complex(free_values.get(slot, 0j)) for slot in self.free]
        coeffs = {key: evaluate_scalar(c, values) for key, c in self.parametric.items()}
        return VectorFieldJet(self.base.alpha, self.base.degree, coeffs)


@dataclass(frozen=True)
class Obstructed:
    """First failing compatibility equation.

    ``defect`` is the map coefficient minus the value the compatibility
    equation requires for it.
    """

    at: Key
    defect: complex


SolveOutcome = Union[Unique, Family, Obstructed]


@dataclass(frozen=True)
class SlotResult:
    j: int
    k: int
    status: str  # "determined" | "free" | "obstructed"
    value: object = None
    defect: object = None


# --------------------------------------------------------------------------
# Level solver
# --------------------------------------------------------------------------

def _solve_slots(F: MapJet, forcing: Mapping[Key, ExpPoly], level: int) -> list[SlotResult]:
    alpha = F.alpha
    omega = cmath.exp(1j * alpha)
    results = []
    for j, k in monomials(level, level):
        twisted = forcing[(j, k)].integral_01_twisted()
        f = F[(j, k)]
        if _is_resonant(alpha, j, k):
            defect = f - omega * twisted
            if abs(defect) < COMPATIBILITY_TOL:
                results.append(SlotResult(j, k, "free", defect=defect))
            else:
                results.append(SlotResult(j, k, "obstructed", defect=defect))
        else:
            value = (f / omega - twisted) / _time1_factor(alpha, j, k)
            results.append(SlotResult(j, k, "determined", value=value))
    return results


def solve_level(F: MapJet, partial: VectorFieldJet, level: int) -> list[SlotResult]:
    """Solve the time-1 equations of one degree given all lower coefficients."""
    if level < 2 or level > F.degree:
        raise UsageError(f"level {level} outside [2, {F.degree}]")
    if abs(partial.alpha - F.alpha) > 1e-12:
        raise UsageError("partial field and map have different rotations")
    a = {key: c for key, c in partial.coeffs.items() if sum(key) < level}
    phi = expand_time_jet(F.alpha, a, level - 1)
    return _solve_slots(F, level_forcing(F.alpha, phi, a, level), level)


def _report_defect(defect, values: list[complex]) -> complex:
    value = evaluate_scalar(defect, values)
    if abs(value) >= COMPATIBILITY_TOL or not isinstance(defect, ParamPoly):
        return value
    # vanishes at the chosen values but not identically
    return max(defect.terms.values(), key=abs)


def invert_map(F: MapJet, free_values: Mapping[Key, complex] | None = None) -> SolveOutcome:
    """Vector field(s) whose time-1 flow equals ``F`` up to ``O(F.degree + 1)``."""
    free_values = dict(free_values or {})
    if free_values:
        table = resonance_table(F.alpha, F.degree)
        bad = [key for key in free_values if not table.is_resonant(tuple(key))]
        if bad:
            raise UsageError(f"free values given for non-resonant slots {bad}")
    alpha = F.alpha
    phi = {(1, 0): ExpPoly.monomial(alpha, 1, 1.0)}
    a: dict[Key, object] = {}
    free: list[Key] = []
    for level in range(2, F.degree + 1):
        forcing = level_forcing(alpha, phi, a, level)
        for res in _solve_slots(F, forcing, level):
            key = (res.j, res.k)
            if res.status == "obstructed":
                values = [complex(free_values.get(s, 0j)) for s in free]
                return Obstructed(key, _report_defect(res.defect, values))
            if res.status == "free":
                a[key] = ParamPoly.symbol(len(free))
                free.append(key)
            else:
                a[key] = res.value
        for (j, k), b in forcing.items():
            phi[(j, k)] = exppoly_integrate_twisted(b, a[(j, k)], j, k)

    if not free:
        return Unique(VectorFieldJet(alpha, F.degree, {key: complex(c) for key, c in a.items()}))
    values = [complex(free_values.get(s, 0j)) for s in free]
    base = VectorFieldJet(alpha, F.degree, {key: evaluate_scalar(c, values) for key, c in a.items()})
    dependence = {}
    for key, c in a.items():
        idx = c.depends_on() if isinstance(c, ParamPoly) else set()
        dependence[key] = tuple(free[i] for i in sorted(idx))
    return Family(base, tuple(free), dependence, dict(a))


# --------------------------------------------------------------------------
# Closed forms and special families
# --------------------------------------------------------------------------

def closed_form_quadratic(F: MapJet) -> SolveOutcome:
    """Direct formulas for degree-2 maps (no recursion)."""
    if F.degree != 2:
        raise UsageError("closed_form_quadratic needs a degree-2 map")
    alpha = F.alpha
    w = cmath.exp(1j * alpha)
    a20 = 1j * alpha * F[(2, 0)] / (w * (w - 1))
    a11 = 1j * alpha * F[(1, 1)] / (w - 1)
    if abs(w**3 - 1) < RESONANCE_TOL:
        f02 = F[(0, 2)]
        if abs(f02) >= COMPATIBILITY_TOL:
            return Obstructed((0, 2), f02)
        base = VectorFieldJet(alpha, 2, {(2, 0): a20, (1, 1): a11, (0, 2): 0j})
        sym = ParamPoly.symbol(0)
        return Family(
            base,
            ((0, 2),),
            {(2, 0): (), (1, 1): (), (0, 2): ((0, 2),)},
            {(2, 0): a20, (1, 1): a11, (0, 2): sym},
        )
    a02 = 3j * alpha * w**2 * F[(0, 2)] / (w**3 - 1)
    return Unique(VectorFieldJet(alpha, 2, {(2, 0): a20, (1, 1): a11, (0, 2): a02}))


@dataclass(frozen=True)
class RotationClaimVerdict:
    passed: bool
    max_coefficient: float
    outcome: SolveOutcome


def check_pure_rotation_claim(alpha: float, n: int, m: int) -> RotationClaimVerdict:
    """For ``e^{i alpha}`` a primitive ``(n+1)``-th root of unity, a field whose
    time-1 flow is a pure rotation to order ``m`` must itself be linear to
    order ``m`` (``2 <= m <= n - 1``)."""
    if not 2 <= m <= n - 1:
        raise UsageError(f"m={m} outside [2, {n - 1}]")
    if abs(alpha - 2 * math.pi / (n + 1)) > 1e-12:
        raise UsageError("alpha must equal 2 pi / (n + 1)")
    outcome = invert_map(MapJet(alpha, m, {}))
    if not isinstance(outcome, Unique):
        return RotationClaimVerdict(False, math.inf, outcome)
    biggest = max((abs(c) for c in outcome.field.coeffs.values()), default=0.0)
    return RotationClaimVerdict(biggest < 1e-12, biggest, outcome)


def obstruction_map(n: int) -> MapJet:
    """``e^{2 pi i/(n+1)} z + zbar^n``: not a time-1 map to order ``n``."""
    if n < 2:
        raise UsageError("n must be >= 2")
    return MapJet(2 * math.pi / (n + 1), n, {(0, n): 1.0})


def obstruction_family_demo(n: int) -> SolveOutcome:
    return invert_map(obstruction_map(n))
