"""First Birkhoff constant of an elliptic fixed point by normal-form reduction.

Conjugating ``F`` by near-identity changes of variables ``h = id + H`` turns a
monomial coefficient ``g_{j,k}`` into ``g_{j,k} + H_{j,k}(lambda - lambda^{j-k})``
at the lowest order, so every monomial with ``lambda^{j-k-1} != 1`` can be
removed. What remains of the cubic part is ``lambda B_1 z^2 zbar`` (plus
``zbar^3`` when ``lambda^4 = 1``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .jets import MapJet, Series, monomials, near_identity_inverse, series_compose

ROOT_TOL = 1e-9
VERDICT_TOL = 1e-10


class BirkhoffError(ValueError):
    pass


class PerturbativeRegimeError(RuntimeError):
    pass


@dataclass(frozen=True)
class StabilityReport:
    b1: complex
    v1: float
    verdict: str  # "LAS" | "Repeller" | "Inconclusive"
    normal_form: Series = field(repr=False)
    conjugacy: Series = field(repr=False)


def verdict_from_v1(v1: float, tol: float = VERDICT_TOL) -> str:
    if v1 < -tol:
        return "LAS"
    if v1 > tol:
        return "Repeller"
    return "Inconclusive"


def _remove_degree(g: Series, lam: complex, d: int) -> tuple[Series, Series]:
    """Conjugate away every non-resonant monomial of degree ``d``."""
    h = {(1, 0): 1.0}
    for j, k in monomials(d, d):
        den = lam ** (j - k) - lam
        if abs(den) < ROOT_TOL:
            continue
        h[(j, k)] = g[(j, k)] / den
    h = Series(g.degree, h)
    hinv = near_identity_inverse(h, g.degree)
    return series_compose(hinv, series_compose(g, h, g.degree), g.degree), h


def birkhoff_b1(F: MapJet, tol: float = VERDICT_TOL) -> StabilityReport:
    """``B_1``, ``V_1 = Re(B_1)`` and the stability verdict of the origin."""
    lam = F.omega
    for order in (1, 2, 3):
        if abs(lam**order - 1) < ROOT_TOL:
            raise BirkhoffError("low-order root of unity: B1 undefined by this method")
    coeffs = {key: c for key, c in F.coeffs.items() if key[0] + key[1] <= 3}
    coeffs[(1, 0)] = lam
    g = Series(3, coeffs)
    g, h2 = _remove_degree(g, lam, 2)
    g, h3 = _remove_degree(g, lam, 3)
    conjugacy = series_compose(h2, h3, 3)
    b1 = g[(2, 1)] / lam
    v1 = b1.real
    return StabilityReport(b1, v1, verdict_from_v1(v1, tol), g, conjugacy)


def radial_drift_oracle(F: MapJet, radius: float = 0.01, iterations: int = 5000, starts: int = 32) -> float:
    """Fit ``V_1`` from the mean radial drift of orbits of the truncated map.

    Under ``|z|^2 -> |z|^2 + 2 V_1 |z|^4`` the quantity ``1/|z|^2`` decreases
    by ``2 V_1`` per iteration; the slope of its mean over ``starts``
    equally spaced initial phases is fitted by least squares.
    """
    if radius > 0.05:
        raise ValueError("radius must be <= 0.05")
    lam = F.omega
    for order in (1, 2, 3):
        if abs(lam**order - 1) < ROOT_TOL:
            raise BirkhoffError("low-order root of unity: B1 undefined by this method")
    series = F.series()
    terms = list(series.coeffs.items())
    z = radius * np.exp(2j * math.pi * np.arange(starts) / starts)
    inv_r2 = np.empty(iterations + 1)
    inv_r2[0] = np.mean(1.0 / np.abs(z) ** 2)
    for n in range(1, iterations + 1):
        zb = np.conj(z)
        w = np.zeros_like(z)
        for (j, k), c in terms:
            w += c * z**j * zb**k
        z = w
        r = np.abs(z)
        if np.any(r > 0.5):
            raise PerturbativeRegimeError("left perturbative regime")
        inv_r2[n] = np.mean(1.0 / r**2)
    slope = np.polyfit(np.arange(iterations + 1), inv_r2, 1)[0]
    return -0.5 * slope
