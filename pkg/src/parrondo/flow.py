"""Exact jets of the time-t flow of a polynomial vector field.

Writing the flow as ``phi(t; z) = e^{i alpha t} z + sum phi_{j,k}(t) z^j zbar^k``
and substituting into ``zdot = X(z, zbar)`` gives, for every monomial, a
linear ODE

    phi_{j,k}' = i alpha phi_{j,k} + a_{j,k} e^{i(j-k) alpha t} + b_{j,k}(t),
    phi_{j,k}(0) = 0,

whose forcing ``b_{j,k}`` only involves lower-degree coefficients. All
solutions are exponential polynomials ``sum_g P_g(t) e^{i g alpha t}`` and are
kept in closed form (:class:`ExpPoly`).

Coefficients inside an ExpPoly are plain complex numbers or
:class:`~parrondo.params.ParamPoly` objects; the latter lets the inverse
solver carry free resonant coefficients symbolically.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .jets import (
    JetError,
    Key,
    MapJet,
    VectorFieldJet,
    is_zero_rotation,
    monomials,
    reduce_rotation,
)

PRUNE_TOL = 1e-15


class IntegrationError(RuntimeError):
    """Adaptive integration could not reach the requested time."""

    def __init__(self, message: str, z0: complex | None = None):
        super().__init__(message if z0 is None else f"{message} (z0={z0!r})")
        self.z0 = z0


def _negligible(c) -> bool:
    return abs(c) < PRUNE_TOL


def _clean_poly(poly: Sequence) -> tuple:
    out = [0j if _negligible(c) else c for c in poly]
    while out and _negligible(out[-1]):
        out.pop()
    return tuple(out)


def _poly_add(p: Sequence, q: Sequence) -> list:
    if len(p) < len(q):
        p, q = q, p
    out = list(p)
    for i, c in enumerate(q):
        out[i] = out[i] + c
    return out


def _poly_mul(p: Sequence, q: Sequence) -> list:
    out = [0j] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] = out[i + j] + a * b
    return out


@dataclass(frozen=True)
class ExpPoly:
    """``t -> sum_g P_g(t) exp(i g alpha t)``.

    ``terms`` maps the integer frequency ``g`` to the coefficients of ``P_g``
    in ascending powers of ``t``. Negligible coefficients (below 1e-15) and
    empty polynomials are pruned on construction.
    """

    alpha: float
    terms: Mapping[int, tuple] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for g, poly in self.terms.items():
            poly = _clean_poly(poly)
            if poly:
                clean[int(g)] = poly
        object.__setattr__(self, "terms", clean)

    @classmethod
    def monomial(cls, alpha: float, g: int, c=1.0, power: int = 0) -> "ExpPoly":
        """``c t^power e^{i g alpha t}``."""
        return cls(alpha, {g: (0j,) * power + (c,)})

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "ExpPoly") -> "ExpPoly":
        out = dict(self.terms)
        for g, poly in other.terms.items():
            out[g] = tuple(_poly_add(out.get(g, ()), poly))
        return ExpPoly(self.alpha, out)

    def __neg__(self) -> "ExpPoly":
        return self.scale(-1.0)

    def __sub__(self, other: "ExpPoly") -> "ExpPoly":
        return self + (-other)

    def scale(self, c) -> "ExpPoly":
        return ExpPoly(self.alpha, {g: tuple(c * x for x in poly) for g, poly in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, ExpPoly):
            return self.scale(other)
        out: dict[int, list] = {}
        for g1, p1 in self.terms.items():
            for g2, p2 in other.terms.items():
                g = g1 + g2
                out[g] = _poly_add(out.get(g, []), _poly_mul(p1, p2))
        return ExpPoly(self.alpha, out)

    def conjugate(self) -> "ExpPoly":
        """Complex conjugate for real ``t``."""
        return ExpPoly(self.alpha, {-g: tuple(c.conjugate() for c in poly) for g, poly in self.terms.items()})

    def shift(self, d: int) -> "ExpPoly":
        """Multiply by ``exp(i d alpha t)``."""
        return ExpPoly(self.alpha, {g + d: poly for g, poly in self.terms.items()})

    def derivative(self) -> "ExpPoly":
        out = {}
        for g, poly in self.terms.items():
            beta = 1j * g * self.alpha
            d = [beta * c for c in poly]
            for m in range(1, len(poly)):
                d[m - 1] = d[m - 1] + m * poly[m]
            out[g] = tuple(d)
        return ExpPoly(self.alpha, out)

    def antiderivative(self) -> "ExpPoly":
        """``t -> integral_0^t self(s) ds`` in closed form."""
        out: dict[int, list] = {}
        for g, poly in self.terms.items():
            if g == 0:
                out[0] = _poly_add(out.get(0, []), [0j] + [c / (m + 1) for m, c in enumerate(poly)])
                continue
            beta = 1j * g * self.alpha
            q = [0j] * len(poly)
            # int t^m e^{bt} dt = e^{bt} sum_r (-1)^r m!/(m-r)! t^{m-r} / b^{r+1}
            for m, c in enumerate(poly):
                fall = 1.0
                for r in range(m + 1):
                    q[m - r] = q[m - r] + c * ((-1) ** r * fall / beta ** (r + 1))
                    fall *= m - r
            out[g] = _poly_add(out.get(g, []), q)
            out[0] = _poly_add(out.get(0, []), [-q[0]])
        return ExpPoly(self.alpha, out)

    def __call__(self, t):
        """Evaluate at real ``t`` (scalar or array); coefficients must be numeric."""
        t = np.asarray(t, dtype=float)
        total = np.zeros(t.shape, dtype=complex)
        for g, poly in self.terms.items():
            p = np.zeros(t.shape, dtype=complex)
            for c in reversed(poly):
                p = p * t + complex(c)
            total = total + p * np.exp(1j * g * self.alpha * t)
        return total[()] if total.ndim == 0 else total

    def integral_01_twisted(self):
        """``integral_0^1 self(s) e^{-i alpha s} ds``; works with symbolic coefficients."""
        anti = self.shift(-1).antiderivative()
        total = 0j
        for g, poly in anti.terms.items():
            w = cmath.exp(1j * g * self.alpha)
            s = 0j
            for c in poly:
                s = s + c
            total = total + s * w
        return total

    def max_abs(self) -> float:
        return max((abs(c) for poly in self.terms.values() for c in poly), default=0.0)


def exppoly_integrate_twisted(b: ExpPoly, a_jk, j: int, k: int) -> ExpPoly:
    """Solve ``phi' = i alpha phi + a_jk e^{i(j-k) alpha t} + b(t)``, ``phi(0) = 0``.

    Variation of constants: ``phi(t) = e^{i alpha t} int_0^t e^{-i alpha s} g(s) ds``.
    A vanishing twisted frequency raises the polynomial degree in ``t``,
    reproducing the ``a t e^{i alpha t}`` solution for ``j = k + 1``.
    """
    forcing = b + ExpPoly.monomial(b.alpha, j - k, a_jk)
    return forcing.shift(-1).antiderivative().shift(1)


@dataclass(frozen=True)
class FlowJet:
    """Coefficients ``phi_{j,k}(t)`` of the flow for ``2 <= j + k <= degree``."""

    alpha: float
    degree: int
    coeffs: Mapping[Key, ExpPoly] = field(default_factory=dict)

    def __getitem__(self, key: Key) -> ExpPoly:
        return self.coeffs.get(key, ExpPoly(self.alpha))


# --------------------------------------------------------------------------
# Level-by-level construction
# --------------------------------------------------------------------------

TimeJet = dict  # Key -> ExpPoly, linear entry (1, 0) included


def _tj_mul(a: TimeJet, b: TimeJet, n: int) -> TimeJet:
    out: TimeJet = {}
    for (j1, k1), p1 in a.items():
        d1 = j1 + k1
        for (j2, k2), p2 in b.items():
            if d1 + j2 + k2 > n:
                continue
            key = (j1 + j2, k1 + k2)
            prod = p1 * p2
            out[key] = out[key] + prod if key in out else prod
    return out


def _tj_conj(a: TimeJet) -> TimeJet:
    return {(k, j): p.conjugate() for (j, k), p in a.items()}


def level_forcing(alpha: float, phi: TimeJet, a: Mapping[Key, object], level: int) -> dict[Key, ExpPoly]:
    """Forcing terms ``b_{j,k}(t)`` for every monomial of total degree ``level``.

    ``phi`` must hold the flow coefficients of degree ``< level`` (and the
    linear entry). ``b_{j,k}`` is the ``(j,k)`` coefficient of
    ``sum a_{l,m} phi^l conj(phi)^m`` over ``2 <= l+m < level``.
    """
    truncated = {key: p for key, p in phi.items() if key[0] + key[1] < level}
    phibar = _tj_conj(truncated)
    one = {(0, 0): ExpPoly.monomial(alpha, 0, 1.0)}
    max_pow = level - 1
    pows = [one]
    pows_bar = [one]
    for _ in range(max_pow):
        pows.append(_tj_mul(pows[-1], truncated, level))
        pows_bar.append(_tj_mul(pows_bar[-1], phibar, level))
    b = {key: ExpPoly(alpha) for key in monomials(level, level)}
    for (l, m), coef in a.items():
        if not 2 <= l + m < level:
            continue
        if _negligible(coef):
            continue
        for (j1, k1), p1 in pows[l].items():
            for (j2, k2), p2 in pows_bar[m].items():
                if j1 + k1 + j2 + k2 != level:
                    continue
                key = (j1 + j2, k1 + k2)
                b[key] = b[key] + (p1 * p2).scale(coef)
    return b


def expand_time_jet(alpha: float, a: Mapping[Key, object], n: int) -> TimeJet:
    """Flow coefficients through degree ``n``, linear entry ``(1, 0)`` included."""
    phi: TimeJet = {(1, 0): ExpPoly.monomial(alpha, 1, 1.0)}
    for level in range(2, n + 1):
        forcing = level_forcing(alpha, phi, a, level)
        for (j, k), b in forcing.items():
            phi[(j, k)] = exppoly_integrate_twisted(b, a.get((j, k), 0j), j, k)
    return phi


def flow_expand(X: VectorFieldJet, n: int) -> FlowJet:
    """Closed-form flow jet of ``X`` through total degree ``n``."""
    if n < 2:
        raise JetError("flow_expand needs n >= 2")
    a = {key: c for key, c in X.coeffs.items() if key[0] + key[1] <= n}
    phi = expand_time_jet(X.alpha, a, n)
    return FlowJet(X.alpha, n, {key: p for key, p in phi.items() if key != (1, 0)})


def flow_at(fj: FlowJet, t: float) -> MapJet:
    """Time-``t`` map of a flow jet."""
    rotation = reduce_rotation(fj.alpha * t)
    if is_zero_rotation(rotation):
        raise JetError("non-elliptic time slice")
    return MapJet(rotation, fj.degree, {key: complex(p(t)) for key, p in fj.coeffs.items()})


# --------------------------------------------------------------------------
# Numerical oracle
# --------------------------------------------------------------------------

def field_rhs(X: VectorFieldJet):
    """Right-hand side of ``zdot = X(z, zbar)`` on R^2 for scipy."""
    terms = [(1, 0, X.linear)] + [(j, k, c) for (j, k), c in X.coeffs.items()]

    def rhs(_t, y):
        z = complex(y[0], y[1])
        zb = z.conjugate()
        w = 0j
        for j, k, c in terms:
            w += c * z**j * zb**k
        return [w.real, w.imag]

    return rhs


def flow_numeric_oracle(
    X: VectorFieldJet,
    t: float,
    samples: Sequence[complex],
    *,
    rtol: float = 1e-12,
    atol: float = 1e-12,
    relative_atol: bool = True,
) -> list[complex]:
    """Integrate ``zdot = X`` from each sample to time ``t`` with scipy's DOP853.

    With ``relative_atol`` the absolute tolerance is multiplied by ``|z0|`` so
    that tiny initial conditions are resolved to the same relative accuracy.
    """
    rhs = field_rhs(X)
    out = []
    for z0 in samples:
        z0 = complex(z0)
        if abs(z0) > 0.1 + 1e-15:
            raise ValueError(f"sample {z0!r} outside |z| <= 0.1")
        if z0 == 0:
            out.append(0j)
            continue
        tol = atol * abs(z0) if relative_atol else atol
        sol = solve_ivp(rhs, (0.0, t), [z0.real, z0.imag], method="DOP853", rtol=rtol, atol=tol)
        if not sol.success:
            raise IntegrationError("integration failure", z0)
        out.append(complex(sol.y[0, -1], sol.y[1, -1]))
    return out
