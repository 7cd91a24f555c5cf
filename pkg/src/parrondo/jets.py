"""Truncated power series in ``(z, conj(z))`` for planar maps and vector fields.

A series is a sparse mapping ``(j, k) -> c`` standing for ``sum c z**j zbar**k``.
:class:`MapJet` and :class:`VectorFieldJet` keep their linear part implicit
(``e^{i alpha} z`` and ``i alpha z``) and only store the nonlinear
coefficients of total degree ``2..degree``.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Union

import numpy as np

TWO_PI = 2.0 * math.pi
EQ_TOL = 1e-12
ROTATION_TOL = 1e-12

Key = tuple[int, int]


class JetError(ValueError):
    """Invalid jet data or an operation that cannot produce a valid jet."""


def _degree(key: Key) -> int:
    return key[0] + key[1]


def sorted_keys(keys: Iterable[Key]) -> list[Key]:
    """Graded order: by total degree, then by ``j`` descending."""
    return sorted(keys, key=lambda jk: (jk[0] + jk[1], -jk[0]))


def monomials(degree: int, low: int = 2) -> list[Key]:
    return [(j, d - j) for d in range(low, degree + 1) for j in range(d, -1, -1)]


# --------------------------------------------------------------------------
# General truncated series (linear terms stored explicitly)
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Series:
    """Truncated series ``sum c_{j,k} z^j zbar^k`` with ``j + k <= degree``."""

    degree: int
    coeffs: Mapping[Key, complex] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for (j, k), c in self.coeffs.items():
            if j < 0 or k < 0:
                raise JetError(f"negative exponent in key {(j, k)}")
            if j + k <= self.degree and c != 0:
                clean[(j, k)] = complex(c)
        object.__setattr__(self, "coeffs", clean)

    def __getitem__(self, key: Key) -> complex:
        return self.coeffs.get(key, 0j)

    def __add__(self, other: "Series") -> "Series":
        n = min(self.degree, other.degree)
        out = dict(self.coeffs)
        for key, c in other.coeffs.items():
            out[key] = out.get(key, 0j) + c
        return Series(n, out)

    def __sub__(self, other: "Series") -> "Series":
        return self + other.scale(-1.0)

    def scale(self, c: complex) -> "Series":
        return Series(self.degree, {key: c * v for key, v in self.coeffs.items()})

    def truncate(self, n: int) -> "Series":
        return Series(min(n, self.degree), self.coeffs)

    def conjugate(self) -> "Series":
        return Series(self.degree, {(k, j): c.conjugate() for (j, k), c in self.coeffs.items()})

    def homogeneous(self, d: int) -> "Series":
        return Series(self.degree, {key: c for key, c in self.coeffs.items() if _degree(key) == d})

    def evaluate(self, z):
        """Evaluate at a complex scalar or a numpy array of points."""
        z = np.asarray(z, dtype=complex)
        zb = np.conj(z)
        total = np.zeros_like(z)
        for (j, k), c in self.coeffs.items():
            total = total + c * z**j * zb**k
        return total[()] if total.ndim == 0 else total

    def almost_equal(self, other: "Series", tol: float = EQ_TOL) -> bool:
        keys = set(self.coeffs) | set(other.coeffs)
        return all(abs(self[key] - other[key]) <= tol for key in keys)


def series_mul(a: Series, b: Series, n: int) -> Series:
    """Cauchy product truncated at total degree ``n``."""
    out: dict[Key, complex] = {}
    for (j1, k1), c1 in a.coeffs.items():
        d1 = j1 + k1
        for (j2, k2), c2 in b.coeffs.items():
            if d1 + j2 + k2 > n:
                continue
            key = (j1 + j2, k1 + k2)
            out[key] = out.get(key, 0j) + c1 * c2
    return Series(n, out)


def series_pow(a: Series, e: int, n: int) -> Series:
    result = Series(n, {(0, 0): 1.0})
    for _ in range(e):
        result = series_mul(result, a, n)
    return result


def series_compose(outer: Series, inner: Series, n: int) -> Series:
    """Series of ``outer(inner, conj(inner))`` truncated at degree ``n``.

    ``inner`` must have no constant term.
    """
    if inner[(0, 0)] != 0:
        raise JetError("inner series must vanish at the origin")
    inner = inner.truncate(n)
    inner_bar = inner.conjugate()
    pows: dict[int, Series] = {0: Series(n, {(0, 0): 1.0})}
    pows_bar: dict[int, Series] = {0: Series(n, {(0, 0): 1.0})}
    for j in range(1, n + 1):
        pows[j] = series_mul(pows[j - 1], inner, n)
        pows_bar[j] = series_mul(pows_bar[j - 1], inner_bar, n)
    out = Series(n, {})
    for (j, k), c in outer.coeffs.items():
        if j + k > n:
            continue
        out = out + series_mul(pows[j], pows_bar[k], n).scale(c)
    return out


def near_identity_inverse(h: Series, n: int) -> Series:
    """Inverse of ``h(w) = w + N(w)`` with ``N = O(|w|^2)``, to degree ``n``."""
    if abs(h[(1, 0)] - 1) > EQ_TOL or abs(h[(0, 1)]) > EQ_TOL or h[(0, 0)] != 0:
        raise JetError("series is not a near-identity change of variables")
    identity = Series(n, {(1, 0): 1.0})
    nonlinear = h - identity
    g = identity
    # each pass fixes one more degree
    for _ in range(n):
        g = identity - series_compose(nonlinear, g, n)
    return g


# --------------------------------------------------------------------------
# Map and vector-field jets
# --------------------------------------------------------------------------

def _check_alpha(alpha: float, *, allow_negative: bool = False) -> float:
    alpha = float(alpha)
    if not math.isfinite(alpha):
        raise JetError("alpha must be finite")
    lo = -TWO_PI if allow_negative else 0.0
    if not (lo < alpha < TWO_PI) or alpha == 0.0:
        raise JetError(f"alpha={alpha!r} outside the allowed rotation range")
    return alpha


def _check_coeffs(coeffs: Mapping[Key, complex], degree: int) -> dict[Key, complex]:
    if degree < 1:
        raise JetError("degree must be >= 1")
    out = {}
    for key, c in coeffs.items():
        j, k = key
        if j < 0 or k < 0 or not 2 <= j + k <= degree:
            raise JetError(f"coefficient {key} outside degrees [2, {degree}]")
        c = complex(c)
        if not (math.isfinite(c.real) and math.isfinite(c.imag)):
            raise JetError(f"non-finite coefficient at {key}")
        out[(int(j), int(k))] = c
    return out


class _Jet:
    alpha: float
    degree: int
    coeffs: Mapping[Key, complex]
    kind: str

    def __getitem__(self, key: Key) -> complex:
        return self.coeffs.get(key, 0j)

    @property
    def linear(self) -> complex:
        raise NotImplementedError

    def series(self) -> Series:
        out = dict(self.coeffs)
        out[(1, 0)] = self.linear
        return Series(self.degree, out)

    def nonlinear(self) -> Series:
        return Series(self.degree, self.coeffs)

    def almost_equal(self, other: "_Jet", tol: float = EQ_TOL) -> bool:
        if type(self) is not type(other) or abs(self.alpha - other.alpha) > tol:
            return False
        return self.nonlinear().almost_equal(other.nonlinear(), tol)

    def max_abs_diff(self, other: "_Jet") -> float:
        keys = set(self.coeffs) | set(other.coeffs)
        return max((abs(self[key] - other[key]) for key in keys), default=0.0)

    def with_coeffs(self, coeffs: Mapping[Key, complex], degree: int | None = None):
        return type(self)(self.alpha, self.degree if degree is None else degree, coeffs)

    def truncate(self, n: int):
        return type(self)(self.alpha, n, {key: c for key, c in self.coeffs.items() if _degree(key) <= n})


@dataclass(frozen=True)
class MapJet(_Jet):
    """``F(z) = e^{i alpha} z + sum f_{j,k} z^j zbar^k``, ``alpha`` in (0, 2 pi)."""

    alpha: float
    degree: int
    coeffs: Mapping[Key, complex] = field(default_factory=dict)
    kind = "map"

    def __post_init__(self):
        object.__setattr__(self, "alpha", _check_alpha(self.alpha))
        object.__setattr__(self, "coeffs", _check_coeffs(self.coeffs, self.degree))

    @property
    def linear(self) -> complex:
        return cmath.exp(1j * self.alpha)

    omega = linear


@dataclass(frozen=True)
class VectorFieldJet(_Jet):
    """``X(z) = i alpha z + sum a_{j,k} z^j zbar^k``.

    ``alpha`` may be negative (down to ``-2 pi``) so that time-reversed
    fields ``-X`` are representable.
    """

    alpha: float
    degree: int
    coeffs: Mapping[Key, complex] = field(default_factory=dict)
    kind = "field"

    def __post_init__(self):
        object.__setattr__(self, "alpha", _check_alpha(self.alpha, allow_negative=True))
        object.__setattr__(self, "coeffs", _check_coeffs(self.coeffs, self.degree))

    @property
    def linear(self) -> complex:
        return 1j * self.alpha

    def __neg__(self) -> "VectorFieldJet":
        return VectorFieldJet(-self.alpha, self.degree, {key: -c for key, c in self.coeffs.items()})


Jet = Union[MapJet, VectorFieldJet]


def reduce_rotation(angle: float) -> float:
    """Reduce ``angle`` modulo 2 pi into [0, 2 pi)."""
    r = math.fmod(angle, TWO_PI)
    if r < 0:
        r += TWO_PI
    return r


def is_zero_rotation(angle: float, tol: float = ROTATION_TOL) -> bool:
    r = reduce_rotation(angle)
    return r < tol or TWO_PI - r < tol


# --------------------------------------------------------------------------
# Operations
# --------------------------------------------------------------------------

def jet_add(a: Jet, b: Jet, n: int) -> Jet:
    """Coefficientwise sum of two jets of the same kind, truncated at ``n``."""
    if type(a) is not type(b):
        raise JetError("cannot add a map jet to a field jet")
    if a.alpha != b.alpha:
        raise JetError("incompatible rotation")
    out = dict(a.coeffs)
    for key, c in b.coeffs.items():
        out[key] = out.get(key, 0j) + c
    return type(a)(a.alpha, n, {key: c for key, c in out.items() if _degree(key) <= n})


def _as_series(x) -> tuple[Series, float | None]:
    if isinstance(x, Series):
        return x, None
    return x.series(), x.alpha


def jet_mul(a, b, n: int) -> Series:
    """Truncated product of two series (jets are expanded with their linear part)."""
    sa, alpha_a = _as_series(a)
    sb, alpha_b = _as_series(b)
    if alpha_a is not None and alpha_b is not None and alpha_a != alpha_b:
        raise JetError("incompatible rotation")
    return series_mul(sa, sb, n)


def jet_conjugate(a, n: int) -> Series:
    """Series of ``conj(a(z))``; its linear part is ``conj(lambda) zbar``."""
    sa, _ = _as_series(a)
    return sa.conjugate().truncate(n)


def jet_compose(outer: MapJet, inner: MapJet, n: int) -> MapJet:
    """Jet of ``outer o inner`` truncated at degree ``n``."""
    rotation = reduce_rotation(outer.alpha + inner.alpha)
    if is_zero_rotation(rotation):
        raise JetError("composition not elliptic in required form")
    s = series_compose(outer.series(), inner.series(), n)
    coeffs = {key: c for key, c in s.coeffs.items() if _degree(key) >= 2}
    return MapJet(rotation, n, coeffs)


def jet_eval(a, z):
    """Evaluate a jet (or bare series) at ``z``; accepts numpy arrays."""
    sa, _ = _as_series(a)
    return sa.evaluate(z)


# --------------------------------------------------------------------------
# JSON
# --------------------------------------------------------------------------

_TOP_KEYS = {"kind", "alpha", "degree", "coeffs"}
_COEFF_KEYS = {"j", "k", "re", "im"}


def jet_to_dict(jet: Jet) -> dict:
    return {
        "kind": jet.kind,
        "alpha": jet.alpha,
        "degree": jet.degree,
        "coeffs": [
            # adding 0.0 turns -0.0 into 0.0
            {"j": j, "k": k, "re": jet.coeffs[(j, k)].real + 0.0, "im": jet.coeffs[(j, k)].imag + 0.0}
            for (j, k) in sorted_keys(jet.coeffs)
        ],
    }


def _number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise JetError(f"{where}: expected a number, got {value!r}")
    return float(value)


def _integer(value, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise JetError(f"{where}: expected an integer, got {value!r}")
    return value


def jet_from_dict(data: dict, *, alpha: float | None = None, where: str = "jet") -> Jet:
    """Parse the JSON jet format; ``alpha`` overrides the stored rotation."""
    if not isinstance(data, dict):
        raise JetError(f"{where}: expected an object")
    unknown = set(data) - _TOP_KEYS
    if unknown:
        raise JetError(f"{where}: unknown keys {sorted(unknown)}")
    missing = _TOP_KEYS - set(data)
    if missing:
        raise JetError(f"{where}: missing keys {sorted(missing)}")
    kind = data["kind"]
    if kind not in ("map", "field"):
        raise JetError(f"{where}.kind: expected 'map' or 'field', got {kind!r}")
    degree = _integer(data["degree"], f"{where}.degree")
    rot = _number(data["alpha"], f"{where}.alpha") if alpha is None else alpha
    if not isinstance(data["coeffs"], list):
        raise JetError(f"{where}.coeffs: expected a list")
    coeffs: dict[Key, complex] = {}
    for i, entry in enumerate(data["coeffs"]):
        here = f"{where}.coeffs[{i}]"
        if not isinstance(entry, dict):
            raise JetError(f"{here}: expected an object")
        if set(entry) != _COEFF_KEYS:
            raise JetError(f"{here}: expected keys {sorted(_COEFF_KEYS)}, got {sorted(entry)}")
        j = _integer(entry["j"], f"{here}.j")
        k = _integer(entry["k"], f"{here}.k")
        if j < 0 or k < 0 or not 2 <= j + k <= degree:
            raise JetError(f"{here}: j+k={j + k} outside [2, {degree}]")
        if (j, k) in coeffs:
            raise JetError(f"{here}: duplicate coefficient ({j}, {k})")
        coeffs[(j, k)] = complex(_number(entry["re"], f"{here}.re"), _number(entry["im"], f"{here}.im"))
    cls = MapJet if kind == "map" else VectorFieldJet
    try:
        return cls(rot, degree, coeffs)
    except JetError as exc:
        raise JetError(f"{where}: {exc}") from None


def dumps_jet(jet: Jet) -> str:
    return json.dumps(jet_to_dict(jet), indent=2)


def loads_jet(text: str, *, alpha: float | None = None) -> Jet:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise JetError(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return jet_from_dict(data, alpha=alpha)
