"""Polynomials in free complex parameters and their conjugates.

Used to carry resonant (undetermined) vector-field coefficients through the
level-by-level inversion. A monomial is stored as a tuple of exponents
``(e_0, ebar_0, e_1, ebar_1, ...)`` with trailing zeros stripped, so the
constant monomial is ``()``.
"""

from __future__ import annotations

from typing import Mapping, Sequence

PRUNE_TOL = 1e-15


def _mono_mul(a: tuple, b: tuple) -> tuple:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, e in enumerate(b):
        out[i] += e
    return tuple(out)


def _mono_conj(m: tuple) -> tuple:
    out = list(m)
    if len(out) % 2:
        out.append(0)
    for i in range(0, len(out), 2):
        out[i], out[i + 1] = out[i + 1], out[i]
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


class ParamPoly:
    """Complex polynomial in parameters ``p_i`` and ``conj(p_i)``.

    Supports ``+``, ``-``, ``*`` with other ParamPoly objects and with plain
    numbers, plus ``conjugate()``. ``abs()`` returns the largest coefficient
    magnitude, which is what the compatibility checks need ("vanishes
    identically in the parameters").
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[tuple, complex] | None = None):
        self.terms: dict[tuple, complex] = {}
        for mono, c in (terms or {}).items():
            c = complex(c)
            if abs(c) >= PRUNE_TOL:
                self.terms[mono] = c

    @classmethod
    def symbol(cls, index: int) -> "ParamPoly":
        mono = (0,) * (2 * index) + (1,)
        return cls({mono: 1.0})

    @classmethod
    def constant(cls, value: complex) -> "ParamPoly":
        return cls({(): value})

    @staticmethod
    def _lift(other) -> "ParamPoly":
        if isinstance(other, ParamPoly):
            return other
        return ParamPoly({(): other})

    def __add__(self, other):
        other = self._lift(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0.0) + c
        return ParamPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return ParamPoly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, ParamPoly):
            other = complex(other)
            return ParamPoly({m: c * other for m, c in self.terms.items()})
        out: dict[tuple, complex] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                out[m] = out.get(m, 0.0) + c1 * c2
        return ParamPoly(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = complex(other)
        return ParamPoly({m: c / other for m, c in self.terms.items()})

    def conjugate(self) -> "ParamPoly":
        return ParamPoly({_mono_conj(m): c.conjugate() for m, c in self.terms.items()})

    def __abs__(self) -> float:
        return max((abs(c) for c in self.terms.values()), default=0.0)

    def __repr__(self) -> str:
        return f"ParamPoly({self.terms!r})"

    @property
    def constant_term(self) -> complex:
        return self.terms.get((), 0j)

    def is_constant(self) -> bool:
        return all(m == () for m in self.terms)

    def depends_on(self) -> set[int]:
        """Indices of the parameters appearing with a nonzero coefficient."""
        idx = set()
        for m in self.terms:
            for i, e in enumerate(m):
                if e:
                    idx.add(i // 2)
        return idx

    def evaluate(self, values: Sequence[complex]) -> complex:
        total = 0j
        for m, c in self.terms.items():
            term = c
            for i, e in enumerate(m):
                if e:
                    v = values[i // 2]
                    term *= (v.conjugate() if i % 2 else v) ** e
            total += term
        return total


def evaluate_scalar(x, values: Sequence[complex]) -> complex:
    """Evaluate a plain number or a ParamPoly at the given parameter values."""
    if isinstance(x, ParamPoly):
        return x.evaluate(values)
    return complex(x)
