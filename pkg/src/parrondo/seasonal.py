"""Periodically switched (seasonal) planar systems.

A schedule cycles through autonomous fields ``X_1, ..., X_n`` active for
durations ``T_1, ..., T_n``. Integration restarts at every switch so no
step straddles a discontinuity of the right-hand side.

The empirical classifier works with the observable ``1/|z|^2``. If the
period map has the normal form ``|z|^2 -> |z|^2 (1 + 2 V_1 |z|^2)``, then
``1/|z|^2`` decreases by ``2 V_1`` per period, so a linear fit over many
periods gives ``V_1`` directly and the per-period relative growth of
``|z|^2`` at radius ``r`` is ``2 V_1 r^2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _rk
from .birkhoff import birkhoff_b1, verdict_from_v1
from .catalog import X1, X2
from .flow import IntegrationError, flow_at, flow_expand
from .jets import JetError, MapJet, VectorFieldJet, jet_compose

RTOL = 1e-12
ESCAPE_RADIUS = 0.5
START_RADIUS_CAP = 0.1
CLASSIFY_RADIUS_CAP = 0.05
DEFAULT_RADII = (0.01, 0.02, 0.03, 0.04)
DEFAULT_PERIODS = 2000
DEFAULT_PHASES = 16
# a fit stops once any orbit has drifted this far from its start radius
FIT_RADIUS_FACTOR = 2.0
MIN_FIT_PERIODS = 20


@dataclass(frozen=True)
class Season:
    field: VectorFieldJet
    duration: float


@dataclass(frozen=True)
class SeasonSchedule:
    seasons: tuple[Season, ...]

    def __post_init__(self):
        seasons = tuple(
            s if isinstance(s, Season) else Season(*s) for s in self.seasons
        )
        if not seasons:
            raise ValueError("a schedule needs at least one season")
        for i, s in enumerate(seasons):
            if not isinstance(s.field, VectorFieldJet):
                raise ValueError(f"season {i}: field must be a VectorFieldJet")
            if not (math.isfinite(s.duration) and s.duration > 0):
                raise ValueError(f"season {i}: duration must be positive")
        object.__setattr__(self, "seasons", seasons)

    @classmethod
    def of(cls, *pairs) -> "SeasonSchedule":
        """``SeasonSchedule.of((X1, 1.0), (X2, 1.0))``."""
        return cls(tuple(Season(f, float(d)) for f, d in pairs))

    @property
    def period(self) -> float:
        return float(sum(s.duration for s in self.seasons))

    def negated(self) -> "SeasonSchedule":
        return SeasonSchedule(tuple(Season(-s.field, s.duration) for s in self.seasons))

    def segments(self, samples_per_period: int) -> tuple[np.ndarray, np.ndarray]:
        """Split one period at uniform phase points and at every switch.

        Returns per-segment season indices and durations.
        """
        if samples_per_period < 1:
            raise ValueError("samples_per_period must be >= 1")
        T = self.period
        bounds = np.cumsum([0.0] + [s.duration for s in self.seasons])
        bounds[-1] = T
        cuts = sorted(set(bounds.tolist()) | {T * p / samples_per_period for p in range(samples_per_period)})
        # merge cuts closer than rounding noise
        merged = [cuts[0]]
        for c in cuts[1:]:
            if c - merged[-1] > 1e-12 * T:
                merged.append(c)
        if T - merged[-1] <= 1e-12 * T:
            merged[-1] = T
        else:
            merged.append(T)
        idx, dur = [], []
        for a, b in zip(merged[:-1], merged[1:]):
            mid = 0.5 * (a + b)
            idx.append(int(np.searchsorted(bounds, mid, side="right") - 1))
            dur.append(b - a)
        return np.array(idx, dtype=np.int64), np.array(dur)


@dataclass(frozen=True)
class TrajectorySample:
    t: float
    z: complex
    r2: float
    season_index: int


@dataclass(frozen=True)
class Trajectory:
    samples: tuple[TrajectorySample, ...]
    escaped: bool = False

    def __len__(self) -> int:
        return len(self.samples)

    def __iter__(self):
        return iter(self.samples)

    def __getitem__(self, i):
        return self.samples[i]

    @property
    def final(self) -> TrajectorySample:
        return self.samples[-1]


def _atol(z0: np.ndarray) -> float:
    scale = float(np.max(np.abs(z0))) if z0.size else 0.0
    return RTOL * (scale if scale > 0 else 1.0)


def _run(schedule: SeasonSchedule, z0: np.ndarray, seg_field: np.ndarray, seg_dur: np.ndarray):
    fields = [s.field for s in schedule.seasons]
    out, status, last = _rk.run_segments(
        z0, seg_field, seg_dur, fields, rtol=RTOL, atol=_atol(z0), escape=ESCAPE_RADIUS
    )
    bad = np.flatnonzero(status == _rk.STEP_UNDERFLOW)
    if bad.size:
        raise IntegrationError("step size underflow", complex(z0[bad[0]]))
    return out, status, last


def integrate_seasonal(
    schedule: SeasonSchedule, z0: complex, periods: int, samples_per_period: int = 1
) -> Trajectory:
    """Integrate one orbit and sample it at uniform phases and every switch."""
    z0 = complex(z0)
    if abs(z0) > START_RADIUS_CAP:
        raise ValueError(f"|z0| = {abs(z0):g} exceeds {START_RADIUS_CAP}")
    if periods < 1:
        raise ValueError("periods must be >= 1")
    idx, dur = schedule.segments(samples_per_period)
    seg_field = np.tile(idx, periods)
    seg_dur = np.tile(dur, periods)
    out, status, last = _run(schedule, np.array([z0]), seg_field, seg_dur)
    # accumulate times per period from the period length to avoid drift
    t_local = np.cumsum(dur)
    t_local[-1] = schedule.period
    nseg = len(idx)
    samples = [TrajectorySample(0.0, z0, z0.real**2 + z0.imag**2, int(idx[0]))]
    for s in range(int(last[0]) + 1):
        p, q = divmod(s, nseg)
        z = complex(out[0, s])
        t = p * schedule.period + float(t_local[q])
        samples.append(TrajectorySample(t, z, z.real**2 + z.imag**2, int(idx[q])))
    return Trajectory(tuple(samples), escaped=bool(status[0] == _rk.ESCAPED))


def period_map_numeric(schedule: SeasonSchedule, z0: Sequence[complex], periods: int = 1) -> np.ndarray:
    """States after ``periods`` full periods for a batch of initial points."""
    z0 = np.asarray(z0, dtype=np.complex128).ravel()
    if np.any(np.abs(z0) > START_RADIUS_CAP):
        raise ValueError(f"initial points must satisfy |z0| <= {START_RADIUS_CAP}")
    idx, dur = schedule.segments(1)
    out, status, _ = _run(schedule, z0, np.tile(idx, periods), np.tile(dur, periods))
    if np.any(status == _rk.ESCAPED):
        raise IntegrationError("orbit escaped", complex(z0[np.argmax(status)]))
    return out[:, -1]


def period_map_jet(schedule: SeasonSchedule, n: int = 3) -> MapJet:
    """Jet of the period map: the time-``T_j`` maps composed in season order."""
    result = None
    for s in schedule.seasons:
        step = flow_at(flow_expand(s.field, n), s.duration)
        result = step if result is None else jet_compose(step, result, n)
    return result


# --------------------------------------------------------------------------
# Classification
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class RadiusFit:
    radius: float
    v1: float  # nan if the fit window was too short
    rate: float  # per-period relative growth of |z|^2, 2 V_1 r^2
    periods_used: int
    escaped: bool


@dataclass(frozen=True)
class Classification:
    verdict: str  # "LAS" | "Repeller" | "Inconclusive"
    fits: tuple[RadiusFit, ...]
    reason: str = ""

    @property
    def v1(self) -> float:
        """Estimate from the smallest radius (least higher-order bias)."""
        return self.fits[0].v1

    @property
    def rates(self) -> list[float]:
        return [f.rate for f in self.fits]

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "reason": self.reason,
            "fits": [
                {
                    "radius": f.radius,
                    "V1": None if math.isnan(f.v1) else f.v1,
                    "rate": None if math.isnan(f.rate) else f.rate,
                    "periods_used": f.periods_used,
                    "escaped": f.escaped,
                }
                for f in self.fits
            ],
        }


def _fit_radius(schedule: SeasonSchedule, radius: float, periods: int, phases: int) -> RadiusFit:
    z0 = radius * np.exp(2j * math.pi * np.arange(phases) / phases)
    idx, dur = schedule.segments(1)
    nseg = len(idx)
    out, status, last = _run(schedule, z0, np.tile(idx, periods), np.tile(dur, periods))
    ends = out[:, nseg - 1 :: nseg]
    r = np.abs(ends)
    # usable prefix: every orbit alive and within the trusted annulus
    ok = np.all(np.isfinite(r) & (r < FIT_RADIUS_FACTOR * radius) & (r > radius / FIT_RADIUS_FACTOR), axis=0)
    usable = int(np.argmin(ok)) if not ok.all() else periods
    escaped = bool(np.any(status == _rk.ESCAPED))
    if usable < MIN_FIT_PERIODS:
        return RadiusFit(radius, math.nan, math.nan, usable, escaped)
    inv = np.concatenate([[1.0 / radius**2], np.mean(1.0 / r[:, :usable] ** 2, axis=0)])
    slope = np.polyfit(np.arange(usable + 1), inv, 1)[0]
    v1 = -0.5 * slope
    return RadiusFit(radius, float(v1), float(2 * v1 * radius**2), usable, escaped)


def _judge(fits: Sequence[RadiusFit]) -> tuple[str, str]:
    v1s = np.array([f.v1 for f in fits])
    if np.any(np.isnan(v1s)):
        return "Inconclusive", "fit window too short at some radius"
    if np.all(v1s < 0):
        sign = "LAS"
    elif np.all(v1s > 0):
        sign = "Repeller"
    else:
        return "Inconclusive", "fitted drift changes sign across radii"
    rates = np.abs([f.rate for f in fits])
    if np.any(np.diff(rates) <= 0):
        return "Inconclusive", "drift rate does not grow with radius"
    spread = np.max(np.abs(v1s)) / np.min(np.abs(v1s))
    if spread > 2.0:
        return "Inconclusive", f"rate / r^2 varies by a factor {spread:.2f} across radii"
    return sign, ""


def classify_origin(
    schedule: SeasonSchedule,
    radii: Sequence[float] = DEFAULT_RADII,
    periods: int = DEFAULT_PERIODS,
    phases: int = DEFAULT_PHASES,
) -> Classification:
    """Empirical stability of the origin from orbits started on small circles.

    The verdict is LAS (resp. Repeller) only if the fitted ``V_1`` has the
    same sign at every radius and the drift rate scales like ``r^2``.
    """
    radii = sorted(float(r) for r in radii)
    if not radii or radii[0] <= 0 or radii[-1] > CLASSIFY_RADIUS_CAP:
        raise ValueError(f"radii must lie in (0, {CLASSIFY_RADIUS_CAP}]")
    if periods < 1 or phases < 1:
        raise ValueError("periods and phases must be >= 1")
    fits = tuple(_fit_radius(schedule, r, periods, phases) for r in radii)
    verdict, reason = _judge(fits)
    return Classification(verdict, fits, reason)


# --------------------------------------------------------------------------
# Paradox demonstration
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class CaseReport:
    name: str
    schedule: SeasonSchedule = field(repr=False)
    predicted_v1: float
    predicted_verdict: str
    classification: Classification

    @property
    def verdict(self) -> str:
        return self.classification.verdict

    @property
    def agrees(self) -> bool:
        return self.verdict == self.predicted_verdict

    @property
    def max_rate_error(self) -> float:
        """Largest relative deviation of fitted from predicted rate across radii."""
        errs = [abs(f.v1 - self.predicted_v1) / abs(self.predicted_v1) for f in self.classification.fits]
        return float(max(errs)) if errs else math.nan

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "predicted": {"V1": self.predicted_v1, "verdict": self.predicted_verdict},
            "empirical": self.classification.to_dict(),
            "predicted_rates": [2 * self.predicted_v1 * f.radius**2 for f in self.classification.fits],
            "max_rate_error": self.max_rate_error,
            "agrees": self.agrees,
        }


@dataclass(frozen=True)
class ParadoxReport:
    mu: complex
    cases: tuple[CaseReport, ...]
    reversed_cases: tuple[CaseReport, ...]

    @property
    def verdicts(self) -> tuple[str, ...]:
        return tuple(c.verdict for c in self.cases)

    @property
    def reversed_verdicts(self) -> tuple[str, ...]:
        return tuple(c.verdict for c in self.reversed_cases)

    @property
    def agreement(self) -> bool:
        return all(c.agrees for c in self.cases + self.reversed_cases)

    @property
    def paradox(self) -> bool:
        return self.verdicts == ("LAS", "LAS", "Repeller") and self.reversed_verdicts == (
            "Repeller",
            "Repeller",
            "LAS",
        )

    def to_dict(self) -> dict:
        return {
            "mu": {"re": self.mu.real, "im": self.mu.imag},
            "cases": [c.to_dict() for c in self.cases],
            "reversed": [c.to_dict() for c in self.reversed_cases],
            "verdicts": list(self.verdicts),
            "reversed_verdicts": list(self.reversed_verdicts),
            "agreement": self.agreement,
            "paradox": self.paradox,
        }


def predicted_v1(schedule: SeasonSchedule) -> float:
    try:
        return birkhoff_b1(period_map_jet(schedule, 3)).v1
    except JetError:
        return math.nan


def paradox_schedules(mu: complex = 0j) -> list[tuple[str, SeasonSchedule]]:
    x1, x2 = X1(mu), X2()
    return [
        ("X1", SeasonSchedule.of((x1, 1.0))),
        ("X2", SeasonSchedule.of((x2, 1.0))),
        ("X1,X2", SeasonSchedule.of((x1, 1.0), (x2, 1.0))),
    ]


def _case(name: str, schedule: SeasonSchedule, radii, periods, phases) -> CaseReport:
    v1 = predicted_v1(schedule)
    return CaseReport(name, schedule, v1, verdict_from_v1(v1), classify_origin(schedule, radii, periods, phases))


def paradox_demo(
    mu: complex = 0j,
    radii: Sequence[float] = DEFAULT_RADII,
    periods: int = DEFAULT_PERIODS,
    phases: int = DEFAULT_PHASES,
) -> ParadoxReport:
    """Classify each single season, the alternation, and the negated set."""
    mu = complex(mu)
    named = paradox_schedules(mu)
    cases = tuple(_case(n, s, radii, periods, phases) for n, s in named)
    rev = tuple(
        _case(",".join("-" + part for part in n.split(",")), s.negated(), radii, periods, phases)
        for n, s in named
    )
    return ParadoxReport(mu, cases, rev)
