"""Command-line front end.

Every command reads JSON (a path or ``-`` for stdin) and writes JSON or CSV
to ``-o`` or stdout. Exit status is 0 on success (an obstructed inversion
counts as success), 1 on a mathematical or numerical failure and 2 on bad
usage or malformed input. Errors go to stderr as a JSON object.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from fractions import Fraction
from pathlib import Path
from typing import Callable

import mpmath
import numpy as np

from . import catalog
from .birkhoff import BirkhoffError, PerturbativeRegimeError, birkhoff_b1, radial_drift_oracle
from .flow import IntegrationError, flow_at, flow_expand, flow_numeric_oracle
from .inverse import (
    Family,
    Obstructed,
    Unique,
    UsageError,
    check_pure_rotation_claim,
    closed_form_quadratic,
    invert_map,
    obstruction_family_demo,
    resonance_table,
)
from .jets import JetError, MapJet, VectorFieldJet, jet_compose, jet_eval, jet_from_dict, jet_to_dict, loads_jet
from .seasonal import SeasonSchedule, Season, integrate_seasonal, paradox_demo

DEFAULT_SEED = 42


class InputError(ValueError):
    """Malformed input file or flag value (exit status 2)."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        _emit_error("usage", message)
        sys.exit(2)


def _emit_error(kind: str, message: str) -> None:
    sys.stderr.write(json.dumps({"error": kind, "message": message}) + "\n")


# --------------------------------------------------------------------------
# Flag parsing helpers
# --------------------------------------------------------------------------

def alpha_from_pi_fraction(text: str) -> float:
    """``"p/q"`` -> the double nearest to ``p pi / q``."""
    try:
        frac = Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise InputError(f"--alpha-pi: expected p/q, got {text!r}") from None
    with mpmath.workprec(256):
        return float(mpmath.mpf(frac.numerator) * mpmath.pi / frac.denominator)


def parse_complex(text: str, flag: str) -> complex:
    parts = text.split(",")
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise InputError(f"{flag}: expected re,im, got {text!r}")


def parse_free(text: str) -> tuple[tuple[int, int], complex]:
    """``"j,k=re,im"``."""
    try:
        slot, value = text.split("=")
        j, k = (int(x) for x in slot.split(","))
    except ValueError:
        raise InputError(f"--free: expected j,k=re,im, got {text!r}") from None
    return (j, k), parse_complex(value, "--free")


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _read_jet(args, kind: str):
    alpha = alpha_from_pi_fraction(args.alpha_pi) if args.alpha_pi else None
    try:
        jet = loads_jet(_read_text(args.input), alpha=alpha)
    except JetError as exc:
        raise InputError(str(exc)) from None
    if jet.kind != kind:
        raise InputError(f"expected a {kind} jet, got a {jet.kind} jet")
    return jet


def _read_schedule(args) -> SeasonSchedule:
    alpha = alpha_from_pi_fraction(args.alpha_pi) if args.alpha_pi else None
    text = _read_text(args.input)
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict) or set(data) != {"seasons"} or not isinstance(data["seasons"], list):
        raise InputError('schedule: expected {"seasons": [...]}')
    seasons = []
    for i, entry in enumerate(data["seasons"]):
        where = f"seasons[{i}]"
        if not isinstance(entry, dict) or set(entry) != {"field", "duration"}:
            raise InputError(f"{where}: expected keys ['duration', 'field']")
        try:
            X = jet_from_dict(entry["field"], alpha=alpha, where=f"{where}.field")
        except JetError as exc:
            raise InputError(str(exc)) from None
        if not isinstance(X, VectorFieldJet):
            raise InputError(f"{where}.field: expected a field jet")
        d = entry["duration"]
        if isinstance(d, bool) or not isinstance(d, (int, float)):
            raise InputError(f"{where}.duration: expected a number")
        seasons.append(Season(X, float(d)))
    try:
        return SeasonSchedule(tuple(seasons))
    except ValueError as exc:
        raise InputError(f"schedule: {exc}") from None


def _write(args, text: str) -> None:
    if args.output in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(args.output).write_text(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _cplx(z: complex) -> dict:
    return {"re": z.real, "im": z.imag}


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


# --------------------------------------------------------------------------
# Commands
# --------------------------------------------------------------------------

def cmd_invert(args) -> int:
    F = _read_jet(args, "map")
    free = dict(parse_free(s) for s in args.free or [])
    outcome = invert_map(F, free)
    if isinstance(outcome, Obstructed):
        result = {"status": "obstructed", "at": list(outcome.at), "defect": _cplx(outcome.defect)}
    elif isinstance(outcome, Family):
        result = jet_to_dict(outcome.base)
    else:
        result = jet_to_dict(outcome.field)
    if args.report == "resonances":
        table = resonance_table(F.alpha, F.degree)
        result = {
            "result": result,
            "resonances": [[j, k] for j, k in table.resonant_slots],
            "free": [list(s) for s in getattr(outcome, "free", ())],
        }
    _write(args, _dump(result))
    return 0


def cmd_flow(args) -> int:
    X = _read_jet(args, "field")
    order = args.order or X.degree
    if order < 2:
        raise InputError("--order must be >= 2")
    M = flow_at(flow_expand(X, order), args.time)
    _write(args, _dump(jet_to_dict(M)))
    if args.oracle:
        n = args.oracle_samples
        z0 = args.oracle_radius * np.exp(2j * math.pi * (np.arange(n) + 0.5) / n)
        jet = jet_eval(M, z0)
        ode = flow_numeric_oracle(X, args.time, z0)
        rows = [
            (z.real, z.imag, a.real, a.imag, b.real, b.imag, abs(a - b))
            for z, a, b in zip(z0, jet, ode)
        ]
        header = ("z0_re", "z0_im", "jet_re", "jet_im", "ode_re", "ode_im", "abs_err")
        Path(args.oracle).write_text(_csv_text(header, rows))
    return 0


def cmd_birkhoff(args) -> int:
    F = _read_jet(args, "map")
    rep = birkhoff_b1(F)
    result = {"B1": _cplx(rep.b1), "V1": rep.v1, "verdict": rep.verdict}
    if args.oracle:
        try:
            radius_text, iters_text = args.oracle.split(",")
            radius, iters = float(radius_text), int(iters_text)
        except ValueError:
            raise InputError(f"--oracle: expected radius,iters, got {args.oracle!r}") from None
        result["oracle"] = {"radius": radius, "iterations": iters, "V1_fit": radial_drift_oracle(F, radius, iters)}
    _write(args, _dump(result))
    return 0


def _trajectory_rows(traj):
    return [(s.t, s.z.real, s.z.imag, s.r2, s.season_index) for s in traj]


TRAJECTORY_HEADER = ("t", "z_re", "z_im", "r2", "season")


def cmd_simulate(args) -> int:
    schedule = _read_schedule(args)
    z0 = parse_complex(args.z0, "--z0")
    traj = integrate_seasonal(schedule, z0, args.periods, args.samples_per_period)
    _write(args, _csv_text(TRAJECTORY_HEADER, _trajectory_rows(traj)))
    if traj.escaped:
        _emit_error("escaped", f"orbit left |z| <= 0.5 at t={traj.final.t}")
    return 0


def cmd_paradox(args) -> int:
    mu = parse_complex(args.mu, "--mu")
    report = paradox_demo(mu, periods=args.periods)
    data = report.to_dict()
    if args.csv_dir:
        out = Path(args.csv_dir)
        out.mkdir(parents=True, exist_ok=True)
        files = {}
        for case in report.cases + report.reversed_cases:
            traj = integrate_seasonal(case.schedule, args.csv_radius, args.periods, args.samples_per_period)
            name = case.name.replace(",", "_").replace("-", "neg") + ".csv"
            (out / name).write_text(_csv_text(TRAJECTORY_HEADER, _trajectory_rows(traj)))
            files[case.name] = name
        data["trajectories"] = files
    _write(args, _dump(data))
    return 0


# --------------------------------------------------------------------------
# Reproduction targets
# --------------------------------------------------------------------------

def _rows_table(rows: list[tuple[str, float, bool]]) -> tuple[str, bool]:
    lines = [f"{'check':<44} {'value':>14}  ok"]
    for name, value, ok in rows:
        lines.append(f"{name:<44} {value:>14.3e}  {'yes' if ok else 'NO'}")
    passed = all(ok for _, _, ok in rows)
    lines.append("PASS" if passed else "FAIL")
    return "\n".join(lines) + "\n", passed


def repro_quadratic(rng):
    rows = []
    for i in range(5):
        F = catalog.random_map_jet(rng, 2, catalog.sample_alpha(rng, (1, 3), 1e-3))
        closed = closed_form_quadratic(F).field
        generic = invert_map(F).field
        d = closed.max_abs_diff(generic)
        rows.append((f"map {i}: closed form vs solver", d, d < 1e-12))
    return rows


def repro_cubic_a30(rng):
    rows = []
    for i in range(5):
        F = catalog.random_map_jet(rng, 3)
        d = abs(catalog.cubic_a30_generic(F.alpha, F.coeffs) - invert_map(F).field[(3, 0)])
        rows.append((f"map {i}: a30 formula vs solver", d, d < 1e-10))
    return rows


def repro_quarter_turn(rng):
    rows = []
    for i in range(5):
        coeffs = catalog.random_coeffs(rng, 3)
        coeffs[(0, 3)] = catalog.quarter_turn_compatible_f03(coeffs)
        F = MapJet(math.pi / 2, 3, coeffs)
        mu = complex(*rng.uniform(-1, 1, 2))
        fam = invert_map(F)
        ref = VectorFieldJet(F.alpha, 3, catalog.quarter_turn_family(coeffs, mu))
        ok_shape = isinstance(fam, Family) and fam.free == ((0, 3),)
        d = fam.at({(0, 3): mu}).max_abs_diff(ref) if ok_shape else math.inf
        rows.append((f"map {i}: family vs formulas", d, ok_shape and d < 1e-10))
    return rows


def repro_maps(rng):
    b1 = birkhoff_b1(catalog.F1()).b1
    b2 = birkhoff_b1(catalog.F2()).b1
    v12 = birkhoff_b1(jet_compose(catalog.F2(), catalog.F1(), 3)).v1
    rows = [
        ("B1(F1) vs -1/2 - 11/2 i", abs(b1 - catalog.B1_F1), abs(b1 - catalog.B1_F1) < 1e-10),
        ("B1(F2) vs -1/2 + sqrt3/2 i", abs(b2 - catalog.B1_F2), abs(b2 - catalog.B1_F2) < 1e-10),
        ("V1(F2 o F1) vs (3 sqrt3 - 5)/2", abs(v12 - catalog.V1_F2_F1), abs(v12 - catalog.V1_F2_F1) < 1e-10),
    ]
    return rows


def repro_fields(rng):
    rows = []
    for mu in (0j, 1 + 2j):
        X = invert_map(catalog.F1(), {(0, 3): mu})
        d = X.base.max_abs_diff(catalog.X1(mu))
        rows.append((f"invert F1 vs X1(mu={mu.real:g}{mu.imag:+g}i)", d, isinstance(X, Family) and d < 1e-10))
    X = invert_map(catalog.F2())
    d = X.field.max_abs_diff(catalog.X2()) if isinstance(X, Unique) else math.inf
    rows.append(("invert F2 vs X2", d, d < 1e-12))
    for name, field, target in (("X1", catalog.X1(), catalog.F1()), ("X2", catalog.X2(), catalog.F2())):
        d = flow_at(flow_expand(field, 3), 1.0).max_abs_diff(target)
        rows.append((f"time-1 jet of {name} vs map", d, d < 1e-12))
    return rows


def repro_paradox(rng):
    report = paradox_demo()
    rows = []
    for case in report.cases + report.reversed_cases:
        rows.append((f"{case.name}: {case.verdict} (predicted {case.predicted_verdict})", case.max_rate_error, case.agrees))
    rows.append(("paradox verdict pattern", 0.0, report.paradox))
    return rows


def repro_obstructions(rng):
    rows = []
    for n in range(2, 7):
        out = obstruction_family_demo(n)
        ok = isinstance(out, Obstructed) and out.at == (0, n)
        rows.append((f"n={n}: obstructed at (0,{n})", abs(out.defect) if ok else math.nan, ok))
        for m in range(2, n):
            v = check_pure_rotation_claim(2 * math.pi / (n + 1), n, m)
            rows.append((f"n={n}, m={m}: rotation forces linear field", v.max_coefficient, v.passed))
    return rows


REPRO_TARGETS: dict[str, Callable] = {
    "quadratic": repro_quadratic,
    "cubic-a30": repro_cubic_a30,
    "quarter-turn": repro_quarter_turn,
    "maps": repro_maps,
    "fields": repro_fields,
    "paradox": repro_paradox,
    "obstructions": repro_obstructions,
}


def cmd_repro(args) -> int:
    rng = np.random.default_rng(args.seed)
    text, passed = _rows_table(REPRO_TARGETS[args.target](rng))
    _write(args, text)
    return 0 if passed else 1


# --------------------------------------------------------------------------
# Entry point
# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="parrondo", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, reads_jet=True):
        sp.add_argument("input", nargs="?", default="-", help="input JSON path or - for stdin")
        sp.add_argument("-o", "--output", help="output path (default stdout)")
        sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
        if reads_jet:
            sp.add_argument("--alpha-pi", metavar="P/Q", help="override alpha with P*pi/Q")

    sp = sub.add_parser("invert", help="vector field whose time-1 flow matches a map jet")
    common(sp)
    sp.add_argument("--free", action="append", metavar="J,K=RE,IM", help="value of a free resonant coefficient")
    sp.add_argument("--report", choices=["resonances"])
    sp.set_defaults(func=cmd_invert)

    sp = sub.add_parser("flow", help="jet of the time-t flow of a field")
    common(sp)
    sp.add_argument("--time", type=float, default=1.0)
    sp.add_argument("--order", type=int, default=None)
    sp.add_argument("--oracle", metavar="CSV", help="also compare with numeric integration, writing CSV here")
    sp.add_argument("--oracle-radius", type=float, default=1e-3)
    sp.add_argument("--oracle-samples", type=int, default=16)
    sp.set_defaults(func=cmd_flow)

    sp = sub.add_parser("birkhoff", help="first Birkhoff constant of a map jet")
    common(sp)
    sp.add_argument("--oracle", metavar="RADIUS,ITERS", help="append a fitted radial drift")
    sp.set_defaults(func=cmd_birkhoff)

    sp = sub.add_parser("simulate", help="integrate a seasonal schedule")
    common(sp)
    sp.add_argument("--z0", default="0.05,0")
    sp.add_argument("--periods", type=int, default=10)
    sp.add_argument("--samples-per-period", type=int, default=8)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("paradox-demo", help="classify X1, X2, their alternation and the negated set")
    sp.add_argument("-o", "--output")
    sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sp.add_argument("--mu", default="0,0")
    sp.add_argument("--periods", type=int, default=2000)
    sp.add_argument("--csv-dir", help="directory for per-case trajectory CSVs")
    sp.add_argument("--csv-radius", type=float, default=0.03)
    sp.add_argument("--samples-per-period", type=int, default=4)
    sp.set_defaults(func=cmd_paradox)

    sp = sub.add_parser("repro", help="rerun a named cross-check")
    sp.add_argument("target", choices=sorted(REPRO_TARGETS))
    sp.add_argument("-o", "--output")
    sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sp.set_defaults(func=cmd_repro)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InputError, UsageError) as exc:
        _emit_error("usage", str(exc))
        return 2
    except (JetError, BirkhoffError, PerturbativeRegimeError, IntegrationError, ValueError) as exc:
        _emit_error(type(exc).__name__, str(exc))
        return 1


if __name__ == "__main__":
    sys.exit(main())
