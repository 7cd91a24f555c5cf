"""Compiled DOP853 kernel for piecewise-autonomous polynomial ODEs in C.

Each trajectory is integrated independently with its own step-size control,
so results do not depend on how initial conditions are batched. Segments
are integrated back to back; a step never crosses a segment end.
"""

from __future__ import annotations

import numpy as np
from numba import njit
from scipy.integrate._ivp import dop853_coefficients as _dop

N_STAGES = _dop.N_STAGES
N_STAGES_PLUS = N_STAGES + 1
A = np.ascontiguousarray(_dop.A[:N_STAGES, :N_STAGES])
B = np.ascontiguousarray(_dop.B)
C = np.ascontiguousarray(_dop.C[:N_STAGES])
E3 = np.ascontiguousarray(_dop.E3)
E5 = np.ascontiguousarray(_dop.E5)

SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 10.0
ERROR_EXPONENT = -1.0 / 8.0

OK = 0
ESCAPED = 1
STEP_UNDERFLOW = 2


def pack_fields(fields) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Flatten vector-field jets into padded ``(j, k, c)`` term arrays."""
    terms = []
    for X in fields:
        t = [(1, 0, X.linear)] + [(j, k, c) for (j, k), c in X.coeffs.items() if c != 0]
        terms.append(t)
    width = max(len(t) for t in terms)
    js = np.zeros((len(terms), width), dtype=np.int64)
    ks = np.zeros((len(terms), width), dtype=np.int64)
    cs = np.zeros((len(terms), width), dtype=np.complex128)
    counts = np.zeros(len(terms), dtype=np.int64)
    for i, t in enumerate(terms):
        counts[i] = len(t)
        for m, (j, k, c) in enumerate(t):
            js[i, m], ks[i, m], cs[i, m] = j, k, c
    return js, ks, cs, counts


@njit(cache=True)
def _rhs(z, js, ks, cs, count):
    zb = z.conjugate()
    w = 0j
    for m in range(count):
        term = cs[m]
        for _ in range(js[m]):
            term *= z
        for _ in range(ks[m]):
            term *= zb
        w += term
    return w


@njit(cache=True)
def integrate_segments(z0, seg_field, seg_dur, js, ks, cs, counts, rtol, atol, escape, h_init, A, B, C, E3, E5):
    """Integrate every ``z0[i]`` through all segments.

    Returns ``(out, status, last)``: ``out[i, s]`` is the state at the end of
    segment ``s`` (NaN after a failure), ``status[i]`` one of OK / ESCAPED /
    STEP_UNDERFLOW and ``last[i]`` the index of the last completed segment.
    """
    n = z0.shape[0]
    nseg = seg_field.shape[0]
    out = np.full((n, nseg), np.nan + 0j)
    status = np.zeros(n, dtype=np.int64)
    last = np.full(n, -1, dtype=np.int64)
    K = np.empty(N_STAGES_PLUS, dtype=np.complex128)
    for i in range(n):
        z = z0[i]
        h_abs = h_init
        failed = False
        for s in range(nseg):
            fi = seg_field[s]
            cnt = counts[fi]
            t = 0.0
            t_end = seg_dur[s]
            f = _rhs(z, js[fi], ks[fi], cs[fi], cnt)
            while t < t_end:
                min_step = 1e-14 * max(1.0, t_end)
                if h_abs < min_step:
                    status[i] = STEP_UNDERFLOW
                    failed = True
                    break
                accepted = False
                rejected = False
                while not accepted:
                    if h_abs < min_step:
                        break
                    h = h_abs
                    clipped = False
                    if t + h >= t_end:
                        h = t_end - t
                        clipped = True
                    K[0] = f
                    for st in range(1, N_STAGES):
                        dz = 0j
                        for q in range(st):
                            dz += A[st, q] * K[q]
                        K[st] = _rhs(z + h * dz, js[fi], ks[fi], cs[fi], cnt)
                    dz = 0j
                    for q in range(N_STAGES):
                        dz += B[q] * K[q]
                    z_new = z + h * dz
                    f_new = _rhs(z_new, js[fi], ks[fi], cs[fi], cnt)
                    K[N_STAGES] = f_new
                    e5 = 0j
                    e3 = 0j
                    for q in range(N_STAGES + 1):
                        e5 += E5[q] * K[q]
                        e3 += E3[q] * K[q]
                    sre = atol + rtol * max(abs(z.real), abs(z_new.real))
                    sim = atol + rtol * max(abs(z.imag), abs(z_new.imag))
                    e5n = (e5.real / sre) ** 2 + (e5.imag / sim) ** 2
                    e3n = (e3.real / sre) ** 2 + (e3.imag / sim) ** 2
                    if e5n == 0.0 and e3n == 0.0:
                        err = 0.0
                    else:
                        err = h * e5n / np.sqrt((e5n + 0.01 * e3n) * 2.0)
                    if err < 1.0:
                        if err == 0.0:
                            factor = MAX_FACTOR
                        else:
                            factor = min(MAX_FACTOR, SAFETY * err ** ERROR_EXPONENT)
                        if rejected:
                            factor = min(1.0, factor)
                        # a clipped step says nothing about the natural step size
                        if not clipped:
                            h_abs = h_abs * factor
                        accepted = True
                        t = t_end if clipped else t + h
                        z = z_new
                        f = f_new
                    else:
                        h_abs = h_abs * max(MIN_FACTOR, SAFETY * err ** ERROR_EXPONENT)
                        rejected = True
                if not accepted:
                    status[i] = STEP_UNDERFLOW
                    failed = True
                    break
                if abs(z) > escape:
                    status[i] = ESCAPED
                    failed = True
                    break
            if failed:
                break
            out[i, s] = z
            last[i] = s
    return out, status, last



def run_segments(z0, seg_field, seg_dur, fields, *, rtol=1e-12, atol=1e-12, escape=0.5, h_init=0.05):
    js, ks, cs, counts = pack_fields(fields)
    return integrate_segments(
        np.asarray(z0, dtype=np.complex128),
        np.asarray(seg_field, dtype=np.int64),
        np.asarray(seg_dur, dtype=np.float64),
        js, ks, cs, counts,
        float(rtol), float(atol), float(escape), float(h_init),
        A, B, C, E3, E5,
    )
