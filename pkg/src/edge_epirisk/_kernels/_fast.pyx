# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel backend.

Draw-for-draw equivalent to the pure-Python backend in ``_ref``: uniforms
come straight from the numpy BitGenerator the caller's Generator wraps, so
trajectories and tallies are bit-identical across backends.
"""

import numpy as np

cimport numpy as cnp
from cpython.pycapsule cimport PyCapsule_GetPointer
from libc.math cimport cos, sin, sqrt, pow
from numpy.random cimport bitgen_t

cnp.import_array()

cdef double TWO_PI = 6.283185307179586476925286766559
cdef double DISTANCE_FLOOR = 1e-6

cdef enum:
    MAX_HEADING_TRIES = 64
    MAX_BOUNCES = 64

# State-row and parameter layouts; keep in sync with the package __init__.
cdef enum:
    S_X = 0
    S_Y = 1
    S_HX = 2
    S_HY = 3
    S_LEG = 4
    S_PAUSE = 5
    S_SPEED = 6
    STATE_WIDTH = 7

cdef enum:
    P_MODEL = 0
    P_D = 1
    P_SPEED = 2
    P_SPEED_MAX = 3
    P_STEP = 4
    P_PAUSE_MIN = 5
    P_PAUSE_MAX = 6
    P_BOUNDARY = 7

cdef enum:
    M_STATIC = 0
    M_RD = 1
    M_RWK = 2
    M_RWP = 3

cdef enum:
    B_REJECT = 0
    B_REFLECT = 1


cdef inline bitgen_t *_bitgen(object rng):
    return <bitgen_t *> PyCapsule_GetPointer(rng.bit_generator.capsule, "BitGenerator")


cdef inline double _u(bitgen_t *bg) noexcept nogil:
    return bg.next_double(bg.state)


cdef void _draw_heading(double *state, const double *params, bitgen_t *bg) noexcept nogil:
    # Rejection redraws until the leg endpoint stays inside; under the
    # reflect rule a single heading is drawn and the rim bounces the path.
    cdef double ang = TWO_PI * _u(bg)
    cdef double hx = cos(ang)
    cdef double hy = sin(ang)
    cdef double d, d2, x, y, leg, ex, ey
    cdef int i
    if params[P_BOUNDARY] != B_REFLECT:
        d = params[P_D]
        d2 = d * d
        x = state[S_X]
        y = state[S_Y]
        leg = state[S_LEG]
        for i in range(MAX_HEADING_TRIES - 1):
            ex = x + leg * hx
            ey = y + leg * hy
            if ex * ex + ey * ey <= d2:
                break
            ang = TWO_PI * _u(bg)
            hx = cos(ang)
            hy = sin(ang)
    state[S_HX] = hx
    state[S_HY] = hy


cdef void _draw_rd_leg(double *state, const double *params, bitgen_t *bg) noexcept nogil:
    state[S_LEG] = params[P_STEP] * (1.0 - _u(bg))
    _draw_heading(state, params, bg)


cdef void _draw_rwp_leg(double *state, const double *params, bitgen_t *bg) noexcept nogil:
    cdef double d = params[P_D]
    cdef double r = d * sqrt(_u(bg))
    cdef double ang = TWO_PI * _u(bg)
    cdef double dx = r * cos(ang) - state[S_X]
    cdef double dy = r * sin(ang) - state[S_Y]
    cdef double leg = sqrt(dx * dx + dy * dy)
    if leg > 0.0:
        state[S_HX] = dx / leg
        state[S_HY] = dy / leg
    else:
        state[S_HX] = 1.0
        state[S_HY] = 0.0
    state[S_LEG] = leg
    state[S_SPEED] = params[P_SPEED] + (params[P_SPEED_MAX] - params[P_SPEED]) * _u(bg)


cdef void _arrive(double *state, const double *params, bitgen_t *bg) noexcept nogil:
    cdef int model = <int> params[P_MODEL]
    if model == M_RD:
        if params[P_PAUSE_MIN] > 0.0:
            state[S_PAUSE] = params[P_PAUSE_MIN]
        else:
            _draw_rd_leg(state, params, bg)
    elif model == M_RWK:
        state[S_LEG] = params[P_STEP]
        _draw_heading(state, params, bg)
    else:
        state[S_PAUSE] = params[P_PAUSE_MIN] + (params[P_PAUSE_MAX] - params[P_PAUSE_MIN]) * _u(bg)


cdef void _move(double *state, double move, double d, double d2) noexcept nogil:
    cdef double x = state[S_X]
    cdef double y = state[S_Y]
    cdef double hx = state[S_HX]
    cdef double hy = state[S_HY]
    cdef double nx = x + move * hx
    cdef double ny = y + move * hy
    cdef double remaining, b, disc, s, norm, ux, uy, dot, q, scale
    cdef int i
    if nx * nx + ny * ny > d2:
        # Leg crosses the rim (possible only after a failed rejection draw,
        # or by rounding right at the boundary): specular reflection.
        remaining = move
        for i in range(MAX_BOUNCES):
            if remaining <= 0.0:
                break
            b = x * hx + y * hy
            disc = b * b + d2 - (x * x + y * y)
            s = -b + sqrt(disc if disc > 0.0 else 0.0)
            if s >= remaining:
                x += remaining * hx
                y += remaining * hy
                break
            x += s * hx
            y += s * hy
            remaining -= s
            norm = sqrt(x * x + y * y)
            if norm > 0.0:
                ux = x / norm
                uy = y / norm
                dot = hx * ux + hy * uy
                hx -= 2.0 * dot * ux
                hy -= 2.0 * dot * uy
        state[S_HX] = hx
        state[S_HY] = hy
        nx = x
        ny = y
    q = nx * nx + ny * ny
    if q > d2:
        scale = d / sqrt(q)
        nx *= scale
        ny *= scale
    state[S_X] = nx
    state[S_Y] = ny


cdef void _advance(double *state, const double *params, double tau, bitgen_t *bg) noexcept nogil:
    cdef int model = <int> params[P_MODEL]
    cdef double d, d2, speed, span, move
    if model == M_STATIC or tau <= 0.0:
        return
    d = params[P_D]
    d2 = d * d
    while tau > 0.0:
        if state[S_PAUSE] > 0.0:
            if state[S_PAUSE] >= tau:
                state[S_PAUSE] -= tau
                return
            tau -= state[S_PAUSE]
            state[S_PAUSE] = 0.0
        if state[S_LEG] <= 0.0:
            if model == M_RD:
                _draw_rd_leg(state, params, bg)
            elif model == M_RWK:
                state[S_LEG] = params[P_STEP]
                _draw_heading(state, params, bg)
            else:
                _draw_rwp_leg(state, params, bg)
            continue
        speed = state[S_SPEED]
        span = speed * tau
        if state[S_LEG] <= span:
            move = state[S_LEG]
            tau -= move / speed
        else:
            move = span
            tau = 0.0
        _move(state, move, d, d2)
        state[S_LEG] -= move
        if state[S_LEG] <= 1e-12:
            state[S_LEG] = 0.0
            _arrive(state, params, bg)


def init_state(const double[::1] params, object rng):
    """Draw the initial state: position uniform in the disk, then the
    model-specific first leg or pause."""
    out = np.zeros(STATE_WIDTH)
    cdef double[::1] view = out
    cdef double *state = &view[0]
    cdef bitgen_t *bg = _bitgen(rng)
    cdef double d = params[P_D]
    cdef double r = d * sqrt(_u(bg))
    cdef double ang = TWO_PI * _u(bg)
    cdef int model = <int> params[P_MODEL]
    state[S_X] = r * cos(ang)
    state[S_Y] = r * sin(ang)
    if model == M_RD:
        state[S_SPEED] = params[P_SPEED]
        _draw_rd_leg(state, &params[0], bg)
    elif model == M_RWK:
        state[S_SPEED] = params[P_SPEED]
        state[S_LEG] = params[P_STEP]
        _draw_heading(state, &params[0], bg)
    elif model == M_RWP:
        state[S_PAUSE] = params[P_PAUSE_MIN] + (params[P_PAUSE_MAX] - params[P_PAUSE_MIN]) * _u(bg)
    return out


def advance(double[::1] state, const double[::1] params, double tau, object rng):
    """Advance one individual by tau seconds of wall time."""
    cdef bitgen_t *bg = _bitgen(rng)
    with nogil:
        _advance(&state[0], &params[0], tau, bg)


def advance_record(double[::1] state, const double[::1] params, double dt,
                   Py_ssize_t n_steps, object rng, double[:, ::1] out):
    """Advance n_steps of dt seconds, recording the position after each."""
    cdef bitgen_t *bg = _bitgen(rng)
    cdef Py_ssize_t k
    with nogil:
        for k in range(n_steps):
            _advance(&state[0], &params[0], dt, bg)
            out[k, 0] = state[S_X]
            out[k, 1] = state[S_Y]


def snapshot_tally(object rng, Py_ssize_t trials, Py_ssize_t n, double eta,
                   double v_th, double vol_min, double vol_max, double d,
                   qtable=None):
    """Count snapshot trials whose aggregate strength meets the threshold.

    Draw order matches the reference backend: per trial, n radius uniforms
    then n volume uniforms.  Returns (hits, clamp_events).
    """
    cdef bitgen_t *bg = _bitgen(rng)
    cdef double[::1] table
    cdef const double *tptr = NULL
    cdef Py_ssize_t m = 0
    cdef double[::1] radii = np.empty(max(n, 1))
    cdef Py_ssize_t hits = 0, clamped = 0, t, i, idx
    cdef double vspan = vol_max - vol_min
    cdef double u, pos, frac, lo, r, s, v
    if qtable is not None:
        table = np.ascontiguousarray(qtable, dtype=np.float64)
        tptr = &table[0]
        m = table.shape[0] - 1
    with nogil:
        for t in range(trials):
            for i in range(n):
                u = _u(bg)
                if tptr == NULL:
                    radii[i] = d * sqrt(u)
                else:
                    pos = u * m
                    idx = <Py_ssize_t> pos
                    frac = pos - idx
                    lo = tptr[idx]
                    radii[i] = lo + (tptr[idx + 1] - lo) * frac
            s = 0.0
            for i in range(n):
                v = vol_min + vspan * _u(bg)
                r = radii[i]
                if r < DISTANCE_FLOOR:
                    clamped += 1
                    r = DISTANCE_FLOOR
                s += v * pow(r, -eta)
            if s >= v_th:
                hits += 1
    return hits, clamped
