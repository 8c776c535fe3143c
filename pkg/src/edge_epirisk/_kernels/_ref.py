"""Pure-Python kernel backend.

Every scalar uniform is drawn in the exact same order and transformed with
the same expressions as in the compiled backend, so kernels here are
bit-for-bit interchangeable with it given the same BitGenerator state.
"""

import math

import numpy as np

from . import (
    BOUNDARY_REFLECT,
    DISTANCE_FLOOR,
    HX,
    HY,
    LEG,
    MODEL_RD,
    MODEL_RWK,
    MODEL_RWP,
    MODEL_STATIC,
    MP_BOUNDARY,
    MP_D,
    MP_MODEL,
    MP_PAUSE_MAX,
    MP_PAUSE_MIN,
    MP_SPEED,
    MP_SPEED_MAX,
    MP_STEP,
    PAUSE,
    SPEED,
    STATE_WIDTH,
    X,
    Y,
)

TWO_PI = 2.0 * math.pi
MAX_HEADING_TRIES = 64
MAX_BOUNCES = 64


def _draw_heading(state, params, rng):
    # Rejection rule: redraw until the leg endpoint stays inside the disk,
    # at most MAX_HEADING_TRIES times; the last heading is kept otherwise
    # and the mover reflects off the rim instead.  Under the reflect rule a
    # single heading is drawn and the rim bounces the path.
    ang = TWO_PI * rng.random()
    hx = math.cos(ang)
    hy = math.sin(ang)
    if params[MP_BOUNDARY] != BOUNDARY_REFLECT:
        d = params[MP_D]
        d2 = d * d
        x = state[X]
        y = state[Y]
        leg = state[LEG]
        for _ in range(MAX_HEADING_TRIES - 1):
            ex = x + leg * hx
            ey = y + leg * hy
            if ex * ex + ey * ey <= d2:
                break
            ang = TWO_PI * rng.random()
            hx = math.cos(ang)
            hy = math.sin(ang)
    state[HX] = hx
    state[HY] = hy


def _draw_rd_leg(state, params, rng):
    state[LEG] = params[MP_STEP] * (1.0 - rng.random())
    _draw_heading(state, params, rng)


def _draw_rwp_leg(state, params, rng):
    d = params[MP_D]
    r = d * math.sqrt(rng.random())
    ang = TWO_PI * rng.random()
    dx = r * math.cos(ang) - state[X]
    dy = r * math.sin(ang) - state[Y]
    leg = math.sqrt(dx * dx + dy * dy)
    if leg > 0.0:
        state[HX] = dx / leg
        state[HY] = dy / leg
    else:
        state[HX] = 1.0
        state[HY] = 0.0
    state[LEG] = leg
    state[SPEED] = params[MP_SPEED] + (params[MP_SPEED_MAX] - params[MP_SPEED]) * rng.random()


def _arrive(state, params, rng):
    model = int(params[MP_MODEL])
    if model == MODEL_RD:
        if params[MP_PAUSE_MIN] > 0.0:
            state[PAUSE] = params[MP_PAUSE_MIN]
        else:
            _draw_rd_leg(state, params, rng)
    elif model == MODEL_RWK:
        state[LEG] = params[MP_STEP]
        _draw_heading(state, params, rng)
    else:
        state[PAUSE] = params[MP_PAUSE_MIN] + (params[MP_PAUSE_MAX] - params[MP_PAUSE_MIN]) * rng.random()


def _move(state, move, d, d2):
    x = state[X]
    y = state[Y]
    hx = state[HX]
    hy = state[HY]
    nx = x + move * hx
    ny = y + move * hy
    if nx * nx + ny * ny > d2:
        # Leg crosses the rim (possible only after a failed rejection draw,
        # or by rounding right at the boundary): specular reflection.
        remaining = move
        for _ in range(MAX_BOUNCES):
            if remaining <= 0.0:
                break
            b = x * hx + y * hy
            disc = b * b + d2 - (x * x + y * y)
            s = -b + math.sqrt(disc if disc > 0.0 else 0.0)
            if s >= remaining:
                x += remaining * hx
                y += remaining * hy
                break
            x += s * hx
            y += s * hy
            remaining -= s
            norm = math.sqrt(x * x + y * y)
            if norm > 0.0:
                ux = x / norm
                uy = y / norm
                dot = hx * ux + hy * uy
                hx -= 2.0 * dot * ux
                hy -= 2.0 * dot * uy
        state[HX] = hx
        state[HY] = hy
        nx = x
        ny = y
    q = nx * nx + ny * ny
    if q > d2:
        scale = d / math.sqrt(q)
        nx *= scale
        ny *= scale
    state[X] = nx
    state[Y] = ny


def init_state(params, rng):
    """Draw the initial state: position uniform in the disk, then the
    model-specific first leg or pause."""
    state = np.zeros(STATE_WIDTH)
    d = params[MP_D]
    r = d * math.sqrt(rng.random())
    ang = TWO_PI * rng.random()
    state[X] = r * math.cos(ang)
    state[Y] = r * math.sin(ang)
    model = int(params[MP_MODEL])
    if model == MODEL_RD:
        state[SPEED] = params[MP_SPEED]
        _draw_rd_leg(state, params, rng)
    elif model == MODEL_RWK:
        state[SPEED] = params[MP_SPEED]
        state[LEG] = params[MP_STEP]
        _draw_heading(state, params, rng)
    elif model == MODEL_RWP:
        state[PAUSE] = params[MP_PAUSE_MIN] + (params[MP_PAUSE_MAX] - params[MP_PAUSE_MIN]) * rng.random()
    return state


def advance(state, params, tau, rng):
    """Advance one individual by tau seconds of wall time, crossing leg
    boundaries and pauses as needed (work scales with path length, not tau)."""
    model = int(params[MP_MODEL])
    if model == MODEL_STATIC or tau <= 0.0:
        return
    d = params[MP_D]
    d2 = d * d
    while tau > 0.0:
        if state[PAUSE] > 0.0:
            if state[PAUSE] >= tau:
                state[PAUSE] -= tau
                return
            tau -= state[PAUSE]
            state[PAUSE] = 0.0
        if state[LEG] <= 0.0:
            if model == MODEL_RD:
                _draw_rd_leg(state, params, rng)
            elif model == MODEL_RWK:
                state[LEG] = params[MP_STEP]
                _draw_heading(state, params, rng)
            else:
                _draw_rwp_leg(state, params, rng)
            continue
        speed = state[SPEED]
        span = speed * tau
        if state[LEG] <= span:
            move = state[LEG]
            tau -= move / speed
        else:
            move = span
            tau = 0.0
        _move(state, move, d, d2)
        state[LEG] -= move
        if state[LEG] <= 1e-12:
            state[LEG] = 0.0
            _arrive(state, params, rng)


def advance_record(state, params, dt, n_steps, rng, out):
    """Advance n_steps of dt seconds, recording the position after each."""
    for k in range(n_steps):
        advance(state, params, dt, rng)
        out[k, 0] = state[X]
        out[k, 1] = state[Y]


def snapshot_tally(rng, trials, n, eta, v_th, vol_min, vol_max, d, qtable=None):
    """Count snapshot trials whose aggregate strength meets the threshold.

    Each trial draws n radii (uniform-disk by default, otherwise by inverse
    CDF through qtable) then n volumes, trial-major.  Returns
    (hits, clamp_events).
    """
    hits = 0
    clamped = 0
    chunk = max(1, min(trials, (1 << 21) // max(1, 2 * n)))
    vspan = vol_max - vol_min
    done = 0
    while done < trials:
        c = min(chunk, trials - done)
        u = rng.random((c, 2, n))
        if qtable is None:
            r = d * np.sqrt(u[:, 0, :])
        else:
            m = qtable.shape[0] - 1
            pos = u[:, 0, :] * m
            idx = pos.astype(np.int64)
            frac = pos - idx
            lo = qtable[idx]
            r = lo + (qtable[idx + 1] - lo) * frac
        v = vol_min + vspan * u[:, 1, :]
        clamped += int((r < DISTANCE_FLOOR).sum())
        np.maximum(r, DISTANCE_FLOOR, out=r)
        s = (v * r ** (-eta)).sum(axis=1)
        hits += int((s >= v_th).sum())
        done += c
    return hits, clamped
