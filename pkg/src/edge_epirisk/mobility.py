"""Discrete-time trajectory generation inside the disk cell.

Movement is kinematically exact: a step of dt crosses leg boundaries and
pauses as needed, so positions are the true continuous-time positions
sampled at the step instants and the per-step work scales with path length.
Each trajectory owns an RNG stream derived from (master seed, individual
index); worker split never changes results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .scenario import MobilityParams, RandomDirection, RandomWalk, RandomWaypoint, Static

__all__ = [
    "Position",
    "TrajectoryState",
    "params_vector",
    "reference_speed",
    "sample_uniform_disk",
    "new_trajectory_state",
    "step",
    "simulate_positions",
    "stationary_radii",
]

# Stationary samples are spaced an irrational multiple of the mixing time
# D/speed so fixed-leg walks are not sampled at turning points only.
SAMPLE_SPACING_FACTOR = 1.618033988749895


@dataclass(frozen=True)
class Position:
    x: float
    y: float

    def radius(self) -> float:
        return math.hypot(self.x, self.y)


def params_vector(mobility: MobilityParams, radius: float) -> np.ndarray:
    """Pack mobility parameters into the kernel parameter vector."""
    p = np.zeros(K.PARAMS_WIDTH)
    p[K.MP_D] = radius
    if isinstance(mobility, Static):
        p[K.MP_MODEL] = K.MODEL_STATIC
    elif isinstance(mobility, RandomDirection):
        p[K.MP_MODEL] = K.MODEL_RD
        p[K.MP_SPEED] = mobility.speed
        p[K.MP_STEP] = min(mobility.step_max, radius) if mobility.step_max else radius
        p[K.MP_PAUSE_MIN] = mobility.pause
        # reflection keeps the stationary position law uniform (the rejection
        # rule biases it toward the center)
        p[K.MP_BOUNDARY] = K.BOUNDARY_REFLECT
    elif isinstance(mobility, RandomWalk):
        p[K.MP_MODEL] = K.MODEL_RWK
        p[K.MP_SPEED] = mobility.speed
        p[K.MP_STEP] = mobility.step
    elif isinstance(mobility, RandomWaypoint):
        p[K.MP_MODEL] = K.MODEL_RWP
        p[K.MP_SPEED] = mobility.speed_min
        p[K.MP_SPEED_MAX] = mobility.speed_max
        p[K.MP_PAUSE_MIN] = mobility.pause_min
        p[K.MP_PAUSE_MAX] = mobility.pause_max
    else:
        raise TypeError(f"unknown mobility parameters: {mobility!r}")
    return p


def reference_speed(mobility: MobilityParams) -> float:
    """Speed scale used for mixing-time estimates (D / speed)."""
    if isinstance(mobility, (RandomDirection, RandomWalk)):
        return mobility.speed
    if isinstance(mobility, RandomWaypoint):
        return 0.5 * (mobility.speed_min + mobility.speed_max)
    return 1.0


def sample_uniform_disk(rng, radius: float) -> Position:
    """One position uniform in the disk (radius by sqrt transform, angle
    uniform); same draw order as trajectory initialization."""
    if radius <= 0:
        raise ValueError(f"radius must be positive (got {radius})")
    r = radius * math.sqrt(rng.random())
    ang = 2.0 * math.pi * rng.random()
    return Position(r * math.cos(ang), r * math.sin(ang))


@dataclass(frozen=True)
class TrajectoryState:
    """Snapshot of one mover: kernel state row plus its parameter vector."""

    row: np.ndarray
    params: np.ndarray
    model: str

    @property
    def position(self) -> Position:
        return Position(float(self.row[K.X]), float(self.row[K.Y]))

    @property
    def heading(self) -> float:
        return math.atan2(float(self.row[K.HY]), float(self.row[K.HX])) % (2.0 * math.pi)

    @property
    def remaining_leg(self) -> float:
        return float(self.row[K.LEG])

    @property
    def pause_left(self) -> float:
        return float(self.row[K.PAUSE])

    @property
    def phase(self) -> str:
        return "paused" if self.row[K.PAUSE] > 0.0 else "moving"


def new_trajectory_state(mobility: MobilityParams, radius: float, rng) -> TrajectoryState:
    params = params_vector(mobility, radius)
    row = K.init_state(params, rng)
    return TrajectoryState(row=row, params=params, model=mobility.model)


def step(state: TrajectoryState, dt: float, rng) -> TrajectoryState:
    """Advance a trajectory by dt seconds; returns a new state."""
    if dt <= 0:
        raise ValueError(f"dt must be positive (got {dt})")
    row = state.row.copy()
    K.advance(row, state.params, dt, rng)
    return TrajectoryState(row=row, params=state.params, model=state.model)


def _child_generators(seed, n):
    if isinstance(seed, np.random.SeedSequence):
        root = seed
    else:
        root = np.random.SeedSequence(int(seed))
    return [np.random.Generator(np.random.PCG64(ss)) for ss in root.spawn(n)]


def simulate_positions(
    mobility: MobilityParams,
    radius: float,
    n_individuals: int,
    duration: float,
    dt: float,
    burn_in: int = 0,
    seed=0,
) -> np.ndarray:
    """Independent trajectories with uniform initial positions.

    Returns positions of shape (1 + round(duration/dt), n_individuals, 2):
    the state after the burn_in discarded steps, then after every recorded
    step.
    """
    if n_individuals < 1 or duration < 0 or dt <= 0 or burn_in < 0:
        raise ValueError("need n_individuals >= 1, duration >= 0, dt > 0, burn_in >= 0")
    params = params_vector(mobility, radius)
    n_steps = int(round(duration / dt))
    out = np.empty((1 + n_steps, n_individuals, 2))
    buf = np.empty((n_steps, 2))
    for i, rng in enumerate(_child_generators(seed, n_individuals)):
        row = K.init_state(params, rng)
        if burn_in:
            K.advance(row, params, burn_in * dt, rng)
        out[0, i, 0] = row[K.X]
        out[0, i, 1] = row[K.Y]
        if n_steps:
            K.advance_record(row, params, dt, n_steps, rng, buf)
            out[1:, i, :] = buf
    return out


def stationary_radii(
    mobility: MobilityParams,
    radius: float,
    n_samples: int,
    seed=0,
    max_individuals: int = 1024,
) -> np.ndarray:
    """Post-burn-in center distances: many independent movers, sampled one
    mixing time (D/speed) apart after a ten-mixing-time burn-in."""
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    if isinstance(mobility, Static):
        rng = _child_generators(seed, 1)[0]
        return radius * np.sqrt(rng.random(n_samples))
    params = params_vector(mobility, radius)
    n_ind = min(max_individuals, n_samples)
    per = -(-n_samples // n_ind)
    spacing = SAMPLE_SPACING_FACTOR * radius / reference_speed(mobility)
    radii = np.empty((n_ind, per))
    buf = np.empty((per, 2))
    for i, rng in enumerate(_child_generators(seed, n_ind)):
        row = K.init_state(params, rng)
        K.advance(row, params, 10.0 * spacing, rng)
        K.advance_record(row, params, spacing, per, rng, buf)
        radii[i] = np.hypot(buf[:, 0], buf[:, 1])
    return radii.ravel()[:n_samples]
