"""Experiment configuration: scenario parameters, validation, and the flat
``key = value`` config-file format consumed by the CLI.

All types are frozen dataclasses, safe to share read-only across workers.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field


class ConfigError(ValueError):
    """Malformed config document (bad line, unknown key, bad literal)."""


class ValidationError(ValueError):
    """One or more scenario invariants violated.

    Carries the full list of violations, never just the first.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


@dataclass(frozen=True)
class Static:
    model: str = field(default="static", init=False)


@dataclass(frozen=True)
class RandomDirection:
    """Random direction: uniform heading, leg length uniform on (0, step_max].

    The fixed pause at each turning point is optional (0 disables it).  The
    stationary distance law is the same as for static individuals.
    """

    speed: float = 1.0
    step_max: float = 100.0
    pause: float = 0.1
    model: str = field(default="rd", init=False)


@dataclass(frozen=True)
class RandomWalk:
    """Random walk: uniform heading, fixed leg length ``step``."""

    step: float = 20.0
    speed: float = 1.0
    model: str = field(default="rwk", init=False)


@dataclass(frozen=True)
class RandomWaypoint:
    """Random waypoint: pause, then move to a uniform waypoint at a speed
    drawn per leg."""

    speed_min: float = 1.0
    speed_max: float = 5.0
    pause_min: float = 0.0
    pause_max: float = 1.0
    model: str = field(default="rwp", init=False)


MobilityParams = Static | RandomDirection | RandomWalk | RandomWaypoint


@dataclass(frozen=True)
class McSettings:
    """Monte-Carlo controls.  burn_in_steps=0 means "auto": ten mixing times
    of the active mobility model."""

    trials: int = 10000
    burn_in_steps: int = 0
    time_step: float = 0.1
    seed: int = 0
    workers: int = 1


@dataclass(frozen=True)
class ScenarioConfig:
    radius: float = 100.0
    n_infected: int = 20
    vol_min: float = 0.5
    vol_max: float = 1.5
    path_loss: float = 2.5
    vol_threshold: float = 0.1
    detention_time: float = 0.0
    mobility: MobilityParams = field(default_factory=Static)
    mc: McSettings = field(default_factory=McSettings)


def validate(cfg: ScenarioConfig) -> list[str]:
    """Return every violated invariant (empty list = valid).

    A path-loss exponent outside [2, 7] is a warning, not a violation, so
    sensitivity studies stay possible.
    """
    v = []
    if not cfg.radius > 0:
        v.append(f"radius must be > 0 (got {cfg.radius})")
    if cfg.n_infected < 1:
        v.append(f"n_infected must be >= 1 (got {cfg.n_infected})")
    if not 0 < cfg.vol_min:
        v.append(f"vol_min must be > 0 (got {cfg.vol_min})")
    if not cfg.vol_min < cfg.vol_max:
        v.append(f"vol_min < vol_max required (got vol_min={cfg.vol_min}, vol_max={cfg.vol_max})")
    if not cfg.vol_threshold > 0:
        v.append(f"vol_threshold must be > 0 (got {cfg.vol_threshold})")
    if cfg.detention_time < 0:
        v.append(f"detention_time must be >= 0 (got {cfg.detention_time})")
    if not math.isfinite(cfg.path_loss) or cfg.path_loss <= 0:
        v.append(f"path_loss must be a positive finite number (got {cfg.path_loss})")
    elif not 2 <= cfg.path_loss <= 7:
        warnings.warn(
            f"path_loss {cfg.path_loss} is outside the usual 2..7 band",
            stacklevel=2,
        )

    m = cfg.mobility
    if isinstance(m, RandomDirection):
        if not m.speed > 0:
            v.append(f"mobility.speed must be > 0 (got {m.speed})")
        if not m.step_max > 0:
            v.append(f"mobility.step must be > 0 (got {m.step_max})")
        if m.pause < 0:
            v.append(f"rd pause must be >= 0 (got {m.pause})")
    elif isinstance(m, RandomWalk):
        if not m.speed > 0:
            v.append(f"mobility.speed must be > 0 (got {m.speed})")
        if not m.step > 0:
            v.append(f"mobility.step must be > 0 (got {m.step})")
        elif m.step >= cfg.radius:
            v.append(f"rwk step must be < radius (got step={m.step}, radius={cfg.radius})")
    elif isinstance(m, RandomWaypoint):
        if not m.speed_min > 0:
            v.append(f"mobility.speed_min must be > 0 (got {m.speed_min})")
        if m.speed_min > m.speed_max:
            v.append(f"speed_min <= speed_max required (got {m.speed_min} > {m.speed_max})")
        if m.pause_min < 0:
            v.append(f"mobility.pause_min must be >= 0 (got {m.pause_min})")
        if m.pause_min > m.pause_max:
            v.append(f"pause_min <= pause_max required (got {m.pause_min} > {m.pause_max})")

    mc = cfg.mc
    if mc.trials < 1:
        v.append(f"mc.trials must be >= 1 (got {mc.trials})")
    if not mc.time_step > 0:
        v.append(f"mc.time_step must be > 0 (got {mc.time_step})")
    if mc.burn_in_steps < 0:
        v.append(f"mc.burn_in_steps must be >= 0 (got {mc.burn_in_steps})")
    if not 0 <= mc.seed < 2**64:
        v.append(f"mc.seed must be a 64-bit unsigned integer (got {mc.seed})")
    if mc.workers < 1:
        v.append(f"mc.workers must be >= 1 (got {mc.workers})")
    return v


_FLOAT_KEYS = {
    "radius",
    "vol_min",
    "vol_max",
    "path_loss",
    "vol_threshold",
    "detention_time",
    "mobility.step",
    "mobility.speed",
    "mobility.speed_min",
    "mobility.speed_max",
    "mobility.pause_min",
    "mobility.pause_max",
    "mc.time_step",
}
_INT_KEYS = {"n_infected", "mc.trials", "mc.burn_in_steps", "mc.seed", "mc.workers"}
_MODELS = ("static", "rd", "rwk", "rwp")

# Keys a strict parse must see explicitly; everything else has a documented
# fallback (vol_min/vol_max default to 0.5/1.5).
_STRICT_KEYS = (
    "radius",
    "n_infected",
    "path_loss",
    "vol_threshold",
    "detention_time",
    "mobility.model",
)


def _raw_items(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key or not value:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        yield lineno, key, value


def parse_config(text: str, strict: bool = False) -> ScenarioConfig:
    """Parse a flat key = value document into a validated ScenarioConfig.

    Unset keys take their defaults (lenient mode); ``strict=True`` requires
    the scenario-defining keys to be present.  Raises ConfigError with
    line/key context for malformed input and ValidationError listing every
    violated invariant.
    """
    seen: dict[str, object] = {}
    for lineno, key, value in _raw_items(text):
        if key == "mobility.model":
            if value not in _MODELS:
                raise ConfigError(
                    f"line {lineno}: mobility.model must be one of {', '.join(_MODELS)} (got {value!r})"
                )
            seen[key] = value
        elif key in _FLOAT_KEYS:
            try:
                seen[key] = float(value)
            except ValueError:
                raise ConfigError(f"line {lineno}: key {key!r}: not a number: {value!r}") from None
        elif key in _INT_KEYS:
            try:
                seen[key] = int(value)
            except ValueError:
                raise ConfigError(f"line {lineno}: key {key!r}: not an integer: {value!r}") from None
        else:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")

    if strict:
        missing = [k for k in _STRICT_KEYS if k not in seen]
        if missing:
            raise ConfigError(f"strict mode: missing required keys: {', '.join(missing)}")

    model = seen.get("mobility.model", "static")
    radius = seen.get("radius", 100.0)
    if model == "static":
        mobility: MobilityParams = Static()
    elif model == "rd":
        mobility = RandomDirection(
            speed=seen.get("mobility.speed", 1.0),
            step_max=seen.get("mobility.step", radius),
            pause=seen.get("mobility.pause_min", 0.1),
        )
    elif model == "rwk":
        mobility = RandomWalk(
            step=seen.get("mobility.step", 20.0),
            speed=seen.get("mobility.speed", 1.0),
        )
    else:
        mobility = RandomWaypoint(
            speed_min=seen.get("mobility.speed_min", 1.0),
            speed_max=seen.get("mobility.speed_max", 5.0),
            pause_min=seen.get("mobility.pause_min", 0.0),
            pause_max=seen.get("mobility.pause_max", 1.0),
        )

    mc_defaults = McSettings()
    cfg = ScenarioConfig(
        radius=radius,
        n_infected=seen.get("n_infected", 20),
        vol_min=seen.get("vol_min", 0.5),
        vol_max=seen.get("vol_max", 1.5),
        path_loss=seen.get("path_loss", 2.5),
        vol_threshold=seen.get("vol_threshold", 0.1),
        detention_time=seen.get("detention_time", 0.0),
        mobility=mobility,
        mc=McSettings(
            trials=seen.get("mc.trials", mc_defaults.trials),
            burn_in_steps=seen.get("mc.burn_in_steps", mc_defaults.burn_in_steps),
            time_step=seen.get("mc.time_step", mc_defaults.time_step),
            seed=seen.get("mc.seed", mc_defaults.seed),
            workers=seen.get("mc.workers", mc_defaults.workers),
        ),
    )
    violations = validate(cfg)
    if violations:
        raise ValidationError(violations)
    return cfg


def serialize_config(cfg: ScenarioConfig) -> str:
    """Render a ScenarioConfig as a config document; parse_config inverts it."""
    lines = [
        f"radius = {cfg.radius!r}",
        f"n_infected = {cfg.n_infected}",
        f"vol_min = {cfg.vol_min!r}",
        f"vol_max = {cfg.vol_max!r}",
        f"path_loss = {cfg.path_loss!r}",
        f"vol_threshold = {cfg.vol_threshold!r}",
        f"detention_time = {cfg.detention_time!r}",
        f"mobility.model = {cfg.mobility.model}",
    ]
    m = cfg.mobility
    if isinstance(m, RandomDirection):
        lines += [
            f"mobility.speed = {m.speed!r}",
            f"mobility.step = {m.step_max!r}",
            f"mobility.pause_min = {m.pause!r}",
        ]
    elif isinstance(m, RandomWalk):
        lines += [f"mobility.step = {m.step!r}", f"mobility.speed = {m.speed!r}"]
    elif isinstance(m, RandomWaypoint):
        lines += [
            f"mobility.speed_min = {m.speed_min!r}",
            f"mobility.speed_max = {m.speed_max!r}",
            f"mobility.pause_min = {m.pause_min!r}",
            f"mobility.pause_max = {m.pause_max!r}",
        ]
    lines += [
        f"mc.trials = {cfg.mc.trials}",
        f"mc.burn_in_steps = {cfg.mc.burn_in_steps}",
        f"mc.time_step = {cfg.mc.time_step!r}",
        f"mc.seed = {cfg.mc.seed}",
        f"mc.workers = {cfg.mc.workers}",
    ]
    return "\n".join(lines) + "\n"
