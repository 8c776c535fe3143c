"""Monte-Carlo estimation of the infectious probability and the empirical
distance-law extraction used as the oracle for every KS check.

Snapshot mode draws positions straight from a stationary law; trajectory
mode simulates movers and samples instants one mixing time apart, with
error bars from independent replications.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from . import distributions as dist
from . import mobility as mob
from .scenario import RandomWalk, RandomWaypoint, ScenarioConfig, ValidationError, validate

__all__ = [
    "McEstimate",
    "TotalRiskEstimate",
    "instantaneous_strength",
    "estimate_p_inf",
    "estimate_total_risk",
    "ks_statistic",
    "empirical_distance_law",
    "EmpiricalLawReport",
]

_QUANTILE_TABLE_SIZE = 4097
_REPLICATIONS = 32


@dataclass(frozen=True)
class McEstimate:
    p_inf_hat: float
    std_err: float
    ci95: tuple[float, float]
    trials: int
    seed: int
    mode: str
    clamp_events: int = 0


@dataclass(frozen=True)
class TotalRiskEstimate:
    value: float
    std_err: float
    estimate: McEstimate


def instantaneous_strength(positions, volumes, eta: float) -> float:
    """Aggregate strength sum(V_i * r_i^-eta) of individuals at the given
    xy positions, seen from the origin; a distance of exactly zero yields
    +inf by contract."""
    positions = np.asarray(positions, dtype=float)
    volumes = np.asarray(volumes, dtype=float)
    if positions.ndim != 2 or positions.shape[0] != volumes.shape[0]:
        raise ValueError("positions must be (n, 2) matching n volumes")
    radii = np.hypot(positions[:, 0], positions[:, 1])
    with np.errstate(divide="ignore"):
        return float(np.sum(volumes * radii ** (-eta)))


def _check(cfg):
    violations = validate(cfg)
    if violations:
        raise ValidationError(violations)


def _resolve_mode(cfg, mode):
    if mode not in ("auto", "snapshot", "trajectory"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode != "auto":
        return mode
    return "trajectory" if isinstance(cfg.mobility, (RandomWalk, RandomWaypoint)) else "snapshot"


def _snapshot_estimate(cfg: ScenarioConfig) -> McEstimate:
    mc = cfg.mc
    if isinstance(cfg.mobility, (RandomWalk, RandomWaypoint)):
        law = dist.stationary_law(cfg)
        qtable = np.ascontiguousarray(law.ppf(np.linspace(0.0, 1.0, _QUANTILE_TABLE_SIZE)))
    else:
        qtable = None
    root = np.random.SeedSequence(mc.seed)
    children = root.spawn(mc.workers)
    base = mc.trials // mc.workers
    counts = [base + (1 if w < mc.trials % mc.workers else 0) for w in range(mc.workers)]

    def run(w):
        if counts[w] == 0:
            return 0, 0
        rng = np.random.Generator(np.random.PCG64(children[w]))
        return K.snapshot_tally(
            rng,
            counts[w],
            cfg.n_infected,
            cfg.path_loss,
            cfg.vol_threshold,
            cfg.vol_min,
            cfg.vol_max,
            cfg.radius,
            qtable,
        )

    if mc.workers > 1:
        with ThreadPoolExecutor(max_workers=mc.workers) as pool:
            results = list(pool.map(run, range(mc.workers)))
    else:
        results = [run(0)]
    hits = sum(r[0] for r in results)
    clamped = sum(r[1] for r in results)
    p_hat = hits / mc.trials
    std_err = math.sqrt(p_hat * (1.0 - p_hat) / mc.trials)
    ci = (max(0.0, p_hat - 1.96 * std_err), min(1.0, p_hat + 1.96 * std_err))
    return McEstimate(p_hat, std_err, ci, mc.trials, mc.seed, "snapshot", clamped)


def _trajectory_estimate(cfg: ScenarioConfig, fixed_volumes: bool) -> McEstimate:
    mc = cfg.mc
    n = cfg.n_infected
    params = mob.params_vector(cfg.mobility, cfg.radius)
    spacing = mob.SAMPLE_SPACING_FACTOR * cfg.radius / mob.reference_speed(cfg.mobility)
    burn = mc.burn_in_steps * mc.time_step if mc.burn_in_steps > 0 else 10.0 * spacing
    reps = min(_REPLICATIONS, mc.trials)
    per = -(-mc.trials // reps)
    rep_seeds = np.random.SeedSequence(mc.seed).spawn(reps)
    vspan = cfg.vol_max - cfg.vol_min

    def run(rep):
        streams = rep_seeds[rep].spawn(n + 1)
        radii = np.empty((per, n))
        buf = np.empty((per, 2))
        for i in range(n):
            rng = np.random.Generator(np.random.PCG64(streams[i]))
            row = K.init_state(params, rng)
            K.advance(row, params, burn, rng)
            K.advance_record(row, params, spacing, per, rng, buf)
            radii[:, i] = np.hypot(buf[:, 0], buf[:, 1])
        vol_rng = np.random.Generator(np.random.PCG64(streams[n]))
        if fixed_volumes:
            vols = cfg.vol_min + vspan * vol_rng.random(n)
        else:
            vols = cfg.vol_min + vspan * vol_rng.random((per, n))
        clamps = int((radii < K.DISTANCE_FLOOR).sum())
        np.maximum(radii, K.DISTANCE_FLOOR, out=radii)
        strength = (vols * radii ** (-cfg.path_loss)).sum(axis=1)
        return int((strength >= cfg.vol_threshold).sum()), clamps

    if mc.workers > 1:
        with ThreadPoolExecutor(max_workers=mc.workers) as pool:
            results = list(pool.map(run, range(reps)))
    else:
        results = [run(rep) for rep in range(reps)]
    rep_hits = np.array([r[0] for r in results], dtype=float)
    clamped = sum(r[1] for r in results)
    total = reps * per
    p_hat = float(rep_hits.sum() / total)
    rep_means = rep_hits / per
    if reps > 1:
        std_err = float(rep_means.std(ddof=1) / math.sqrt(reps))
    else:
        std_err = 0.0
    ci = (max(0.0, p_hat - 1.96 * std_err), min(1.0, p_hat + 1.96 * std_err))
    return McEstimate(p_hat, std_err, ci, total, mc.seed, "trajectory", clamped)


def estimate_p_inf(cfg: ScenarioConfig, mode: str = "auto", fixed_volumes: bool = False) -> McEstimate:
    """Estimate the instantaneous infectious probability by simulation.

    Snapshot mode (default for static/rd) draws stationary positions per
    trial; trajectory mode (default for rwk/rwp) simulates movers and tests
    the indicator at instants spaced one mixing time apart, with batch-mean
    error bars over independent replications.  fixed_volumes keeps each
    individual's volume constant within a replication instead of redrawing
    it per sampled instant.
    """
    _check(cfg)
    resolved = _resolve_mode(cfg, mode)
    if resolved == "snapshot":
        return _snapshot_estimate(cfg)
    return _trajectory_estimate(cfg, fixed_volumes)


def estimate_total_risk(cfg: ScenarioConfig, mode: str = "auto") -> TotalRiskEstimate:
    """Detention-time risk estimate T * p_hat with the error bar scaled by T."""
    est = estimate_p_inf(cfg, mode=mode)
    t = cfg.detention_time
    return TotalRiskEstimate(t * est.p_inf_hat, t * est.std_err, est)


def ks_statistic(samples, cdf) -> float:
    """Two-sided Kolmogorov-Smirnov statistic of samples against a CDF."""
    x = np.sort(np.asarray(samples, dtype=float))
    n = len(x)
    if n == 0:
        raise ValueError("need at least one sample")
    f = np.asarray(cdf(x), dtype=float)
    grid = np.arange(1, n + 1) / n
    return float(max((grid - f).max(), (f - (grid - 1.0 / n)).max()))


@dataclass(frozen=True)
class EmpiricalLawReport:
    histogram: np.ndarray  # columns bin_lo, bin_hi, count, density
    ks: float
    samples: int

    def to_csv(self) -> str:
        lines = ["bin_lo,bin_hi,count,density"]
        for lo, hi, count, density in self.histogram:
            lines.append(f"{lo!r},{hi!r},{int(count)},{density!r}")
        return "\n".join(lines) + "\n"


def empirical_distance_law(
    mobility,
    radius: float,
    samples: int,
    seed,
    law: dist.DistanceLaw,
    bins: int = 64,
) -> EmpiricalLawReport:
    """Stationary-distance histogram (equal-probability bins of the supplied
    law) and the KS statistic of the samples against that law."""
    if samples < 1000:
        raise ValueError("need at least 1e3 samples for a meaningful comparison")
    radii = mob.stationary_radii(mobility, radius, samples, seed=seed)
    edges = np.asarray(law.ppf(np.linspace(0.0, 1.0, bins + 1)), dtype=float)
    edges[0] = min(edges[0], float(radii.min()))
    edges[-1] = max(edges[-1], float(radii.max()))
    counts, _ = np.histogram(radii, bins=edges)
    widths = np.diff(edges)
    density = counts / (samples * np.where(widths > 0, widths, 1.0))
    hist = np.column_stack([edges[:-1], edges[1:], counts, density])
    return EmpiricalLawReport(hist, ks_statistic(radii, law.cdf), samples)
