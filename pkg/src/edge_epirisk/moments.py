"""Conditional mean and variance of the aggregate minor-individual strength
given the nearest distance, for the static/RD, RWK and RWP stationary laws.

Each model reduces to the same combination: with X = (minor distance)^-eta
under the conditional minor law and V the per-individual volume,

    mean = (N-1) E[V] E[X]
    var  = (N-1) (E[V^2] E[X^2] - (E[V] E[X])^2)
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distributions import DistanceLaw, rwp_h
from .scenario import ScenarioConfig

__all__ = ["MomentPair", "static_moments", "rwk_moments", "rwp_moments"]

# Width of the series branch around the singular exponent (2-p -> 0); inside
# it the logarithmic-limit expansion avoids catastrophic cancellation.  The
# wider window is how far force_branch="limit" may stretch the series while
# it still holds ~1e-9 relative accuracy (branch-consistency checks).
_SINGULAR_BAND = 1e-5
_SERIES_VALID_BAND = 1e-3


@dataclass(frozen=True)
class MomentPair:
    mean: float
    variance: float

    @property
    def std_dev(self) -> float:
        return math.sqrt(self.variance)


def _volume_moments(cfg):
    ev = 0.5 * (cfg.vol_min + cfg.vol_max)
    ev2 = (cfg.vol_min**2 + cfg.vol_min * cfg.vol_max + cfg.vol_max**2) / 3.0
    return ev, ev2


def _pair(n, ev, ev2, ex, ex2) -> MomentPair:
    if n <= 1:
        return MomentPair(0.0, 0.0)
    mean = (n - 1) * ev * ex
    term1 = (n - 1) * ev2 * ex2
    var = term1 - (n - 1) * (ev * ex) ** 2
    if var < 0.0:
        if var < -1e-12 * max(1.0, term1):
            raise ArithmeticError(f"variance came out negative beyond roundoff: {var}")
        var = 0.0
    return MomentPair(mean, var)


def _disk_tail_mean(r1: float, d: float, p: float, force_branch: str | None = None) -> float:
    """E[r^-p] for r with density 2r/(d^2 - r1^2) on [r1, d].

    Closed form 2(d^(2-p) - r1^(2-p)) / ((2-p)(d^2 - r1^2)) away from p=2;
    near the singular exponent a series around the logarithmic limit is used
    (force_branch picks one explicitly, for continuity checks).
    """
    eps = 2.0 - p
    span = d * d - r1 * r1
    if force_branch is None or abs(eps) >= _SERIES_VALID_BAND:
        use_limit = abs(eps) < _SINGULAR_BAND
    else:
        use_limit = force_branch == "limit"
    if use_limit:
        a = math.log(d)
        b = math.log(r1)
        s = (a - b) * (1.0 + eps * (a + b) / 2.0 + eps * eps * (a * a + a * b + b * b) / 6.0)
        return 2.0 * s / span
    return 2.0 * (d**eps - r1**eps) / (eps * span)


def static_moments(r1: float, cfg: ScenarioConfig, force_branch: str | None = None) -> MomentPair:
    """Closed-form conditional moments for static (and random-direction)
    individuals, nearest one at distance r1."""
    d = cfg.radius
    if not 0 < r1 < d:
        raise ValueError(f"need 0 < r1 < radius (got r1={r1}, radius={d})")
    if cfg.n_infected <= 1:
        return MomentPair(0.0, 0.0)
    ev, ev2 = _volume_moments(cfg)
    ex = _disk_tail_mean(r1, d, cfg.path_loss, force_branch)
    ex2 = _disk_tail_mean(r1, d, 2.0 * cfg.path_loss, force_branch)
    return _pair(cfg.n_infected, ev, ev2, ex, ex2)


def _panel_quad(fn, lo: float, hi: float, breakpoints=(), n_panels: int = 48, order: int = 16):
    """Integrate fn over [lo, hi] with geometrically spaced panels (plus the
    given breakpoints) and fixed-order Gauss-Legendre per panel."""
    if hi <= lo:
        return 0.0
    edges = np.geomspace(lo, hi, n_panels + 1) if lo > 0 else np.linspace(lo, hi, n_panels + 1)
    brk = [b for b in breakpoints if lo < b < hi]
    if brk:
        edges = np.unique(np.concatenate([edges, np.asarray(brk, dtype=float)]))
    x, w = np.polynomial.legendre.leggauss(order)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    nodes = mid[:, None] + half[:, None] * x[None, :]
    vals = fn(nodes.ravel()).reshape(nodes.shape)
    return float(np.sum(vals * (half[:, None] * w[None, :])))


def rwk_moments(
    l1: float,
    cfg: ScenarioConfig,
    law: DistanceLaw,
    unnormalized: bool = False,
) -> MomentPair:
    """Conditional moments for fixed-step movers, nearest one at distance l1.

    The minor law is the stationary law truncated to [l1, D] and renormalized
    by its remaining mass; unnormalized=True leaves the truncated density as
    is (it then integrates to less than one; for comparison only).
    """
    d = cfg.radius
    if not 0 < l1 < d:
        raise ValueError(f"need 0 < l1 < radius (got l1={l1}, radius={d})")
    if cfg.n_infected <= 1:
        return MomentPair(0.0, 0.0)
    ev, ev2 = _volume_moments(cfg)
    eta = cfg.path_loss
    mass = 1.0 - float(law.cdf(l1))
    if mass < 1e-9 and not unnormalized:
        # numerically exhausted tail: every minor is pinned at ~l1
        return _pair(cfg.n_infected, ev, ev2, l1 ** (-eta), l1 ** (-2.0 * eta))
    w_step = law.meta.get("W", 0.0)
    brk = (w_step, 2.0 * w_step, d - w_step)
    t1 = _panel_quad(lambda t: t ** (-eta) * law.pdf(t), l1, d, brk)
    t2 = _panel_quad(lambda t: t ** (-2.0 * eta) * law.pdf(t), l1, d, brk)
    if unnormalized:
        mass = 1.0
    return _pair(cfg.n_infected, ev, ev2, t1 / mass, t2 / mass)


def rwp_moments(u1: float, cfg: ScenarioConfig) -> MomentPair:
    """Conditional moments for waypoint movers, nearest one at normalized
    distance u1; strengths are evaluated at physical distance u*D."""
    if not 0 < u1 < 1:
        raise ValueError(f"need 0 < u1 < 1 (got {u1})")
    if cfg.n_infected <= 1:
        return MomentPair(0.0, 0.0)
    ev, ev2 = _volume_moments(cfg)
    eta = cfg.path_loss
    d = cfg.radius
    den = _panel_quad(lambda u: u * rwp_h(u), u1, 1.0)
    n1 = _panel_quad(lambda u: u ** (1.0 - eta) * rwp_h(u), u1, 1.0)
    n2 = _panel_quad(lambda u: u ** (1.0 - 2.0 * eta) * rwp_h(u), u1, 1.0)
    ex = d ** (-eta) * n1 / den
    ex2 = d ** (-2.0 * eta) * n2 / den
    return _pair(cfg.n_infected, ev, ev2, ex, ex2)
