"""Distance laws over the disk cell.

Uniform-in-disk, nearest-of-N order statistics, conditional minor laws, the
random-walk endpoint law (lens-area conditional CDF marginalized over the
start distance), and the random-waypoint polynomial law with its exact
elliptic-integral form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.interpolate import PchipInterpolator

from .scenario import RandomWalk, RandomWaypoint, ScenarioConfig

__all__ = [
    "DistanceLaw",
    "disk_uniform_law",
    "nearest_of_n",
    "minor_given_nearest_disk",
    "rwk_conditional_cdf",
    "rwk_marginal_cdf",
    "rwk_marginal_pdf",
    "rwk_law",
    "rwp_law",
    "rwp_h",
    "rwp_exact_pdf",
    "rwp_minor_given_nearest",
    "stationary_law",
    "tabulate",
]

# Random-waypoint polynomial coefficients (normalized distance u = r/D):
# pdf = sum B_i u^beta_i, cdf = sum C_j u^gamma_j; the coefficient sums are
# exactly 0 and 1 respectively.
RWP_B = np.array([324.0, -420.0, 96.0]) / 73.0
RWP_BETA = np.array([1.0, 3.0, 5.0])
RWP_C = np.array([162.0, -105.0, 16.0]) / 73.0
RWP_GAMMA = np.array([2.0, 4.0, 6.0])

# Mass of u*h(u) on (0,1]: integral of 2u(1-u^2) * 2E(u^2) du, closed form.
RWP_UH_MASS = 64.0 / 45.0


@dataclass(frozen=True)
class DistanceLaw:
    """A distance distribution: support, pdf/cdf/ppf callables, sampler.

    Immutable; all callables are vectorized over numpy arrays.  Sampling is
    inverse-CDF through an externally supplied Generator, so the caller owns
    thread confinement of randomness.
    """

    lo: float
    hi: float
    pdf: Callable
    cdf: Callable
    ppf: Callable
    name: str = ""
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def support(self):
        return (self.lo, self.hi)

    def sample(self, rng, size=None):
        return self.ppf(rng.random(size))


def _clamped(func, lo, hi, outside_lo, outside_hi):
    def wrapped(x):
        x = np.asarray(x, dtype=float)
        out = np.where(x < lo, outside_lo, np.where(x > hi, outside_hi, func(np.clip(x, lo, hi))))
        return out if out.ndim else float(out)

    return wrapped


def _grid_law(x, pdf_vals, cdf_vals, name="", meta=None) -> DistanceLaw:
    """Build a DistanceLaw from tabulated pdf/cdf values via monotone
    (PCHIP) interpolation; the ppf inverts the tabulated cdf."""
    x = np.asarray(x, dtype=float)
    cdf_vals = np.maximum.accumulate(np.clip(cdf_vals, 0.0, 1.0))
    pdf_i = PchipInterpolator(x, np.maximum(pdf_vals, 0.0))
    cdf_i = PchipInterpolator(x, cdf_vals)
    q, idx = np.unique(cdf_vals, return_index=True)
    ppf_i = PchipInterpolator(q, x[idx]) if len(q) > 1 else (lambda u: np.full_like(u, x[0]))

    lo, hi = float(x[0]), float(x[-1])

    def ppf(u):
        u = np.asarray(u, dtype=float)
        out = ppf_i(np.clip(u, q[0], q[-1]))
        out = np.clip(out, lo, hi)
        return out if out.ndim else float(out)

    return DistanceLaw(
        lo=lo,
        hi=hi,
        pdf=_clamped(pdf_i, lo, hi, 0.0, 0.0),
        cdf=_clamped(cdf_i, lo, hi, 0.0, 1.0),
        ppf=ppf,
        name=name,
        meta=meta or {},
    )


def disk_uniform_law(d: float) -> DistanceLaw:
    """Distance from the center to a point uniform in a disk of radius d:
    pdf 2r/d^2 on (0, d]."""
    if d <= 0:
        raise ValueError(f"disk radius must be positive (got {d})")
    d2 = d * d

    def pdf(r):
        r = np.asarray(r, dtype=float)
        out = np.where((r >= 0) & (r <= d), 2.0 * r / d2, 0.0)
        return out if out.ndim else float(out)

    def cdf(r):
        r = np.asarray(r, dtype=float)
        out = np.clip(r, 0.0, d) ** 2 / d2
        out = np.where(r < 0, 0.0, out)
        return out if out.ndim else float(out)

    def ppf(u):
        u = np.asarray(u, dtype=float)
        out = d * np.sqrt(np.clip(u, 0.0, 1.0))
        return out if out.ndim else float(out)

    return DistanceLaw(0.0, d, pdf, cdf, ppf, name=f"disk_uniform(D={d:g})")


def nearest_of_n(base: DistanceLaw, n: int) -> DistanceLaw:
    """Law of the minimum of n i.i.d. draws from base:
    pdf n(1-F)^(n-1) f, cdf 1-(1-F)^n."""
    if n < 1:
        raise ValueError(f"n must be >= 1 (got {n})")
    if n == 1:
        return base

    def pdf(x):
        x = np.asarray(x, dtype=float)
        s = 1.0 - np.asarray(base.cdf(x), dtype=float)
        out = n * np.power(s, n - 1) * np.asarray(base.pdf(x), dtype=float)
        return out if out.ndim else float(out)

    def cdf(x):
        x = np.asarray(x, dtype=float)
        f = np.clip(np.asarray(base.cdf(x), dtype=float), 0.0, 1.0)
        fc = np.minimum(f, np.nextafter(1.0, 0.0))
        out = np.where(f >= 1.0, 1.0, -np.expm1(n * np.log1p(-fc)))
        return out if out.ndim else float(out)

    def ppf(u):
        u = np.asarray(u, dtype=float)
        uc = np.clip(u, 0.0, 1.0 - 1e-16)
        # quantile of the base at 1-(1-u)^(1/n), computed without cancellation
        qb = -np.expm1(np.log1p(-uc) / n)
        out = base.ppf(np.where(u >= 1.0, 1.0, qb))
        return out if out.ndim else float(out)

    return DistanceLaw(base.lo, base.hi, pdf, cdf, ppf, name=f"nearest_of_{n}({base.name})", meta=dict(base.meta))


def minor_given_nearest_disk(r1: float, d: float) -> DistanceLaw:
    """Uniform-disk distance conditioned on exceeding the nearest distance:
    pdf 2r/(d^2 - r1^2) on [r1, d]."""
    if not 0 <= r1 < d:
        raise ValueError(f"need 0 <= r1 < d (got r1={r1}, d={d})")
    span = d * d - r1 * r1

    def pdf(r):
        r = np.asarray(r, dtype=float)
        out = np.where((r >= r1) & (r <= d), 2.0 * r / span, 0.0)
        return out if out.ndim else float(out)

    def cdf(r):
        r = np.asarray(r, dtype=float)
        rc = np.clip(r, r1, d)
        out = np.where(r < r1, 0.0, (rc * rc - r1 * r1) / span)
        return out if out.ndim else float(out)

    def ppf(u):
        u = np.asarray(u, dtype=float)
        out = np.sqrt(r1 * r1 + np.clip(u, 0.0, 1.0) * span)
        return out if out.ndim else float(out)

    return DistanceLaw(r1, d, pdf, cdf, ppf, name=f"disk_minor(r1={r1:g},D={d:g})")


# ---------------------------------------------------------------------------
# Random-walk endpoint law
# ---------------------------------------------------------------------------

_ARCCOS_SLACK = 1e-12


def _safe_arccos(arg):
    """arccos with a 1e-12 clamp at the boundary; larger excursions signal
    inconsistent geometry inputs."""
    arg = np.asarray(arg, dtype=float)
    bad = (arg > 1.0 + _ARCCOS_SLACK) | (arg < -1.0 - _ARCCOS_SLACK)
    if np.any(bad):
        raise ValueError("arccos argument outside [-1, 1]: inconsistent lens geometry")
    return np.arccos(np.clip(arg, -1.0, 1.0))


def rwk_conditional_cdf(l, z, w: float):
    """P(endpoint distance <= l | start distance z) for one fixed-length step.

    The mover starts at distance z from the center and lands uniformly in the
    disk of radius w around its start, so the conditional CDF is the covered
    fraction of that disk: the lens area over pi w^2 in the overlap band, and
    l^2/w^2 (fully covered circle) or 0/1 outside it.
    """
    if w <= 0:
        raise ValueError(f"step length must be positive (got {w})")
    l = np.asarray(l, dtype=float)
    z = np.asarray(z, dtype=float)
    if np.any(l < 0) or np.any(z < 0):
        raise ValueError("distances must be nonnegative")
    l, z = np.broadcast_arrays(l, z)
    out = np.zeros(l.shape)

    near = z < w  # start within one step of the center
    out[near & (l < w - z)] = (l[near & (l < w - z)] / w) ** 2
    out[l >= z + w] = 1.0

    lens = (l >= np.abs(z - w)) & (l < z + w) & (l > 0) & (z > 0)
    if np.any(lens):
        ll = l[lens]
        zz = z[lens]
        t1 = _safe_arccos((w * w + zz * zz - ll * ll) / (2.0 * w * zz))
        t2 = _safe_arccos((ll * ll + zz * zz - w * w) / (2.0 * ll * zz))
        area = w * w * t1 + ll * ll * t2 - zz * w * np.sin(t1)
        out[lens] = np.clip(area / (math.pi * w * w), 0.0, 1.0)
    return out if out.ndim else float(out)


def _lens_theta2(l, z, w):
    """Half-angle of the arc of circle(center, l) inside the step disk; the
    l-derivative of the lens area is 2*l*theta2."""
    return _safe_arccos((l * l + z * z - w * w) / (2.0 * l * z))


@lru_cache(maxsize=8)
def _gl_nodes(order: int):
    x, wts = np.polynomial.legendre.leggauss(order)
    return x, wts


def _smooth_panel(lo, hi, order=96):
    """Gauss-Legendre nodes/weights on [lo, hi] under a smoothstep map that
    kills square-root endpoint behavior."""
    x, wts = _gl_nodes(order)
    s = 0.5 * (x + 1.0)
    zmap = lo + (hi - lo) * (s * s * (3.0 - 2.0 * s))
    wmap = wts * 0.5 * (hi - lo) * (6.0 * s * (1.0 - s))
    return zmap, wmap


def rwk_marginal_cdf(l, d: float, w: float, order: int = 96):
    """CDF of the endpoint distance after one step from a uniform start,
    marginalized over the start distance (density 2z/d^2) by quadrature.

    Support reaches d+w: steps taken near the rim may end outside the disk,
    so the value at l=d is strictly below 1.
    """
    scalar = np.isscalar(l)
    l = np.atleast_1d(np.asarray(l, dtype=float))
    out = np.empty(l.shape)
    for i, li in enumerate(l):
        if li <= 0:
            out[i] = 0.0
            continue
        a = min(max(li - w, 0.0), d)  # z below this: step disk fully within l
        acc = a * a
        if li < w:
            c = min(w - li, d)
            acc += (li * li) / (w * w) * c * c
        lo = min(abs(li - w), d)
        hi = min(li + w, d)
        if hi > lo:
            zs, wts = _smooth_panel(lo, hi, order)
            t1 = _safe_arccos((w * w + zs * zs - li * li) / (2.0 * w * zs))
            t2 = _lens_theta2(li, zs, w)
            area = w * w * t1 + li * li * t2 - zs * w * np.sin(t1)
            acc += 2.0 * np.sum(np.clip(area, 0.0, math.pi * w * w) / (math.pi * w * w) * zs * wts)
        out[i] = acc / (d * d)
    out = np.clip(out, 0.0, 1.0)
    return float(out[0]) if scalar else out


def rwk_marginal_pdf(l, d: float, w: float, order: int = 96):
    """Endpoint-distance density, differentiating the conditional CDF under
    the marginalization integral (lens-arc identity)."""
    scalar = np.isscalar(l)
    l = np.atleast_1d(np.asarray(l, dtype=float))
    out = np.empty(l.shape)
    for i, li in enumerate(l):
        if li <= 0:
            out[i] = 0.0
            continue
        acc = 0.0
        if li < w:
            c = min(w - li, d)
            acc += (2.0 * li) / (w * w) * (c * c) / 2.0
        lo = min(abs(li - w), d)
        hi = min(li + w, d)
        if hi > lo:
            zs, wts = _smooth_panel(lo, hi, order)
            t2 = _lens_theta2(li, zs, w)
            acc += np.sum((2.0 * li * t2) / (math.pi * w * w) * zs * wts)
        out[i] = 2.0 * acc / (d * d)
    out = np.maximum(out, 0.0)
    return float(out[0]) if scalar else out


def _rwk_grid(d, w, n_base):
    lin = np.linspace(0.0, d, n_base)
    low = d * np.geomspace(1e-7, lin[1] / d if n_base > 1 else 1e-3, 48)
    brk = np.array([v for v in (w, 2.0 * w, d - w, abs(d - 2.0 * w)) if 0.0 < v < d])
    grid = np.unique(np.concatenate([lin, low, brk]))
    return grid


@lru_cache(maxsize=16)
def _rwk_law_cached(d: float, w: float, n_grid: int) -> DistanceLaw:
    grid = _rwk_grid(d, w, n_grid)
    cdf_raw = rwk_marginal_cdf(grid, d, w)
    pdf_raw = rwk_marginal_pdf(grid, d, w)
    mass = float(cdf_raw[-1])  # endpoint-in-disk probability
    law = _grid_law(
        grid,
        pdf_raw / mass,
        cdf_raw / mass,
        name=f"rwk(D={d:g},W={w:g})",
        meta={"in_disk_mass": mass, "D": d, "W": w},
    )
    return law


def rwk_law(d: float, w: float, n_grid: int = 2049) -> DistanceLaw:
    """Stationary distance law for fixed-step movers, conditioned on the
    endpoint lying inside the disk.

    The raw marginal keeps some mass on (d, d+w] (steps leaving the disk);
    the trajectory generator confines movers, so the law is renormalized to
    [0, d].  The raw in-disk mass is reported in meta["in_disk_mass"] and
    the unnormalized marginal stays available via rwk_marginal_cdf/pdf.
    """
    if not 0 < w < d:
        raise ValueError(f"need 0 < w < d (got w={w}, d={d})")
    return _rwk_law_cached(float(d), float(w), int(n_grid))


# ---------------------------------------------------------------------------
# Random-waypoint law
# ---------------------------------------------------------------------------


def rwp_h(u, order: int = 64):
    """h(u) = 2(1-u^2) * integral_0^pi sqrt(1 - u^2 cos^2 phi) dphi by
    fixed-order Gauss-Legendre over phi."""
    u = np.asarray(u, dtype=float)
    x, wts = _gl_nodes(order)
    phi = 0.5 * math.pi * (x + 1.0)
    wphi = 0.5 * math.pi * wts
    c2 = np.cos(phi) ** 2
    integral = np.sqrt(1.0 - np.multiply.outer(u * u, c2)) @ wphi
    out = 2.0 * (1.0 - u * u) * integral
    return out if out.ndim else float(out)


def rwp_exact_pdf(u):
    """Exact waypoint-model pdf over normalized distance: u*h(u) divided by
    its mass 64/45."""
    u = np.asarray(u, dtype=float)
    out = u * rwp_h(u) / RWP_UH_MASS
    return out if out.ndim else float(out)


@lru_cache(maxsize=16)
def _rwp_ppf_table(n_grid: int = 4097):
    u = np.linspace(0.0, 1.0, n_grid)
    q = np.polyval([RWP_C[2], 0.0, RWP_C[1], 0.0, RWP_C[0], 0.0, 0.0], u)
    q = np.maximum.accumulate(np.clip(q, 0.0, 1.0))
    qq, idx = np.unique(q, return_index=True)
    return PchipInterpolator(qq, u[idx]), qq[0], qq[-1]


def rwp_law(d: float) -> DistanceLaw:
    """Waypoint-model stationary distance law over physical distance r,
    polynomial form: pdf (1/d) * sum B_i (r/d)^beta_i on (0, d]."""
    if d <= 0:
        raise ValueError(f"disk radius must be positive (got {d})")

    def pdf(r):
        r = np.asarray(r, dtype=float)
        u = r / d
        val = (RWP_B[0] * u + RWP_B[1] * u**3 + RWP_B[2] * u**5) / d
        out = np.where((r >= 0) & (r <= d), np.maximum(val, 0.0), 0.0)
        return out if out.ndim else float(out)

    def cdf(r):
        r = np.asarray(r, dtype=float)
        u = np.clip(r / d, 0.0, 1.0)
        u2 = u * u
        out = np.where(r < 0, 0.0, (RWP_C[0] + (RWP_C[1] + RWP_C[2] * u2) * u2) * u2)
        out = np.clip(out, 0.0, 1.0)
        return out if out.ndim else float(out)

    def ppf(q):
        q = np.asarray(q, dtype=float)
        interp, qlo, qhi = _rwp_ppf_table()
        out = d * np.clip(interp(np.clip(q, qlo, qhi)), 0.0, 1.0)
        return out if out.ndim else float(out)

    return DistanceLaw(0.0, d, pdf, cdf, ppf, name=f"rwp(D={d:g})")


@lru_cache(maxsize=64)
def _rwp_minor_cached(u1: float, n_grid: int) -> DistanceLaw:
    grid = np.linspace(u1, 1.0, n_grid)
    g = grid * rwp_h(grid)
    gi = PchipInterpolator(grid, g)
    G = gi.antiderivative()
    mass = float(G(1.0) - G(u1))
    cdf_vals = (G(grid) - G(u1)) / mass
    return _grid_law(grid, g / mass, cdf_vals, name=f"rwp_minor(u1={u1:g})", meta={"mass_uh": mass})


def rwp_minor_given_nearest(u1: float, n_grid: int = 1025) -> DistanceLaw:
    """Waypoint-model distance of a minor individual given the nearest is at
    normalized distance u1: pdf u*h(u) renormalized on [u1, 1]."""
    if not 0 < u1 < 1:
        raise ValueError(f"need 0 < u1 < 1 (got {u1})")
    return _rwp_minor_cached(float(u1), int(n_grid))


def stationary_law(cfg: ScenarioConfig) -> DistanceLaw:
    """Stationary center-distance law of cfg's mobility model; random
    direction leaves the uniform law unchanged."""
    m = cfg.mobility
    if isinstance(m, RandomWalk):
        return rwk_law(cfg.radius, m.step)
    if isinstance(m, RandomWaypoint):
        return rwp_law(cfg.radius)
    return disk_uniform_law(cfg.radius)


def tabulate(law: DistanceLaw, n: int = 512) -> np.ndarray:
    """Tabulate a law on n points: columns x, pdf, cdf (dump-law support)."""
    x = np.linspace(law.lo, law.hi, n)
    return np.column_stack([x, law.pdf(x), law.cdf(x)])
