"""Attractor detection and basins for the stroboscopic map.

Lyapunov spectrum estimation with per-iterate QR renormalization, a
stopping protocol that separates sinks from strange attractors, the
Kaplan-Yorke dimension, attractor sidedness, and basin-of-attraction
grids over the phase plane.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .dynamics import PhaseState
from .integrate import (DEFAULT_CONFIG, EscapeError, integrate_with_tangents,
                        poincare_step)

LN2 = math.log(2.0)
X_BAND = 0.05


@dataclass(frozen=True)
class LyapunovConfig:
    """Stopping protocol for exponent estimation.

    After ``n_transient`` discarded iterates, the largest-exponent running
    estimate is checked every ``n_fit`` iterates: a negative estimate
    stops with verdict 'sink'; a positive estimate whose fitted
    log-modulus slope is flatter than ``slope_tol`` per iterate stops with
    verdict 'strange_attractor'; past ``max_iters`` the run is undecided.
    """

    n_transient: int = 200
    n_fit: int = 100
    slope_tol: float = 1e-6
    max_iters: int = 10000


DEFAULT_LYAPUNOV = LyapunovConfig()


@dataclass
class LyapunovReport:
    """Outcome of one exponent-estimation run.

    ``exponents`` are in log2 per map iterate, sorted descending;
    ``per_time`` holds the same values in log2 per unit time (divide by
    the forcing period), the scale on which reported growth rates of
    roughly 0.2 for weakly damped strange attractors live.  ``dimension``
    and ``sidedness`` are filled only for strange attractors.
    """

    exponents: tuple
    verdict: str
    iterations: int
    dimension: float = None
    sidedness: str = None
    exponent_sum: float = None
    per_time: tuple = field(default=None)

    def to_dict(self):
        return {
            "exponents_log2_per_iterate": list(self.exponents),
            "exponents_log2_per_time": list(self.per_time) if self.per_time else None,
            "verdict": self.verdict,
            "iterations": self.iterations,
            "dimension": self.dimension,
            "sidedness": self.sidedness,
            "exponent_sum_log2_per_iterate": self.exponent_sum,
        }


def lyapunov_dimension(exponents):
    """Kaplan-Yorke dimension of a descending exponent spectrum.

    The largest k with a nonnegative partial sum, plus the fractional
    interpolation into the next exponent.  A contracting spectrum gives 0;
    a spectrum whose full sum is still nonnegative saturates at its
    length.
    """
    lams = list(exponents)
    if not lams:
        raise ValueError("need at least one exponent")
    if lams[0] < 0.0:
        return 0.0
    partial = 0.0
    for k, lam in enumerate(lams):
        if partial + lam < 0.0:
            return k + partial / abs(lam)
        partial += lam
    return float(len(lams))


def classify_sidedness(xs, x_band=X_BAND):
    """Which half plane an attractor sample occupies.

    ``xs`` is a sequence of x coordinates (or PhaseStates).  'left' if the
    sample never exceeds x_band, 'right' if it never drops below -x_band,
    otherwise 'two_sided'.
    """
    arr = np.asarray([s.x if isinstance(s, PhaseState) else s for s in xs],
                     dtype=float)
    if arr.size == 0:
        raise ValueError("empty orbit sample")
    if np.all(arr <= x_band):
        return "left"
    if np.all(arr >= -x_band):
        return "right"
    return "two_sided"


def _transient(s, theta, n, p, icfg):
    cur = s
    for _ in range(n):
        cur = poincare_step(cur, theta, p, icfg)
    return cur


def lyapunov_run(s0, p, lcfg=DEFAULT_LYAPUNOV, icfg=DEFAULT_CONFIG,
                 theta=0.0, extended=False, min_orbit=1000):
    """Estimate the Lyapunov spectrum of the orbit through s0.

    Runs the tangent dynamics one forcing period at a time with QR
    renormalization each iterate and applies the LyapunovConfig stopping
    protocol to the running largest-exponent estimate.  With ``extended``
    a third tangent direction along the flow is carried; its exponent is
    zero for any bounded orbit and serves as a consistency check.
    """
    m = 3 if extended else 2
    d = 3 if extended else 2
    try:
        cur = _transient(s0, theta, lcfg.n_transient, p, icfg)
    except EscapeError:
        return LyapunovReport(exponents=(), verdict="escaped", iterations=0)
    frame = np.eye(d)[:, :m]
    acc = np.zeros(m)
    T = p.forcing_period
    t = theta / p.omega
    history = []
    orbit_x = []
    n = 0
    verdict = "undecided"
    while n < lcfg.max_iters:
        try:
            cur, frame, growth = integrate_with_tangents(
                cur, frame, t, t + T, p, icfg)
        except EscapeError:
            return LyapunovReport(exponents=(), verdict="escaped", iterations=n)
        t += T
        acc += growth
        n += 1
        orbit_x.append(cur.x)
        lam1 = acc[0] / (n * LN2)
        history.append(lam1)
        if n % lcfg.n_fit == 0:
            if lam1 < 0.0:
                verdict = "sink"
                break
            window = np.asarray(history[-lcfg.n_fit:])
            logs = np.log10(np.abs(window) + 1e-300)
            slope = np.polyfit(np.arange(len(window)), logs, 1)[0]
            if abs(slope) < lcfg.slope_tol:
                verdict = "strange_attractor"
                break
    lams = tuple(sorted((acc / (n * LN2)).tolist(), reverse=True))
    report = LyapunovReport(
        exponents=lams, verdict=verdict, iterations=n,
        exponent_sum=float(sum(lams)),
        per_time=tuple(v / T for v in lams))
    if verdict == "strange_attractor":
        report.dimension = lyapunov_dimension(lams)
        try:
            while len(orbit_x) < min_orbit:
                cur = poincare_step(cur, theta, p, icfg)
                orbit_x.append(cur.x)
        except EscapeError:
            pass
        report.sidedness = classify_sidedness(orbit_x)
    return report


@dataclass
class BasinGrid:
    """Per-cell attractor labels over a rectangle of initial conditions."""

    xs: np.ndarray
    ys: np.ndarray
    labels: np.ndarray  # (ny, nx) of label strings
    fractions: dict

    LABELS = ("left_attractor", "right_attractor", "two_sided_attractor",
              "escaped", "unresolved")


def _classify_cell(s, theta, p, icfg, n_transient, n_sample, max_iters,
                   x_band):
    cur = s
    n = 0
    try:
        for _ in range(n_transient):
            cur = poincare_step(cur, theta, p, icfg)
            n += 1
        while n < max_iters:
            xs = []
            for _ in range(n_sample):
                cur = poincare_step(cur, theta, p, icfg)
                xs.append(cur.x)
                n += 1
            side = classify_sidedness(xs, x_band)
            if side == "left":
                return "left_attractor"
            if side == "right":
                return "right_attractor"
        return "two_sided_attractor"
    except EscapeError:
        return "escaped"


def basin_map(p, icfg=DEFAULT_CONFIG, theta=0.0, nx=33, ny=33,
              domain=(-2.0, 2.0, -2.0, 2.0), offset=(0.0, 0.0),
              n_transient=200, n_sample=100, max_iters=2000, x_band=X_BAND):
    """Label a grid of initial conditions by the attractor reached.

    Cell centers are iterated past a transient and classified by the half
    plane their tail occupies; tails still visiting both sides are given
    more iterates, up to ``max_iters``, before being labeled two sided.
    ``offset`` shifts all cell centers (in cell units) for reproducibility
    checks against grid placement.
    """
    x0, x1, y0, y1 = domain
    dx = (x1 - x0) / nx
    dy = (y1 - y0) / ny
    xs = x0 + (np.arange(nx) + 0.5 + offset[0]) * dx
    ys = y0 + (np.arange(ny) + 0.5 + offset[1]) * dy
    labels = np.empty((ny, nx), dtype=object)
    for iy, y in enumerate(ys):
        for ix, x in enumerate(xs):
            labels[iy, ix] = _classify_cell(
                PhaseState(x, y), theta, p, icfg,
                n_transient, n_sample, max_iters, x_band)
    total = nx * ny
    fractions = {name: float(np.sum(labels == name)) / total
                 for name in BasinGrid.LABELS}
    return BasinGrid(xs=xs, ys=ys, labels=labels, fractions=fractions)


def basin_fraction_sweep(epsilon_values, p_shape, icfg=DEFAULT_CONFIG,
                         theta=0.0, annotate_pairs=None, **grid_kw):
    """Basin fractions versus forcing strength, with bifurcation markers.

    Returns (rows, annotations): one row of fractions per epsilon, and the
    transition-1 secondary bifurcation epsilons of the requested pairs
    (default all four) inside the swept range, for marking discontinuities.
    """
    import dataclasses

    from . import smf

    rows = []
    for eps in epsilon_values:
        p = dataclasses.replace(p_shape, epsilon=float(eps))
        grid = basin_map(p, icfg, theta, **grid_kw)
        row = {"epsilon": float(eps)}
        row.update(grid.fractions)
        rows.append(row)
    annotations = []
    pairs = annotate_pairs or list(smf.Pair)
    lo, hi = min(epsilon_values), max(epsilon_values)
    for pair in pairs:
        for branch_i in (1, 2):
            try:
                seed = smf.seed_point(pair, 1, branch_i, p_shape)
                bif = smf.refine_secondary_bifurcation(seed, pair, 1, p_shape,
                                                       branch_i=branch_i)
            except Exception:
                continue
            if lo <= bif.epsilon <= hi:
                annotations.append({"pair": pair.name.lower(),
                                    "branch": branch_i,
                                    "epsilon": float(bif.epsilon)})
    return rows, annotations
