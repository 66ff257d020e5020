"""Invariant-manifold geometry of the saddle on the stroboscopic section.

Grows the one-dimensional stable and unstable manifolds of the origin by
iterating an adaptively refined fundamental domain, locates primary
intersection points (PIPs), slices the tangle into lobes, and measures
structural transit indices by mapping lobe boundaries forward.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import geometry
from .dynamics import PhaseState, hamiltonian
from .integrate import (DEFAULT_CONFIG, EscapeError, integrate,
                        linearize_at_origin, poincare_step)

SEED_DISTANCE = 1e-7
MAX_GAP = 1e-3
MAX_ANGLE = 0.2
TANGENCY_ANGLE = 1e-3


@dataclass
class ManifoldCurve:
    """Ordered sample of one branch of an invariant manifold.

    Points run outward from the saddle.  ``u`` is the fundamental-domain
    parameter: integer part counts map applications of the seed segment.
    """

    kind: str
    side: str
    theta: float
    points: np.ndarray
    u: np.ndarray
    truncated: bool = False
    arcs: np.ndarray = field(init=False)

    def __post_init__(self):
        self.arcs = geometry.polyline_arclength(self.points)

    @property
    def length(self):
        return float(self.arcs[-1])

    def slice_by_arc(self, a, b, endpoints=None):
        """Vertices with arclength strictly inside (a, b), plus exact ends.

        ``endpoints`` optionally supplies the exact boundary points (e.g.
        crossing locations) to prepend/append.
        """
        mask = (self.arcs > a) & (self.arcs < b)
        mid = self.points[mask]
        parts = []
        if endpoints is not None:
            parts.append(np.asarray(endpoints[0], float)[None, :])
        parts.append(mid)
        if endpoints is not None:
            parts.append(np.asarray(endpoints[1], float)[None, :])
        return np.concatenate(parts, axis=0)


def _refine_interval(pts, params, point_fn, max_gap, max_angle, min_dp, budget):
    """Insert midpoints until gap and turning-angle criteria hold.

    ``pts``/``params`` are parallel lists covering one contiguous stretch;
    refinement never moves existing entries.  Returns True if the point
    budget was exhausted.
    """
    i = 0
    while i < len(pts) - 1:
        if len(pts) >= budget:
            return True
        a = np.asarray(pts[i])
        b = np.asarray(pts[i + 1])
        gap = math.hypot(*(b - a))
        need = gap > max_gap
        if not need and i > 0:
            prev = np.asarray(pts[i - 1])
            v0 = a - prev
            v1 = b - a
            n0, n1 = math.hypot(*v0), math.hypot(*v1)
            if n0 > 1e-14 and n1 > 1e-14:
                c = np.dot(v0, v1) / (n0 * n1)
                if math.acos(min(1.0, max(-1.0, c))) > max_angle:
                    need = True
        if need and params[i + 1] - params[i] > min_dp:
            pm = 0.5 * (params[i] + params[i + 1])
            pts.insert(i + 1, point_fn(pm))
            params.insert(i + 1, pm)
            if i > 0:
                i -= 1  # re-check the angle at the left neighbor
            continue
        i += 1
    return False


def grow_manifold(kind, side, p, cfg=DEFAULT_CONFIG, theta=0.0, arc_budget=9.0,
                  max_gap=MAX_GAP, max_angle=MAX_ANGLE, d0=SEED_DISTANCE,
                  max_points=40000, min_du=1e-9):
    """Grow one branch of the saddle's stable or unstable manifold.

    The seed segment lies along the linear eigenvector at distance ``d0``
    from the origin, geometrically parameterized so that one application of
    the stroboscopic map (inverse map for the stable manifold) advances the
    parameter u by one.  Levels are added and refined until the curve
    reaches ``arc_budget`` of arclength, escapes the integration box, or
    exhausts ``max_points``.
    """
    if kind not in ("stable", "unstable"):
        raise ValueError("kind must be 'stable' or 'unstable'")
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    _, vals, vecs = linearize_at_origin(p, cfg, theta)
    if kind == "unstable":
        growth = abs(vals[0])
        v = vecs[:, 0]
        direction = 1
    else:
        growth = 1.0 / abs(vals[1])
        v = vecs[:, 1]
        direction = -1
    if (side == "right") != (v[0] > 0):
        v = -v

    cache = {}

    def point(u):
        got = cache.get(u)
        if got is not None:
            return got
        if u < 1.0:
            pt = np.array([d0 * growth ** u * v[0], d0 * growth ** u * v[1]])
        else:
            base = point(u - 1.0)
            s = poincare_step(PhaseState(base[0], base[1]), theta, p, cfg,
                              direction=direction)
            pt = np.array([s.x, s.y])
        cache[u] = pt
        return pt

    pts = [point(0.0)]
    params = [0.0]
    truncated = False
    level = 0
    while True:
        # extend by one level, mapping the previous level's endpoint chain
        new_params = [q + 1.0 for q in params if level - 1.0 <= q < level] \
            if level > 0 else [1.0]
        try:
            for q in new_params:
                pts.append(point(q))
                params.append(q)
        except EscapeError:
            truncated = True
        try:
            full = _refine_interval(pts, params, point, max_gap, max_angle,
                                    min_du, max_points)
        except EscapeError:
            truncated = True
            full = False
        arcs = geometry.polyline_arclength(pts)
        if truncated or full or arcs[-1] >= arc_budget:
            break
        level += 1
        if level > 200:
            truncated = True
            break
    return ManifoldCurve(kind=kind, side=side, theta=theta,
                         points=np.asarray(pts), u=np.asarray(params),
                         truncated=truncated or full)


@dataclass(frozen=True)
class Pip:
    """A manifold crossing located by arclength along both curves."""

    point: tuple
    u_arc: float
    s_arc: float
    angle: float
    tangential: bool


def find_pips(u_curve, s_curve, angle_tol=TANGENCY_ANGLE, primary_only=True):
    """Crossings of an unstable with a stable manifold curve.

    Primary intersection points are the Pareto-minimal crossings in the
    (unstable-arclength, stable-arclength) plane: no other crossing is
    closer to the saddle along both manifolds.  Returned ordered by
    unstable arclength.
    """
    raw = geometry.polyline_crossings(u_curve.points, s_curve.points)
    pips = []
    for c in raw:
        i, j = c["i"], c["j"]
        ua = u_curve.arcs[i] + c["s"] * (u_curve.arcs[i + 1] - u_curve.arcs[i])
        sa = s_curve.arcs[j] + c["t"] * (s_curve.arcs[j + 1] - s_curve.arcs[j])
        pips.append(Pip(point=c["point"], u_arc=ua, s_arc=sa,
                        angle=c["angle"], tangential=c["angle"] < angle_tol))
    pips.sort(key=lambda q: q.u_arc)
    if not primary_only:
        return pips
    primary = []
    best = math.inf
    for q in pips:
        if q.s_arc < best:
            primary.append(q)
            best = q.s_arc
    return primary


@dataclass
class Lobe:
    """Region bounded by manifold arcs between two adjacent PIPs.

    ``kind`` is 'inner' for the family whose content transits the well
    interior, 'outer' for the family carried around the outside, or None
    when not yet classified (see ``classify_transit``).
    """

    boundary: np.ndarray
    pips: tuple
    area: float
    kind: str = None
    u_mid: np.ndarray = None


def extract_lobes(u_curve, s_curve, pips):
    """Close off the lobes between consecutive primary intersection points.

    Each boundary is the unstable arc from one PIP to the next joined with
    the stable arc back.  ``u_mid`` records the unstable-arc midpoint,
    used as a representative of the lobe's transport class.
    """
    lobes = []
    for a, b in zip(pips[:-1], pips[1:]):
        u_part = u_curve.slice_by_arc(a.u_arc, b.u_arc,
                                      endpoints=(a.point, b.point))
        s_lo, s_hi = sorted((a.s_arc, b.s_arc))
        s_part = s_curve.slice_by_arc(s_lo, s_hi)
        # orient the stable arc to continue from the unstable arc's end
        if len(s_part) > 1:
            end = u_part[-1]
            if (np.hypot(*(s_part[0] - end)) > np.hypot(*(s_part[-1] - end))):
                s_part = s_part[::-1]
        boundary = np.concatenate([u_part, s_part], axis=0)
        area = geometry.shoelace_area(boundary)
        mid_arc = 0.5 * (a.u_arc + b.u_arc)
        i = min(max(int(np.searchsorted(u_curve.arcs, mid_arc)) - 1, 0),
                len(u_curve.points) - 1)
        lobes.append(Lobe(boundary=boundary, pips=(a, b), area=area,
                          u_mid=u_curve.points[i].copy()))
    return lobes


def classify_transit(lobe, side, p, cfg=DEFAULT_CONFIG, theta=0.0,
                     max_periods=120):
    """Transport class of a lobe: 'inner', 'outer', or None if undecided.

    Follows the lobe's unstable-arc midpoint forward in continuous time.
    Content that crosses to the opposite well is carried around the
    outside of the separatrix ('outer'); content that returns to the
    saddle neighborhood on its own side circulated the well interior
    ('inner').
    """
    sgn = 1.0 if side == "right" else -1.0
    s = PhaseState(lobe.u_mid[0], lobe.u_mid[1])
    T = p.forcing_period
    t = theta / p.omega
    departed = False
    try:
        for _ in range(8 * max_periods):
            s = integrate(s, t, t + T / 8.0, p, cfg)
            t += T / 8.0
            r = math.hypot(s.x, s.y)
            if r > 0.4:
                departed = True
            if sgn * s.x < -0.3:
                return "outer"
            if departed and r < 0.12:
                return "inner"
    except EscapeError:
        return "outer"
    return None


def map_polyline(points, n, p, cfg=DEFAULT_CONFIG, theta=0.0,
                 max_gap=MAX_GAP, max_angle=MAX_ANGLE, max_points=20000):
    """Image of a polyline under n stroboscopic iterates, adaptively refined.

    Inserted vertices interpolate linearly on the source polyline before
    mapping, so the source should already be finely sampled.
    """
    src = np.asarray(points, float)
    arcs = geometry.polyline_arclength(src)
    total = arcs[-1]
    if total == 0.0:
        raise ValueError("degenerate polyline")

    def source_point(a):
        j = int(np.searchsorted(arcs, a, side="right")) - 1
        j = min(max(j, 0), len(src) - 2)
        w = (a - arcs[j]) / max(arcs[j + 1] - arcs[j], 1e-300)
        return src[j] + w * (src[j + 1] - src[j])

    def image(a):
        s = source_point(a)
        cur = PhaseState(s[0], s[1])
        for _ in range(n):
            cur = poincare_step(cur, theta, p, cfg)
        return np.array([cur.x, cur.y])

    params = list(arcs)
    pts = [image(a) for a in params]
    min_dp = max(total * 1e-7, 1e-12)
    _refine_interval(pts, params, image, max_gap, max_angle, min_dp, max_points)
    return np.asarray(pts)


def count_lobe_intersections(boundary_a, boundary_b):
    """Number of proper boundary crossings between two closed polylines."""
    A = np.concatenate([boundary_a, boundary_a[:1]], axis=0)
    B = np.concatenate([boundary_b, boundary_b[:1]], axis=0)
    return len(geometry.polyline_crossings(A, B))


def lobes_intersect(boundary_a, boundary_b):
    """Whether two lobe polygons overlap (crossing or containment)."""
    if count_lobe_intersections(boundary_a, boundary_b) > 0:
        return True
    if geometry.point_in_polygon(boundary_a[0], boundary_b):
        return True
    return bool(geometry.point_in_polygon(boundary_b[0], boundary_a))


def turnstile_lobes(u_curve, s_curve, p, cfg=DEFAULT_CONFIG, theta=0.0):
    """Classified turnstile lobes anchored at the middle of the PIP chain.

    The anchor PIP minimizes max(u_arc, s_arc): it is the crossing closest
    to the saddle along both manifolds at once, which makes the selection
    independent of how far the curves were grown.  Returns a dict with
    keys 'inner', 'outer' and 'preceding_outer' (the outer-family lobe
    immediately before the inner lobe along the unstable manifold), or
    None when the chain is too short or classification fails.
    """
    pips = find_pips(u_curve, s_curve)
    if len(pips) < 6:
        return None
    k = int(np.argmin([max(q.u_arc, q.s_arc) for q in pips]))
    if k < 3 or k > len(pips) - 2:
        return None
    # lobes k-3 .. k: the pair (k-2, k-1) just upstream of the anchor is
    # the turnstile; its content has not yet started its transit, so the
    # midpoint tracking in classify_transit is unambiguous there
    lobes = extract_lobes(u_curve, s_curve, pips[k - 3:k + 2])
    ka = classify_transit(lobes[1], u_curve.side, p, cfg, theta)
    kb = classify_transit(lobes[2], u_curve.side, p, cfg, theta)
    if {ka, kb} != {"inner", "outer"}:
        # fall back on the strict alternation of lobe families, seeded by
        # the even earlier (hence cleaner) lobe at position 0
        k0 = classify_transit(lobes[0], u_curve.side, p, cfg, theta)
        if k0 not in ("inner", "outer"):
            return None
        ka = "outer" if k0 == "inner" else "inner"
        kb = k0
    lobes[1].kind, lobes[2].kind = ka, kb
    inner = lobes[1] if ka == "inner" else lobes[2]
    outer = lobes[2] if ka == "inner" else lobes[1]
    preceding = lobes[0] if ka == "inner" else lobes[1]
    preceding.kind = "outer"
    return {"inner": inner, "outer": outer, "preceding_outer": preceding}


def first_transit_index(mobile, target, p, cfg=DEFAULT_CONFIG, theta=0.0,
                        cap=6, max_points=20000):
    """Smallest j >= 1 with F^j(mobile) overlapping the target lobe.

    Maps the mobile lobe's boundary forward one period at a time (with
    adaptive re-refinement) and tests polygon overlap.  Returns None if no
    overlap occurs within ``cap`` iterates or the boundary escapes.
    """
    boundary = np.asarray(mobile.boundary, float)
    for j in range(1, cap + 1):
        try:
            boundary = map_polyline(boundary, 1, p, cfg, theta,
                                    max_points=max_points)
        except EscapeError:
            return None
        if lobes_intersect(boundary, target.boundary):
            return j
    return None


@dataclass
class MeasuredIndices:
    """Geometrically measured transit indices, one per tangle pair.

    Values are nonnegative integers; None with status 'no-tangle' when the
    source tangle has no transverse intersections, or with status
    'undecided' when the available curve length or iterate cap could not
    settle the count.
    """

    values: dict
    status: dict

    def get(self, key):
        return self.values[key]


def measure_structural_indices(p, cfg=DEFAULT_CONFIG, theta=0.0, cap=6,
                               arc_budget=9.0):
    """Measure all four transit indices from the lobe geometry.

    For a same-side pair the index is the first iterate at which the
    interior-transit turnstile lobe overlaps the outer-family lobe
    immediately preceding it.  For a mixed pair the mobile lobe is the
    exterior-transit turnstile lobe of the source tangle and the target
    is the interior-transit turnstile lobe of the destination tangle.
    """
    tangles = {}
    for side in ("left", "right"):
        U = grow_manifold("unstable", side, p, cfg, theta, arc_budget=arc_budget)
        S = grow_manifold("stable", side, p, cfg, theta, arc_budget=arc_budget)
        pips = find_pips(U, S)
        if not pips:
            tangles[side] = None
            continue
        tangles[side] = turnstile_lobes(U, S, p, cfg, theta) or "undecided"
    values = {}
    status = {}
    for key in ("ll", "lr", "rl", "rr"):
        src = {"l": "left", "r": "right"}[key[0]]
        dst = {"l": "left", "r": "right"}[key[1]]
        if tangles[src] is None or tangles[dst] is None:
            values[key] = None
            status[key] = "no-tangle"
            continue
        if tangles[src] == "undecided" or tangles[dst] == "undecided":
            values[key] = None
            status[key] = "undecided"
            continue
        if src == dst:
            mobile = tangles[src]["inner"]
            target = tangles[src]["preceding_outer"]
        else:
            mobile = tangles[src]["outer"]
            target = tangles[dst]["inner"]
        j = first_transit_index(mobile, target, p, cfg, theta, cap=cap)
        if j is None:
            values[key] = None
            status[key] = "undecided"
        else:
            values[key] = j
            status[key] = "ok"
    return MeasuredIndices(values=values, status=status)


def splitting_energy(side, theta, p, cfg=DEFAULT_CONFIG, arc_budget=4.0):
    """Signed stable/unstable splitting at the loop apex, in energy units.

    Measures the conservative energy of the unstable and stable manifolds
    where each first crosses the symmetry line y = 0 beyond the center,
    and returns the difference H_u - H_s.  To first order in the forcing
    amplitude this equals epsilon times the splitting function evaluated
    at t0 = theta / omega.
    """
    vals = {}
    for kind in ("unstable", "stable"):
        cur = grow_manifold(kind, side, p, cfg, theta, arc_budget=arc_budget)
        pts = cur.points
        x_apex = None
        for i in range(len(pts) - 1):
            y0, y1 = pts[i, 1], pts[i + 1, 1]
            if abs(pts[i, 0]) > 0.5 and (y0 == 0.0 or (y0 < 0.0) != (y1 < 0.0)):
                w = -y0 / (y1 - y0) if y1 != y0 else 0.0
                x_apex = pts[i, 0] + w * (pts[i + 1, 0] - pts[i, 0])
                break
        if x_apex is None:
            raise RuntimeError(f"{kind} manifold never reached the apex line; "
                               "increase arc_budget")
        vals[kind] = hamiltonian(PhaseState(x_apex, 0.0))
    return vals["unstable"] - vals["stable"]
