"""Planar polyline geometry helpers: crossings, areas, containment."""

import math
from collections import defaultdict

import numpy as np


def polyline_arclength(points):
    """Cumulative arclength, starting at 0."""
    pts = np.asarray(points, float)
    seg = np.sqrt(np.sum(np.diff(pts, axis=0) ** 2, axis=1))
    return np.concatenate([[0.0], np.cumsum(seg)])


def shoelace_area(points):
    """Absolute polygon area of a closed polyline (last->first implied)."""
    pts = np.asarray(points, float)
    x, y = pts[:, 0], pts[:, 1]
    return 0.5 * abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def _segment_cross(p0, p1, q0, q1):
    """Proper crossing of two segments; returns (s, t, point) or None.

    s, t are the parameters along each segment, strictly inside (0, 1] on
    the first and (0, 1] on the second so shared endpoints do not count
    twice along a polyline.
    """
    r = (p1[0] - p0[0], p1[1] - p0[1])
    d = (q1[0] - q0[0], q1[1] - q0[1])
    denom = r[0] * d[1] - r[1] * d[0]
    if denom == 0.0:
        return None
    dx = q0[0] - p0[0]
    dy = q0[1] - p0[1]
    s = (dx * d[1] - dy * d[0]) / denom
    t = (dx * r[1] - dy * r[0]) / denom
    if 0.0 < s <= 1.0 and 0.0 < t <= 1.0:
        return s, t, (p0[0] + s * r[0], p0[1] + s * r[1])
    return None


def polyline_crossings(a_pts, b_pts):
    """All proper crossings between two polylines.

    Returns a list of dicts with segment indices, parameters, location and
    the crossing angle, using a uniform-grid broad phase.
    """
    A = np.asarray(a_pts, float)
    B = np.asarray(b_pts, float)
    if len(A) < 2 or len(B) < 2:
        return []
    seg_b = np.stack([B[:-1], B[1:]], axis=1)  # (m, 2, 2)
    lengths = np.sqrt(np.sum((seg_b[:, 1] - seg_b[:, 0]) ** 2, axis=1))
    cell = max(np.percentile(lengths[lengths > 0], 90), 1e-12) if np.any(lengths > 0) else 1e-6
    grid = defaultdict(list)
    lo = np.floor(np.minimum(seg_b[:, 0], seg_b[:, 1]) / cell).astype(np.int64)
    hi = np.floor(np.maximum(seg_b[:, 0], seg_b[:, 1]) / cell).astype(np.int64)
    for j in range(len(seg_b)):
        for cx in range(lo[j, 0], hi[j, 0] + 1):
            for cy in range(lo[j, 1], hi[j, 1] + 1):
                grid[(cx, cy)].append(j)
    out = []
    for i in range(len(A) - 1):
        p0, p1 = A[i], A[i + 1]
        ilo = np.floor(np.minimum(p0, p1) / cell).astype(np.int64)
        ihi = np.floor(np.maximum(p0, p1) / cell).astype(np.int64)
        cand = set()
        for cx in range(ilo[0], ihi[0] + 1):
            for cy in range(ilo[1], ihi[1] + 1):
                cand.update(grid.get((cx, cy), ()))
        for j in cand:
            hit = _segment_cross(p0, p1, seg_b[j, 0], seg_b[j, 1])
            if hit is None:
                continue
            s, t, pt = hit
            va = p1 - p0
            vb = seg_b[j, 1] - seg_b[j, 0]
            na, nb = math.hypot(*va), math.hypot(*vb)
            angle = 0.0
            if na > 0 and nb > 0:
                cr = abs(va[0] * vb[1] - va[1] * vb[0]) / (na * nb)
                angle = math.asin(min(1.0, cr))
            out.append({
                "i": i, "j": j, "s": s, "t": t,
                "point": pt, "angle": angle,
            })
    out.sort(key=lambda c: (c["i"], c["s"]))
    return out


def point_in_polygon(point, poly):
    """Ray-casting containment test for a closed polyline."""
    x, y = point
    pts = np.asarray(poly, float)
    x0, y0 = pts[:, 0], pts[:, 1]
    x1, y1 = np.roll(x0, -1), np.roll(y0, -1)
    cond = (y0 > y) != (y1 > y)
    with np.errstate(divide="ignore", invalid="ignore"):
        xint = x0 + (y - y0) / (y1 - y0) * (x1 - x0)
    return bool(np.sum(cond & (x < xint)) % 2)
