"""Low-level planar predicates shared by the scene validator and the zone code."""

from __future__ import annotations

import numpy as np


def cross(o, a, b) -> float:
    """z-component of (a - o) x (b - o); > 0 when o, a, b turn counter-clockwise."""
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def on_segment(p, a, b, tol: float = 1e-9) -> bool:
    ab = np.hypot(b[0] - a[0], b[1] - a[1])
    scale = max(ab, 1.0)
    if abs(cross(a, b, p)) > tol * scale:
        return False
    return (
        min(a[0], b[0]) - tol <= p[0] <= max(a[0], b[0]) + tol
        and min(a[1], b[1]) - tol <= p[1] <= max(a[1], b[1]) + tol
    )


def segments_intersect(p1, p2, q1, q2) -> bool:
    """Closed-segment intersection test (touching counts)."""
    d1 = cross(q1, q2, p1)
    d2 = cross(q1, q2, p2)
    d3 = cross(p1, p2, q1)
    d4 = cross(p1, p2, q2)
    if ((d1 > 0 and d2 < 0) or (d1 < 0 and d2 > 0)) and ((d3 > 0 and d4 < 0) or (d3 < 0 and d4 > 0)):
        return True
    return (
        (d1 == 0 and on_segment(p1, q1, q2, 0.0))
        or (d2 == 0 and on_segment(p2, q1, q2, 0.0))
        or (d3 == 0 and on_segment(q1, p1, p2, 0.0))
        or (d4 == 0 and on_segment(q2, p1, p2, 0.0))
    )


def polygon_area(poly) -> float:
    pts = np.asarray(poly, dtype=float)
    x, y = pts[:, 0], pts[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def is_simple_polygon(poly) -> bool:
    pts = [tuple(map(float, p)) for p in poly]
    n = len(pts)
    if n < 3 or abs(polygon_area(pts)) <= 1e-12:
        return False
    for i in range(n):
        a1, a2 = pts[i], pts[(i + 1) % n]
        for j in range(i + 1, n):
            if j == i or (j + 1) % n == i or j == (i + 1) % n:
                continue
            b1, b2 = pts[j], pts[(j + 1) % n]
            if segments_intersect(a1, a2, b1, b2):
                return False
    return True
