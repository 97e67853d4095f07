"""Platform zone construction and point / crossing queries.

Zones live in image coordinates. Given corners T_L, T_R, B_L, B_R:

* zone A (wall side)     = (T_L, T_L^a, B_L^b, B_L)
* zone B (track side)    = (T_R^a, T_R, B_R, B_R^b)
* zone C (far-end band)  = (T_L, T_R, Q_R, Q_L)

where T_L^a = T_L + a (T_R - T_L) and so on, and Q_L / Q_R clip the top edge
shifted inward by ``offset_d`` against the two lateral boundaries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from ._plane import cross
from .ingest import SceneConfig
from .projection import apply, invert


class GeometryError(ValueError):
    pass


class DegenerateGeometryError(GeometryError):
    pass


class ClippingError(GeometryError):
    pass


Point = tuple  # (x, y)


def _pt(p) -> tuple[float, float]:
    return (float(p[0]), float(p[1]))


@dataclass(frozen=True)
class ZonePartition:
    zone_a: tuple
    zone_b: tuple
    zone_c: tuple
    l_left: tuple
    l_right: tuple
    l_o: tuple
    l_d: tuple
    s_d: tuple
    yellow_boundary: tuple
    centroid: tuple

    def polygons(self) -> dict:
        return {"A": self.zone_a, "B": self.zone_b, "C": self.zone_c}

    def to_dict(self) -> dict:
        def seg(s):
            return [list(p) for p in s]

        return {
            "zones": {name: seg(poly) for name, poly in self.polygons().items()},
            "segments": {
                "l_left": seg(self.l_left),
                "l_right": seg(self.l_right),
                "l_o": seg(self.l_o),
                "l_d": seg(self.l_d),
                "s_d": seg(self.s_d),
            },
            "yellow_boundary": seg(self.yellow_boundary),
        }


class ZoneMembership(NamedTuple):
    in_a: bool
    in_b: bool
    in_c: bool
    on_yellow: bool


def _line_intersection(p, r, q, s) -> tuple[float, float]:
    """Parameters (t, u) with p + t r == q + u s; raises on parallel lines."""
    denom = r[0] * s[1] - r[1] * s[0]
    scale = max(math.hypot(*r) * math.hypot(*s), 1e-300)
    if abs(denom) <= 1e-12 * scale:
        raise DegenerateGeometryError("offset line is parallel to a lateral boundary")
    qp = (q[0] - p[0], q[1] - p[1])
    t = (qp[0] * s[1] - qp[1] * s[0]) / denom
    u = (qp[0] * r[1] - qp[1] * r[0]) / denom
    return t, u


def build_zone_partition(cfg: SceneConfig) -> ZonePartition:
    tl, tr, bl, br = (_pt(cfg.corners[k]) for k in ("T_L", "T_R", "B_L", "B_R"))
    a, b, d = cfg.alpha, cfg.beta, cfg.offset_d

    centroid = ((tl[0] + tr[0] + bl[0] + br[0]) / 4.0, (tl[1] + tr[1] + bl[1] + br[1]) / 4.0)
    top = (tr[0] - tl[0], tr[1] - tl[1])
    length = math.hypot(*top)
    if length <= 0:
        raise DegenerateGeometryError("top edge has zero length")
    normal = (-top[1] / length, top[0] / length)
    # inward = toward the corner-quad centroid
    if normal[0] * (centroid[0] - tl[0]) + normal[1] * (centroid[1] - tl[1]) < 0:
        normal = (-normal[0], -normal[1])
    dl = (tl[0] + d * normal[0], tl[1] + d * normal[1])
    dr = (tr[0] + d * normal[0], tr[1] + d * normal[1])

    left_dir = (bl[0] - tl[0], bl[1] - tl[1])
    right_dir = (br[0] - tr[0], br[1] - tr[1])
    _, u_left = _line_intersection(dl, top, tl, left_dir)
    _, u_right = _line_intersection(dl, top, tr, right_dir)
    if not (0.0 <= u_left <= 1.0 and 0.0 <= u_right <= 1.0):
        raise ClippingError("offset_d reaches past the platform depth")
    q_l = (tl[0] + u_left * left_dir[0], tl[1] + u_left * left_dir[1])
    q_r = (tr[0] + u_right * right_dir[0], tr[1] + u_right * right_dir[1])

    tl_a = (tl[0] + a * (tr[0] - tl[0]), tl[1] + a * (tr[1] - tl[1]))
    tr_a = (tr[0] + a * (tl[0] - tr[0]), tr[1] + a * (tl[1] - tr[1]))
    bl_b = (bl[0] + b * (br[0] - bl[0]), bl[1] + b * (br[1] - bl[1]))
    br_b = (br[0] + b * (bl[0] - br[0]), br[1] + b * (bl[1] - br[1]))

    yellow = cfg.yellow_boundary_override or (tr, br)
    return ZonePartition(
        zone_a=(tl, tl_a, bl_b, bl),
        zone_b=(tr_a, tr, br, br_b),
        zone_c=(tl, tr, q_r, q_l),
        l_left=(tl_a, bl_b),
        l_right=(tr_a, br_b),
        l_o=(tl, tr),
        l_d=(dl, dr),
        s_d=(q_l, q_r),
        yellow_boundary=tuple(_pt(p) for p in yellow),
        centroid=centroid,
    )


def offset_from_meters(cfg: SceneConfig, meters: float) -> float:
    """Image-space depth of a band ``meters`` deep behind the top-edge midpoint."""
    tl, tr = cfg.corner("T_L"), cfg.corner("T_R")
    bl, br = cfg.corner("B_L"), cfg.corner("B_R")
    mid_top = (tl + tr) / 2.0
    mid_bot = (bl + br) / 2.0
    h = cfg.homography
    p_top, p_bot = apply(h, mid_top), apply(h, mid_bot)
    depth = np.linalg.norm(p_bot - p_top)
    if depth <= 0:
        raise DegenerateGeometryError("platform has zero metric depth")
    target = p_top + (p_bot - p_top) * (meters / depth)
    q = apply(invert(h), target)
    top = tr - tl
    normal = np.array([-top[1], top[0]]) / np.linalg.norm(top)
    return float(abs(np.dot(q - tl, normal)))


# ---------------------------------------------------------------- membership


def points_on_boundary(poly, pts: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    pts = np.asarray(pts, dtype=float)
    out = np.zeros(len(pts), dtype=bool)
    n = len(poly)
    for i in range(n):
        ax, ay = poly[i]
        bx, by = poly[(i + 1) % n]
        ex, ey = bx - ax, by - ay
        seg_len = math.hypot(ex, ey)
        c = ex * (pts[:, 1] - ay) - ey * (pts[:, 0] - ax)
        within = (
            (pts[:, 0] >= min(ax, bx) - tol)
            & (pts[:, 0] <= max(ax, bx) + tol)
            & (pts[:, 1] >= min(ay, by) - tol)
            & (pts[:, 1] <= max(ay, by) + tol)
        )
        out |= within & (np.abs(c) <= tol * max(seg_len, 1.0))
    return out


def points_in_polygon(poly, pts) -> np.ndarray:
    """Even-odd ray casting; points on an edge count as inside."""
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    x, y = pts[:, 0], pts[:, 1]
    inside = np.zeros(len(pts), dtype=bool)
    n = len(poly)
    for i in range(n):
        x1, y1 = poly[i]
        x2, y2 = poly[(i + 1) % n]
        if y1 == y2:
            continue
        straddle = (y1 > y) != (y2 > y)
        x_cross = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
        inside ^= straddle & (x < x_cross)
    return inside | points_on_boundary(poly, pts)


def _side_of_polyline(boundary, pts: np.ndarray, reference) -> np.ndarray:
    """+1 on the side opposite ``reference``, -1 on its side, 0 on the line.

    Each point is judged against the infinite line of its nearest polyline
    segment.
    """
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    best_d = np.full(len(pts), np.inf)
    side = np.zeros(len(pts))
    for a, b in zip(boundary[:-1], boundary[1:]):
        ax, ay = a
        ex, ey = b[0] - ax, b[1] - ay
        ll = ex * ex + ey * ey
        if ll == 0:
            continue
        t = np.clip(((pts[:, 0] - ax) * ex + (pts[:, 1] - ay) * ey) / ll, 0.0, 1.0)
        dist = np.hypot(pts[:, 0] - (ax + t * ex), pts[:, 1] - (ay + t * ey))
        c = ex * (pts[:, 1] - ay) - ey * (pts[:, 0] - ax)
        ref = cross(a, b, reference)
        s = np.sign(c) * (-np.sign(ref) if ref != 0 else 1.0)
        closer = dist < best_d
        best_d = np.where(closer, dist, best_d)
        side = np.where(closer, s, side)
    return side


def on_yellow(partition: ZonePartition, pts) -> np.ndarray:
    """True where points lie strictly on the track side of the yellow boundary."""
    return _side_of_polyline(partition.yellow_boundary, pts, partition.centroid) > 0


def locate_many(partition: ZonePartition, pts) -> dict:
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    in_a = points_in_polygon(partition.zone_a, pts)
    in_b = points_in_polygon(partition.zone_b, pts) & ~in_a
    return {
        "in_a": in_a,
        "in_b": in_b,
        "in_c": points_in_polygon(partition.zone_c, pts),
        "on_yellow": on_yellow(partition, pts),
    }


def locate(partition: ZonePartition, point) -> ZoneMembership:
    m = locate_many(partition, [point])
    return ZoneMembership(bool(m["in_a"][0]), bool(m["in_b"][0]), bool(m["in_c"][0]), bool(m["on_yellow"][0]))


def _proper_intersection(p0, p1, a, b) -> bool:
    d1 = cross(a, b, p0)
    d2 = cross(a, b, p1)
    d3 = cross(p0, p1, a)
    d4 = cross(p0, p1, b)
    return d1 * d2 < 0 and d3 * d4 < 0


def segment_crosses(boundary: Sequence, p0, p1, reference=None) -> bool:
    """Whether the move p0 -> p1 crosses ``boundary``.

    True when the segment properly intersects a boundary segment, or when the
    two endpoints fall on different sides. The boundary itself belongs to the
    non-track side, so "different sides" means exactly one endpoint is
    strictly beyond it. ``reference`` marks the non-track side (defaults to a
    point left of the first boundary segment's direction).
    """
    p0, p1 = _pt(p0), _pt(p1)
    if p0 == p1:
        return False
    boundary = [_pt(p) for p in boundary]
    for a, b in zip(boundary[:-1], boundary[1:]):
        if _proper_intersection(p0, p1, a, b):
            return True
    if reference is None:
        a, b = boundary[0], boundary[1]
        reference = (a[0] - (b[1] - a[1]), a[1] + (b[0] - a[0]))
    s = _side_of_polyline(boundary, [p0, p1], reference)
    return bool((s[0] > 0) != (s[1] > 0))


def yellow_crossing(partition: ZonePartition, p0, p1) -> bool:
    return segment_crosses(partition.yellow_boundary, p0, p1, reference=partition.centroid)


# ---------------------------------------------------------------- rendering


def render_pgm(partition: ZonePartition, width: int, height: int) -> bytes:
    """8-bit PGM overlay: 0 outside, 85 zone A, 170 zone B, 255 zone C."""
    ys, xs = np.mgrid[0:height, 0:width]
    pts = np.column_stack([xs.ravel() + 0.5, ys.ravel() + 0.5])
    m = locate_many(partition, pts)
    img = np.zeros(len(pts), dtype=np.uint8)
    img[m["in_a"]] = 85
    img[m["in_b"]] = 170
    img[m["in_c"]] = 255
    header = f"P5\n{width} {height}\n255\n".encode("ascii")
    return header + img.reshape(height, width).tobytes()
