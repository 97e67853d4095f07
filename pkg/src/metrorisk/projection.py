"""Planar homography between image pixels and platform-referenced meters."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

_EPS = 1e-12


class ProjectionError(ValueError):
    pass


class PointAtInfinityError(ProjectionError):
    pass


class DegenerateConfigurationError(ProjectionError):
    pass


@dataclass(frozen=True)
class Homography:
    """3x3 projective map, scale-normalized so that m[2, 2] == 1 when possible."""

    m: np.ndarray

    def __post_init__(self):
        m = np.array(self.m, dtype=float).reshape(3, 3)
        if not np.all(np.isfinite(m)):
            raise ProjectionError("homography has non-finite entries")
        if abs(m[2, 2]) > _EPS:
            m = m / m[2, 2]
        if abs(np.linalg.det(m)) <= _EPS:
            raise ProjectionError("homography is singular")
        m.setflags(write=False)
        object.__setattr__(self, "m", m)

    @classmethod
    def identity(cls) -> "Homography":
        return cls(np.eye(3))

    def tolist(self) -> list[list[float]]:
        return [[float(v) for v in row] for row in self.m]


class HomographyFit(NamedTuple):
    homography: Homography
    rms: float


def apply(h: Homography, p) -> np.ndarray:
    """Map a point (shape (2,)) or an array of points (shape (n, 2))."""
    pts = np.asarray(p, dtype=float)
    single = pts.ndim == 1
    pts = np.atleast_2d(pts)
    m = h.m
    w = m[2, 0] * pts[:, 0] + m[2, 1] * pts[:, 1] + m[2, 2]
    if np.any(np.abs(w) < _EPS):
        raise PointAtInfinityError("point maps to infinity under the homography")
    x = (m[0, 0] * pts[:, 0] + m[0, 1] * pts[:, 1] + m[0, 2]) / w
    y = (m[1, 0] * pts[:, 0] + m[1, 1] * pts[:, 1] + m[1, 2]) / w
    out = np.column_stack([x, y])
    return out[0] if single else out


def invert(h: Homography) -> Homography:
    try:
        inv = np.linalg.inv(h.m)
    except np.linalg.LinAlgError as exc:
        raise ProjectionError("homography is singular") from exc
    return Homography(inv)


def _normalizing_transform(pts: np.ndarray) -> np.ndarray:
    # center on the centroid, scale so the mean distance to it is sqrt(2)
    c = pts.mean(axis=0)
    d = np.sqrt(((pts - c) ** 2).sum(axis=1)).mean()
    if d < _EPS:
        raise DegenerateConfigurationError("all points coincide")
    s = np.sqrt(2.0) / d
    return np.array([[s, 0.0, -s * c[0]], [0.0, s, -s * c[1]], [0.0, 0.0, 1.0]])


def _has_collinear_triple(pts: np.ndarray, tol: float) -> bool:
    n = len(pts)
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                a, b, c = pts[i], pts[j], pts[k]
                cross = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
                if abs(cross) <= tol:
                    return True
    return False


def reprojection_rms(h: Homography, src, dst) -> float:
    proj = apply(h, np.asarray(src, dtype=float))
    err = proj - np.asarray(dst, dtype=float)
    return float(np.sqrt((err**2).sum(axis=1).mean()))


def estimate(src: Sequence, dst: Sequence) -> HomographyFit:
    """Normalized DLT fit of the homography taking ``src`` onto ``dst``.

    Both point sets are conditioned (centroid at the origin, mean radius
    sqrt(2)) before the 2n x 9 system is solved by SVD; the right singular
    vector of the smallest singular value is the solution.
    """
    src = np.asarray(src, dtype=float)
    dst = np.asarray(dst, dtype=float)
    if src.ndim != 2 or src.shape[1] != 2 or src.shape != dst.shape:
        raise ProjectionError("correspondences must be two (n, 2) arrays of equal shape")
    n = len(src)
    if n < 4:
        raise ProjectionError(f"need at least 4 correspondences, got {n}")

    t_src = _normalizing_transform(src)
    t_dst = _normalizing_transform(dst)
    s = src @ t_src[:2, :2].T + t_src[:2, 2]
    d = dst @ t_dst[:2, :2].T + t_dst[:2, 2]
    if n == 4 and _has_collinear_triple(s, 1e-9):
        raise DegenerateConfigurationError("three source points are collinear")

    a = np.zeros((2 * n, 9))
    x, y = s[:, 0], s[:, 1]
    u, v = d[:, 0], d[:, 1]
    a[0::2, 0] = -x
    a[0::2, 1] = -y
    a[0::2, 2] = -1.0
    a[0::2, 6] = u * x
    a[0::2, 7] = u * y
    a[0::2, 8] = u
    a[1::2, 3] = -x
    a[1::2, 4] = -y
    a[1::2, 5] = -1.0
    a[1::2, 6] = v * x
    a[1::2, 7] = v * y
    a[1::2, 8] = v

    _, sv, vt = np.linalg.svd(a)
    # a unique solution needs a one-dimensional null space
    if sv.size >= 8 and sv[7] <= 1e-10 * sv[0]:
        raise DegenerateConfigurationError("correspondence system is rank deficient")
    hn = vt[-1].reshape(3, 3)
    m = np.linalg.inv(t_dst) @ hn @ t_src
    try:
        h = Homography(m)
    except ProjectionError as exc:
        raise DegenerateConfigurationError(str(exc)) from exc
    return HomographyFit(h, reprojection_rms(h, src, dst))
