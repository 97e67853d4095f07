"""Trajectory density maps on a platform-referenced grid.

Pipeline: ``accumulate`` -> ``smooth`` per person, ``aggregate`` the at-risk
maps, ``normalize``, then sample with ``position_risk``.
"""

from __future__ import annotations

import csv
import functools
import io
import json
import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from .ingest import GridSpec


class HeatmapError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class HeatmapGrid:
    """Dense non-negative field; ``values[row, col]`` covers y-row, x-col.

    ``sources`` records which trajectories contributed, so callers can check
    that a map never saw a given person.
    """

    spec: GridSpec
    values: np.ndarray
    dropped: int = 0
    sources: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != self.spec.shape:
            raise HeatmapError(f"values shape {v.shape} does not match grid {self.spec.shape}")
        if np.any(v < 0) or not np.all(np.isfinite(v)):
            raise HeatmapError("heatmap values must be finite and non-negative")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "sources", frozenset(self.sources))

    @property
    def mass(self) -> float:
        return float(self.values.sum())

    @property
    def max(self) -> float:
        return float(self.values.max()) if self.values.size else 0.0

    def sidecar(self) -> dict:
        return {"extent": [self.spec.xmin, self.spec.xmax, self.spec.ymin, self.spec.ymax],
                "cell": self.spec.cell, "mass": self.mass, "max": self.max}


def empty(spec: GridSpec) -> HeatmapGrid:
    return HeatmapGrid(spec, np.zeros(spec.shape))


def _cell_index(spec: GridSpec, pts: np.ndarray):
    ny, nx = spec.shape
    ix = np.floor((pts[:, 0] - spec.xmin) / spec.cell).astype(np.int64)
    iy = np.floor((pts[:, 1] - spec.ymin) / spec.cell).astype(np.int64)
    ok = (
        (pts[:, 0] >= spec.xmin) & (pts[:, 0] < spec.xmax)
        & (pts[:, 1] >= spec.ymin) & (pts[:, 1] < spec.ymax)
        & (ix >= 0) & (ix < nx) & (iy >= 0) & (iy < ny)
    )
    return ix, iy, ok


def accumulate(points, spec: GridSpec, source: str | None = None) -> HeatmapGrid:
    """One unit of heat per in-extent point; out-of-extent points are only counted."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    values = np.zeros(spec.shape)
    ix, iy, ok = _cell_index(spec, pts)
    np.add.at(values, (iy[ok], ix[ok]), 1.0)
    return HeatmapGrid(spec, values, dropped=int((~ok).sum()),
                       sources=frozenset() if source is None else frozenset([source]))


@functools.lru_cache(maxsize=32)
def _spread_matrix(n: int, sigma_cells: float) -> np.ndarray:
    """Column-normalized truncated Gaussian: column j spreads unit mass from cell j."""
    radius = int(math.ceil(3.0 * sigma_cells))
    idx = np.arange(n)
    diff = idx[:, None] - idx[None, :]
    k = np.where(np.abs(diff) <= radius, np.exp(-0.5 * (diff / sigma_cells) ** 2), 0.0)
    k = k / k.sum(axis=0, keepdims=True)
    k.flags.writeable = False
    return k


def smooth(grid: HeatmapGrid, sigma: float) -> HeatmapGrid:
    """Separable Gaussian blur (truncated at 3 sigma) that keeps all mass on the grid.

    Each source cell's kernel is renormalized over the cells that exist, so
    heat near a border is redistributed inward instead of being lost.
    """
    if not sigma > 0:
        raise HeatmapError("sigma must be > 0")
    s = sigma / grid.spec.cell
    ny, nx = grid.values.shape
    ky = _spread_matrix(ny, s)
    kx = _spread_matrix(nx, s)
    out = ky @ grid.values @ kx.T
    np.maximum(out, 0.0, out=out)
    return replace(grid, values=out)


def aggregate(maps: Sequence[HeatmapGrid]) -> HeatmapGrid:
    """Cellwise mean of K maps, summed in index order."""
    maps = list(maps)
    if not maps:
        raise HeatmapError("cannot aggregate zero heatmaps")
    spec = maps[0].spec
    for m in maps[1:]:
        if m.spec != spec:
            raise HeatmapError("heatmaps to aggregate must share extent and cell size")
    total = np.zeros(spec.shape)
    sources: set = set()
    for m in maps:
        total += m.values
        sources |= m.sources
    return HeatmapGrid(spec, total / len(maps), dropped=sum(m.dropped for m in maps), sources=frozenset(sources))


def normalize(grid: HeatmapGrid) -> HeatmapGrid:
    peak = grid.max
    if peak == 0:
        return grid
    return replace(grid, values=grid.values / peak)


def sample(grid: HeatmapGrid, points) -> tuple[np.ndarray, np.ndarray]:
    """Bilinear samples at cell centers (edge-held); returns (values, in_extent)."""
    spec = grid.spec
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    _, _, ok = _cell_index(spec, pts)
    ny, nx = grid.values.shape
    u = np.clip((pts[:, 0] - spec.xmin) / spec.cell - 0.5, 0.0, nx - 1)
    v = np.clip((pts[:, 1] - spec.ymin) / spec.cell - 0.5, 0.0, ny - 1)
    u = np.where(ok, u, 0.0)
    v = np.where(ok, v, 0.0)
    x0 = np.minimum(np.floor(u).astype(np.int64), max(nx - 2, 0))
    y0 = np.minimum(np.floor(v).astype(np.int64), max(ny - 2, 0))
    x1 = np.minimum(x0 + 1, nx - 1)
    y1 = np.minimum(y0 + 1, ny - 1)
    fx = u - x0
    fy = v - y0
    h = grid.values
    val = (
        h[y0, x0] * (1 - fx) * (1 - fy)
        + h[y0, x1] * fx * (1 - fy)
        + h[y1, x0] * (1 - fx) * fy
        + h[y1, x1] * fx * fy
    )
    return np.where(ok, val, 0.0), ok


def position_risk(grid: HeatmapGrid | None, points) -> float:
    """Mean sampled heat over in-extent trajectory points (0 when there are none)."""
    if grid is None:
        return 0.0
    val, ok = sample(grid, points)
    if not ok.any():
        return 0.0
    pr = float(val[ok].mean())
    return min(max(pr, 0.0), 1.0)


def build_risk_map(trajectories: Iterable[tuple[str, np.ndarray]], spec: GridSpec, sigma: float = 0.5) -> HeatmapGrid:
    """Normalized mean of smoothed per-person density maps."""
    maps = [smooth(accumulate(pts, spec, source=key), sigma) for key, pts in trajectories]
    return normalize(aggregate(maps))


# ---------------------------------------------------------------- file formats


def to_pgm16(grid: HeatmapGrid) -> bytes:
    """16-bit binary PGM, max-scaled, top row = ymin."""
    peak = grid.max
    scaled = np.zeros(grid.values.shape) if peak == 0 else grid.values / peak * 65535.0
    img = np.rint(scaled).astype(">u2")
    ny, nx = img.shape
    return f"P5\n{nx} {ny}\n65535\n".encode("ascii") + img.tobytes()


def to_csv(grid: HeatmapGrid) -> str:
    buf = io.StringIO()
    s = grid.spec
    buf.write(f"# xmin={s.xmin!r} xmax={s.xmax!r} ymin={s.ymin!r} ymax={s.ymax!r} cell={s.cell!r}\n")
    w = csv.writer(buf, lineterminator="\n")
    for row in grid.values:
        w.writerow([repr(float(v)) for v in row])
    return buf.getvalue()


def from_csv(text: str) -> HeatmapGrid:
    lines = text.splitlines()
    if not lines or not lines[0].startswith("#"):
        raise HeatmapError("heatmap CSV is missing its extent header")
    try:
        meta = dict(tok.split("=", 1) for tok in lines[0][1:].split())
        spec = GridSpec(float(meta["xmin"]), float(meta["xmax"]), float(meta["ymin"]), float(meta["ymax"]),
                        float(meta["cell"]))
        values = np.array([[float(v) for v in row] for row in csv.reader(lines[1:]) if row])
    except (KeyError, ValueError) as exc:
        raise HeatmapError(f"malformed heatmap CSV: {exc}") from None
    return HeatmapGrid(spec, values.reshape(spec.shape) if values.size else np.zeros(spec.shape))


def sidecar_json(grid: HeatmapGrid) -> str:
    return json.dumps(grid.sidecar(), indent=2, sort_keys=True) + "\n"
