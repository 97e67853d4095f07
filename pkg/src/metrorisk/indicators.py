"""Per-person risk indicators over a temporal window.

The eight components, in model order::

    pr  mean position-risk heat along the projected trajectory
    cr  walked or stood on the yellow region
    ncr number of debounced entries into the yellow region
    ty  seconds on the yellow region
    ly  longest continuous stay on the yellow region, seconds
    bf  overlapping A-B-A / B-A-B visit triples
    lt  at least ``lt_min_events`` LookTunnel runs
    e   entered the far-end zone C

Zone and yellow states are debounced: a run of raw per-frame states shorter
than ``hysteresis`` frames is absorbed into the state registered before it
(or the initial state when nothing is registered yet). Runs at least that long
switch the state for every frame they cover.
"""

from __future__ import annotations

from dataclasses import astuple, dataclass
from typing import NamedTuple, Optional

import numpy as np

from . import geometry
from .heatmap import HeatmapGrid, position_risk
from .ingest import Activity, ConfigError, PersonTimeline, SceneConfig
from .projection import apply

FEATURE_NAMES = ("pr", "cr", "ncr", "ty", "ly", "bf", "lt", "e")

ZONE_OTHER, ZONE_A, ZONE_B = 0, 1, 2
ZONE_LABELS = {ZONE_OTHER: "other", ZONE_A: "A", ZONE_B: "B"}

DEFAULT_HYSTERESIS = 3
DEFAULT_LT_MIN_EVENTS = 1


@dataclass(frozen=True)
class IndicatorVector:
    pr: float = 0.0
    cr: bool = False
    ncr: int = 0
    ty: float = 0.0
    ly: float = 0.0
    bf: int = 0
    lt: bool = False
    e: bool = False

    def as_array(self) -> np.ndarray:
        return np.array([float(v) for v in astuple(self)])

    @classmethod
    def from_array(cls, row) -> "IndicatorVector":
        pr, cr, ncr, ty, ly, bf, lt, e = (float(v) for v in row)
        return cls(pr, bool(cr), int(ncr), ty, ly, int(bf), bool(lt), bool(e))

    def with_pr(self, pr: float) -> "IndicatorVector":
        return IndicatorVector(pr, self.cr, self.ncr, self.ty, self.ly, self.bf, self.lt, self.e)


@dataclass(frozen=True)
class WindowSpec:
    tau: int = 0  # frames; 0 = the whole timeline
    stride: int = 1

    def __post_init__(self):
        if self.tau < 0:
            raise ConfigError("window length tau must be >= 0")
        if self.tau > 0 and self.stride < 1:
            raise ConfigError("stride must be >= 1 for a sliding window")


class Visit(NamedTuple):
    zone: str
    enter_frame: int
    exit_frame: int


class WindowResult(NamedTuple):
    end: int
    vector: IndicatorVector
    truncated: bool


def runs(states: np.ndarray) -> list[tuple[int, int, int]]:
    """(state, start, stop) for maximal runs; stop is exclusive."""
    states = np.asarray(states)
    n = len(states)
    if n == 0:
        return []
    cut = np.flatnonzero(states[1:] != states[:-1]) + 1
    starts = np.concatenate([[0], cut])
    stops = np.concatenate([cut, [n]])
    return [(states[s].item(), int(s), int(e)) for s, e in zip(starts, stops)]


def debounce(states, hysteresis: int, initial) -> np.ndarray:
    states = np.asarray(states)
    out = np.empty_like(states)
    cur = initial
    for value, start, stop in runs(states):
        if stop - start >= hysteresis:
            cur = value
        out[start:stop] = cur
    return out


def raw_zones(partition: geometry.ZonePartition, foot: np.ndarray) -> np.ndarray:
    if len(foot) == 0:
        return np.zeros(0, dtype=np.int8)
    m = geometry.locate_many(partition, foot)
    z = np.full(len(foot), ZONE_OTHER, dtype=np.int8)
    z[m["in_a"]] = ZONE_A
    z[m["in_b"]] = ZONE_B
    return z


def raw_yellow(partition: geometry.ZonePartition, tl: PersonTimeline) -> np.ndarray:
    """Per-sample: either leg keypoint strictly past the yellow boundary.

    Samples with no leg keypoints fall back to the derived foot point.
    """
    n = len(tl)
    if n == 0:
        return np.zeros(0, dtype=bool)
    has_l = ~np.isnan(tl.left_leg[:, 0])
    has_r = ~np.isnan(tl.right_leg[:, 0])
    left = np.where(has_l[:, None], tl.left_leg, tl.foot_points)
    right = np.where(has_r[:, None], tl.right_leg, tl.foot_points)
    on_l = geometry.on_yellow(partition, left)
    on_r = geometry.on_yellow(partition, right)
    fallback = ~has_l & ~has_r
    return np.where(fallback, on_l, (on_l & has_l) | (on_r & has_r))


def zone_sequence(tl: PersonTimeline, partition: geometry.ZonePartition,
                  hysteresis: int = DEFAULT_HYSTERESIS) -> list[Visit]:
    """Debounced zone visits of the foot point, as (zone, enter_frame, exit_frame)."""
    deb = debounce(raw_zones(partition, tl.foot_points), hysteresis, ZONE_OTHER)
    return [Visit(ZONE_LABELS[z], int(tl.frames[s]), int(tl.frames[e - 1])) for z, s, e in runs(deb)]


def back_and_forth(visits) -> int:
    """Overlapping A-B-A / B-A-B triples over the A/B visit string."""
    seq = []
    for v in visits:
        z = v.zone if isinstance(v, Visit) else v
        if z in ("A", "B") and (not seq or seq[-1] != z):
            seq.append(z)
    return sum(1 for i in range(len(seq) - 2) if seq[i] == seq[i + 2] != seq[i + 1])


def project_foot_points(tl: PersonTimeline, cfg: SceneConfig) -> np.ndarray:
    if len(tl) == 0:
        return np.zeros((0, 2))
    return apply(cfg.homography, tl.foot_points)


def compute_indicators(
    tl: PersonTimeline,
    partition: geometry.ZonePartition,
    risk_map: Optional[HeatmapGrid],
    cfg: SceneConfig,
    window: WindowSpec = WindowSpec(),
    end: Optional[int] = None,
    *,
    hysteresis: int = DEFAULT_HYSTERESIS,
    lt_min_events: int = DEFAULT_LT_MIN_EVENTS,
    platform_points: Optional[np.ndarray] = None,
) -> IndicatorVector:
    """Indicators of ``tl`` restricted to frames [end - tau + 1, end].

    With ``window.tau == 0`` the whole timeline is used and ``end`` is
    ignored. ``platform_points`` may carry the already projected foot points
    of ``tl`` to skip the homography.
    """
    if not cfg.fps > 0:
        raise ConfigError("fps must be > 0")
    if hysteresis < 1:
        raise ConfigError("hysteresis must be >= 1 frame")
    if window.tau > 0:
        if end is None:
            end = int(tl.frames[-1]) if len(tl) else 0
        lo = np.searchsorted(tl.frames, end - window.tau + 1, side="left")
        hi = np.searchsorted(tl.frames, end, side="right")
        if platform_points is not None:
            platform_points = platform_points[lo:hi]
        tl = tl.slice_frames(end - window.tau + 1, end)
    if len(tl) == 0:
        return IndicatorVector()

    fps = cfg.fps
    if risk_map is None:
        pr = 0.0
    else:
        pts = platform_points if platform_points is not None else project_foot_points(tl, cfg)
        pr = position_risk(risk_map, pts)

    yellow = debounce(raw_yellow(partition, tl), hysteresis, False)
    yellow_runs = [stop - start for on, start, stop in runs(yellow) if on]
    ncr = len(yellow_runs)
    ty = sum(yellow_runs) / fps
    ly = max(yellow_runs, default=0) / fps
    act = tl.activity
    cr = bool(np.any(yellow & ((act == Activity.WALK) | (act == Activity.STAND))))

    zones = debounce(raw_zones(partition, tl.foot_points), hysteresis, ZONE_OTHER)
    bf = back_and_forth([ZONE_LABELS[z] for z, _, _ in runs(zones)])

    look = act == Activity.LOOK_TUNNEL
    lt_runs = sum(1 for v, _, _ in runs(look) if v)
    lt = lt_runs >= lt_min_events

    e = bool(np.any(geometry.points_in_polygon(partition.zone_c, tl.foot_points)))
    return IndicatorVector(pr, cr, ncr, ty, ly, bf, lt, e)


def sliding_indicators(
    tl: PersonTimeline,
    partition: geometry.ZonePartition,
    risk_map: Optional[HeatmapGrid],
    cfg: SceneConfig,
    window: WindowSpec,
    **kwargs,
) -> list[WindowResult]:
    """One vector per window end, stepping by ``window.stride``.

    Window ends run from first_frame + tau - 1 to the last frame. A timeline
    shorter than tau yields a single window ending at its last frame, flagged
    as truncated.
    """
    if window.tau <= 0:
        raise ConfigError("sliding windows need tau > 0")
    if len(tl) == 0:
        return []
    first, last = int(tl.frames[0]), int(tl.frames[-1])
    platform_points = kwargs.pop("platform_points", None)
    if platform_points is None and risk_map is not None:
        platform_points = project_foot_points(tl, cfg)
    if last - first + 1 < window.tau:
        vec = compute_indicators(tl, partition, risk_map, cfg, window, last,
                                 platform_points=platform_points, **kwargs)
        return [WindowResult(last, vec, True)]
    out = []
    for t in range(first + window.tau - 1, last + 1, window.stride):
        vec = compute_indicators(tl, partition, risk_map, cfg, window, t, platform_points=platform_points, **kwargs)
        out.append(WindowResult(t, vec, False))
    return out
