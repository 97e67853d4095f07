"""Perception-stream and scene-configuration parsing.

A perception stream is newline-delimited JSON, one record per (frame, person)::

    {"f": 12, "id": 3, "bbox": [x, y, w, h], "ll": [x, y] | null,
     "rl": [x, y] | null, "act": "LookTunnel" | "Walk" | "Stand" | null}

Unknown keys are ignored. Coordinates are image pixels.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import IntEnum
from pathlib import Path
from typing import IO, Iterable, Optional, Sequence

import numpy as np

from ._plane import is_simple_polygon
from .projection import Homography


class IngestError(ValueError):
    """Base class for stream and scene validation failures."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class StreamParseError(IngestError):
    pass


class SchemaError(IngestError):
    pass


class OrderingError(IngestError):
    pass


class ConfigError(IngestError):
    pass


class Activity(IntEnum):
    NONE = 0
    LOOK_TUNNEL = 1
    WALK = 2
    STAND = 3

    @property
    def label(self) -> Optional[str]:
        return _ACT_LABELS[self]

    @classmethod
    def parse(cls, label) -> "Activity":
        # anything unrecognised is "no evidence", never Stand
        return _ACT_CODES.get(label, cls.NONE)


_ACT_LABELS = {
    Activity.NONE: None,
    Activity.LOOK_TUNNEL: "LookTunnel",
    Activity.WALK: "Walk",
    Activity.STAND: "Stand",
}
_ACT_CODES = {v: k for k, v in _ACT_LABELS.items() if v is not None}


@dataclass(frozen=True)
class GridSpec:
    xmin: float
    xmax: float
    ymin: float
    ymax: float
    cell: float

    def __post_init__(self):
        if not self.cell > 0:
            raise ConfigError("grid cell size must be > 0")
        if not (self.xmax > self.xmin and self.ymax > self.ymin):
            raise ConfigError("grid extent must have positive width and height")

    @property
    def shape(self) -> tuple[int, int]:
        """(rows, cols) = (ny, nx)."""
        nx = math.ceil((self.xmax - self.xmin) / self.cell - 1e-9)
        ny = math.ceil((self.ymax - self.ymin) / self.cell - 1e-9)
        return max(ny, 1), max(nx, 1)

    def to_dict(self) -> dict:
        return {"xmin": self.xmin, "xmax": self.xmax, "ymin": self.ymin, "ymax": self.ymax, "cell": self.cell}


CORNER_NAMES = ("T_L", "T_R", "B_L", "B_R")


@dataclass(frozen=True)
class SceneConfig:
    """Camera to platform calibration for one station view.

    ``offset_d`` is the far-end band depth measured in the units of the
    corner points (image pixels); see ``geometry.offset_from_meters`` to
    derive it from a metric depth.
    """

    corners: dict
    homography: Homography
    offset_d: float
    fps: float
    grid: GridSpec
    alpha: float = 1 / 5
    beta: float = 1 / 7
    yellow_boundary_override: Optional[tuple] = None

    def __post_init__(self):
        missing = [k for k in CORNER_NAMES if k not in self.corners]
        if missing:
            raise ConfigError(f"missing corners: {', '.join(missing)}")
        corners = {k: (float(self.corners[k][0]), float(self.corners[k][1])) for k in CORNER_NAMES}
        object.__setattr__(self, "corners", corners)
        if not isinstance(self.homography, Homography):
            object.__setattr__(self, "homography", Homography(np.asarray(self.homography, dtype=float)))
        quad = [corners["T_L"], corners["T_R"], corners["B_R"], corners["B_L"]]
        if not is_simple_polygon(quad):
            raise ConfigError("corner quadrilateral T_L, T_R, B_R, B_L is not simple")
        if not 0 < self.alpha < 0.5:
            raise ConfigError("alpha must lie in (0, 1/2)")
        if not 0 < self.beta < 0.5:
            raise ConfigError("beta must lie in (0, 1/2)")
        if not self.offset_d > 0:
            raise ConfigError("offset_d must be > 0")
        if not self.fps > 0:
            raise ConfigError("fps must be > 0")
        if self.yellow_boundary_override is not None:
            pts = tuple((float(p[0]), float(p[1])) for p in self.yellow_boundary_override)
            if len(pts) < 2:
                raise ConfigError("yellow boundary override needs at least two points")
            object.__setattr__(self, "yellow_boundary_override", pts)

    def corner(self, name: str) -> np.ndarray:
        return np.array(self.corners[name], dtype=float)

    def replace(self, **changes) -> "SceneConfig":
        data = {
            "corners": self.corners,
            "homography": self.homography,
            "offset_d": self.offset_d,
            "fps": self.fps,
            "grid": self.grid,
            "alpha": self.alpha,
            "beta": self.beta,
            "yellow_boundary_override": self.yellow_boundary_override,
        }
        data.update(changes)
        return SceneConfig(**data)

    def to_dict(self) -> dict:
        return {
            "corners": {k: list(v) for k, v in self.corners.items()},
            "homography": self.homography.tolist(),
            "offset_d": self.offset_d,
            "alpha": self.alpha,
            "beta": self.beta,
            "fps": self.fps,
            "grid": self.grid.to_dict(),
            "yellow_boundary_override": (
                None if self.yellow_boundary_override is None else [list(p) for p in self.yellow_boundary_override]
            ),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "SceneConfig":
        try:
            grid = doc["grid"]
            return cls(
                corners=doc["corners"],
                homography=Homography(np.asarray(doc.get("homography", np.eye(3)), dtype=float)),
                offset_d=float(doc["offset_d"]),
                fps=float(doc["fps"]),
                grid=GridSpec(
                    float(grid["xmin"]), float(grid["xmax"]), float(grid["ymin"]), float(grid["ymax"]),
                    float(grid["cell"]),
                ),
                alpha=float(doc.get("alpha", 1 / 5)),
                beta=float(doc.get("beta", 1 / 7)),
                yellow_boundary_override=doc.get("yellow_boundary_override"),
            )
        except KeyError as exc:
            raise ConfigError(f"scene config is missing field {exc.args[0]!r}") from None
        except (TypeError, IndexError) as exc:
            raise ConfigError(f"malformed scene config: {exc}") from None
        except ValueError as exc:
            if isinstance(exc, IngestError):
                raise
            raise ConfigError(str(exc)) from None


def load_scene(path) -> SceneConfig:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc.msg})", exc.lineno) from None
    return SceneConfig.from_dict(doc)


def dump_scene(cfg: SceneConfig, path) -> None:
    Path(path).write_text(json.dumps(cfg.to_dict(), indent=2, sort_keys=True) + "\n")


@dataclass(frozen=True)
class FrameObservation:
    frame_index: int
    person_id: int
    bbox: tuple  # (x, y, w, h)
    left_leg: Optional[tuple] = None
    right_leg: Optional[tuple] = None
    activity: Activity = Activity.NONE


def derive_foot_point(obs: FrameObservation) -> tuple[float, float]:
    """Ground-contact proxy: leg midpoint, else the single leg, else bbox bottom-center."""
    ll, rl = obs.left_leg, obs.right_leg
    if ll is not None and rl is not None:
        return ((ll[0] + rl[0]) / 2.0, (ll[1] + rl[1]) / 2.0)
    if ll is not None:
        return (float(ll[0]), float(ll[1]))
    if rl is not None:
        return (float(rl[0]), float(rl[1]))
    x, y, w, h = obs.bbox
    return (x + w / 2.0, y + h)


def foot_points(bbox: np.ndarray, left: np.ndarray, right: np.ndarray) -> np.ndarray:
    """Vectorized ``derive_foot_point``; missing legs are NaN rows."""
    has_l = ~np.isnan(left[:, 0])
    has_r = ~np.isnan(right[:, 0])
    out = np.column_stack([bbox[:, 0] + bbox[:, 2] / 2.0, bbox[:, 1] + bbox[:, 3]])
    out[has_l] = left[has_l]
    out[has_r] = right[has_r]
    both = has_l & has_r
    out[both] = (left[both] + right[both]) / 2.0
    return out


@dataclass(eq=False)
class PersonTimeline:
    """Time-ordered observations of one tracked person, stored column-wise.

    Missing leg keypoints are NaN rows in ``left_leg`` / ``right_leg``.
    """

    person_id: int
    frames: np.ndarray
    bbox: np.ndarray
    left_leg: np.ndarray
    right_leg: np.ndarray
    activity: np.ndarray
    video_id: str = ""
    label: Optional[int] = None
    foot_points: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.frames = np.asarray(self.frames, dtype=np.int64).reshape(-1)
        n = len(self.frames)
        self.bbox = np.asarray(self.bbox, dtype=float).reshape(n, 4)
        self.left_leg = np.asarray(self.left_leg, dtype=float).reshape(n, 2)
        self.right_leg = np.asarray(self.right_leg, dtype=float).reshape(n, 2)
        self.activity = np.asarray(self.activity, dtype=np.int8).reshape(n)
        if n > 1 and np.any(np.diff(self.frames) <= 0):
            raise OrderingError(f"person {self.person_id}: frame indices are not strictly increasing")
        if self.label not in (None, 0, 1):
            raise SchemaError(f"person {self.person_id}: label must be 0, 1 or None")
        self.foot_points = foot_points(self.bbox, self.left_leg, self.right_leg)

    def __len__(self) -> int:
        return len(self.frames)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PersonTimeline):
            return NotImplemented
        return (
            self.person_id == other.person_id
            and self.video_id == other.video_id
            and self.label == other.label
            and np.array_equal(self.frames, other.frames)
            and np.array_equal(self.bbox, other.bbox)
            and np.array_equal(self.left_leg, other.left_leg, equal_nan=True)
            and np.array_equal(self.right_leg, other.right_leg, equal_nan=True)
            and np.array_equal(self.activity, other.activity)
        )

    @property
    def key(self) -> str:
        return f"{self.video_id}/{self.person_id}"

    @property
    def samples(self) -> list[FrameObservation]:
        out = []
        for i in range(len(self)):
            ll = None if np.isnan(self.left_leg[i, 0]) else tuple(self.left_leg[i].tolist())
            rl = None if np.isnan(self.right_leg[i, 0]) else tuple(self.right_leg[i].tolist())
            out.append(
                FrameObservation(
                    int(self.frames[i]), self.person_id, tuple(self.bbox[i].tolist()), ll, rl,
                    Activity(int(self.activity[i])),
                )
            )
        return out

    def slice_frames(self, first: int, last: int) -> "PersonTimeline":
        """Samples with first <= frame_index <= last."""
        lo = np.searchsorted(self.frames, first, side="left")
        hi = np.searchsorted(self.frames, last, side="right")
        return PersonTimeline(
            self.person_id, self.frames[lo:hi], self.bbox[lo:hi], self.left_leg[lo:hi],
            self.right_leg[lo:hi], self.activity[lo:hi], self.video_id, self.label,
        )

    @classmethod
    def from_samples(cls, samples: Sequence[FrameObservation], video_id: str = "", label=None) -> "PersonTimeline":
        if not samples:
            raise SchemaError("a timeline needs at least one sample")
        nan2 = (math.nan, math.nan)
        return cls(
            person_id=samples[0].person_id,
            frames=[s.frame_index for s in samples],
            bbox=[s.bbox for s in samples],
            left_leg=[s.left_leg if s.left_leg is not None else nan2 for s in samples],
            right_leg=[s.right_leg if s.right_leg is not None else nan2 for s in samples],
            activity=[int(s.activity) for s in samples],
            video_id=video_id,
            label=label,
        )


def _point(value, name: str, line: int):
    if value is None:
        return None
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise SchemaError(f"{name!r} must be [x, y] or null", line)
    try:
        x, y = float(value[0]), float(value[1])
    except (TypeError, ValueError):
        raise SchemaError(f"{name!r} must hold numbers", line) from None
    if not (math.isfinite(x) and math.isfinite(y)):
        raise SchemaError(f"{name!r} must be finite", line)
    return (x, y)


def _inside_expanded_bbox(p, bbox) -> bool:
    x, y, w, h = bbox
    cx, cy = x + w / 2.0, y + h / 2.0
    return abs(p[0] - cx) <= 0.75 * w + 1e-9 and abs(p[1] - cy) <= 0.75 * h + 1e-9


def parse_record(doc, line: int) -> FrameObservation:
    if not isinstance(doc, dict):
        raise SchemaError("record must be a JSON object", line)
    for key in ("f", "id", "bbox"):
        if key not in doc:
            raise SchemaError(f"missing mandatory field {key!r}", line)
    f, pid = doc["f"], doc["id"]
    if isinstance(f, bool) or not isinstance(f, int) or f < 0:
        raise SchemaError("'f' must be an integer >= 0", line)
    if isinstance(pid, bool) or not isinstance(pid, int):
        raise SchemaError("'id' must be an integer", line)
    bbox = doc["bbox"]
    if not isinstance(bbox, (list, tuple)) or len(bbox) != 4:
        raise SchemaError("'bbox' must be [x, y, w, h]", line)
    try:
        bbox = tuple(float(v) for v in bbox)
    except (TypeError, ValueError):
        raise SchemaError("'bbox' must hold numbers", line) from None
    if not all(math.isfinite(v) for v in bbox) or bbox[2] < 0 or bbox[3] < 0:
        raise SchemaError("'bbox' must be finite with non-negative size", line)
    ll = _point(doc.get("ll"), "ll", line)
    rl = _point(doc.get("rl"), "rl", line)
    for name, p in (("ll", ll), ("rl", rl)):
        if p is not None and not _inside_expanded_bbox(p, bbox):
            raise SchemaError(f"keypoint {name!r} lies outside the 1.5x expanded bbox", line)
    act = doc.get("act")
    if act is not None and not isinstance(act, str):
        raise SchemaError("'act' must be a string or null", line)
    return FrameObservation(f, pid, bbox, ll, rl, Activity.parse(act))


def parse_stream(text_stream: Iterable[str] | str, video_id: str = "") -> list[PersonTimeline]:
    """Group stream records into one timeline per person id (ordered by first appearance)."""
    if isinstance(text_stream, str):
        text_stream = text_stream.splitlines()
    by_id: dict[int, list[FrameObservation]] = {}
    for line_no, raw in enumerate(text_stream, start=1):
        raw = raw.strip()
        if not raw:
            continue
        try:
            doc = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise StreamParseError(f"malformed record ({exc.msg})", line_no) from None
        obs = parse_record(doc, line_no)
        seq = by_id.setdefault(obs.person_id, [])
        if seq and obs.frame_index <= seq[-1].frame_index:
            raise OrderingError(
                f"person {obs.person_id}: frame {obs.frame_index} does not follow frame {seq[-1].frame_index}",
                line_no,
            )
        seq.append(obs)
    return [PersonTimeline.from_samples(seq, video_id=video_id) for seq in by_id.values()]


def read_stream(path, video_id: Optional[str] = None) -> list[PersonTimeline]:
    path = Path(path)
    with path.open() as fh:
        return parse_stream(fh, video_id=path.stem if video_id is None else video_id)


def _num(v: float):
    return int(v) if float(v).is_integer() and abs(v) < 2**53 else float(v)


def serialize_stream(timelines: Sequence[PersonTimeline]) -> str:
    """Inverse of ``parse_stream``: records ordered by (frame, person)."""
    rows = []
    for tl in timelines:
        for i in range(len(tl)):
            ll = None if np.isnan(tl.left_leg[i, 0]) else [_num(v) for v in tl.left_leg[i]]
            rl = None if np.isnan(tl.right_leg[i, 0]) else [_num(v) for v in tl.right_leg[i]]
            rec = {
                "f": int(tl.frames[i]),
                "id": int(tl.person_id),
                "bbox": [_num(v) for v in tl.bbox[i]],
                "ll": ll,
                "rl": rl,
                "act": Activity(int(tl.activity[i])).label,
            }
            rows.append((int(tl.frames[i]), int(tl.person_id), rec))
    rows.sort(key=lambda r: (r[0], r[1]))
    return "".join(json.dumps(r[2], separators=(",", ":")) + "\n" for r in rows)


def write_stream(timelines: Sequence[PersonTimeline], path_or_fh: "str | Path | IO[str]") -> None:
    text = serialize_stream(timelines)
    if hasattr(path_or_fh, "write"):
        path_or_fh.write(text)
    else:
        Path(path_or_fh).write_text(text)
