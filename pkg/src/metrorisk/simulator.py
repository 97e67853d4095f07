"""Seeded synthetic platform scenarios with ground truth.

Agents walk between waypoints in platform coordinates (meters; x from the wall
to the yellow line, y from the far end toward the camera) and are rendered
into the image through the inverse homography. Each waypoint is drawn inside
a region chosen so the route's zone string is known in advance:

* ``A`` / ``B``  inside zone A / B, below the far-end band
* ``M``          between the two strips, below the far-end band
* ``C``          between the two strips, inside the far-end band
* ``Y``          straight across the yellow line from a ``B`` waypoint

Routes only move between these regions along straight lines whose zone
crossings are fixed by convexity (an excursion to ``Y`` always starts and
ends at the same ``B`` waypoint). The truth log's expected indicators are
derived from the script: ``bf`` from the waypoint zone string, ``ncr`` from
the number of excursions, ``lt`` from the scripted gaze runs, ``e`` from the
far-end visits; ``ty`` / ``ly`` count the excursion frames in which a leg is
past the line.

Noise (pixel jitter, frame dropout, per-second label flips) is applied after
the truth is logged.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, replace
from typing import Optional

import numpy as np

from . import geometry
from .indicators import DEFAULT_HYSTERESIS, DEFAULT_LT_MIN_EVENTS, back_and_forth
from .ingest import Activity, GridSpec, PersonTimeline, SceneConfig
from .projection import apply, estimate, invert

PLATFORM_WIDTH = 4.0   # wall to yellow line, m
PLATFORM_LENGTH = 24.0  # far end to near end, m
LEG_HALF_SPAN = 0.12   # m
WALK_SPEED = 1.2       # m/s
FAR_END_DEPTH = 2.0    # m

DEFAULT_IMAGE_CORNERS = {
    "T_L": (540.0, 140.0),
    "T_R": (700.0, 140.0),
    "B_L": (160.0, 700.0),
    "B_R": (1080.0, 700.0),
}


class ScenarioError(ValueError):
    pass


@dataclass(frozen=True)
class NoiseSpec:
    pos_jitter_px: float = 2.0
    dropout_prob: float = 0.02
    label_flip_prob: float = 0.01  # per one-second block

    def __post_init__(self):
        if self.pos_jitter_px < 0:
            raise ScenarioError("pos_jitter_px must be >= 0")
        for name in ("dropout_prob", "label_flip_prob"):
            v = getattr(self, name)
            if not 0 <= v <= 1:
                raise ScenarioError(f"{name} must lie in [0, 1]")

    @property
    def is_zero(self) -> bool:
        return self.pos_jitter_px == 0 and self.dropout_prob == 0 and self.label_flip_prob == 0


NO_NOISE = NoiseSpec(0.0, 0.0, 0.0)


@dataclass(frozen=True)
class ScenarioSpec:
    """One synthetic video.

    At-risk agents express each of pacing, a yellow-line excursion and tunnel
    gazing with probability ``express_prob`` (1.0 makes every agent express
    all three); ``far_end_prob`` governs far-end visits. Control agents may
    glance at the tunnel (``control_look_prob``) or move once to another
    waiting spot (``control_relocate_prob``).
    """

    scene: SceneConfig
    n_control: int = 2
    n_at_risk: int = 1
    duration_s: float = 300.0
    noise: NoiseSpec = NoiseSpec()
    pacing_cycles: int = 2
    yellow_dwell_s: float = 8.0
    look_tunnel_events: int = 2
    far_end_prob: float = 0.35
    express_prob: float = 0.7
    control_look_prob: float = 0.3
    control_relocate_prob: float = 0.25
    seed: int = 0
    video_id: str = "video-000"

    def __post_init__(self):
        if self.n_control < 0 or self.n_at_risk < 0:
            raise ScenarioError("agent counts must be >= 0")
        if not self.duration_s > 0:
            raise ScenarioError("duration_s must be > 0")
        if self.pacing_cycles < 0 or self.look_tunnel_events < 0 or self.yellow_dwell_s < 0:
            raise ScenarioError("behavior intensities must be >= 0")
        for name in ("far_end_prob", "express_prob", "control_look_prob", "control_relocate_prob"):
            if not 0 <= getattr(self, name) <= 1:
                raise ScenarioError(f"{name} must lie in [0, 1]")


@dataclass
class AgentTruth:
    person_id: int
    label: int
    frames: np.ndarray
    zone: np.ndarray       # 0 other, 1 A, 2 B (per frame, pre-noise)
    in_c: np.ndarray
    yellow: np.ndarray
    activity: np.ndarray
    expected: dict
    script: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "person_id": self.person_id,
            "label": self.label,
            "first_frame": int(self.frames[0]) if len(self.frames) else None,
            "n_frames": int(len(self.frames)),
            "zone": _rle(self.zone),
            "in_c": _rle(self.in_c.astype(int)),
            "yellow": _rle(self.yellow.astype(int)),
            "activity": _rle(self.activity),
            "expected": self.expected,
            "script": self.script,
        }


def _rle(a) -> list:
    a = np.asarray(a)
    if len(a) == 0:
        return []
    cut = np.flatnonzero(a[1:] != a[:-1]) + 1
    starts = np.concatenate([[0], cut])
    stops = np.concatenate([cut, [len(a)]])
    return [[int(a[s]), int(e - s)] for s, e in zip(starts, stops)]


@dataclass
class Scenario:
    spec: ScenarioSpec
    timelines: list           # observed (noisy) PersonTimelines
    clean_timelines: list     # the same agents without noise
    truth: list               # AgentTruth per agent

    @property
    def labels(self) -> dict:
        return {t.person_id: t.label for t in self.truth}

    def truth_json(self) -> str:
        doc = {
            "video_id": self.spec.video_id,
            "fps": self.spec.scene.fps,
            "hysteresis_frames": DEFAULT_HYSTERESIS,
            "lt_min_events": DEFAULT_LT_MIN_EVENTS,
            "agents": [t.to_dict() for t in self.truth],
        }
        return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"

    def labels_csv(self) -> str:
        rows = ["video_id,person_id,label"]
        rows += [f"{self.spec.video_id},{t.person_id},{t.label}" for t in self.truth]
        return "\n".join(rows) + "\n"


# ---------------------------------------------------------------- scene


def default_scene(corners: Optional[dict] = None, fps: float = 10.0) -> SceneConfig:
    """Synthetic camera: the platform rectangle seen in perspective."""
    corners = dict(corners or DEFAULT_IMAGE_CORNERS)
    img = np.array([corners[k] for k in ("T_L", "T_R", "B_L", "B_R")])
    plat = np.array([[0.0, 0.0], [PLATFORM_WIDTH, 0.0], [0.0, PLATFORM_LENGTH], [PLATFORM_WIDTH, PLATFORM_LENGTH]])
    h = estimate(img, plat).homography
    grid = GridSpec(-0.5, PLATFORM_WIDTH + 1.5, -0.5, PLATFORM_LENGTH + 0.5, 0.1)
    cfg = SceneConfig(corners=corners, homography=h, offset_d=1.0, fps=fps, grid=grid)
    return cfg.replace(offset_d=geometry.offset_from_meters(cfg, FAR_END_DEPTH))


def perturbed_scene(rng: np.random.Generator, fps: float = 10.0, spread_px: float = 20.0) -> SceneConfig:
    corners = {k: (v[0] + float(rng.uniform(-spread_px, spread_px)), v[1] + float(rng.uniform(-spread_px, spread_px)))
               for k, v in DEFAULT_IMAGE_CORNERS.items()}
    return default_scene(corners, fps)


# ---------------------------------------------------------------- truth geometry


def _convex_inside(poly, pts: np.ndarray, margin: float = 0.0) -> np.ndarray:
    """Half-plane test against a convex polygon; edge points count as inside
    for margin 0, a positive margin demands that clearance in pixels."""
    poly = np.asarray(poly, dtype=float)
    area2 = np.sum(poly[:, 0] * np.roll(poly[:, 1], -1) - np.roll(poly[:, 0], -1) * poly[:, 1])
    orient = 1.0 if area2 > 0 else -1.0
    ok = np.ones(len(pts), dtype=bool)
    for i in range(len(poly)):
        a, b = poly[i], poly[(i + 1) % len(poly)]
        e = b - a
        c = orient * (e[0] * (pts[:, 1] - a[1]) - e[1] * (pts[:, 0] - a[0])) / np.hypot(*e)
        ok &= c >= margin
    return ok


def _past_line(a, b, ref, pts: np.ndarray, margin: float = 0.0) -> np.ndarray:
    """Strictly on the side of line a-b away from ``ref`` (by more than margin px)."""
    a, b = np.asarray(a, float), np.asarray(b, float)
    e = b - a
    n = np.hypot(*e)
    c = (e[0] * (pts[:, 1] - a[1]) - e[1] * (pts[:, 0] - a[0])) / n
    r = e[0] * (ref[1] - a[1]) - e[1] * (ref[0] - a[0])
    signed = -c if r > 0 else c
    return signed > margin


class _Stage:
    """Per-scene helpers shared by all agents of a scenario."""

    def __init__(self, scene: SceneConfig):
        self.scene = scene
        self.part = geometry.build_zone_partition(scene)
        self.h_inv = invert(scene.homography)
        tl, tr, bl, br = (scene.corners[k] for k in ("T_L", "T_R", "B_L", "B_R"))
        self.quad = [tl, tr, br, bl]
        self.mid = [self.part.l_left[0], self.part.l_right[0], self.part.l_right[1], self.part.l_left[1]]
        self.yellow_line = (tr, br)
        self.centroid = self.part.centroid
        self.far_line = self.part.s_d

    def render(self, p: np.ndarray):
        """Platform foot positions -> (left leg, right leg, foot, bbox) in pixels."""
        off = np.array([LEG_HALF_SPAN, 0.0])
        left = apply(self.h_inv, p - off)
        right = apply(self.h_inv, p + off)
        foot = (left + right) / 2.0
        lo = apply(self.h_inv, p - np.array([0.5, 0.0]))
        hi = apply(self.h_inv, p + np.array([0.5, 0.0]))
        scale = np.hypot(*(hi - lo).T)  # px per meter across the platform
        w = 0.6 * scale
        hgt = 1.55 * scale
        bbox = np.column_stack([foot[:, 0] - w / 2.0, foot[:, 1] - hgt, w, hgt])
        return left, right, foot, bbox

    def below_far(self, pts, margin):
        q_l, q_r = self.far_line
        return _past_line(q_l, q_r, self.part.zone_c[0], pts, margin)

    def truth(self, left, right, foot):
        z = np.zeros(len(foot), dtype=np.int8)
        z[_convex_inside(self.part.zone_a, foot)] = 1
        z[_convex_inside(self.part.zone_b, foot)] = 2
        in_c = _convex_inside(self.part.zone_c, foot)
        tr, br = self.yellow_line
        yellow = _past_line(tr, br, self.centroid, left) | _past_line(tr, br, self.centroid, right)
        return z, in_c, yellow

    def sample(self, rng: np.random.Generator, region: str, y_range=None, batches: int = 8) -> np.ndarray:
        """Rejection-sample a platform point whose rendered foot lies in ``region``
        with a few pixels of clearance; candidates are drawn 64 at a time."""
        if region not in ("A", "B", "M", "C"):
            raise ScenarioError(f"unknown region {region!r}")
        margin = 2.5
        y0, y1 = y_range or (0.0, PLATFORM_LENGTH)
        tr, br = self.yellow_line
        for _ in range(batches):
            p = np.column_stack([rng.uniform(0.0, PLATFORM_WIDTH, 64), rng.uniform(y0, y1, 64)])
            left, right, foot, _ = self.render(p)
            ok = ~(_past_line(tr, br, self.centroid, right, -margin)
                   | _past_line(tr, br, self.centroid, left, -margin))
            if region == "A":
                ok &= _convex_inside(self.part.zone_a, foot, margin) & self.below_far(foot, margin)
            elif region == "B":
                ok &= _convex_inside(self.part.zone_b, foot, margin) & self.below_far(foot, margin)
            elif region == "M":
                ok &= _convex_inside(self.mid, foot, margin) & self.below_far(foot, margin)
            else:
                ok &= _convex_inside(self.mid, foot, margin) & _convex_inside(self.part.zone_c, foot, margin)
            hit = np.flatnonzero(ok)
            if len(hit):
                return p[hit[0]]
        raise ScenarioError(f"could not place a waypoint in region {region!r}; zone geometry too small")

    def across_yellow(self, rng: np.random.Generator, b_point: np.ndarray) -> np.ndarray:
        for _ in range(100):
            p = np.array([[PLATFORM_WIDTH + LEG_HALF_SPAN + rng.uniform(0.15, 0.45), b_point[1]]])
            left, right, foot, _ = self.render(p)
            tr, br = self.yellow_line
            if _past_line(tr, br, self.centroid, left, 2.5)[0] and not _convex_inside(self.quad, foot)[0]:
                return p[0]
        raise ScenarioError("could not place a yellow-line waypoint")


# ---------------------------------------------------------------- scripts


@dataclass
class _Script:
    """Waypoints with dwell lengths; activities are filled per frame."""

    points: list = field(default_factory=list)    # platform positions
    regions: list = field(default_factory=list)   # region letter per waypoint
    dwell: list = field(default_factory=list)     # frames
    gaze: list = field(default_factory=list)      # list of (offset, length) per waypoint

    def add(self, p, region, dwell, gaze=()):
        self.points.append(np.asarray(p, dtype=float))
        self.regions.append(region)
        self.dwell.append(int(dwell))
        self.gaze.append(list(gaze))

    def frames(self, fps: float) -> int:
        return len(self.render_path(fps)[0])

    def render_path(self, fps: float):
        step = WALK_SPEED / fps
        pos, act, seg = [], [], []
        for i, p in enumerate(self.points):
            if i > 0:
                prev = self.points[i - 1]
                m = max(1, int(math.ceil(np.hypot(*(p - prev)) / step)))
                s = np.arange(1, m + 1)[:, None] / m
                pos.append(prev + s * (p - prev))
                act.append(np.full(m, Activity.WALK, dtype=np.int8))
                seg.append(np.full(m, -1))
            d = self.dwell[i]
            pos.append(np.repeat(p[None, :], d, axis=0))
            a = np.full(d, Activity.STAND, dtype=np.int8)
            for off, length in self.gaze[i]:
                a[off:off + length] = Activity.LOOK_TUNNEL
            act.append(a)
            seg.append(np.full(d, i))
        if not pos:
            return np.zeros((0, 2)), np.zeros(0, dtype=np.int8), np.zeros(0, dtype=int)
        return np.concatenate(pos), np.concatenate(act), np.concatenate(seg)


def _seconds(rng, lo, hi, fps) -> int:
    return max(DEFAULT_HYSTERESIS + 1, int(round(rng.uniform(lo, hi) * fps)))


def _gaze_plan(rng, n_runs: int, fps: float):
    """Stand / LookTunnel alternation for a dwell; runs are fenced by Stand frames."""
    runs, t = [], _seconds(rng, 0.5, 1.5, fps)
    for _ in range(n_runs):
        length = _seconds(rng, 1.0, 3.0, fps)
        runs.append((t, length))
        t += length + _seconds(rng, 1.0, 2.0, fps)
    return runs, t


def _control_script(stage: _Stage, rng, spec: ScenarioSpec, budget: int) -> _Script:
    fps = spec.scene.fps
    s = _Script()
    near = (PLATFORM_LENGTH - 4.0, PLATFORM_LENGTH - 0.5)
    s.add(stage.sample(rng, "M", near), "M", 0)
    for k in range(2 if rng.random() < spec.control_relocate_prob else 1):
        region = str(rng.choice(["A", "B", "M"], p=[0.35, 0.35, 0.3]))
        wait = _seconds(rng, 20.0, 120.0, fps)
        gaze = []
        if k == 0 and rng.random() < spec.control_look_prob:
            runs, used = _gaze_plan(rng, 1, fps)
            if used < wait:
                gaze = runs
        s.add(stage.sample(rng, region, (FAR_END_DEPTH + 1.0, PLATFORM_LENGTH)), region, wait, gaze)
    s.add(stage.sample(rng, "M", near), "M", 0)
    return _fit(s, budget, fps)


def _at_risk_script(stage: _Stage, rng, spec: ScenarioSpec, budget: int) -> _Script:
    fps = spec.scene.fps
    s = _Script()
    near = (PLATFORM_LENGTH - 4.0, PLATFORM_LENGTH - 0.5)
    s.add(stage.sample(rng, "M", near), "M", 0)
    lower = (FAR_END_DEPTH + 1.0, PLATFORM_LENGTH)

    blocks = []
    if spec.pacing_cycles > 0 and rng.random() < spec.express_prob:
        blocks.append("pace")
    if spec.yellow_dwell_s > 0 and rng.random() < spec.express_prob:
        blocks.append("yellow")
    if spec.look_tunnel_events > 0 and rng.random() < spec.express_prob:
        blocks.append("gaze")
    if rng.random() < spec.far_end_prob:
        blocks.append("far")
    blocks.append("wait")
    order = [blocks[i] for i in rng.permutation(len(blocks))]

    for block in order:
        if block == "pace":
            a = stage.sample(rng, "A", lower)
            b = stage.sample(rng, "B", lower)
            s.add(a, "A", _seconds(rng, 1.0, 4.0, fps))
            for _ in range(spec.pacing_cycles):
                s.add(b, "B", _seconds(rng, 1.0, 4.0, fps))
                s.add(a, "A", _seconds(rng, 1.0, 4.0, fps))
        elif block == "yellow":
            b = stage.sample(rng, "B", lower)
            y = stage.across_yellow(rng, b)
            dwell = max(DEFAULT_HYSTERESIS + 1, int(round(spec.yellow_dwell_s * rng.uniform(0.5, 1.5) * fps)))
            s.add(b, "B", _seconds(rng, 1.0, 3.0, fps))
            s.add(y, "Y", dwell)
            s.add(b, "B", _seconds(rng, 1.0, 3.0, fps))
        elif block == "gaze":
            region = str(rng.choice(["A", "B", "M"]))
            runs, used = _gaze_plan(rng, spec.look_tunnel_events, fps)
            s.add(stage.sample(rng, region, lower), region, used, runs)
        elif block == "far":
            s.add(stage.sample(rng, "C"), "C", _seconds(rng, 2.0, 8.0, fps))
            s.add(stage.sample(rng, "M", lower), "M", _seconds(rng, 1.0, 3.0, fps))
        else:
            region = str(rng.choice(["A", "B", "M"]))
            s.add(stage.sample(rng, region, lower), region, _seconds(rng, 10.0, 60.0, fps))
    s.add(stage.sample(rng, "M", near), "M", 0)
    return _fit(s, budget, fps)


def _fit(s: _Script, budget: int, fps: float) -> _Script:
    """Make the rendered path fit the clip.

    Dwells off ``Y`` are shortened first, latest first, never below
    hysteresis + 1 frames (which keeps every visit registered) nor into their
    gaze runs. If that is not enough, whole trailing waypoints are dropped;
    an excursion to ``Y`` goes together with its return leg so every kept
    excursion still starts and ends on the same ``B`` waypoint.
    """
    floor = DEFAULT_HYSTERESIS + 1
    excess = s.frames(fps) - budget
    for i in reversed(range(len(s.points))):
        if excess <= 0:
            break
        keep = max([floor] + [off + length + 1 for off, length in s.gaze[i]])
        if s.regions[i] == "Y" or s.dwell[i] <= keep:
            continue
        cut = min(excess, s.dwell[i] - keep)
        s.dwell[i] -= cut
        excess -= cut
    while len(s.points) > 1 and s.frames(fps) > budget:
        for attr in ("points", "regions", "dwell", "gaze"):
            getattr(s, attr).pop()
        if s.regions and s.regions[-1] == "Y":
            for attr in ("points", "regions", "dwell", "gaze"):
                getattr(s, attr).pop()
    if s.frames(fps) > budget or s.frames(fps) == 0:
        raise ScenarioError("clip too short for any agent script")
    return s


def _expected(script: _Script, seg: np.ndarray, yellow: np.ndarray, fps: float) -> dict:
    ab = [r for r in script.regions if r in ("A", "B")]
    excursions = [i for i, r in enumerate(script.regions) if r == "Y"]
    on_frames = []
    for i in excursions:
        # frames of the out leg, the dwell and the return leg around waypoint i
        span = np.zeros(len(seg), dtype=bool)
        idx = np.flatnonzero(seg == i)
        start = np.flatnonzero(seg[: idx[0]] == i - 1)
        stop = np.flatnonzero(seg[idx[-1] + 1:] == i + 1)
        lo = start[-1] + 1 if len(start) else idx[0]
        hi = idx[-1] + 1 + (stop[0] if len(stop) else 0)
        span[lo:hi] = True
        on_frames.append(int((span & yellow).sum()))
    n_gaze = sum(len(g) for g in script.gaze)
    return {
        "cr": len(excursions) > 0,
        "ncr": len(excursions),
        "ty": sum(on_frames) / fps,
        "ly": max(on_frames, default=0) / fps,
        "bf": back_and_forth(ab),
        "lt": n_gaze >= DEFAULT_LT_MIN_EVENTS,
        "e": "C" in script.regions,
    }


# ---------------------------------------------------------------- generation


def _observe(rng, stage: _Stage, start: int, left, right, bbox, act, noise: NoiseSpec, fps: float):
    n = len(act)
    frames = start + np.arange(n)
    left, right, bbox, act = left.copy(), right.copy(), bbox.copy(), act.copy()
    if noise.pos_jitter_px > 0:
        shared = rng.normal(0.0, noise.pos_jitter_px, size=(n, 2))
        left += shared + rng.normal(0.0, noise.pos_jitter_px / 2.0, size=(n, 2))
        right += shared + rng.normal(0.0, noise.pos_jitter_px / 2.0, size=(n, 2))
        bbox[:, :2] += shared
    if noise.label_flip_prob > 0:
        block = max(1, int(round(fps)))
        for b0 in range(0, n, block):
            if rng.random() < noise.label_flip_prob:
                cur = int(act[b0])
                choices = [a for a in (0, 1, 2, 3) if a != cur]
                act[b0:b0 + block] = choices[int(rng.integers(len(choices)))]
    keep = np.ones(n, dtype=bool)
    if noise.dropout_prob > 0:
        keep = rng.random(n) >= noise.dropout_prob
        if not keep.any():
            keep[0] = True
    return frames[keep], left[keep], right[keep], bbox[keep], act[keep]


def generate(spec: ScenarioSpec) -> Scenario:
    """Render one scenario; identical specs give identical output."""
    ss = np.random.SeedSequence([int(spec.seed) & 0xFFFFFFFF, int(spec.seed) >> 32 & 0xFFFFFFFF])
    stage = _Stage(spec.scene)
    fps = spec.scene.fps
    total = int(round(spec.duration_s * fps))
    labels = [0] * spec.n_control + [1] * spec.n_at_risk
    agent_seeds = ss.spawn(len(labels))
    timelines, clean, truths = [], [], []
    for pid, (label, aseed) in enumerate(zip(labels, agent_seeds)):
        script_rng, noise_rng = (np.random.default_rng(s) for s in aseed.spawn(2))
        if label == 1:
            start = int(script_rng.integers(0, max(1, int(0.1 * total))))
            script = _at_risk_script(stage, script_rng, spec, total - start)
        else:
            start = int(script_rng.integers(0, max(1, int(0.5 * total))))
            script = _control_script(stage, script_rng, spec, total - start)
        pos, act, seg = script.render_path(fps)
        left, right, foot, bbox = stage.render(pos)
        zone, in_c, yellow = stage.truth(left, right, foot)
        frames = start + np.arange(len(act))
        expected = _expected(script, seg, yellow, fps)
        truths.append(AgentTruth(
            pid, label, frames, zone, in_c, yellow, act.copy(), expected,
            [{"region": r, "dwell": d, "gaze_runs": len(g)} for r, d, g in
             zip(script.regions, script.dwell, script.gaze)],
        ))
        clean.append(PersonTimeline(pid, frames, bbox, left, right, act, spec.video_id, label))
        obs = _observe(noise_rng, stage, start, left, right, bbox, act, spec.noise, fps)
        timelines.append(PersonTimeline(pid, obs[0], obs[3], obs[1], obs[2], obs[4], spec.video_id, label))
    return Scenario(spec, timelines, clean, truths)


# ---------------------------------------------------------------- corpora

PROFILES = ("smoke", "paper-shaped")


def benchmark_corpus(profile: str = "paper-shaped", seed: int = 0, noise: NoiseSpec = NoiseSpec()) -> list[ScenarioSpec]:
    """Scenario specs for a named profile.

    ``smoke``: 8 one-minute videos (two controls each, an at-risk agent in
    every other one). ``paper-shaped``: 122 five-minute videos, 66 of them
    with one at-risk agent, 190 controls spread so each video has at least one.
    """
    rng = np.random.default_rng(np.random.SeedSequence([int(seed) & 0xFFFFFFFF, 0x5EED]))
    if profile == "smoke":
        layout = [(2, i % 2) for i in range(8)]
        duration = 60.0
    elif profile == "paper-shaped":
        n_videos, n_at_risk, n_control = 122, 66, 190
        controls = np.ones(n_videos, dtype=int)
        extra = rng.choice(n_videos, size=n_control - n_videos, replace=True)
        np.add.at(controls, extra, 1)
        layout = [(int(controls[i]), 1 if i < n_at_risk else 0) for i in range(n_videos)]
        duration = 300.0
    else:
        raise ScenarioError(f"unknown profile {profile!r}; expected one of {PROFILES}")
    specs = []
    for i, (n_c, n_r) in enumerate(layout):
        scene = perturbed_scene(rng)
        specs.append(ScenarioSpec(
            scene=scene, n_control=n_c, n_at_risk=n_r, duration_s=duration, noise=noise,
            seed=int(rng.integers(0, 2**63 - 1)), video_id=f"{profile}-{seed}-{i:03d}",
        ))
    return specs


def spec_to_dict(spec: ScenarioSpec) -> dict:
    d = {k: v for k, v in asdict(replace(spec, scene=None)).items() if k != "scene"}
    d["scene"] = spec.scene.to_dict()
    return d


def to_instances(scenario: Scenario, clean: bool = False) -> list:
    """Whole-timeline indicators per agent, ready for cross-validation.

    ``pr`` is left at 0; the evaluation pipeline fills it per fold from the
    projected foot points.
    """
    from .evaluation import Instance
    from .indicators import compute_indicators, project_foot_points

    cfg = scenario.spec.scene
    part = geometry.build_zone_partition(cfg)
    out = []
    for tl in (scenario.clean_timelines if clean else scenario.timelines):
        pts = project_foot_points(tl, cfg)
        vec = compute_indicators(tl, part, None, cfg)
        out.append(Instance(scenario.spec.video_id, tl.person_id, int(tl.label), vec, pts))
    return out
