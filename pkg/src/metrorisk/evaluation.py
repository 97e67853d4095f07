"""Evaluation protocol: ROC-AUC, thresholded rates, video-grouped stratified splits and CV."""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from . import heatmap
from .indicators import FEATURE_NAMES, IndicatorVector
from .ingest import GridSpec
from .riskmodel import BoostParams, TreeEnsemble, predict, train

log = logging.getLogger(__name__)

DEFAULT_THRESHOLD = 0.2
METRICS = ("roc_auc", "sensitivity", "specificity", "fpr", "fnr")
METRIC_TITLES = {
    "roc_auc": "ROC-AUC",
    "sensitivity": "Sensitivity",
    "specificity": "Specificity",
    "fpr": "FPR",
    "fnr": "FNR",
}


class EvaluationError(ValueError):
    pass


class UndefinedMetricError(EvaluationError):
    pass


class FoldCountError(EvaluationError):
    pass


def _check(scores, labels):
    s = np.asarray(scores, dtype=float).reshape(-1)
    y = np.asarray(labels).reshape(-1).astype(int)
    if len(s) != len(y):
        raise EvaluationError("scores and labels differ in length")
    if len(s) == 0:
        raise EvaluationError("empty input")
    return s, y


def _average_ranks(s: np.ndarray) -> np.ndarray:
    order = np.argsort(s, kind="mergesort")
    ranks = np.empty(len(s))
    sorted_s = s[order]
    i = 0
    while i < len(s):
        j = i
        while j + 1 < len(s) and sorted_s[j + 1] == sorted_s[i]:
            j += 1
        ranks[order[i:j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def roc_auc(scores, labels) -> float:
    """Mann-Whitney AUC; tied pairs count one half."""
    s, y = _check(scores, labels)
    n_pos = int((y == 1).sum())
    n_neg = int((y == 0).sum())
    if n_pos == 0 or n_neg == 0:
        raise UndefinedMetricError("ROC-AUC needs both classes")
    r = _average_ranks(s)
    u = r[y == 1].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


@dataclass(frozen=True)
class ThresholdMetrics:
    sensitivity: float
    specificity: float
    fpr: float
    fnr: float
    threshold: float
    n_pos: int
    n_neg: int
    tp: int
    fp: int
    tn: int
    fn: int


def _complementary(k: int, n: int) -> tuple[float, float]:
    """(k/n, (n-k)/n) as floats with a == 1 - b and a + b == 1 exactly.

    The larger rate is divided out; the smaller is 1 minus it, which is exact
    for operands in [0.5, 1].
    """
    if n == 0:
        return math.nan, math.nan
    a = k / n
    if a >= 0.5:
        return a, 1.0 - a
    b = (n - k) / n
    return 1.0 - b, b


def confusion_at(scores, labels, threshold: float = DEFAULT_THRESHOLD) -> ThresholdMetrics:
    """Rates with positives predicted iff score > threshold (strict).

    A class absent from ``labels`` has its two rates reported as NaN.
    """
    s, y = _check(scores, labels)
    pred = s > threshold
    tp = int((pred & (y == 1)).sum())
    fn = int((~pred & (y == 1)).sum())
    fp = int((pred & (y == 0)).sum())
    tn = int((~pred & (y == 0)).sum())
    p, n = tp + fn, fp + tn
    sens, fnr = _complementary(tp, p)
    spec, fpr = _complementary(tn, n)
    return ThresholdMetrics(sens, spec, fpr, fnr, threshold, p, n, tp, fp, tn, fn)


# ---------------------------------------------------------------- splitting


@dataclass(frozen=True)
class Instance:
    """One person as the evaluation sees it.

    ``features`` holds every indicator; ``pr`` is recomputed per fold from
    ``platform_points`` whenever a pipeline rebuilds the risk map.
    """

    video_id: str
    person_id: int
    label: int
    features: IndicatorVector
    platform_points: Optional[np.ndarray] = None

    @property
    def key(self) -> str:
        return f"{self.video_id}/{self.person_id}"


def _group_table(items: Sequence) -> tuple[list[str], np.ndarray]:
    videos: dict[str, list[int]] = {}
    for it in items:
        counts = videos.setdefault(it.video_id, [0, 0])
        counts[int(it.label)] += 1
    names = list(videos)
    return names, np.array([videos[v] for v in names], dtype=float).reshape(-1, 2)


def _assign_groups(items: Sequence, shares: Sequence[float], seed: int) -> dict[str, int]:
    """Greedy video-to-bin assignment keeping per-class fill ratios level.

    Videos are visited largest first (seeded shuffle breaks ties). Each goes to
    the bin that minimizes the spread of class fill ratios (count / (share *
    class total)); ties go to the least-filled bin overall.
    """
    names, counts = _group_table(items)
    shares = np.asarray(shares, dtype=float)
    totals = counts.sum(axis=0)
    safe_totals = np.where(totals > 0, totals, 1.0)
    rng = np.random.default_rng(seed)
    perm = rng.permutation(len(names))
    order = sorted(perm, key=lambda i: (-counts[i].sum(), -np.std(counts[i] / safe_totals)))
    fill = np.zeros((len(shares), 2))
    assignment: dict[str, int] = {}
    for gi in order:
        c = counts[gi]
        best, best_key = 0, None
        for b in range(len(shares)):
            trial = fill.copy()
            trial[b] += c
            ratio = trial / (shares[:, None] * safe_totals[None, :])
            spread = float(np.sum(np.var(ratio[:, totals > 0], axis=0)))
            overall = float(trial[b].sum() / (shares[b] * totals.sum()))
            key = (round(spread, 12), round(overall, 12), b)
            if best_key is None or key < best_key:
                best, best_key = b, key
        fill[best] += c
        assignment[names[gi]] = best
    return assignment


def grouped_stratified_split(items: Sequence, train_fraction: float = 0.75, seed: int = 0):
    """(train, test) lists with whole videos on one side and class shares kept close."""
    if not 0 < train_fraction < 1:
        raise EvaluationError("train_fraction must lie in (0, 1)")
    _warn_thin_classes(items)
    assignment = _assign_groups(items, [train_fraction, 1.0 - train_fraction], seed)
    train_items = [it for it in items if assignment[it.video_id] == 0]
    test_items = [it for it in items if assignment[it.video_id] == 1]
    return train_items, test_items


def grouped_stratified_folds(items: Sequence, k: int = 10, seed: int = 0) -> list[list[int]]:
    """Test-index lists for k folds; every video lands in exactly one fold."""
    names, _ = _group_table(items)
    if k < 2:
        raise FoldCountError("need at least 2 folds")
    if len(names) < k:
        raise FoldCountError(f"{len(names)} videos cannot fill {k} folds")
    _warn_thin_classes(items)
    assignment = _assign_groups(items, [1.0 / k] * k, seed)
    folds: list[list[int]] = [[] for _ in range(k)]
    for i, it in enumerate(items):
        folds[assignment[it.video_id]].append(i)
    return folds


def _warn_thin_classes(items):
    per_class: dict[int, set] = {0: set(), 1: set()}
    for it in items:
        per_class[int(it.label)].add(it.video_id)
    for label, vids in per_class.items():
        if len(vids) < 2:
            warnings.warn(f"class {label} appears in {len(vids)} video(s); stratification is not possible",
                          stacklevel=3)


# ---------------------------------------------------------------- pipelines


class RiskPipeline:
    """Default fold pipeline: rebuild the risk map from training at-risk people,
    refresh ``pr`` on both sides, fit the booster, score the test side."""

    def __init__(self, grid: GridSpec, sigma: float = 0.5, params: BoostParams = BoostParams()):
        self.grid = grid
        self.sigma = sigma
        self.params = params
        self.last_map: Optional[heatmap.HeatmapGrid] = None
        self.last_model: Optional[TreeEnsemble] = None

    def risk_map(self, train_items: Sequence[Instance]) -> Optional[heatmap.HeatmapGrid]:
        trajs = [(it.key, it.platform_points) for it in train_items
                 if it.label == 1 and it.platform_points is not None]
        if not trajs:
            return None
        return heatmap.build_risk_map(trajs, self.grid, self.sigma)

    @staticmethod
    def design_matrix(items: Sequence[Instance], risk_map) -> np.ndarray:
        x = np.array([it.features.as_array() for it in items]).reshape(-1, len(FEATURE_NAMES))
        if risk_map is not None:
            for i, it in enumerate(items):
                if it.platform_points is not None:
                    x[i, 0] = heatmap.position_risk(risk_map, it.platform_points)
        return x

    def __call__(self, train_items, test_items) -> np.ndarray:
        hmap = self.risk_map(train_items)
        self.last_map = hmap
        x_train = self.design_matrix(train_items, hmap)
        y_train = np.array([it.label for it in train_items])
        model = train(x_train, y_train, self.params)
        self.last_model = model
        return np.asarray(predict(model, self.design_matrix(test_items, hmap)))


# ---------------------------------------------------------------- reporting


@dataclass
class FoldResult:
    index: int
    n_train: int
    n_test: int
    test_videos: list
    roc_auc: Optional[float]
    sensitivity: float
    specificity: float
    fpr: float
    fnr: float
    map_sources: Optional[list] = None


@dataclass
class EvalReport:
    roc_auc: float
    sensitivity: float
    specificity: float
    fpr: float
    fnr: float
    threshold: float
    n_pos: int
    n_neg: int
    sd: dict = field(default_factory=dict)
    folds: list = field(default_factory=list)
    k: int = 0
    seed: Optional[int] = None

    def to_dict(self) -> dict:
        out = {
            "threshold": self.threshold,
            "counts": {"n_pos": self.n_pos, "n_neg": self.n_neg},
            "k": self.k,
            "seed": self.seed,
            "mean": {m: getattr(self, m) for m in METRICS},
            "sd": dict(self.sd),
        }
        if self.folds:
            out["folds"] = [
                {
                    "index": f.index, "n_train": f.n_train, "n_test": f.n_test, "test_videos": f.test_videos,
                    **{m: getattr(f, m) for m in METRICS},
                }
                for f in self.folds
            ]
        return out

    def table(self) -> str:
        """Aligned two-line text table: metric titles over mean ± SD cells."""
        headers = [METRIC_TITLES[m] for m in METRICS]
        cells = []
        for m in METRICS:
            mean = getattr(self, m)
            sd = self.sd.get(m)
            cells.append(f"{mean:.3f}" if sd is None else f"{mean:.3f} ± {sd:.3f}")
        widths = [max(len(h), len(c)) for h, c in zip(headers, cells)]
        line1 = "  ".join(h.rjust(w) for h, w in zip(headers, widths))
        line2 = "  ".join(c.rjust(w) for c, w in zip(cells, widths))
        foot = f"threshold R > {self.threshold:g}; n_pos={self.n_pos} n_neg={self.n_neg}"
        if self.k:
            foot += f"; {self.k}-fold grouped CV (mean ± SD over folds)"
        return f"{line1}\n{line2}\n{foot}\n"


def evaluate_scores(scores, labels, threshold: float = DEFAULT_THRESHOLD) -> EvalReport:
    t = confusion_at(scores, labels, threshold)
    return EvalReport(roc_auc(scores, labels), t.sensitivity, t.specificity, t.fpr, t.fnr, threshold,
                      t.n_pos, t.n_neg)


def _mean_sd(values: list) -> tuple[float, float]:
    vals = [v for v in values if v is not None and not math.isnan(v)]
    if not vals:
        return math.nan, math.nan
    mean = float(np.mean(vals))
    sd = float(np.std(vals, ddof=1)) if len(vals) > 1 else 0.0
    return mean, sd


def cross_validate(
    items: Sequence[Instance],
    k: int = 10,
    pipeline: Optional[Callable] = None,
    seed: int = 0,
    threshold: float = DEFAULT_THRESHOLD,
    grid: Optional[GridSpec] = None,
) -> EvalReport:
    """k-fold video-grouped stratified CV; metrics reported as mean ± sample SD over folds.

    ``pipeline(train_items, test_items)`` returns test scores. When omitted a
    ``RiskPipeline`` over ``grid`` is used (the booster seed follows ``seed``).
    """
    items = list(items)
    if pipeline is None:
        if grid is None:
            raise EvaluationError("the default pipeline needs a heatmap grid")
        pipeline = RiskPipeline(grid, params=BoostParams(seed=seed))
    folds = grouped_stratified_folds(items, k, seed)
    results = []
    for fi, test_idx in enumerate(folds):
        test_set = set(test_idx)
        train_items = [it for i, it in enumerate(items) if i not in test_set]
        test_items = [items[i] for i in test_idx]
        scores = np.asarray(pipeline(train_items, test_items), dtype=float)
        labels = np.array([it.label for it in test_items])
        try:
            auc = roc_auc(scores, labels)
        except (UndefinedMetricError, EvaluationError):
            log.warning("fold %d has a single-class test set; AUC skipped", fi)
            auc = None
        t = confusion_at(scores, labels, threshold) if len(test_items) else None
        hmap = getattr(pipeline, "last_map", None)
        results.append(FoldResult(
            fi, len(train_items), len(test_items), sorted({it.video_id for it in test_items}), auc,
            t.sensitivity if t else math.nan, t.specificity if t else math.nan,
            t.fpr if t else math.nan, t.fnr if t else math.nan,
            sorted(hmap.sources) if hmap is not None else None,
        ))
    means, sds = {}, {}
    for m in METRICS:
        means[m], sds[m] = _mean_sd([getattr(r, m) for r in results])
    n_pos = sum(1 for it in items if it.label == 1)
    return EvalReport(means["roc_auc"], means["sensitivity"], means["specificity"], means["fpr"], means["fnr"],
                      threshold, n_pos, len(items) - n_pos, sds, results, k, seed)
