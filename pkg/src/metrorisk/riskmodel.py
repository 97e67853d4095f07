"""Second-order gradient-boosted trees on the eight indicators.

Training follows the usual Newton boosting recipe for weighted logistic loss:
per round, gradients g = w (p - y) and hessians h = w p (1 - p) are fit by an
exact-greedy regression tree whose split gain is

    1/2 [G_L^2/(H_L+l) + G_R^2/(H_R+l) - (G_L+G_R)^2/(H_L+H_R+l)] - gamma

and whose leaves carry -G/(H+l) scaled by the learning rate.

Row and feature subsampling draw from ``CounterRNG`` (SplitMix64 over a
counter), so a model depends only on the data, the parameters and the seed.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .indicators import FEATURE_NAMES

MODEL_FORMAT_VERSION = 1


class ModelError(ValueError):
    pass


class TrainingError(ModelError):
    pass


class ModelFileError(ModelError):
    pass


@dataclass(frozen=True)
class BoostParams:
    rounds: int = 300
    learning_rate: float = 0.05
    max_depth: int = 4
    row_subsample: float = 0.85
    feature_subsample: float = 0.85
    pos_weight: Optional[float] = None  # None = N_neg / N_pos of the training rows
    l2_lambda: float = 1.0
    gamma: float = 0.0
    min_child_weight: float = 1.0
    base_score: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if self.rounds < 1:
            raise ModelError("rounds must be >= 1")
        if not 0 < self.learning_rate <= 1:
            raise ModelError("learning_rate must lie in (0, 1]")
        if self.max_depth < 1:
            raise ModelError("max_depth must be >= 1")
        if not (0 < self.row_subsample <= 1 and 0 < self.feature_subsample <= 1):
            raise ModelError("subsample ratios must lie in (0, 1]")
        if not 0 < self.base_score < 1:
            raise ModelError("base_score must lie in (0, 1)")
        if self.pos_weight is not None and not self.pos_weight > 0:
            raise ModelError("pos_weight must be > 0")
        if self.l2_lambda < 0 or self.gamma < 0 or self.min_child_weight < 0:
            raise ModelError("regularization terms must be >= 0")


# ---------------------------------------------------------------- RNG

_M64 = 0xFFFFFFFFFFFFFFFF
_GOLDEN = 0x9E3779B97F4A7C15


def _mix64(z: np.ndarray) -> np.ndarray:
    z = z.astype(np.uint64)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


class CounterRNG:
    """Stateless uniforms: u(stream, i) = mix64(key(seed, stream) + (i + 1) * golden) / 2^64.

    ``key`` is itself mix64(seed * golden + stream). Only the top 53 bits are
    used, giving doubles in [0, 1).
    """

    def __init__(self, seed: int):
        self.seed = int(seed) & _M64

    def uniform(self, stream: int, n: int) -> np.ndarray:
        key = _mix64(np.array([(self.seed * _GOLDEN + int(stream)) & _M64], dtype=np.uint64))[0]
        with np.errstate(over="ignore"):
            ctr = key + (np.arange(1, n + 1, dtype=np.uint64) * np.uint64(_GOLDEN))
            bits = _mix64(ctr)
        return (bits >> np.uint64(11)).astype(np.float64) * (1.0 / 9007199254740992.0)


# ---------------------------------------------------------------- trees


@dataclass
class Tree:
    """Flat binary tree; node 0 is the root, leaves have feature == -1."""

    feature: list = field(default_factory=list)
    threshold: list = field(default_factory=list)
    left: list = field(default_factory=list)
    right: list = field(default_factory=list)
    default_left: list = field(default_factory=list)
    leaf_weight: list = field(default_factory=list)

    def add_node(self) -> int:
        self.feature.append(-1)
        self.threshold.append(0.0)
        self.left.append(-1)
        self.right.append(-1)
        self.default_left.append(True)
        self.leaf_weight.append(0.0)
        return len(self.feature) - 1

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    def internal_nodes(self) -> list[int]:
        return [i for i, f in enumerate(self.feature) if f >= 0]

    def depth(self) -> int:
        def walk(i):
            if self.feature[i] < 0:
                return 0
            return 1 + max(walk(self.left[i]), walk(self.right[i]))

        return walk(0) if self.feature else 0

    def predict(self, x: np.ndarray) -> np.ndarray:
        """Leaf weights for rows of x; NaN follows the default branch."""
        x = np.atleast_2d(x)
        feat = np.asarray(self.feature)
        thr = np.asarray(self.threshold, dtype=float)
        lft = np.asarray(self.left)
        rgt = np.asarray(self.right)
        dfl = np.asarray(self.default_left, dtype=bool)
        node = np.zeros(len(x), dtype=np.int64)
        rows = np.arange(len(x))
        while True:
            f = feat[node]
            active = f >= 0
            if not active.any():
                break
            fa = np.where(active, f, 0)
            v = x[rows, fa]
            go_left = np.where(np.isnan(v), dfl[node], v < thr[node])
            node = np.where(active, np.where(go_left, lft[node], rgt[node]), node)
        return np.asarray(self.leaf_weight, dtype=float)[node]

    def to_dict(self) -> dict:
        nodes = []
        for i in range(self.n_nodes):
            nodes.append({
                "feature": int(self.feature[i]),
                "threshold": float(self.threshold[i]),
                "left": int(self.left[i]),
                "right": int(self.right[i]),
                "default_left": bool(self.default_left[i]),
                "leaf_weight": float(self.leaf_weight[i]),
            })
        return {"nodes": nodes}

    @classmethod
    def from_dict(cls, doc: dict) -> "Tree":
        t = cls()
        for nd in doc["nodes"]:
            t.feature.append(int(nd["feature"]))
            t.threshold.append(float(nd["threshold"]))
            t.left.append(int(nd["left"]))
            t.right.append(int(nd["right"]))
            t.default_left.append(bool(nd["default_left"]))
            t.leaf_weight.append(float(nd["leaf_weight"]))
        return t


@dataclass
class TreeEnsemble:
    trees: list
    base_logit: float
    params: BoostParams
    feature_names: tuple = FEATURE_NAMES
    train_loss: list = field(default_factory=list, compare=False)

    def margin(self, x) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        out = np.full(len(x), self.base_logit)
        for t in self.trees:
            out = out + t.predict(x)
        return out

    def predict_proba(self, x) -> np.ndarray:
        # keep scores strictly inside (0, 1) even for saturated margins
        return np.clip(_sigmoid(self.margin(x)), _TINY, _ALMOST_ONE)

    def max_depth(self) -> int:
        return max((t.depth() for t in self.trees), default=0)


_TINY = np.nextafter(0.0, 1.0)
_ALMOST_ONE = np.nextafter(1.0, 0.0)


def _sigmoid(z):
    z = np.asarray(z, dtype=float)
    return np.where(z >= 0, 1.0 / (1.0 + np.exp(-np.abs(z))), np.exp(-np.abs(z)) / (1.0 + np.exp(-np.abs(z))))


def _as_matrix(x) -> np.ndarray:
    if hasattr(x, "as_array"):
        return x.as_array()[None, :]
    x = np.asarray(x, dtype=float)
    return np.atleast_2d(x)


def predict(ensemble: TreeEnsemble, x) -> np.ndarray | float:
    """Risk score(s) in (0, 1); a single IndicatorVector or 1-D row gives a float."""
    single = hasattr(x, "as_array") or np.asarray(x).ndim == 1
    p = ensemble.predict_proba(_as_matrix(x))
    return float(p[0]) if single else p


def weighted_logloss(margin: np.ndarray, y: np.ndarray, w: np.ndarray) -> float:
    # log(1 + e^m) - y m, computed stably
    m = np.asarray(margin, dtype=float)
    loss = np.logaddexp(0.0, m) - y * m
    return float(np.sum(w * loss) / np.sum(w))


class _Builder:
    def __init__(self, x: np.ndarray, params: BoostParams):
        self.x = x
        self.p = params
        self.order = np.argsort(x, axis=0, kind="stable")  # (n, d)
        self.sorted_x = np.take_along_axis(x, self.order, axis=0)

    def build(self, g: np.ndarray, h: np.ndarray, rows: np.ndarray, features: np.ndarray) -> Tree:
        tree = Tree()
        root = tree.add_node()
        self._grow(tree, root, rows, g, h, features, 0)
        return tree

    def _leaf(self, tree: Tree, node: int, gs: float, hs: float):
        tree.leaf_weight[node] = float(-gs / (hs + self.p.l2_lambda) * self.p.learning_rate)

    def _grow(self, tree, node, mask, g, h, features, depth):
        gs = float(g[mask].sum())
        hs = float(h[mask].sum())
        if depth >= self.p.max_depth or mask.sum() < 2:
            self._leaf(tree, node, gs, hs)
            return
        best = self._best_split(mask, g, h, features, gs, hs)
        if best is None:
            self._leaf(tree, node, gs, hs)
            return
        f, thr, default_left = best
        go_left = mask & (self.x[:, f] < thr)
        go_right = mask & ~(self.x[:, f] < thr)
        tree.feature[node] = int(f)
        tree.threshold[node] = float(thr)
        tree.default_left[node] = bool(default_left)
        li = tree.add_node()
        ri = tree.add_node()
        tree.left[node] = li
        tree.right[node] = ri
        self._grow(tree, li, go_left, g, h, features, depth + 1)
        self._grow(tree, ri, go_right, g, h, features, depth + 1)

    def _best_split(self, mask, g, h, features, gs, hs):
        """Best (feature, threshold, default_left) over all sampled features at once.

        Masked-out rows contribute zero to the running sums, so the partial
        sums at in-node rows equal a cumsum over the node alone. Ties go to the
        earliest candidate, then the earliest feature.
        """
        lam = self.p.l2_lambda
        mcw = self.p.min_child_weight
        parent = gs * gs / (hs + lam)
        idx = self.order[:, features]
        m = mask[idx]
        xs = self.sorted_x[:, features]
        gl = np.cumsum(np.where(m, g[idx], 0.0), axis=0)
        hl = np.cumsum(np.where(m, h[idx], 0.0), axis=0)
        # next in-node value after each position (columns are sorted ascending)
        nxt = np.minimum.accumulate(np.where(m, xs, np.inf)[::-1], axis=0)[::-1]
        nxt = np.vstack([nxt[1:], np.full((1, len(features)), np.inf)])
        gr = gs - gl
        hr = hs - hl
        ok = m & (nxt > xs) & np.isfinite(nxt) & (hl >= mcw) & (hr >= mcw)
        if not ok.any():
            return None
        with np.errstate(invalid="ignore"):
            gain = 0.5 * (gl * gl / (hl + lam) + gr * gr / (hr + lam) - parent) - self.p.gamma
        gain = np.where(ok, gain, -np.inf)
        rows = np.argmax(gain, axis=0)
        col_best = gain[rows, np.arange(len(features))]
        j = int(np.argmax(col_best))
        if not col_best[j] > 0.0:
            return None
        k = int(rows[j])
        thr = 0.5 * (xs[k, j] + nxt[k, j])
        return int(features[j]), float(thr), bool(hl[k, j] >= hr[k, j])


def train(rows, labels=None, params: BoostParams = BoostParams()) -> TreeEnsemble:
    """Fit an ensemble on indicator rows.

    ``rows`` is either a sequence of (IndicatorVector, label) pairs or an
    (n, 8) matrix with ``labels`` given separately.
    """
    if labels is None:
        pairs = list(rows)
        x = np.array([v.as_array() if hasattr(v, "as_array") else np.asarray(v, float) for v, _ in pairs])
        y = np.array([int(lbl) for _, lbl in pairs], dtype=float)
    else:
        x = np.asarray(rows, dtype=float)
        y = np.asarray(labels, dtype=float)
    if x.ndim != 2 or len(x) != len(y):
        raise TrainingError("rows and labels must align")
    if len(x) < 2:
        raise TrainingError("need at least two rows")
    if not np.all(np.isfinite(x)):
        raise TrainingError("non-finite feature value")
    if not np.all((y == 0) | (y == 1)):
        raise TrainingError("labels must be 0 or 1")
    n_pos = int(y.sum())
    n_neg = len(y) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise TrainingError("training data must contain both classes")

    pos_weight = params.pos_weight if params.pos_weight is not None else n_neg / n_pos
    w = np.where(y == 1, pos_weight, 1.0)
    base_logit = math.log(params.base_score / (1.0 - params.base_score))
    n, d = x.shape
    rng = CounterRNG(params.seed)
    n_feat = max(1, int(round(params.feature_subsample * d)))
    builder = _Builder(x, params)

    margin = np.full(n, base_logit)
    trees = []
    losses = [weighted_logloss(margin, y, w)]
    for r in range(params.rounds):
        p = _sigmoid(margin)
        g = w * (p - y)
        h = w * p * (1.0 - p)
        if params.row_subsample < 1.0:
            rows_mask = rng.uniform(2 * r, n) < params.row_subsample
        else:
            rows_mask = np.ones(n, dtype=bool)
        if n_feat < d:
            features = np.sort(np.argsort(rng.uniform(2 * r + 1, d), kind="stable")[:n_feat])
        else:
            features = np.arange(d)
        tree = builder.build(g, h, rows_mask, features)
        trees.append(tree)
        margin = margin + tree.predict(x)
        losses.append(weighted_logloss(margin, y, w))

    return TreeEnsemble(trees, base_logit, params, FEATURE_NAMES, losses)


def feature_importance(ensemble: TreeEnsemble) -> np.ndarray:
    """Split counts per feature summed over all trees."""
    counts = np.zeros(len(ensemble.feature_names))
    for t in ensemble.trees:
        for i in t.internal_nodes():
            counts[t.feature[i]] += 1
    return counts


# ---------------------------------------------------------------- persistence


def to_dict(ensemble: TreeEnsemble) -> dict:
    return {
        "version": MODEL_FORMAT_VERSION,
        "params": asdict(ensemble.params),
        "base_logit": float(ensemble.base_logit),
        "feature_names": list(ensemble.feature_names),
        "trees": [t.to_dict() for t in ensemble.trees],
    }


def dumps(ensemble: TreeEnsemble) -> str:
    return json.dumps(to_dict(ensemble), sort_keys=True, separators=(",", ":")) + "\n"


def save(ensemble: TreeEnsemble, path) -> None:
    Path(path).write_text(dumps(ensemble))


def loads(text: str) -> TreeEnsemble:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFileError(f"corrupt model file: {exc.msg}") from None
    if not isinstance(doc, dict) or "version" not in doc:
        raise ModelFileError("corrupt model file: no version field")
    if doc["version"] != MODEL_FORMAT_VERSION:
        raise ModelFileError(f"unsupported model version {doc['version']!r} (expected {MODEL_FORMAT_VERSION})")
    try:
        params = BoostParams(**doc["params"])
        trees = [Tree.from_dict(t) for t in doc["trees"]]
        ens = TreeEnsemble(trees, float(doc["base_logit"]), params, tuple(doc["feature_names"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFileError(f"corrupt model file: {exc}") from None
    d = len(ens.feature_names)
    for t in trees:
        n = t.n_nodes
        for i in range(n):
            f = t.feature[i]
            if f >= d or (f >= 0 and not (0 < t.left[i] < n and 0 < t.right[i] < n)):
                raise ModelFileError("corrupt model file: dangling node reference")
    return ens


def load(path) -> TreeEnsemble:
    return loads(Path(path).read_text())
