"""Exact interventional Shapley attributions for the eight-feature ensemble.

For every coalition S of features, v(S) is the mean margin over background
rows b of the hybrid input that takes x on S and b elsewhere. With d = 8 all
2^d coalitions are enumerated, so the attributions are exact:

    phi_i = sum_{S not containing i} |S|! (d - |S| - 1)! / d! * (v(S + i) - v(S))

Attributions are in margin (logit) space and satisfy sum(phi) + v({}) = margin(x).
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .riskmodel import TreeEnsemble, _as_matrix


class ShapleyError(ValueError):
    pass


class Attribution(NamedTuple):
    phi: np.ndarray
    base: float


def _coalition_masks(d: int) -> np.ndarray:
    codes = np.arange(2**d)
    return ((codes[:, None] >> np.arange(d)) & 1).astype(bool)


def _weights(d: int) -> np.ndarray:
    return np.array([math.factorial(s) * math.factorial(d - s - 1) / math.factorial(d) for s in range(d)])


def coalition_values(ensemble: TreeEnsemble, x: np.ndarray, background: np.ndarray) -> np.ndarray:
    """v(S) for all 2^d coalitions, indexed by the bitmask of S."""
    d = x.shape[0]
    masks = _coalition_masks(d)
    hybrid = np.where(masks[:, None, :], x[None, None, :], background[None, :, :])
    return _mean_margin(ensemble, hybrid.reshape(-1, d), len(masks), len(background))


def _mean_margin(ensemble: TreeEnsemble, x: np.ndarray, groups: int, size: int) -> np.ndarray:
    # average the tree part only so a constant margin keeps base_logit exactly
    trees = np.zeros(len(x))
    for t in ensemble.trees:
        trees = trees + t.predict(x)
    return ensemble.base_logit + trees.reshape(groups, size).mean(axis=1)


def _rows(items) -> np.ndarray:
    if isinstance(items, np.ndarray):
        return np.atleast_2d(items.astype(float))
    return np.array([b.as_array() if hasattr(b, "as_array") else np.asarray(b, float) for b in items], dtype=float)


def shapley(ensemble: TreeEnsemble, x, background) -> Attribution:
    bg = _rows(background)
    if bg.size == 0:
        raise ShapleyError("background set must not be empty")
    xv = _as_matrix(x)[0]
    d = xv.shape[0]
    v = coalition_values(ensemble, xv, bg)
    w = _weights(d)
    sizes = np.array([bin(c).count("1") for c in range(2**d)])
    phi = np.zeros(d)
    for i in range(d):
        bit = 1 << i
        without = np.array([c for c in range(2**d) if not c & bit])
        phi[i] = float(np.sum(w[sizes[without]] * (v[without | bit] - v[without])))
    return Attribution(phi, float(v[0]))


def shapley_matrix(ensemble: TreeEnsemble, xs, background) -> tuple[np.ndarray, float]:
    """Attributions for many rows; returns (phi of shape (n, d), base value)."""
    xs = _rows(xs)
    bg = _rows(background)
    if bg.size == 0:
        raise ShapleyError("background set must not be empty")
    out = np.zeros_like(xs)
    for k, row in enumerate(xs):
        out[k] = shapley(ensemble, row, bg).phi
    return out, float(_mean_margin(ensemble, bg, 1, len(bg))[0])
