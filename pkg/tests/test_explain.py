import numpy as np
import pytest

from metrorisk.explain import ShapleyError, shapley, shapley_matrix
from metrorisk.riskmodel import BoostParams, Tree, TreeEnsemble, train


def random_ensemble(seed, rounds=20):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(150, 8))
    y = (x[:, 0] + 0.5 * x[:, 2] * x[:, 4] - x[:, 7] + rng.normal(0, 0.3, 150) > 0).astype(float)
    return train(x, y, BoostParams(rounds=rounds, learning_rate=0.3, seed=seed)), rng


def test_empty_ensemble():
    ens = TreeEnsemble([], 0.4, BoostParams())
    a = shapley(ens, np.ones(8), np.zeros((3, 8)))
    assert np.all(a.phi == 0) and a.base == 0.4


def test_background_equal_to_x_gives_zero():
    t = Tree()
    r, a, b = t.add_node(), t.add_node(), t.add_node()
    t.feature[r], t.threshold[r], t.left[r], t.right[r] = 3, 0.5, a, b
    t.leaf_weight[a], t.leaf_weight[b] = -1.0, 1.0
    ens = TreeEnsemble([t], 0.0, BoostParams())
    x = np.arange(8.0)
    assert np.all(shapley(ens, x, x[None, :]).phi == 0)
    # only the split feature earns credit when x and the background differ
    phi = shapley(ens, x, np.zeros((1, 8))).phi
    assert phi[3] == 2.0 and np.count_nonzero(phi) == 1


def test_empty_background_rejected():
    ens = TreeEnsemble([], 0.0, BoostParams())
    with pytest.raises(ShapleyError):
        shapley(ens, np.zeros(8), np.zeros((0, 8)))


def test_efficiency_on_random_ensembles():
    for seed in range(3):
        ens, rng = random_ensemble(seed)
        bg = rng.normal(size=(10, 8))
        xs = rng.normal(size=(25, 8))
        for x in xs:
            a = shapley(ens, x, bg)
            assert abs(a.phi.sum() + a.base - ens.margin(x)[0]) <= 1e-6
        phi, base = shapley_matrix(ens, xs, bg)
        assert np.max(np.abs(phi.sum(axis=1) + base - ens.margin(xs))) <= 1e-6


def test_symmetry_for_interchangeable_features():
    # two stumps with the same role on features 1 and 5; x symmetric in those features
    trees = []
    for f in (1, 5):
        t = Tree()
        r, a, b = t.add_node(), t.add_node(), t.add_node()
        t.feature[r], t.threshold[r], t.left[r], t.right[r] = f, 0.5, a, b
        t.leaf_weight[a], t.leaf_weight[b] = 0.0, 0.7
        trees.append(t)
    ens = TreeEnsemble(trees, 0.0, BoostParams())
    x = np.zeros(8)
    x[[1, 5]] = 1.0
    bg = np.random.default_rng(0).random((6, 8))
    bg[:, 5] = bg[:, 1]
    phi = shapley(ens, x, bg).phi
    assert phi[1] == pytest.approx(phi[5], abs=1e-12)


def test_importance_sums_to_internal_nodes():
    from metrorisk.riskmodel import feature_importance

    for seed in range(3):
        ens, _ = random_ensemble(seed, rounds=40)
        assert feature_importance(ens).sum() == sum(len(t.internal_nodes()) for t in ens.trees)
