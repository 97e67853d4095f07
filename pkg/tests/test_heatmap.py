import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from metrorisk import heatmap
from metrorisk.heatmap import HeatmapError, HeatmapGrid
from metrorisk.ingest import GridSpec

import oracles

SPEC = GridSpec(0.0, 3.0, 0.0, 2.0, 0.1)


def grid_of(values, spec=SPEC, sources=()):
    return HeatmapGrid(spec, np.asarray(values, float), sources=frozenset(sources))


def test_accumulate_examples():
    assert heatmap.accumulate([], SPEC).mass == 0.0
    g = heatmap.accumulate([(1.23, 0.45)] * 5, SPEC)
    assert g.mass == 5.0 and g.max == 5.0
    assert g.values[4, 12] == 5.0


def test_accumulate_matches_histogram_oracle():
    rng = np.random.default_rng(0)
    pts = rng.uniform([-0.5, -0.5], [3.5, 2.5], (200, 2))
    g = heatmap.accumulate(pts, SPEC)
    ref = oracles.histogram(pts, SPEC.xmin, SPEC.xmax, SPEC.ymin, SPEC.ymax, SPEC.cell)
    assert np.array_equal(g.values, ref)
    inside = ((pts[:, 0] >= 0) & (pts[:, 0] < 3) & (pts[:, 1] >= 0) & (pts[:, 1] < 2)).sum()
    assert g.mass == inside and g.dropped == 200 - inside


@given(st.lists(st.tuples(st.floats(-1, 4), st.floats(-1, 3)), max_size=30), st.tuples(st.floats(-1, 4), st.floats(-1, 3)))
def test_accumulate_monotone(points, extra):
    a = heatmap.accumulate(points, SPEC).values
    b = heatmap.accumulate(points + [extra], SPEC).values
    assert np.all(b >= a)


def test_smooth_zero_and_bad_sigma():
    z = heatmap.empty(SPEC)
    assert heatmap.smooth(z, 0.3).mass == 0.0
    with pytest.raises(HeatmapError):
        heatmap.smooth(z, 0.0)


def test_interior_impulse_peak():
    v = np.zeros(SPEC.shape)
    v[10, 15] = 1.0
    s = heatmap.smooth(grid_of(v), sigma=0.2)  # 2 cells
    # direct kernel evaluation: 1-D weights over offsets -6..6, normalized
    k = np.array([math.exp(-0.5 * (i / 2.0) ** 2) for i in range(-6, 7)])
    k /= k.sum()
    assert s.values[10, 15] == pytest.approx(k[6] ** 2, rel=1e-12)
    assert abs(s.mass - 1.0) <= 1e-9


def test_corner_impulse_mass():
    v = np.zeros(SPEC.shape)
    v[0, 0] = 1.0
    assert abs(heatmap.smooth(grid_of(v), 0.35).mass - 1.0) <= 1e-6


def test_mass_conservation_random_grids():
    rng = np.random.default_rng(4)
    for k in range(100):
        ny, nx = rng.integers(1, 40, 2)
        spec = GridSpec(0, nx * 0.1, 0, ny * 0.1, 0.1)
        v = rng.exponential(1.0, (ny, nx)) * (rng.random((ny, nx)) < 0.3)
        if k % 4 == 0:  # border impulses
            v[:] = 0
            v[rng.integers(ny), 0] = 3.0
            v[ny - 1, rng.integers(nx)] = 2.0
        g = grid_of(v, spec)
        s = heatmap.smooth(g, rng.uniform(0.05, 1.0))
        total = g.mass
        assert abs(s.mass - total) <= 1e-6 * max(total, 1e-300)


def test_aggregate_examples_and_errors():
    a = grid_of(np.full(SPEC.shape, 2.0))
    assert np.array_equal(heatmap.aggregate([a, a, a]).values, a.values)
    z = grid_of(np.zeros(SPEC.shape))
    assert np.array_equal(heatmap.aggregate([z, a]).values, np.ones(SPEC.shape))
    with pytest.raises(HeatmapError):
        heatmap.aggregate([])
    with pytest.raises(HeatmapError):
        heatmap.aggregate([a, heatmap.empty(GridSpec(0, 1, 0, 1, 0.1))])


def test_aggregate_scalar_oracle_and_permutation():
    rng = np.random.default_rng(5)
    maps = [grid_of(rng.exponential(1, SPEC.shape), sources=[f"p{i}"]) for i in range(5)]
    agg = heatmap.aggregate(maps)
    assert np.max(np.abs(agg.values - oracles.mean_loop([m.values for m in maps]))) <= 1e-12
    assert agg.sources == {f"p{i}" for i in range(5)}
    perm = [maps[i] for i in (3, 1, 4, 0, 2)]
    assert np.max(np.abs(heatmap.aggregate(perm).values - agg.values)) <= 1e-12


def test_normalize():
    v = np.zeros(SPEC.shape)
    v[3, 4] = 4.0
    v[1, 1] = 1.0
    n = heatmap.normalize(grid_of(v))
    assert n.values[3, 4] == 1.0 and n.values[1, 1] == 0.25
    z = grid_of(np.zeros(SPEC.shape))
    assert heatmap.normalize(z).mass == 0.0
    rng = np.random.default_rng(6)
    for _ in range(100):
        r = rng.exponential(1, SPEC.shape)
        n = heatmap.normalize(grid_of(r)).values
        assert n.max() == 1.0 and n.min() >= 0.0
        assert np.argmax(n) == np.argmax(r)


def test_position_risk_examples():
    v = np.zeros(SPEC.shape)
    v[5, 7] = 1.0
    g = grid_of(v)
    assert heatmap.position_risk(g, [(0.75, 0.55)]) == 1.0
    assert heatmap.position_risk(g, np.zeros((0, 2))) == 0.0
    assert heatmap.position_risk(g, [(-5, -5)]) == 0.0
    assert heatmap.position_risk(None, [(1, 1)]) == 0.0


def test_position_risk_pointwise_oracle():
    rng = np.random.default_rng(8)
    g = heatmap.normalize(grid_of(rng.exponential(1, SPEC.shape)))
    pts = rng.uniform([0, 0], [3, 2], (50, 2))
    expect = np.mean([oracles.bilinear(g.values, 0, 0, 0.1, x, y) for x, y in pts])
    assert abs(heatmap.position_risk(g, pts) - expect) <= 1e-9
    assert 0.0 <= heatmap.position_risk(g, rng.uniform(-1, 4, (80, 2))) <= 1.0


def test_file_formats():
    rng = np.random.default_rng(9)
    g = heatmap.normalize(grid_of(rng.exponential(1, SPEC.shape)))
    back = heatmap.from_csv(heatmap.to_csv(g))
    assert back.spec == g.spec and np.array_equal(back.values, g.values)
    pgm = heatmap.to_pgm16(g)
    ny, nx = SPEC.shape
    header = f"P5\n{nx} {ny}\n65535\n".encode()
    assert pgm.startswith(header) and len(pgm) == len(header) + 2 * nx * ny
    side = g.sidecar()
    assert side["extent"] == [0.0, 3.0, 0.0, 2.0] and side["max"] == 1.0
    with pytest.raises(HeatmapError):
        heatmap.from_csv("1,2\n")


def test_build_risk_map_provenance():
    trajs = [("v1/0", np.array([[1.0, 1.0]])), ("v2/3", np.array([[2.0, 0.5]]))]
    m = heatmap.build_risk_map(trajs, SPEC, 0.3)
    assert m.sources == {"v1/0", "v2/3"} and m.max == 1.0
