import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from metrorisk.projection import (
    DegenerateConfigurationError, Homography, PointAtInfinityError, ProjectionError, apply, estimate, invert,
    reprojection_rms,
)


def random_h(rng):
    """A well-conditioned random homography (mild perspective)."""
    while True:
        m = np.eye(3) + rng.normal(0, 0.3, (3, 3))
        m[2, :2] = rng.normal(0, 0.05, 2)
        m[2, 2] = 1.0
        if abs(np.linalg.det(m)) > 0.1 and np.linalg.cond(m) < 50:
            return Homography(m)


def test_identity_and_translation():
    assert np.array_equal(apply(Homography.identity(), (3, 4)), [3, 4])
    t = Homography([[1, 0, 2], [0, 1, -1], [0, 0, 1]])
    assert np.array_equal(apply(t, (0, 0)), [2, -1])
    assert np.allclose(invert(t).m, [[1, 0, -2], [0, 1, 1], [0, 0, 1]], atol=1e-15)
    assert np.array_equal(invert(Homography.identity()).m, np.eye(3))


def test_point_at_infinity():
    h = Homography([[1, 0, 0], [0, 1, 0], [1, 0, 1]])
    with pytest.raises(PointAtInfinityError):
        apply(h, (-1.0, 0.0))


def test_singular_rejected():
    with pytest.raises(ProjectionError):
        Homography(np.ones((3, 3)))


def test_round_trip_1000_points():
    rng = np.random.default_rng(0)
    h = random_h(rng)
    pts = rng.uniform(-1, 1, (1000, 2))
    back = apply(invert(h), apply(h, pts))
    assert np.max(np.abs(back - pts)) < 1e-9


def test_inverse_product():
    rng = np.random.default_rng(1)
    for _ in range(50):
        h = random_h(rng)
        prod = h.m @ invert(h).m
        prod = prod / prod[2, 2]
        assert np.linalg.norm(prod - np.eye(3)) < 1e-9


def test_square_fixed_points():
    sq = [(0, 0), (1, 0), (1, 1), (0, 1)]
    fit = estimate(sq, sq)
    assert np.allclose(fit.homography.m, np.eye(3), atol=1e-9)


def test_recover_100_random_homographies():
    rng = np.random.default_rng(2)
    for _ in range(100):
        h = random_h(rng)
        src = rng.uniform(-1, 1, (8, 2))
        dst = apply(h, src)
        fit = estimate(src, dst)
        est = fit.homography.m
        assert np.max(np.abs(est - h.m)) < 1e-6  # both normalized to m22 = 1
        assert fit.rms < 1e-8
        assert reprojection_rms(fit.homography, src, dst) == pytest.approx(fit.rms)


def test_pixel_scale_inputs():
    img = np.array([[540, 140], [700, 140], [160, 700], [1080, 700]], float)
    plat = np.array([[0, 0], [4, 0], [0, 24], [4, 24]], float)
    fit = estimate(img, plat)
    assert np.max(np.abs(apply(fit.homography, img) - plat)) < 1e-9


def test_arity_and_degenerate():
    with pytest.raises(ProjectionError):
        estimate([(0, 0), (1, 0), (0, 1)], [(0, 0), (1, 0), (0, 1)])
    with pytest.raises(DegenerateConfigurationError):
        estimate([(0, 0), (1, 0), (2, 0), (0, 1)], [(0, 0), (1, 0), (2, 0), (0, 1)])
    with pytest.raises(DegenerateConfigurationError):
        pts = [(i, 2 * i) for i in range(6)]
        estimate(pts, pts)


@given(st.floats(-100, 100).filter(lambda c: abs(c) > 1e-3), st.integers(0, 2**32 - 1))
def test_projective_scale_invariance(c, seed):
    rng = np.random.default_rng(seed)
    h = random_h(rng)
    pts = rng.uniform(-1, 1, (20, 2))
    scaled = Homography(h.m * c)
    assert np.allclose(apply(scaled, pts), apply(h, pts), rtol=1e-12, atol=1e-12)
