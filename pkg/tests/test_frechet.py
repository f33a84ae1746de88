import numpy as np
import pytest

from rolledgp.exceptions import NoConvergenceError
from rolledgp.frechet import FrechetConfig, frechet_functional, frechet_mean, frechet_mean_curve
from rolledgp.manifolds import SPD, Euclidean, Sphere


def test_euclidean_mean_is_arithmetic_mean():
    rng = np.random.default_rng(0)
    pts = rng.standard_normal((20, 3))
    assert np.allclose(frechet_mean(Euclidean(3), pts), pts.mean(axis=0), atol=1e-12)


def test_sphere_symmetric_configuration():
    m = Sphere(2)
    a = 0.4
    pts = np.array([[np.sin(a) * np.cos(t), np.sin(a) * np.sin(t), np.cos(a)] for t in np.linspace(0, 2 * np.pi, 7)[:-1]])
    assert np.allclose(frechet_mean(m, pts), [0, 0, 1], atol=1e-10)


def test_spd_commuting_mean_is_log_euclidean():
    # for commuting matrices the affine-invariant mean is exp(mean log)
    m = SPD(2)
    rng = np.random.default_rng(1)
    q, _ = np.linalg.qr(rng.standard_normal((2, 2)))
    lam = np.exp(rng.standard_normal((10, 2)))
    pts = np.stack([(q * l) @ q.T for l in lam]).reshape(10, 4)
    oracle = (q * np.exp(np.log(lam).mean(axis=0))) @ q.T
    assert np.allclose(frechet_mean(m, pts).reshape(2, 2), oracle, atol=1e-10)


def test_mean_is_stationary_and_minimal():
    m = Sphere(2)
    rng = np.random.default_rng(2)
    base = np.array([0.0, 0.0, 1.0])
    pts = m.exp(base, m.from_coords(m.frame(base), 0.5 * rng.standard_normal((15, 2))))
    mu = frechet_mean(m, pts)
    assert m.norm(mu, np.mean(m.log(mu, pts), axis=0)) < 1e-10
    f0 = frechet_functional(m, mu, pts)
    for _ in range(10):
        nearby = m.exp(mu, 0.01 * m.random_tangent(rng, mu))
        assert frechet_functional(m, nearby, pts) >= f0


def test_history_is_non_increasing():
    m = SPD(2)
    rng = np.random.default_rng(3)
    pts = np.stack([m.random_point(rng) for _ in range(12)])
    hist = []
    frechet_mean(m, pts, history=hist)
    assert len(hist) >= 2
    assert np.all(np.diff(hist) <= 1e-12)


def test_single_point_and_identical_points():
    m = Sphere(2)
    p = np.array([0.6, 0.0, 0.8])
    assert np.allclose(frechet_mean(m, p[None]), p)
    assert np.allclose(frechet_mean(m, np.tile(p, (5, 1))), p)


def test_no_convergence_is_reported():
    m = Sphere(2)
    rng = np.random.default_rng(4)
    pts = np.stack([m.random_point(rng) for _ in range(10)])
    pts = pts[pts[:, 2] > 0]
    with pytest.raises(NoConvergenceError):
        frechet_mean(m, pts, FrechetConfig(max_iter=1, tol=1e-14))


def test_config_validation():
    with pytest.raises(ValueError):
        FrechetConfig(tol=0)
    with pytest.raises(ValueError):
        FrechetConfig(step=2.0)
    with pytest.raises(ValueError):
        frechet_mean(Sphere(2), np.empty((0, 3)))


def test_mean_curve_is_pointwise():
    m = Euclidean(2)
    rng = np.random.default_rng(5)
    curves = rng.standard_normal((6, 15, 2))
    assert np.allclose(frechet_mean_curve(m, curves), curves.mean(axis=0), atol=1e-12)
    assert np.array_equal(frechet_mean_curve(m, curves[:1]), curves[0])
