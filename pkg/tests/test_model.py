import numpy as np
import pytest
from scipy.interpolate import BSpline

from rolledgp.curves import CurveFrame
from rolledgp.exceptions import CutLocusError, InvalidSpecError, NotPositiveDefiniteError, RankDeficientError
from rolledgp.manifolds import Euclidean, Sphere
from rolledgp.model import BasisSpec, MNParams, RGPModel, bspline_matrix, mean_curve, right_inverse, sample_mn, simulate
from rolledgp.presets import PRESETS, ar_covariance, get_preset


def test_basis_matches_scipy():
    for k in (4, 5, 10, 13):
        spec = BasisSpec(k)
        t = np.linspace(0, 1, 57)
        phi = bspline_matrix(spec, t)
        oracle = BSpline.design_matrix(t, spec.knots, 3).toarray().T
        assert phi.shape == (k, 57)
        assert np.allclose(phi, oracle, atol=1e-13)


def test_basis_partition_of_unity_and_endpoints():
    phi = bspline_matrix(10, 100)
    assert np.allclose(phi.sum(axis=0), 1.0, atol=1e-14)
    assert np.all(phi >= -1e-15)
    assert phi[0, 0] == 1.0 and phi[-1, -1] == 1.0


def test_basis_validation():
    with pytest.raises(InvalidSpecError):
        BasisSpec(3)
    with pytest.raises(InvalidSpecError):
        bspline_matrix(10, 10)


def test_right_inverse():
    phi = bspline_matrix(8, 40)
    pinv = right_inverse(phi)
    assert np.allclose(phi @ pinv, np.eye(8), atol=1e-12)
    assert np.allclose(pinv, np.linalg.pinv(phi), atol=1e-10)
    with pytest.raises(RankDeficientError):
        right_inverse(np.ones((3, 10)))


def test_mnparams_validation_and_normalization():
    with pytest.raises(NotPositiveDefiniteError):
        MNParams(np.zeros((2, 4)), np.diag([1.0, -1.0]), np.eye(4))
    with pytest.raises(ValueError):
        MNParams(np.zeros((2, 4)), np.eye(3), np.eye(4))
    p = MNParams(np.zeros((2, 4)), 3 * np.eye(2), ar_covariance(4)).normalized()
    assert np.isclose(np.trace(p.U), 2)
    assert np.allclose(np.kron(p.V, p.U), np.kron(3 * ar_covariance(4), np.eye(2)))


def test_sample_mn_moments():
    rng = np.random.default_rng(0)
    U = np.array([[1.0, 0.3], [0.3, 0.5]])
    V = ar_covariance(4, scale=0.5)
    p = MNParams(np.arange(8.0).reshape(2, 4), U, V)
    w = sample_mn(p, rng, size=40000)
    assert np.allclose(w.mean(axis=0), p.M, atol=0.03)
    # vec (column-stacked) covariance is V kron U
    vec = np.swapaxes(w, 1, 2).reshape(len(w), -1)
    assert np.allclose(np.cov(vec.T), np.kron(V, U), atol=0.05)


def test_ar_covariance_definition():
    V = ar_covariance(5, rho=0.5)
    a = 1 + 0.75 * np.cos(2 * np.pi * np.arange(1, 6) / 5)
    assert np.isclose(V[1, 3], a[1] * a[3] * 0.25)


def test_mean_curve_of_euclidean_model_is_basis_expansion():
    m = Euclidean(2)
    rng = np.random.default_rng(1)
    M = rng.standard_normal((2, 6))
    b = rng.standard_normal(2)
    model = RGPModel(m, MNParams(M, np.eye(2), np.eye(6)), b, np.eye(2), 50)
    assert np.allclose(mean_curve(model), b + (M @ bspline_matrix(6, 50)).T, atol=1e-12)


@pytest.mark.parametrize("name", ["spd-demo", "so3-synthetic"])
def test_simulated_noise_is_recovered_exactly(name):
    model = get_preset(name)
    x, z = simulate(model, 5, 0, return_z=True)
    assert x.shape == (5, 100, model.manifold.ambient_dim)
    h = CurveFrame(model.manifold, model.mean_curve(), model.b, model.frame).unwrap(x)
    assert np.max(np.abs(h - z)) < 1e-10


def test_simulate_is_deterministic_and_prefix_stable():
    model = get_preset("spd-demo")
    a = simulate(model, 4, 7)
    assert np.array_equal(a, simulate(model, 4, 7))
    assert not np.array_equal(a, simulate(model, 4, 8))
    assert simulate(model, 0, 7).shape == (0, 100, 4)


def test_s2_hetero_can_leave_injectivity_domain():
    model = get_preset("s2-hetero")
    with pytest.raises(CutLocusError):
        simulate(model, 40, 0)
    x = simulate(model, 40, 0, strict=False)
    assert Sphere(2).check_point(x, 1e-12)


def test_presets_are_registered():
    assert sorted(PRESETS) == ["s2-hetero", "so3-synthetic", "spd-demo"]
    with pytest.raises(ValueError):
        get_preset("nope")
    m = get_preset("so3-synthetic", shift=0.5)
    assert np.isclose(m.params.M[1, 0], 0.5)
