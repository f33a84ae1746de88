import numpy as np
import pytest
from scipy.stats import multivariate_normal

from rolledgp.estimate import FitConfig, empirical_covariance, fit, fit_fre, fit_ls, fit_mle, flipflop, mn_loglik
from rolledgp.exceptions import DegenerateError, NoConvergenceError
from rolledgp.manifolds import Euclidean
from rolledgp.model import MNParams, bspline_matrix, mean_curve, right_inverse, sample_mn, simulate
from rolledgp.presets import ar_covariance, get_preset


def _vec(w):
    return np.swapaxes(w, -1, -2).reshape(*w.shape[:-2], -1)


def test_loglik_matches_dense_kronecker_oracle():
    rng = np.random.default_rng(0)
    d, k, n = 2, 3, 5
    A = rng.standard_normal((d, d))
    B = rng.standard_normal((k, k))
    p = MNParams(rng.standard_normal((d, k)), A @ A.T + np.eye(d), B @ B.T + np.eye(k))
    W = rng.standard_normal((n, d, k))
    dense = multivariate_normal(_vec(p.M), np.kron(p.V, p.U)).logpdf(_vec(W)).sum()
    const = -0.5 * n * d * k * np.log(2 * np.pi)
    assert abs(mn_loglik(p, W) - (dense - const)) < 1e-9


def test_loglik_is_invariant_to_kronecker_rescaling():
    rng = np.random.default_rng(1)
    p = MNParams(np.zeros((2, 4)), np.eye(2), ar_covariance(4))
    W = sample_mn(p, rng, 10)
    q = MNParams(p.M, 2.5 * p.U, p.V / 2.5)
    assert np.isclose(mn_loglik(p, W), mn_loglik(q, W))


def test_flipflop_reaches_stationary_point_monotonically():
    rng = np.random.default_rng(2)
    U = np.array([[1.0, 0.4], [0.4, 0.8]])
    p = MNParams(np.zeros((2, 5)), U, ar_covariance(5))
    R = sample_mn(p, rng, 60)
    hist = []
    Uh, Vh, sweeps = flipflop(R, FitConfig(flipflop_tol=1e-12, flipflop_max_iter=500), hist)
    assert np.isclose(np.trace(Uh), 2)
    assert np.all(np.diff(hist) >= -1e-8)
    n, d, k = R.shape
    Ui, Vi = np.linalg.inv(Uh), np.linalg.inv(Vh)
    assert np.allclose(np.einsum("nik,kl,njl->ij", R, Vi, R) / (n * k), Uh, atol=1e-9)
    assert np.allclose(np.einsum("nki,kl,nlj->ij", R, Ui, R) / (n * d), Vh, atol=1e-9)


def test_flipflop_errors():
    with pytest.raises(DegenerateError):
        flipflop(np.zeros((5, 2, 4)))
    # too few samples for a full-rank column covariance
    rng = np.random.default_rng(3)
    with pytest.raises(DegenerateError):
        flipflop(rng.standard_normal((1, 1, 4)))
    with pytest.raises(NoConvergenceError):
        flipflop(rng.standard_normal((20, 2, 4)), FitConfig(flipflop_max_iter=1, flipflop_tol=1e-15))


def test_fit_config_validation():
    with pytest.raises(ValueError):
        FitConfig(method="bayes")
    with pytest.raises(ValueError):
        FitConfig(optimizer_tol=0)


def _euclidean_sample(n=25, r=40, k=6, seed=4):
    m = Euclidean(2)
    rng = np.random.default_rng(seed)
    M = rng.standard_normal((2, k))
    b = np.array([0.5, -1.0])
    from rolledgp.model import RGPModel

    model = RGPModel(m, MNParams(M, np.eye(2), 0.1 * ar_covariance(k)), b, np.eye(2), r)
    return m, simulate(model, n, rng), b, k


def test_fre_on_euclidean_is_projected_pointwise_mean():
    m, x, b, k = _euclidean_sample()
    res = fit_fre(m, x, k, b, np.eye(2))
    pinv = right_inverse(bspline_matrix(k, x.shape[1]))
    assert np.allclose(res.params.M, (x.mean(axis=0) - b).T @ pinv, atol=1e-10)
    assert np.allclose(res.gamma_hat, x.mean(axis=0), atol=1e-10)
    W = np.swapaxes(x - b, 1, 2) @ pinv
    U, V, _ = flipflop(W - W.mean(axis=0))
    assert np.allclose(res.params.U, U) and np.allclose(res.params.V, V)


@pytest.mark.parametrize("method", ["ls", "mle"])
def test_all_methods_agree_on_euclidean(method):
    m, x, b, k = _euclidean_sample()
    ref = fit_fre(m, x, k, b, np.eye(2))
    res = fit(m, x, k, b, np.eye(2), FitConfig(method=method))
    assert res.method == method
    assert np.allclose(res.params.M, ref.params.M, atol=1e-6)


def test_ls_does_not_increase_objective_on_spd():
    model = get_preset("spd-demo", r=40)
    x = simulate(model, 15, 5)
    m, b, f = model.manifold, model.b, model.frame
    fre = fit_fre(m, x, 5, b, f)
    ls = fit_ls(m, x, 5, b, f)

    def objective(res):
        return np.sum((res.coefficients - res.params.M) ** 2)

    ls_at_fre = fit_ls(m, x, 5, b, f, FitConfig(method="ls", optimizer_max_iter=500), init=fre.params.M)
    assert objective(ls) <= objective(fre) + 1e-12
    assert np.allclose(ls.params.M, ls_at_fre.params.M, atol=1e-5)
    assert np.allclose(ls.gamma_hat, mean_curve(type(model)(m, ls.params, b, f, 40)), atol=1e-12)


def test_mle_loglik_is_monotone_on_spd():
    model = get_preset("spd-demo", r=40)
    x = simulate(model, 15, 6)
    hist = []
    res = fit_mle(model.manifold, x, 5, model.b, model.frame, history=hist)
    assert np.all(np.diff(hist) >= -1e-6)
    assert np.isclose(res.loglik, hist[-1])


def test_zero_noise_bundle_is_degenerate():
    model = get_preset("spd-demo", r=30)
    x = np.tile(model.mean_curve(), (4, 1, 1))
    with pytest.raises(DegenerateError):
        fit_fre(model.manifold, x, 5, model.b, model.frame)


def test_empirical_covariance_shape_and_diagonal():
    rng = np.random.default_rng(7)
    H = rng.standard_normal((50, 2, 6))
    C = empirical_covariance(H)
    assert C.shape == (6, 6, 2, 2)
    assert np.allclose(C[2, 2], np.cov(H[:, :, 2].T, bias=True))
