"""Estimation of rolled matrix-normal parameters from samples of curves.

All estimation happens in unwrapping coordinates: each curve ``X_i`` is
unwrapped around a base curve ``Gamma`` into ``H_i`` (``d x r``) and projected
onto the basis, ``W_i = H_i Phi^-``, which is matrix normal.

Three mean estimators are available:

``fre``
    ``Gamma`` is the pointwise sample Frechet mean and the mean matrix is the
    projected unrolling of ``Gamma`` (closed form).
``ls``
    Least squares over ``M_w`` with ``Gamma = Gamma(M_w)`` the rolled mean.
``mle``
    As ``ls`` but weighted by the current covariance estimates, alternated
    with flip-flop covariance updates.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .curves import CurveFrame
from .exceptions import CutLocusError, DegenerateError, NoConvergenceError, NotPositiveDefiniteError
from .frechet import FrechetConfig, frechet_mean_curve
from .manifolds import sym_funcm
from .model import BasisSpec, MNParams, bspline_matrix, right_inverse
from .optimize import bfgs

__all__ = [
    "METHODS",
    "FitConfig",
    "FitResult",
    "mn_loglik",
    "flipflop",
    "fit",
    "fit_fre",
    "fit_ls",
    "fit_mle",
    "empirical_covariance",
]

METHODS = ("fre", "ls", "mle")


@dataclass(frozen=True)
class FitConfig:
    method: str = "fre"
    flipflop_max_iter: int = 500
    flipflop_tol: float = 1e-9
    optimizer_max_iter: int = 500
    optimizer_tol: float = 1e-8
    fd_step: float = 1e-5
    outer_max_iter: int = 50
    frechet: FrechetConfig = field(default_factory=FrechetConfig)

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        for name in ("flipflop_tol", "optimizer_tol", "fd_step"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")


@dataclass
class FitResult:
    params: MNParams
    gamma_hat: np.ndarray
    loglik: float
    iterations: int
    method: str
    coefficients: np.ndarray = field(repr=False, default=None)


def _chol(a, name):
    try:
        return cho_factor(a, lower=True)
    except np.linalg.LinAlgError:
        raise NotPositiveDefiniteError(f"{name} is not positive definite") from None


def mn_loglik(params, W):
    """Matrix-normal log-likelihood of ``W`` (``n x d x k``) without the constant term."""
    W = np.asarray(W, dtype=float)
    if W.ndim == 2:
        W = W[None]
    n, d, k = W.shape
    cu, cv = _chol(params.U, "U"), _chol(params.V, "V")
    logdet_u = 2.0 * np.sum(np.log(np.diag(cu[0])))
    logdet_v = 2.0 * np.sum(np.log(np.diag(cv[0])))
    R = W - params.M
    # tr(U^-1 R V^-1 R^T) summed over samples
    uir = cho_solve(cu, R.transpose(1, 0, 2).reshape(d, -1)).reshape(d, n, k).transpose(1, 0, 2)
    rvi = cho_solve(cv, R.transpose(2, 0, 1).reshape(k, -1)).reshape(k, n, d).transpose(1, 2, 0)
    quad = np.einsum("nij,nij->", uir, rvi)
    return float(-0.5 * n * k * logdet_u - 0.5 * n * d * logdet_v - 0.5 * quad)


def _check_factor(a, name):
    w = np.linalg.eigvalsh(a)
    if not np.all(np.isfinite(w)) or w[-1] <= 0 or w[0] < 1e-12 * w[-1]:
        raise DegenerateError(f"flip-flop produced a degenerate {name} (eigenvalues {w[0]:.3e}..{w[-1]:.3e})")


def flipflop(residuals, cfg=None, history=None):
    """Alternate the row/column covariance updates for centred matrix-normal data.

    ``residuals`` is ``n x d x k``. After every sweep ``U`` is rescaled to trace
    ``d`` and ``V`` inversely. Returns ``(U, V, sweeps)``. If ``history`` is a
    list, the log-likelihood after each sweep is appended.
    """
    cfg = cfg or FitConfig()
    R = np.asarray(residuals, dtype=float)
    n, d, k = R.shape
    if not np.any(R):
        raise DegenerateError("all residuals are zero")
    U = V = None
    Vi = np.eye(k)
    for sweep in range(1, cfg.flipflop_max_iter + 1):
        U_new = np.einsum("nik,kl,njl->ij", R, Vi, R) / (n * k)
        U_new = 0.5 * (U_new + U_new.T)
        _check_factor(U_new, "row covariance")
        Ui = np.linalg.inv(U_new)
        V_new = np.einsum("nki,kl,nlj->ij", R, Ui, R) / (n * d)
        V_new = 0.5 * (V_new + V_new.T)
        _check_factor(V_new, "column covariance")
        c = np.trace(U_new) / d
        U_new, V_new = U_new / c, V_new * c
        if history is not None:
            history.append(mn_loglik(MNParams(np.zeros((d, k)), U_new, V_new), R))
        done = U is not None and max(
            np.linalg.norm(U_new - U) / np.linalg.norm(U),
            np.linalg.norm(V_new - V) / np.linalg.norm(V),
        ) < cfg.flipflop_tol
        U, V = U_new, V_new
        if done:
            return U, V, sweep
        Vi = np.linalg.inv(V)
    raise NoConvergenceError(f"flip-flop did not converge in {cfg.flipflop_max_iter} sweeps")


def _prepare(m, curves, k, r=None):
    curves = np.asarray(curves, dtype=float)
    if curves.ndim != 3 or curves.shape[-1] != m.ambient_dim:
        raise ValueError(f"expected curves of shape (n, r, {m.ambient_dim})")
    if len(curves) == 0:
        raise ValueError("need at least one curve")
    spec = k if isinstance(k, BasisSpec) else BasisSpec(int(k))
    phi = bspline_matrix(spec, curves.shape[1])
    return curves, phi, right_inverse(phi)


def _result(method, M, W, gamma, iterations, cfg):
    U, V, sweeps = flipflop(W - M, cfg)
    params = MNParams(M, U, V)
    return FitResult(params, gamma, mn_loglik(params, W), iterations or sweeps, method, W)


def _fre_mean(m, curves, phi_inv, b, frame, cfg):
    gamma = frechet_mean_curve(m, curves, cfg.frechet)
    cf = CurveFrame(m, gamma, b, frame)
    return cf.unrolled @ phi_inv, cf.unwrap(curves) @ phi_inv, gamma


def fit_fre(m, curves, k, b, frame, cfg=None):
    """Closed-form estimator based on the pointwise Frechet mean curve."""
    cfg = cfg or FitConfig(method="fre")
    curves, phi, phi_inv = _prepare(m, curves, k)
    M, W, gamma = _fre_mean(m, curves, phi_inv, b, frame, cfg)
    return _result("fre", M, W, gamma, 0, cfg)


def _coefficients(m, curves, M, phi, phi_inv, b, frame):
    cf = CurveFrame.rolled(m, M @ phi, b, frame)
    return cf.unwrap(curves) @ phi_inv, cf.g


def _objective(m, curves, phi, phi_inv, b, frame, shape, weights=None, to_mean=None):
    def f(x):
        M = to_mean(x) if to_mean is not None else x.reshape(shape)
        try:
            W, _ = _coefficients(m, curves, M, phi, phi_inv, b, frame)
        except CutLocusError:
            return np.inf
        R = W - M
        if weights is None:
            return float(np.sum(R * R))
        ui, vi = weights
        return float(np.einsum("nij,nij->", ui @ R, R @ vi))

    return f


def _minimize(f, x0, cfg):
    res = bfgs(f, x0, tol=cfg.optimizer_tol, max_iter=cfg.optimizer_max_iter, h=cfg.fd_step)
    if not res.converged:
        raise NoConvergenceError(f"mean optimization did not converge (objective {res.fun:.6g})")
    return res


def fit_ls(m, curves, k, b, frame, cfg=None, init=None):
    """Least-squares mean with ``Gamma`` the rolling of the mean itself."""
    cfg = cfg or FitConfig(method="ls")
    curves, phi, phi_inv = _prepare(m, curves, k)
    if init is None:
        init = _fre_mean(m, curves, phi_inv, b, frame, cfg)[0]
    shape = init.shape
    f = _objective(m, curves, phi, phi_inv, b, frame, shape)
    res = _minimize(f, init.ravel(), cfg)
    M = res.x.reshape(shape)
    W, gamma = _coefficients(m, curves, M, phi, phi_inv, b, frame)
    return _result("ls", M, W, gamma, res.nit, cfg)


def fit_mle(m, curves, k, b, frame, cfg=None, history=None):
    """Weighted least squares alternated with flip-flop covariance updates.

    Each mean update minimizes the covariance-weighted trace over ``M_w`` in
    whitened coordinates ``M = M0 + U^(1/2) T V^(1/2)``. If ``history`` is a
    list, the log-likelihood after every outer iteration is appended.
    """
    cfg = cfg or FitConfig(method="mle")
    curves, phi, phi_inv = _prepare(m, curves, k)
    M = _fre_mean(m, curves, phi_inv, b, frame, cfg)[0]
    W, gamma = _coefficients(m, curves, M, phi, phi_inv, b, frame)
    U, V, _ = flipflop(W - M, cfg)
    if history is not None:
        history.append(mn_loglik(MNParams(M, U, V), W))
    for outer in range(1, cfg.outer_max_iter + 1):
        lu, lv = sym_funcm("sqrt", U), sym_funcm("sqrt", V)
        M0 = M

        def to_mean(x, M0=M0, lu=lu, lv=lv):
            return M0 + lu @ x.reshape(M0.shape) @ lv

        weights = (np.linalg.inv(U), np.linalg.inv(V))
        f = _objective(m, curves, phi, phi_inv, b, frame, M.shape, weights, to_mean)
        res = _minimize(f, np.zeros(M.size), cfg)
        M = to_mean(res.x)
        W, gamma = _coefficients(m, curves, M, phi, phi_inv, b, frame)
        U, V, _ = flipflop(W - M, cfg)
        if history is not None:
            history.append(mn_loglik(MNParams(M, U, V), W))
        change = np.linalg.norm(M - M0) / max(np.linalg.norm(M0), 1e-300)
        if change < cfg.optimizer_tol:
            break
    else:
        raise NoConvergenceError(f"MLE outer loop did not converge in {cfg.outer_max_iter} iterations")
    params = MNParams(M, U, V)
    return FitResult(params, gamma, mn_loglik(params, W), outer, "mle", W)


_FITTERS = {"fre": fit_fre, "ls": fit_ls, "mle": fit_mle}


def fit(m, curves, k, b, frame, cfg=None):
    cfg = cfg or FitConfig()
    return _FITTERS[cfg.method](m, curves, k, b, frame, cfg)


def empirical_covariance(H):
    """Raw covariance of unwrapping coordinates ``(n, d, r)``: ``C[s, t] = cov(H[:, :, s], H[:, :, t])``.

    Returned with shape ``(r, r, d, d)``; a diagnostic only.
    """
    H = np.asarray(H, dtype=float)
    D = H - H.mean(axis=0)
    return np.einsum("nis,njt->stij", D, D) / len(H)
