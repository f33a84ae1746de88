"""scikit-learn style estimator for rolled Gaussian process curve models."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .curves import CurveFrame
from .estimate import FitConfig, fit, mn_loglik
from .frechet import FrechetConfig, frechet_mean
from .model import RGPModel, bspline_matrix, right_inverse, simulate
from .validation import check_curves, check_frame, resolve_manifold

__all__ = ["RolledGaussianProcess"]


class RolledGaussianProcess(TransformerMixin, BaseEstimator):
    """Fit a rolled matrix-normal model to curves sampled on a common time grid.

    Parameters
    ----------
    manifold : str, dict or Manifold
        ``"euclidean"``, ``"sphere"``, ``"spd"`` or ``"so3quat"`` (dimension
        inferred from the data), a descriptor dict, or a manifold instance.
    n_basis : int
        Number of cubic B-spline basis functions ``k``.
    method : {"fre", "ls", "mle"}
        Mean estimator.
    base_point, frame : array-like, optional
        Tangent space origin ``b`` and orthonormal frame of ``T_b M``. By
        default ``b`` is the Frechet mean of the curves' starting points and
        the frame comes from :meth:`Manifold.frame`.

    Attributes
    ----------
    params_ : MNParams
        Estimated ``M_w``, ``U_w`` (trace normalized to ``d``) and ``V_w``.
    gamma_hat_ : ndarray of shape (r, q)
        Base curve used for unwrapping.
    loglik_ : float
    n_iter_ : int
    """

    def __init__(
        self,
        manifold="sphere",
        n_basis=10,
        method="fre",
        base_point=None,
        frame=None,
        flipflop_tol=1e-9,
        optimizer_tol=1e-8,
        fd_step=1e-5,
        max_iter=500,
    ):
        self.manifold = manifold
        self.n_basis = n_basis
        self.method = method
        self.base_point = base_point
        self.frame = frame
        self.flipflop_tol = flipflop_tol
        self.optimizer_tol = optimizer_tol
        self.fd_step = fd_step
        self.max_iter = max_iter

    def _config(self):
        return FitConfig(
            method=self.method,
            flipflop_tol=self.flipflop_tol,
            optimizer_tol=self.optimizer_tol,
            optimizer_max_iter=self.max_iter,
            fd_step=self.fd_step,
        )

    def fit(self, X, y=None):
        X, m = check_curves(X, resolve_manifold(self.manifold, np.shape(X)[-1]))
        if self.base_point is None:
            b = frechet_mean(m, X[:, 0], FrechetConfig())
        else:
            b = np.asarray(self.base_point, dtype=float)
        frame = m.frame(b) if self.frame is None else self.frame
        b, frame = check_frame(m, b, frame)
        res = fit(m, X, self.n_basis, b, frame, self._config())
        self.manifold_ = m
        self.base_point_ = b
        self.frame_ = frame
        self.n_times_ = X.shape[1]
        self.basis_matrix_ = bspline_matrix(self.n_basis, self.n_times_)
        self.params_ = res.params
        self.gamma_hat_ = res.gamma_hat
        self.loglik_ = res.loglik
        self.n_iter_ = res.iterations
        self.coefficients_ = res.coefficients
        return self

    @property
    def mean_weights_(self):
        return self.params_.M

    @property
    def row_covariance_(self):
        return self.params_.U

    @property
    def column_covariance_(self):
        return self.params_.V

    def _curve_frame(self):
        check_is_fitted(self, "params_")
        if getattr(self, "_cf", None) is None or self._cf.g is not self.gamma_hat_:
            self._cf = CurveFrame(self.manifold_, self.gamma_hat_, self.base_point_, self.frame_)
        return self._cf

    def transform(self, X):
        """Unwrapping coordinates ``(n, d, r)`` of curves with respect to ``gamma_hat_``."""
        check_is_fitted(self, "params_")
        X, _ = check_curves(X, self.manifold_)
        if X.shape[1] != self.n_times_:
            raise ValueError(f"expected {self.n_times_} time points, got {X.shape[1]}")
        return self._curve_frame().unwrap(X)

    def inverse_transform(self, H):
        """Wrap flat coordinates ``(n, d, r)`` back onto the manifold around ``gamma_hat_``."""
        return self._curve_frame().wrap(np.asarray(H, dtype=float))

    def to_model(self):
        check_is_fitted(self, "params_")
        return RGPModel(self.manifold_, self.params_, self.base_point_, self.frame_, self.n_times_)

    def mean_curve(self):
        """Rolled mean of the fitted mean matrix."""
        return self.to_model().mean_curve()

    def sample(self, n_samples=1, random_state=None, strict=True):
        return simulate(self.to_model(), n_samples, random_state, strict=strict)

    def score(self, X, y=None):
        """Matrix-normal log-likelihood (no constant) of the curves' basis coefficients."""
        W = self.transform(X) @ right_inverse(self.basis_matrix_)
        return mn_loglik(self.params_, W)
