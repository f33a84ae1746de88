"""Two-sample test for equality of mean curves.

Both samples are unwrapped around the Frechet mean curve of the pooled
sample, so every resample reuses the same coefficient matrices ``W_i`` and
only the group means and flip-flop covariances are recomputed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .curves import CurveFrame
from .estimate import FitConfig, _prepare, flipflop
from .exceptions import NotPositiveDefiniteError, RolledGPError
from .frechet import frechet_mean_curve
from .model import MNParams

__all__ = ["TestResult", "hotelling_stat", "group_estimates", "permutation_test", "p_value"]


@dataclass
class TestResult:
    J_observed: float
    J_resampled: np.ndarray
    p_value: float
    R: int
    seed: int | None
    method: str = "permutation"

    __test__ = False  # not a pytest class


def p_value(j_obs, j_resampled):
    """``(1 + #{J* > J}) / (1 + R)``; ties do not count."""
    j_resampled = np.asarray(j_resampled, dtype=float)
    return (1.0 + np.count_nonzero(j_resampled > j_obs)) / (1.0 + len(j_resampled))


def _params(fit):
    return getattr(fit, "params", fit)


def hotelling_stat(fit1, fit2, n1, n2):
    """``tr(V^-1 D^T U^-1 D)`` with ``D = M1 - M2`` and pooled ``U``, ``V``.

    ``fit1``/``fit2`` are :class:`~rolledgp.estimate.FitResult` or
    :class:`~rolledgp.model.MNParams`.
    """
    p1, p2 = _params(fit1), _params(fit2)
    if p1.M.shape != p2.M.shape:
        raise ValueError("fits must share d and k")
    w = n1 + n2 - 2
    U = ((n1 - 1) * p1.U + (n2 - 1) * p2.U) / w
    V = ((n1 - 1) * p1.V + (n2 - 1) * p2.V) / w
    D = p1.M - p2.M
    try:
        cu, cv = cho_factor(U), cho_factor(V)
    except np.linalg.LinAlgError:
        raise NotPositiveDefiniteError("pooled covariance is not positive definite") from None
    return float(max(np.sum(cho_solve(cu, D) * cho_solve(cv, D.T).T), 0.0))


def group_estimates(W, cfg=None):
    """Mean and flip-flop covariances of coefficient matrices ``W`` (n x d x k)."""
    M = W.mean(axis=0)
    U, V, _ = flipflop(W - M, cfg)
    return MNParams(M, U, V)


def _statistic(W, idx1, idx2, cfg):
    return hotelling_stat(group_estimates(W[idx1], cfg), group_estimates(W[idx2], cfg), len(idx1), len(idx2))


def permutation_test(m, sample1, sample2, k, b, frame, R=200, seed=None, cfg=None, bootstrap=False):
    """Resampling test of equal mean curves.

    Resamples relabel the pooled curves into groups of the original sizes,
    either by permutation (default) or by drawing with replacement
    (``bootstrap=True``). Resample ``i`` draws from its own child generator.
    """
    cfg = cfg or FitConfig()
    s1 = np.asarray(sample1, dtype=float)
    s2 = np.asarray(sample2, dtype=float)
    n1, n2 = len(s1), len(s2)
    if n1 < 2 or n2 < 2:
        raise ValueError("each sample needs at least two curves")
    if R < 1:
        raise ValueError("R must be at least 1")
    pooled, _, phi_inv = _prepare(m, np.concatenate([s1, s2]), k)
    gamma = frechet_mean_curve(m, pooled, cfg.frechet)
    W = CurveFrame(m, gamma, b, frame).unwrap(pooled) @ phi_inv
    N = n1 + n2
    j_obs = _statistic(W, np.arange(n1), np.arange(n1, N), cfg)
    children = np.random.default_rng(seed).spawn(R)
    j_star = np.empty(R)
    for i, child in enumerate(children):
        idx = child.integers(0, N, N) if bootstrap else child.permutation(N)
        try:
            j_star[i] = _statistic(W, idx[:n1], idx[n1:], cfg)
        except RolledGPError as exc:
            raise type(exc)(f"resample {i}: {exc}") from exc
    return TestResult(
        float(j_obs), j_star, float(p_value(j_obs, j_star)), int(R), seed,
        "bootstrap" if bootstrap else "permutation",
    )
