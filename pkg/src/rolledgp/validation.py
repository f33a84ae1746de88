"""Input validation helpers shared by the estimator, bundles and CLI."""

from __future__ import annotations

import numpy as np

from .manifolds import Manifold, get_manifold

__all__ = ["resolve_manifold", "check_curves", "check_frame"]


def resolve_manifold(manifold, q=None):
    """Accept a :class:`Manifold`, a kind string (dimension taken from ``q``) or a descriptor dict."""
    if isinstance(manifold, Manifold):
        if q is not None and manifold.ambient_dim != q:
            raise ValueError(f"{manifold!r} expects {manifold.ambient_dim} coordinates, data has {q}")
        return manifold
    if isinstance(manifold, dict):
        return get_manifold(manifold["kind"], manifold.get("d"), manifold.get("q", q))
    return get_manifold(manifold, q=q)


def check_curves(X, manifold, tol=1e-8, reproject=True, allow_empty=False):
    """Validate an ``(n, r, q)`` stack of curves on ``manifold``.

    Points off the manifold by more than ``tol`` raise ``ValueError``; points
    within ``tol`` are projected back onto it when ``reproject`` is set.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim == 2:
        X = X[None]
    if X.ndim != 3:
        raise ValueError(f"curves must be a 3-d array (n, r, q), got shape {X.shape}")
    m = resolve_manifold(manifold, X.shape[-1])
    if len(X) == 0:
        if allow_empty:
            return X, m
        raise ValueError("no curves given")
    if X.shape[1] < 2:
        raise ValueError("curves need at least two time points")
    if not np.all(np.isfinite(X)):
        raise ValueError("curves contain non-finite values")
    if not m.check_point(X, tol):
        raise ValueError(f"curve points are not on {m!r} within {tol:g}")
    if reproject:
        X = m.project(X)
    return X, m


def check_frame(m, b, frame, tol=1e-8):
    """Check that ``frame`` (q x d) is orthonormal at ``b`` under the manifold metric."""
    b = np.asarray(b, dtype=float)
    frame = np.asarray(frame, dtype=float)
    if b.shape != (m.ambient_dim,):
        raise ValueError(f"base point must have {m.ambient_dim} coordinates")
    if not m.check_point(b, tol):
        raise ValueError("base point is not on the manifold")
    if frame.shape != (m.ambient_dim, m.dim):
        raise ValueError(f"frame must have shape ({m.ambient_dim}, {m.dim})")
    gram = m.coords(b, frame, frame.T)
    if np.max(np.abs(gram - np.eye(m.dim))) > tol:
        raise ValueError("frame is not orthonormal at the base point")
    if not m.check_tangent(b, frame.T, tol):
        raise ValueError("frame columns are not tangent at the base point")
    return b, frame
