"""Sample Frechet means of points and pointwise Frechet mean curves."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import NoConvergenceError

__all__ = ["FrechetConfig", "frechet_functional", "frechet_mean", "frechet_mean_curve"]


@dataclass(frozen=True)
class FrechetConfig:
    max_iter: int = 1000
    tol: float = 1e-10
    step: float = 1.0

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if not 0 < self.step <= 1:
            raise ValueError("step must lie in (0, 1]")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")


def frechet_functional(m, p, pts):
    """Mean squared geodesic distance from ``p`` to the rows of ``pts``."""
    return float(np.mean(m.dist(p, np.asarray(pts, dtype=float)) ** 2))


def frechet_mean(m, pts, cfg=None, init=None, history=None):
    """Riemannian gradient iteration ``p <- exp_p(step * mean_i log_p(x_i))``.

    The step is halved whenever it would increase the Frechet functional.
    If ``history`` is a list, the functional value after each accepted
    iterate is appended to it.
    """
    cfg = cfg or FrechetConfig()
    pts = np.asarray(pts, dtype=float)
    if pts.ndim != 2 or len(pts) == 0:
        raise ValueError("frechet_mean needs a nonempty (n, q) array of points")
    p = np.array(pts[0] if init is None else init, dtype=float)
    value = frechet_functional(m, p, pts)
    if history is not None:
        history.append(value)
    for _ in range(cfg.max_iter):
        grad = np.mean(m.log(p, pts), axis=0)
        if m.norm(p, grad) <= cfg.tol:
            return p
        step = cfg.step
        for _ in range(60):
            cand = m.project(m.exp(p, step * grad))
            cand_value = frechet_functional(m, cand, pts)
            if cand_value <= value + 1e-12:
                break
            step *= 0.5
        p, value = cand, cand_value
        if history is not None:
            history.append(value)
    grad = np.mean(m.log(p, pts), axis=0)
    if m.norm(p, grad) <= cfg.tol:
        return p
    raise NoConvergenceError(
        f"Frechet mean did not converge in {cfg.max_iter} iterations "
        f"(gradient norm {float(m.norm(p, grad)):.3e})"
    )


def frechet_mean_curve(m, curves, cfg=None):
    """Pointwise Frechet mean of curves ``(n, r, q)``, warm-started along time."""
    curves = np.asarray(curves, dtype=float)
    if curves.ndim != 3 or len(curves) == 0:
        raise ValueError("expected a nonempty (n, r, q) array of curves")
    if len(curves) == 1:
        return curves[0].copy()
    out = np.empty(curves.shape[1:])
    init = None
    for j in range(curves.shape[1]):
        out[j] = frechet_mean(m, curves[:, j], cfg, init=init)
        init = out[j]
    return out
