"""Small quasi-Newton minimizer with central finite-difference gradients.

The objectives minimized here re-roll a curve on every evaluation and may be
undefined (``inf``) where a trial point crosses a cut locus, so the line
search simply backtracks over non-finite values.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["fd_gradient", "bfgs", "OptimizeResult"]


@dataclass
class OptimizeResult:
    x: np.ndarray
    fun: float
    nit: int
    converged: bool


def fd_gradient(f, x, h, fx=None):
    """Central differences; falls back to a one-sided difference next to an infinite value."""
    g = np.empty_like(x)
    for i in range(len(x)):
        e = np.zeros_like(x)
        e[i] = h
        fp, fm = f(x + e), f(x - e)
        if np.isfinite(fp) and np.isfinite(fm):
            g[i] = (fp - fm) / (2 * h)
        else:
            fx = f(x) if fx is None else fx
            if np.isfinite(fp):
                g[i] = (fp - fx) / h
            elif np.isfinite(fm):
                g[i] = (fx - fm) / h
            else:
                g[i] = 0.0
    return g


def bfgs(f, x0, tol=1e-8, max_iter=500, h=1e-5):
    """Minimize ``f`` from ``x0`` with BFGS updates and Armijo backtracking.

    Stops when the largest gradient component is below ``tol * (1 + |f|)``,
    or when an accepted step no longer moves ``x``.
    """
    x = np.array(x0, dtype=float)
    fx = f(x)
    if not np.isfinite(fx):
        raise ValueError("objective is not finite at the starting point")
    g = fd_gradient(f, x, h, fx)
    hinv = None
    for it in range(max_iter):
        if np.max(np.abs(g)) <= tol * (1.0 + abs(fx)):
            return OptimizeResult(x, fx, it, True)
        if hinv is None:
            p = -g / max(np.linalg.norm(g), 1e-300) * min(1.0, np.linalg.norm(g))
        else:
            p = -hinv @ g
            if g @ p >= 0:
                hinv = None
                p = -g
        slope = g @ p
        step = 1.0
        for _ in range(60):
            xn = x + step * p
            fn = f(xn)
            if np.isfinite(fn) and fn <= fx + 1e-4 * step * slope:
                break
            step *= 0.5
        else:
            return OptimizeResult(x, fx, it, False)
        s = xn - x
        gn = fd_gradient(f, xn, h, fn)
        y = gn - g
        sy = s @ y
        if sy > 1e-12 * np.linalg.norm(s) * np.linalg.norm(y):
            if hinv is None:
                hinv = np.eye(len(x)) * sy / (y @ y)
            rho = 1.0 / sy
            v = np.eye(len(x)) - rho * np.outer(s, y)
            hinv = v @ hinv @ v.T + rho * np.outer(s, s)
        x, fx, g = xn, fn, gn
        if np.linalg.norm(s) <= 1e-15 * (1.0 + np.linalg.norm(x)):
            return OptimizeResult(x, fx, it + 1, True)
    return OptimizeResult(x, fx, max_iter, np.max(np.abs(g)) <= tol * (1.0 + abs(fx)))
