"""Monte Carlo experiments: parameter convergence in the sample size."""

from __future__ import annotations

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .estimate import FitConfig, fit
from .manifolds import SPD
from .model import simulate
from .presets import get_preset

__all__ = ["TABLE1", "mean_metric", "covariance_distance", "convergence_rows", "median_rows"]

# single-run reference values for the spd-demo convergence table
TABLE1 = {
    "n": (10, 25, 50, 100, 500),
    "metric_M": (2.19, 0.46, 0.30, 0.14, 0.10),
    "metric_U": (0.47, 0.27, 0.19, 0.15, 0.06),
    "metric_V": (1.16, 0.72, 0.55, 0.32, 0.15),
}

METRICS = ("metric_M", "metric_U", "metric_V")


def mean_metric(M_hat, params):
    """``tr(U^-1 D V^-1 D^T)`` with ``D = M_hat - M`` and the true ``U``, ``V``."""
    D = np.asarray(M_hat) - params.M
    return float(np.sum(cho_solve(cho_factor(params.U), D) * cho_solve(cho_factor(params.V), D.T).T))


def covariance_distance(a, b):
    """Affine-invariant distance between SPD matrices."""
    a = np.asarray(a, dtype=float)
    return float(SPD(a.shape[0]).dist(a.ravel(), np.asarray(b, dtype=float).ravel()))


def convergence_rows(preset="spd-demo", n_list=(10, 25, 50, 100, 500), seeds=10, seed0=0, method="fre", r=100):
    """Simulate, fit and score for every ``(n, seed)``; returns a list of dicts."""
    n_list = [int(n) for n in n_list]
    if any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ValueError("n-list must be strictly ascending")
    model = get_preset(preset, r=r)
    truth = model.params
    cfg = FitConfig(method=method)
    rows = []
    for n in n_list:
        for s in range(seed0, seed0 + int(seeds)):
            x = simulate(model, n, np.random.default_rng([s, n]))
            res = fit(model.manifold, x, truth.k, model.b, model.frame, cfg)
            rows.append({
                "n": n,
                "seed": s,
                "metric_M": mean_metric(res.params.M, truth),
                "metric_U": covariance_distance(res.params.U, truth.U),
                "metric_V": covariance_distance(res.params.V, truth.V),
            })
    return rows


def median_rows(rows):
    """Per-``n`` medians of the three metrics, in ascending ``n``."""
    out = []
    for n in sorted({r["n"] for r in rows}):
        sub = [r for r in rows if r["n"] == n]
        out.append({"n": n, "seed": "median", **{k: float(np.median([r[k] for r in sub])) for k in METRICS}})
    return out


def strictly_decreasing(medians):
    """Per metric, whether the medians strictly decrease in ``n``."""
    return {k: all(b[k] < a[k] for a, b in zip(medians, medians[1:])) for k in METRICS}
