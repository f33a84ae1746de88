"""Parametric rolled matrix-normal model for discretely observed curves.

A curve in ``R^d`` is ``z(t) = W phi(t)`` with a cubic B-spline basis
``phi`` of size ``k`` and ``W ~ MN(M_w, U_w, V_w)``. Its mean ``M_w Phi`` is
rolled onto the manifold from ``T_b M`` (frame ``U``) to give the rolled mean
``Gamma``, and each ``Z = W Phi`` is wrapped around ``Gamma``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .curves import CurveFrame, roll, time_grid
from .exceptions import InvalidSpecError, NotPositiveDefiniteError, RankDeficientError
from .manifolds import Manifold, sym_funcm

__all__ = [
    "BasisSpec",
    "bspline_matrix",
    "right_inverse",
    "MNParams",
    "sample_mn",
    "RGPModel",
    "mean_curve",
    "simulate",
    "unwrap_coords",
]

ORDER = 4


@dataclass(frozen=True)
class BasisSpec:
    """Cubic B-spline basis with ``k`` functions on ``[0, 1]``.

    Breakpoints are ``k - 2`` equally spaced points including both ends, so
    there are ``k - 4`` interior knots and the usual triple end knots.
    """

    k: int

    def __post_init__(self):
        if int(self.k) < ORDER:
            raise InvalidSpecError(f"need at least {ORDER} basis functions, got {self.k}")

    @property
    def knots(self):
        breaks = np.linspace(0.0, 1.0, self.k - 2)
        return np.concatenate([[0.0] * (ORDER - 1), breaks, [1.0] * (ORDER - 1)])


def bspline_matrix(spec, times):
    """Evaluate the basis at ``times`` by the Cox-de Boor recursion; returns ``(k, r)``."""
    if isinstance(spec, (int, np.integer)):
        spec = BasisSpec(int(spec))
    times = np.asarray(times, dtype=float)
    if times.ndim == 0:
        times = time_grid(int(times))
    if len(times) <= spec.k:
        raise InvalidSpecError(f"need more time points ({len(times)}) than basis functions ({spec.k})")
    t = spec.knots
    nint = len(t) - 1
    # degree-0 indicators; the right end belongs to the last nonempty interval
    last = max(i for i in range(nint) if t[i] < t[i + 1])
    b = np.zeros((nint, len(times)))
    for i in range(nint):
        if t[i] < t[i + 1]:
            b[i] = (times >= t[i]) & (times < t[i + 1])
    b[last, times >= t[last + 1]] = 1.0
    for p in range(1, ORDER):
        nxt = np.zeros((nint - p, len(times)))
        for i in range(nint - p):
            left = t[i + p] - t[i]
            right = t[i + p + 1] - t[i + 1]
            if left > 0:
                nxt[i] += (times - t[i]) / left * b[i]
            if right > 0:
                nxt[i] += (t[i + p + 1] - times) / right * b[i + 1]
        b = nxt
    return b


def right_inverse(phi):
    """``Phi^T (Phi Phi^T)^{-1}``, computed with a linear solve."""
    phi = np.asarray(phi, dtype=float)
    s = np.linalg.svd(phi, compute_uv=False)
    if s[-1] < 1e-10 * s[0] or phi.shape[0] > phi.shape[1]:
        raise RankDeficientError("basis matrix does not have full row rank")
    return np.linalg.solve(phi @ phi.T, phi).T


def _check_spd(a, name):
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{name} must be square")
    if np.max(np.abs(a - a.T)) > 1e-12 * max(1.0, np.max(np.abs(a))):
        raise NotPositiveDefiniteError(f"{name} is not symmetric")
    w = np.linalg.eigvalsh(a)
    if w[0] <= 0:
        raise NotPositiveDefiniteError(f"{name} is not positive definite")
    return a


@dataclass
class MNParams:
    """Matrix-normal parameters: mean ``M`` (d x k), row covariance ``U``, column covariance ``V``."""

    M: np.ndarray
    U: np.ndarray
    V: np.ndarray

    def __post_init__(self):
        self.M = np.atleast_2d(np.asarray(self.M, dtype=float))
        self.U = _check_spd(np.atleast_2d(self.U), "U")
        self.V = _check_spd(np.atleast_2d(self.V), "V")
        d, k = self.M.shape
        if self.U.shape != (d, d) or self.V.shape != (k, k):
            raise ValueError("covariance shapes do not match the mean matrix")

    @property
    def d(self):
        return self.M.shape[0]

    @property
    def k(self):
        return self.M.shape[1]

    def normalized(self):
        """Same Kronecker product with ``trace(U) = d``."""
        c = np.trace(self.U) / self.d
        return MNParams(self.M, self.U / c, self.V * c)


def sample_mn(params, rng=None, size=None):
    """Draw ``W = M + U^(1/2) G V^(1/2)`` with standard normal ``G``.

    Returns ``(d, k)`` or ``(size, d, k)``.
    """
    rng = np.random.default_rng(rng)
    lu = sym_funcm("sqrt", params.U)
    lv = sym_funcm("sqrt", params.V)
    shape = params.M.shape if size is None else (size,) + params.M.shape
    g = rng.standard_normal(shape)
    return params.M + lu @ g @ lv


@dataclass
class RGPModel:
    """Rolled matrix-normal model ``RMN(M_w, U_w, V_w; b, U)`` on ``r`` equally spaced times."""

    manifold: Manifold
    params: MNParams
    b: np.ndarray
    frame: np.ndarray
    r: int = 100
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        self.b = np.asarray(self.b, dtype=float)
        self.frame = np.asarray(self.frame, dtype=float)
        m = self.manifold
        if self.frame.shape != (m.ambient_dim, m.dim):
            raise ValueError(f"frame must be {m.ambient_dim} x {m.dim}")
        if self.params.d != m.dim:
            raise ValueError("mean matrix rows must equal the manifold dimension")
        if self.params.k < max(ORDER, m.dim):
            raise InvalidSpecError("need k >= max(4, d)")

    @property
    def basis(self):
        return BasisSpec(self.params.k)

    @property
    def times(self):
        return time_grid(self.r)

    @property
    def phi(self):
        if "phi" not in self._cache:
            self._cache["phi"] = bspline_matrix(self.basis, self.times)
        return self._cache["phi"]

    def mean_curve(self):
        return mean_curve(self)

    def curve_frame(self):
        if "cf" not in self._cache:
            self._cache["cf"] = CurveFrame(self.manifold, self.mean_curve(), self.b, self.frame)
        return self._cache["cf"]


def mean_curve(model):
    """Rolled mean ``(M_w Phi)`` rolled from ``T_b M``; shape ``(r, q)``."""
    return roll(model.manifold, model.params.M @ model.phi, model.b, model.frame)


def simulate(model, n, rng=None, return_z=False, strict=True):
    """Draw ``n`` curves ``(n, r, q)`` from the model.

    Curve ``i`` uses its own child generator spawned from ``rng``, so a given
    seed always yields the same curves. ``strict`` is passed to
    :meth:`CurveFrame.wrap`: by default a deviation beyond the injectivity
    radius raises :class:`CutLocusError`.
    """
    rng = np.random.default_rng(rng)
    children = rng.spawn(int(n))
    q, r = model.manifold.ambient_dim, model.r
    if n == 0:
        empty = np.empty((0, r, q))
        return (empty, np.empty((0, model.params.d, r))) if return_z else empty
    w = np.stack([sample_mn(model.params, child) for child in children])
    z = w @ model.phi
    x = model.curve_frame().wrap(z, strict=strict)
    return (x, z) if return_z else x


def unwrap_coords(m, x, g, b, frame):
    """Unwrapping coordinates ``H(X; Gamma)`` of curve(s) ``x``; shape ``(..., d, r)``."""
    return CurveFrame(m, g, b, frame).unwrap(x)
