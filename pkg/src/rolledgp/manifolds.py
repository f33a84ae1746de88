"""Closed-form Riemannian geometry in embedded coordinates.

Points and tangent vectors are plain float arrays of length ``q`` (the
embedding dimension). Every operation broadcasts over leading axes, so a
stack of points ``(..., q)`` can be processed in one call.

Supported manifolds:

* ``Euclidean(d)``: flat space, ``q = d``.
* ``Sphere(d)``: unit sphere in ``R^(d+1)`` with the induced metric.
* ``SPD(r)``: symmetric positive definite ``r x r`` matrices with the
  affine-invariant metric, stored as row-major flattened matrices (``q = r*r``).
* ``SO3Quat()``: rotations as unit quaternions on a hemisphere of ``S^3``.
  The geometry is the ``S^3`` geometry; sign alignment is the caller's job.
"""

from __future__ import annotations

import numpy as np

from .exceptions import CutLocusError, NotPositiveDefiniteError

__all__ = [
    "Manifold",
    "Euclidean",
    "Sphere",
    "SPD",
    "SO3Quat",
    "get_manifold",
    "exp_map",
    "log_map",
    "distance",
    "transport",
    "frame_at",
    "sym_funcm",
]

_PD_RATIO = 1e-14


def _sym(a):
    return 0.5 * (a + np.swapaxes(a, -1, -2))


def _eigh_checked(a):
    w, v = np.linalg.eigh(_sym(a))
    wmax = np.max(np.abs(w), axis=-1, keepdims=True)
    if np.any(w <= _PD_RATIO * wmax) or np.any(wmax == 0):
        raise NotPositiveDefiniteError(
            f"matrix is not positive definite (min eigenvalue {w.min():.3e})"
        )
    return w, v


def _eig_apply(w, v, values):
    return np.einsum("...ij,...j,...kj->...ik", v, values, v)


def sym_funcm(kind, a):
    """Apply ``sqrt``, ``invsqrt``, ``log`` or ``exp`` to symmetric matrices.

    Uses a symmetric eigendecomposition; broadcasts over leading axes.
    ``sqrt``, ``invsqrt`` and ``log`` require positive definite input.
    """
    a = np.asarray(a, dtype=float)
    if kind == "exp":
        w, v = np.linalg.eigh(_sym(a))
        return _sym(_eig_apply(w, v, np.exp(w)))
    w, v = _eigh_checked(a)
    if kind == "sqrt":
        out = np.sqrt(w)
    elif kind == "invsqrt":
        out = 1.0 / np.sqrt(w)
    elif kind == "log":
        out = np.log(w)
    else:
        raise ValueError(f"unknown matrix function {kind!r}")
    return _sym(_eig_apply(w, v, out))


def _sinc(x):
    # sin(x) / x, smooth through 0
    return np.sinc(x / np.pi)


class Manifold:
    """Common interface. Subclasses set ``kind``, ``dim`` and ``ambient_dim``."""

    kind: str = ""
    dim: int = 0
    ambient_dim: int = 0
    injectivity_radius: float = np.inf

    # --- geometry -------------------------------------------------------
    def exp(self, p, v):
        raise NotImplementedError

    def log(self, p, x):
        raise NotImplementedError

    def dist(self, p, x):
        raise NotImplementedError

    def transport(self, p, p2, v):
        raise NotImplementedError

    def exp_transport(self, p, v, w):
        """Return ``exp_p(v)`` and the transport of ``w`` along that geodesic."""
        p2 = self.exp(p, v)
        return p2, self.transport(p, p2, w)

    def metric_matrix(self, p):
        """Gram matrix ``G`` with ``<u, v>_p = u @ G @ v`` in embedded coordinates."""
        p = np.asarray(p, dtype=float)
        return np.broadcast_to(np.eye(self.ambient_dim), p.shape + (self.ambient_dim,))

    def inner(self, p, u, v):
        return np.einsum("...i,...i->...", u, v)

    def norm(self, p, v):
        return np.sqrt(np.maximum(self.inner(p, v, v), 0.0))

    def frame(self, b):
        raise NotImplementedError

    def coords(self, p, frame, v):
        """Coordinates of ``v`` (tangent at ``p``) in the orthonormal ``frame`` (q x d)."""
        return np.einsum("...i,...ik->...k", v, frame)

    def from_coords(self, frame, c):
        return np.einsum("...ik,...k->...i", frame, c)

    # --- validation -----------------------------------------------------
    def check_point(self, x, tol=1e-12):
        raise NotImplementedError

    def project(self, x):
        return np.asarray(x, dtype=float)

    def check_tangent(self, p, v, tol=1e-10):
        return True

    def to_tangent(self, p, v):
        return np.asarray(v, dtype=float)

    # --- sampling helpers -----------------------------------------------
    def random_point(self, rng, scale=1.0):
        raise NotImplementedError

    def random_tangent(self, rng, p, scale=1.0):
        c = rng.standard_normal(np.shape(p)[:-1] + (self.dim,)) * scale
        return self.from_coords(self.frame(p), c)

    @property
    def descriptor(self):
        return {"kind": self.kind, "d": int(self.dim), "q": int(self.ambient_dim)}

    def __repr__(self):
        return f"{type(self).__name__}(d={self.dim}, q={self.ambient_dim})"

    def __eq__(self, other):
        return isinstance(other, Manifold) and self.descriptor == other.descriptor

    def __hash__(self):
        return hash(tuple(self.descriptor.items()))


class Euclidean(Manifold):
    kind = "euclidean"

    def __init__(self, d):
        self.dim = self.ambient_dim = int(d)

    def exp(self, p, v):
        return np.asarray(p, dtype=float) + v

    def log(self, p, x):
        return np.asarray(x, dtype=float) - p

    def dist(self, p, x):
        return np.linalg.norm(np.asarray(x, dtype=float) - p, axis=-1)

    def transport(self, p, p2, v):
        shape = np.broadcast_shapes(np.shape(p), np.shape(p2), np.shape(v))
        return np.broadcast_to(np.asarray(v, dtype=float), shape).copy()

    def frame(self, b):
        return np.eye(self.dim)

    def check_point(self, x, tol=1e-12):
        return bool(np.all(np.isfinite(x)))

    def random_point(self, rng, scale=1.0):
        return rng.standard_normal(self.dim) * scale


class Sphere(Manifold):
    kind = "sphere"
    injectivity_radius = np.pi

    def __init__(self, d):
        self.dim = int(d)
        self.ambient_dim = self.dim + 1

    def exp(self, p, v):
        p = np.asarray(p, dtype=float)
        nv = np.linalg.norm(v, axis=-1, keepdims=True)
        out = np.cos(nv) * p + _sinc(nv) * v
        return out / np.linalg.norm(out, axis=-1, keepdims=True)

    def _split(self, p, x):
        c = np.clip(np.einsum("...i,...i->...", p, x), -1.0, 1.0)[..., None]
        w = x - c * p
        nw = np.linalg.norm(w, axis=-1, keepdims=True)
        return c, w, nw

    def log(self, p, x):
        p = np.asarray(p, dtype=float)
        x = np.asarray(x, dtype=float)
        if np.any(np.linalg.norm(x + p, axis=-1) <= 1e-10):
            raise CutLocusError("antipodal points have no unique logarithm")
        c, w, nw = self._split(p, x)
        u = np.arctan2(nw, c)
        # nw = sin(u) for unit inputs
        scale = np.where(nw > 1e-300, u / np.where(nw > 1e-300, nw, 1.0), 1.0)
        return scale * w

    def dist(self, p, x):
        c, _, nw = self._split(np.asarray(p, dtype=float), np.asarray(x, dtype=float))
        return np.arctan2(nw, c)[..., 0]

    def transport(self, p, p2, v):
        p = np.asarray(p, dtype=float)
        v = np.asarray(v, dtype=float)
        lg = self.log(p, p2)
        u = np.linalg.norm(lg, axis=-1, keepdims=True)
        a = np.einsum("...i,...i->...", lg, v)[..., None]
        # I + (cos u - 1) w w^T - sin u p w^T with w = lg / u, written without 1/u
        return v - a * (0.5 * _sinc(0.5 * u) ** 2 * lg + _sinc(u) * p)

    def frame(self, b):
        b = np.asarray(b, dtype=float)
        u, _, _ = np.linalg.svd(np.eye(self.ambient_dim) - np.outer(b, b))
        return u[:, : self.dim]

    def check_point(self, x, tol=1e-12):
        x = np.asarray(x, dtype=float)
        return bool(np.all(np.abs(np.linalg.norm(x, axis=-1) - 1.0) <= tol))

    def project(self, x):
        x = np.asarray(x, dtype=float)
        return x / np.linalg.norm(x, axis=-1, keepdims=True)

    def check_tangent(self, p, v, tol=1e-10):
        return bool(np.all(np.abs(np.einsum("...i,...i->...", p, v)) <= tol))

    def to_tangent(self, p, v):
        v = np.asarray(v, dtype=float)
        return v - np.einsum("...i,...i->...", p, v)[..., None] * p

    def random_point(self, rng, scale=1.0):
        return self.project(rng.standard_normal(self.ambient_dim))


class SO3Quat(Sphere):
    """Unit quaternions; geometry of ``S^3``."""

    kind = "so3quat"

    def __init__(self, d=3):
        if int(d) != 3:
            raise ValueError("so3quat has intrinsic dimension 3")
        super().__init__(3)


class SPD(Manifold):
    """Symmetric positive definite ``r x r`` matrices, affine-invariant metric."""

    kind = "spd"

    def __init__(self, r):
        self.r = int(r)
        self.dim = self.r * (self.r + 1) // 2
        self.ambient_dim = self.r * self.r

    def _mat(self, x):
        x = np.asarray(x, dtype=float)
        return x.reshape(x.shape[:-1] + (self.r, self.r))

    def _vec(self, a):
        return a.reshape(a.shape[:-2] + (self.ambient_dim,))

    def _roots(self, p):
        w, v = _eigh_checked(self._mat(p))
        s = np.sqrt(w)
        return _eig_apply(w, v, s), _eig_apply(w, v, 1.0 / s)

    def exp(self, p, v):
        a, ai = self._roots(p)
        inner = sym_funcm("exp", ai @ self._mat(v) @ ai)
        return self._vec(_sym(a @ inner @ a))

    def log(self, p, x):
        a, ai = self._roots(p)
        inner = sym_funcm("log", ai @ self._mat(x) @ ai)
        return self._vec(_sym(a @ inner @ a))

    def dist(self, p, x):
        _, ai = self._roots(p)
        w = np.linalg.eigvalsh(_sym(ai @ self._mat(x) @ ai))
        if np.any(w <= 0):
            raise NotPositiveDefiniteError("distance to a non-SPD matrix")
        return np.sqrt(np.sum(np.log(w) ** 2, axis=-1))

    def transport(self, p, p2, v):
        _, ai = self._roots(p)
        b, bi = self._roots(p2)
        pinv = ai @ ai
        # E = (P2 P^-1)^(1/2) = B (B P^-1 B)^(1/2) B^-1 with B = P2^(1/2)
        e = b @ sym_funcm("sqrt", b @ pinv @ b) @ bi
        return self._vec(_sym(e @ self._mat(v) @ np.swapaxes(e, -1, -2)))

    def exp_transport(self, p, v, w):
        # along the geodesic the transport matrix is P^(1/2) exp(S/2) P^(-1/2), S = P^(-1/2) V P^(-1/2)
        a, ai = self._roots(p)
        lam, q = np.linalg.eigh(_sym(ai @ self._mat(v) @ ai))
        half = _eig_apply(lam, q, np.exp(0.5 * lam))
        p2 = self._vec(_sym(a @ half @ half @ a))
        e = a @ half @ ai
        return p2, self._vec(_sym(e @ self._mat(w) @ np.swapaxes(e, -1, -2)))

    def metric_matrix(self, p):
        _, ai = self._roots(p)
        pinv = ai @ ai
        g = np.einsum("...ij,...kl->...ikjl", pinv, pinv)
        return g.reshape(g.shape[:-4] + (self.ambient_dim, self.ambient_dim))

    def inner(self, p, u, v):
        _, ai = self._roots(p)
        su = ai @ self._mat(u) @ ai
        sv = ai @ self._mat(v) @ ai
        return np.einsum("...ij,...ij->...", su, sv)

    def coords(self, p, frame, v):
        g = self.metric_matrix(p)
        return np.einsum("...i,...ij,...jk->...k", v, g, frame)

    def identity_basis(self):
        """Orthonormal basis of symmetric matrices under the Frobenius product.

        Ordered as the diagonal units ``E_ii`` followed by ``(E_ij + E_ji)/sqrt(2)``
        for ``i < j`` in row-major order. Returned as a ``q x d`` array.
        """
        cols = []
        for i in range(self.r):
            e = np.zeros((self.r, self.r))
            e[i, i] = 1.0
            cols.append(e.ravel())
        for i in range(self.r):
            for j in range(i + 1, self.r):
                e = np.zeros((self.r, self.r))
                e[i, j] = e[j, i] = 1.0 / np.sqrt(2.0)
                cols.append(e.ravel())
        return np.stack(cols, axis=1)

    def frame(self, b):
        a, _ = self._roots(b)
        basis = self._mat(self.identity_basis().T)
        return self._vec(a @ basis @ a).T

    def check_point(self, x, tol=1e-12):
        m = self._mat(x)
        if np.any(np.abs(m - np.swapaxes(m, -1, -2)) > tol):
            return False
        return bool(np.all(np.linalg.eigvalsh(_sym(m)) > 0))

    def project(self, x):
        return self._vec(_sym(self._mat(x)))

    def check_tangent(self, p, v, tol=1e-10):
        m = self._mat(v)
        return bool(np.all(np.abs(m - np.swapaxes(m, -1, -2)) <= tol))

    def to_tangent(self, p, v):
        return self._vec(_sym(self._mat(v)))

    def random_point(self, rng, scale=1.0):
        s = rng.standard_normal((self.r, self.r)) * scale
        return self._vec(sym_funcm("exp", _sym(s)))


_KINDS = {"euclidean": Euclidean, "sphere": Sphere, "spd": SPD, "so3quat": SO3Quat}


def get_manifold(kind, d=None, q=None):
    """Build a manifold from its kind and either intrinsic ``d`` or embedding ``q``."""
    if isinstance(kind, Manifold):
        return kind
    if kind not in _KINDS:
        raise ValueError(f"unknown manifold kind {kind!r}; expected one of {sorted(_KINDS)}")
    if kind == "so3quat":
        m = SO3Quat()
    elif kind == "euclidean":
        m = Euclidean(d if d is not None else q)
    elif kind == "sphere":
        m = Sphere(d if d is not None else q - 1)
    else:
        if q is not None:
            r = int(round(np.sqrt(q)))
        else:
            r = int(round((np.sqrt(8 * d + 1) - 1) / 2))
        m = SPD(r)
    if (d is not None and m.dim != d) or (q is not None and m.ambient_dim != q):
        raise ValueError(f"inconsistent dimensions for {kind}: d={d}, q={q}")
    return m


def exp_map(m, base, vec):
    return m.exp(base, vec)


def log_map(m, p, x):
    return m.log(p, x)


def distance(m, p, x):
    return m.dist(p, x)


def transport(m, p, p2, vec):
    return m.transport(p, p2, vec)


def frame_at(m, b):
    return m.frame(b)
