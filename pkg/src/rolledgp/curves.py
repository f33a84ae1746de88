"""Discrete curves and the unrolling, rolling, unwrapping and wrapping maps.

A discrete curve on a manifold is an ``(r, q)`` array of points sampled at
``t_j = j / (r - 1)``. A flat curve is a ``(d, r)`` array of coordinates in
an orthonormal frame of ``T_b M``; the constant offset ``b`` is left out.

Curves are treated as piecewise geodesic. Parallel transport along a curve is
the composition of transports along its segments, so rather than transporting
every vector back to the start we carry the frame forward: ``frames[j]`` is the
frame at ``b`` transported to ``g(t_0)`` along the minimizing geodesic and
then along the curve to ``g(t_j)``. Coordinates of a tangent vector at
``g(t_j)`` in ``frames[j]`` equal the coordinates, in the frame at ``b``, of
the vector transported back to ``b``.
"""

from __future__ import annotations

import numpy as np

from .exceptions import CutLocusError

__all__ = [
    "time_grid",
    "transport_along",
    "transported_frames",
    "CurveFrame",
    "unroll",
    "roll",
    "unwrap",
    "wrap",
]

# distance below the injectivity radius at which log maps are refused
CUT_MARGIN = 1e-6


def time_grid(r):
    r = int(r)
    if r < 2:
        raise ValueError("a time grid needs at least two points")
    return np.linspace(0.0, 1.0, r)


def _check_dist(m, p, x, what):
    if not np.isfinite(m.injectivity_radius):
        return
    dist = m.dist(p, x)
    if np.any(dist > m.injectivity_radius - CUT_MARGIN):
        raise CutLocusError(f"{what}: points too close to the cut locus (distance {np.max(dist):.6g})")


def _check_len(m, c, what):
    if not np.isfinite(m.injectivity_radius):
        return
    n = np.linalg.norm(c, axis=-1)
    if np.any(n > m.injectivity_radius - CUT_MARGIN):
        raise CutLocusError(f"{what}: tangent vector beyond the injectivity radius ({np.max(n):.6g})")


def transport_along(m, g, j_from, j_to, v):
    """Transport ``v`` (tangent at ``g[j_from]``) along the piecewise geodesic to ``g[j_to]``."""
    g = np.asarray(g, dtype=float)
    v = np.asarray(v, dtype=float)
    step = 1 if j_to >= j_from else -1
    for j in range(j_from, j_to, step):
        _check_dist(m, g[j], g[j + step], "transport_along")
        v = m.transport(g[j], g[j + step], v)
    return v


def _move_frame(m, p, p2, frame):
    return m.transport(p, p2, frame.T).T


def transported_frames(m, g, b, frame):
    """Frame at ``b`` carried to every point of ``g``; shape ``(r, q, d)``."""
    g = np.asarray(g, dtype=float)
    _check_dist(m, b, g[0], "base point to curve start")
    _check_dist(m, g[:-1], g[1:], "consecutive curve points")
    out = np.empty((len(g),) + np.shape(frame))
    f = _move_frame(m, b, g[0], np.asarray(frame, dtype=float))
    out[0] = f
    for j in range(len(g) - 1):
        f = _move_frame(m, g[j], g[j + 1], f)
        out[j + 1] = f
    return out


class CurveFrame:
    """Cached transported frames and unrolling of a base curve ``g``.

    Unwrapping and wrapping many curves against the same base curve only
    needs the frames once.
    """

    def __init__(self, m, g, b, frame):
        self.manifold = m
        self.g = np.asarray(g, dtype=float)
        self.b = np.asarray(b, dtype=float)
        self.frame = np.asarray(frame, dtype=float)
        self.frames = transported_frames(m, self.g, self.b, self.frame)
        start = m.coords(self.b, self.frame, m.log(self.b, self.g[0]))
        steps = m.coords(self.g[:-1], self.frames[:-1], m.log(self.g[:-1], self.g[1:]))
        self.unrolled = np.concatenate([start[None], start + np.cumsum(steps, axis=0)]).T

    @classmethod
    def rolled(cls, m, coords, b, frame):
        """Roll ``coords`` and keep the frames computed on the way.

        The unrolling of the result is ``coords`` itself, so it is stored as is.
        """
        self = cls.__new__(cls)
        self.manifold = m
        self.b = np.asarray(b, dtype=float)
        self.frame = np.asarray(frame, dtype=float)
        self.g, self.frames = roll(m, coords, self.b, self.frame, return_frames=True)
        self.unrolled = np.array(coords, dtype=float)
        return self

    def unwrap(self, x):
        """Unwrapping coordinates of curve(s) ``x`` with shape ``(..., r, q)``; returns ``(..., d, r)``."""
        m = self.manifold
        x = np.asarray(x, dtype=float)
        _check_dist(m, self.g, x, "unwrap")
        dev = m.coords(self.g, self.frames, m.log(self.g, x))
        return self.unrolled + np.swapaxes(dev, -1, -2)

    def wrap(self, y, strict=True):
        """Wrap flat curve(s) ``y`` with shape ``(..., d, r)`` around the base curve.

        With ``strict`` a deviation outside the injectivity domain raises
        :class:`CutLocusError`; otherwise the exponential map is applied anyway
        and the result can no longer be unwrapped back to ``y``.
        """
        m = self.manifold
        dev = np.swapaxes(np.asarray(y, dtype=float) - self.unrolled, -1, -2)
        if strict:
            _check_len(m, dev, "wrap")
        return m.exp(self.g, m.from_coords(self.frames, dev))


def unroll(m, g, b, frame):
    """Coordinates ``(d, r)`` of the unrolling of ``g`` into ``T_b M``."""
    return CurveFrame(m, g, b, frame).unrolled


def roll(m, coords, b, frame, return_frames=False):
    """Roll flat coordinates ``(d, r)`` from ``T_b M`` onto the manifold; returns ``(r, q)``."""
    coords = np.asarray(coords, dtype=float)
    frame = np.asarray(frame, dtype=float)
    b = np.asarray(b, dtype=float)
    r = coords.shape[1]
    steps = np.diff(coords, axis=1).T
    _check_len(m, coords[:, 0], "roll start")
    _check_len(m, steps, "roll increments")
    pts = np.empty((r, m.ambient_dim))
    frames = np.empty((r,) + frame.shape)
    pts[0] = m.exp(b, m.from_coords(frame, coords[:, 0]))
    f = _move_frame(m, b, pts[0], frame)
    frames[0] = f
    for j in range(r - 1):
        pts[j + 1], ft = m.exp_transport(pts[j], m.from_coords(f, steps[j]), f.T)
        f = ft.T
        frames[j + 1] = f
    if return_frames:
        return pts, frames
    return pts


def unwrap(m, x, g, b, frame):
    """Unwrapping coordinates of ``x`` with respect to ``g``; see :class:`CurveFrame`."""
    return CurveFrame(m, g, b, frame).unwrap(x)


def wrap(m, y, g, b, frame, strict=True):
    return CurveFrame(m, g, b, frame).wrap(y, strict=strict)
