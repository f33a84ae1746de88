"""Curve bundles on disk and quaternion sign alignment."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .curves import time_grid
from .exceptions import NonUnitError
from .manifolds import Manifold, get_manifold
from .validation import check_curves, check_frame

__all__ = ["CurveBundle", "save_bundle", "load_bundle", "align_quaternions", "dump_json"]


@dataclass
class CurveBundle:
    """``n`` curves on a common time grid.

    ``base_point`` and ``frame`` are optional and record the tangent space
    identification a simulated bundle was generated with.
    """

    manifold: Manifold
    curves: np.ndarray
    times: np.ndarray = None
    labels: list | None = None
    base_point: np.ndarray | None = None
    frame: np.ndarray | None = None

    def __post_init__(self):
        q = self.manifold.ambient_dim
        curves = np.asarray(self.curves, dtype=float)
        if curves.size == 0 and curves.ndim != 3:
            r = 0 if self.times is None else len(self.times)
            curves = curves.reshape(0, r, q)
        if curves.ndim != 3 or curves.shape[-1] != q:
            raise ValueError(f"curves must have shape (n, r, {q})")
        self.curves = curves
        if self.times is None:
            self.times = time_grid(curves.shape[1])
        self.times = np.asarray(self.times, dtype=float)
        if len(curves) and curves.shape[1] != len(self.times):
            raise ValueError("curves and times disagree on r")
        if self.labels is not None:
            self.labels = list(self.labels)
            if len(self.labels) != len(self.curves):
                raise ValueError("need one label per curve")

    @property
    def n(self):
        return len(self.curves)

    def groups(self):
        """Curves split by label, in order of first appearance."""
        if self.labels is None:
            raise ValueError("bundle has no labels")
        out = {}
        for lab, c in zip(self.labels, self.curves):
            out.setdefault(lab, []).append(c)
        return {k: np.stack(v) for k, v in out.items()}

    def to_dict(self):
        d = {
            "manifold": self.manifold.descriptor,
            "times": self.times.tolist(),
            "curves": self.curves.tolist(),
        }
        if self.labels is not None:
            d["labels"] = self.labels
        if self.base_point is not None:
            d["base_point"] = np.asarray(self.base_point, dtype=float).tolist()
        if self.frame is not None:
            d["frame"] = np.asarray(self.frame, dtype=float).tolist()
        return d

    @classmethod
    def from_dict(cls, d, tol=1e-8):
        try:
            desc = d["manifold"]
            m = get_manifold(desc["kind"], desc.get("d"), desc.get("q"))
            times = np.asarray(d["times"], dtype=float)
            raw = d["curves"]
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed bundle: {exc}") from None
        if m.kind == "so3quat" and len(raw):
            raw = align_quaternions(raw)
        if len(raw):
            curves, _ = check_curves(raw, m, tol=tol)
        else:
            curves = np.empty((0, len(times), m.ambient_dim))
        b = d.get("base_point")
        frame = d.get("frame")
        if b is not None and frame is not None:
            b, frame = check_frame(m, b, frame)
        return cls(m, curves, times, d.get("labels"), b, frame)


def dump_json(obj, path):
    # json writes floats with repr, which round-trips doubles exactly
    text = json.dumps(obj, indent=1, allow_nan=False)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text + "\n")


def save_bundle(bundle, path):
    dump_json(bundle.to_dict(), path)


def load_bundle(path, tol=1e-8):
    with open(path, encoding="utf-8") as fh:
        try:
            d = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: not valid JSON ({exc})") from None
    return CurveBundle.from_dict(d, tol)


def align_quaternions(raw, tol=1e-6):
    """Fix quaternion signs so each curve is continuous on the 3-sphere.

    ``raw`` is a single ``r x 4`` curve or a stack of them. The first row is
    flipped so its largest-magnitude entry is nonnegative; each later row is
    flipped if it points away from the previous aligned row.
    """
    q = np.array(raw, dtype=float)
    single = q.ndim == 2
    if single:
        q = q[None]
    if q.ndim != 3 or q.shape[-1] != 4:
        raise ValueError("quaternion curves must have shape (r, 4) or (n, r, 4)")
    norms = np.linalg.norm(q, axis=-1)
    if np.any(np.abs(norms - 1.0) > tol):
        raise NonUnitError(f"quaternion norms deviate from 1 by up to {np.max(np.abs(norms - 1.0)):.3g}")
    for c in q:
        if c[0, np.argmax(np.abs(c[0]))] < 0:
            c[0] = -c[0]
        for j in range(1, len(c)):
            if c[j] @ c[j - 1] < 0:
                c[j] = -c[j]
    return q[0] if single else q
