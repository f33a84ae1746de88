"""Prescribed models used by the demos and the command line."""

from __future__ import annotations

import numpy as np

from .manifolds import SPD, SO3Quat, Sphere
from .model import MNParams, RGPModel

__all__ = ["PRESETS", "get_preset", "s2_hetero", "spd_demo", "so3_synthetic", "ar_covariance"]


def ar_covariance(k, rho=0.9, scale=1.0):
    """``V[i, j] = scale * a_i a_j rho^|i-j|`` with ``a_i = 1 + 3/4 cos(2 pi i / k)``, ``i = 1..k``."""
    i = np.arange(1, k + 1)
    a = 1.0 + 0.75 * np.cos(2 * np.pi * i / k)
    return scale * np.outer(a, a) * rho ** np.abs(i[:, None] - i[None, :])


def s2_hetero(r=100):
    """Heteroscedastic curves on the 2-sphere."""
    k = 10
    s = np.linspace(0.0, 1.0, k)
    amp = 0.5 + s**2 / 2
    M = 0.75 * (np.ones((2, k)) + amp * np.stack([np.cos(5 * s), np.sin(5 * s)]))
    m = Sphere(2)
    b = np.array([-5.0, -5.0, 1.0]) / np.sqrt(51.0)
    return RGPModel(m, MNParams(M, np.eye(2), ar_covariance(k)), b, m.frame(b), r)


def spd_demo(r=100):
    """Curves on 2 x 2 SPD matrices starting near the identity."""
    k = 5
    s = np.linspace(0.0, 1.0, k)
    M = 0.75 * 0.2 * np.stack([np.cos(5 * s), np.sin(5 * s), s])
    m = SPD(2)
    b = np.eye(2).ravel()
    return RGPModel(m, MNParams(M, np.eye(3), ar_covariance(k, scale=1e-3)), b, m.frame(b), r)


def so3_synthetic(r=100, shift=0.0):
    """Orientation curves on the unit-quaternion hemisphere around the identity.

    Variability is small early on and grows sharply after ``t ~ 0.55``,
    mimicking a trajectory with a kink. ``shift`` adds a constant offset to
    the second mean coordinate.
    """
    k = 10
    s = np.linspace(0.0, 1.0, k)
    M = np.stack([0.5 * s, 0.25 * np.sin(np.pi * s), 0.15 * (1 - np.cos(np.pi * s))])
    M[1] += shift
    a = 0.02 + 0.1 / (1.0 + np.exp(-20.0 * (s - 0.55)))
    i = np.arange(k)
    V = np.outer(a, a) * 0.9 ** np.abs(i[:, None] - i[None, :])
    m = SO3Quat()
    b = np.array([1.0, 0.0, 0.0, 0.0])
    return RGPModel(m, MNParams(M, np.eye(3), V), b, np.eye(4)[:, 1:], r)


PRESETS = {"s2-hetero": s2_hetero, "spd-demo": spd_demo, "so3-synthetic": so3_synthetic}


def get_preset(name, **kwargs):
    try:
        return PRESETS[name](**kwargs)
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
