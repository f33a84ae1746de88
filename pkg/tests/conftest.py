import numpy as np
import pytest

from rolledgp.curves import roll
from rolledgp.manifolds import SPD, Euclidean, SO3Quat, Sphere

MANIFOLDS = {
    "euclidean": Euclidean(3),
    "sphere2": Sphere(2),
    "sphere3": Sphere(3),
    "so3quat": SO3Quat(),
    "spd2": SPD(2),
    "spd3": SPD(3),
}


@pytest.fixture(params=sorted(MANIFOLDS))
def manifold(request):
    return MANIFOLDS[request.param]


def smooth_coords(d, r, rng, scale=0.8):
    """A random smooth flat curve: low-order trigonometric polynomial in t."""
    t = np.linspace(0.0, 1.0, r)
    c = rng.standard_normal((d, 3)) * scale / 3
    phase = rng.uniform(0, 2 * np.pi, (d, 1))
    return c[:, :1] * t + c[:, 1:2] * np.sin(2 * np.pi * t + phase) + c[:, 2:] * np.cos(np.pi * t)


def smooth_curve(m, rng, r=100, scale=0.8):
    b = m.random_point(rng, 0.3)
    return roll(m, smooth_coords(m.dim, r, rng, scale), b, m.frame(b))
