"""Rolled Gaussian processes for curves on Riemannian manifolds."""

from .bundle import CurveBundle, align_quaternions, load_bundle, save_bundle
from .curves import CurveFrame, roll, time_grid, unroll, unwrap, wrap
from .estimate import FitConfig, FitResult, fit, fit_fre, fit_ls, fit_mle, flipflop, mn_loglik
from .estimator import RolledGaussianProcess
from .exceptions import (
    CutLocusError,
    DegenerateError,
    InvalidSpecError,
    NoConvergenceError,
    NonUnitError,
    NotPositiveDefiniteError,
    RankDeficientError,
    RolledGPError,
)
from .frechet import FrechetConfig, frechet_mean, frechet_mean_curve
from .inference import TestResult, hotelling_stat, permutation_test
from .manifolds import SPD, Euclidean, Manifold, SO3Quat, Sphere, get_manifold
from .model import BasisSpec, MNParams, RGPModel, bspline_matrix, mean_curve, right_inverse, sample_mn, simulate
from .presets import PRESETS, get_preset

__version__ = "0.1.0"

__all__ = [
    "BasisSpec", "CurveBundle", "CurveFrame", "CutLocusError", "DegenerateError", "Euclidean",
    "FitConfig", "FitResult", "FrechetConfig", "InvalidSpecError", "MNParams", "Manifold",
    "NoConvergenceError", "NonUnitError", "NotPositiveDefiniteError", "PRESETS", "RGPModel",
    "RankDeficientError", "RolledGPError", "RolledGaussianProcess", "SO3Quat", "SPD", "Sphere",
    "TestResult", "align_quaternions", "bspline_matrix", "fit", "fit_fre", "fit_ls", "fit_mle",
    "flipflop", "frechet_mean", "frechet_mean_curve", "get_manifold", "get_preset",
    "hotelling_stat", "load_bundle", "mean_curve", "mn_loglik", "permutation_test",
    "right_inverse", "roll", "sample_mn", "save_bundle", "simulate", "time_grid", "unroll",
    "unwrap", "wrap",
]
