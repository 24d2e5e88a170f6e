"""Tuning-free cross-validation estimators of density functionals.

The central estimator of psi = int f^2 is minus the minimum of the least
squares cross-validation criterion; see :func:`cvpsi.cv_core.psi_hat`.
"""

from .cv_core import cv, psi_hat
from .competitors import psi_js, psi_shd
from .extensions import circular_psi_hat, entropy_hat, theta_r_hat
from .bandwidth import h_hat, hist_scv_binwidth
from .mixtures import NormalMixture, catalog, q_difficulty, sample, true_psi
from .sample import CircularSample, Sample

__version__ = "0.1.0"

__all__ = [
    "cv", "psi_hat", "psi_js", "psi_shd", "circular_psi_hat", "entropy_hat", "theta_r_hat",
    "h_hat", "hist_scv_binwidth", "NormalMixture", "catalog", "q_difficulty", "sample",
    "true_psi", "CircularSample", "Sample",
]
