"""Mixtures of generalized hyperbolic factor analyzers.

Model-based clustering and semi-supervised classification with
heavy-tailed, skewed factor-analyzer components, fitted by AECM with
BIC model selection.  `fit`, `fit_classify`, and `select` are the main
entry points; the `hyperfa` console script wraps them.
"""

__version__ = "0.1.0"

from .backend import get_backend, set_backend, using_numba
from .classify import PartialLabels, fit_classify, hold_out_unlabel
from .datasim import Partition, SimDesign, ari, generate
from .ghd import FactoredScale, GHParams, log_density, woodbury_inverse
from .gig import GIGMoments, GIGParams, moments
from .mghfa import (
    FitConfig,
    FitError,
    FitReport,
    GHFAComponent,
    MixtureModel,
    fit,
    log_likelihood,
)
from .selection import SelectionGrid, bic, select
from .specfun import dlogk_dnu, log_bessel_k

__all__ = [
    "__version__",
    "ari",
    "bic",
    "dlogk_dnu",
    "fit",
    "fit_classify",
    "FactoredScale",
    "FitConfig",
    "FitError",
    "FitReport",
    "generate",
    "get_backend",
    "GHFAComponent",
    "GHParams",
    "GIGMoments",
    "GIGParams",
    "hold_out_unlabel",
    "log_bessel_k",
    "log_density",
    "log_likelihood",
    "moments",
    "MixtureModel",
    "PartialLabels",
    "Partition",
    "select",
    "SelectionGrid",
    "set_backend",
    "SimDesign",
    "using_numba",
    "woodbury_inverse",
]
