"""Distributions, moments, and diagnostics of extreme first passage times.

Given the short-time behavior 1 - S(t) ~ A t^p exp(-C/t) of a single
diffusive searcher's survival probability, this package builds the Gumbel
approximation of the fastest (and k-th fastest) of N iid passage times,
the exact quadrature-based statistics, and Monte Carlo validation, all
behind a CSV-emitting command line.
"""

__version__ = "0.1.0"

from . import evt_core, exact, mc, models, specfun  # noqa: F401
from .errors import (  # noqa: F401
    DomainError,
    InfiniteMomentError,
    RescalingUndefinedError,
    SolverError,
    ValidationError,
)
from .evt_core import GumbelParams, RescalingPair  # noqa: F401
from .exact import OrderStatSpec  # noqa: F401
from .models import (  # noqa: F401
    ShortTimeParams,
    SurvivalModel,
    TailClass,
    model_1d_point,
    model_1d_robin,
    model_3d_sphere,
    model_tabulated,
)
