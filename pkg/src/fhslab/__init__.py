"""Numerical lab for fractional Hardy-Sobolev inequalities on radial profiles."""

__version__ = "0.1.0"

from .params import ParameterError, ProblemParams, make_params  # noqa: E402
from .profiles import Grid, RadialProfile, candidate_extremal  # noqa: E402

__all__ = ["ParameterError", "ProblemParams", "make_params", "Grid", "RadialProfile", "candidate_extremal",
           "__version__"]
