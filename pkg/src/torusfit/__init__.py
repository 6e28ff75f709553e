"""Bivariate wrapped geometric models for directions on a discrete torus."""
from .baselines import BaselineParams, compare, discretize, fit_baseline
from .datasets import load_dataset
from .distributions import BgwgParams, BwgParams, PmfTable, WsgParams, pmf_table
from .errors import DomainError, ParseError, SingularityError
from .estimators import BaselineEstimator, BGWGEstimator, BWGEstimator
from .gof import auto_merge_groups, chi_square_sf, chisq_gof
from .inference import CountTable, FitOptions, FitResult, fit_bgwg, fit_bwg, log_likelihood
from .moments import jupp_mardia_rho1sq, trig_moments_brute, trig_moments_closed
from .sampling import sample_joint
from .torus import TorusGrid

__version__ = "0.1.0"

__all__ = [
    "BaselineEstimator", "BaselineParams", "BGWGEstimator", "BgwgParams", "BWGEstimator",
    "BwgParams", "CountTable", "DomainError", "FitOptions", "FitResult", "ParseError",
    "PmfTable", "SingularityError", "TorusGrid", "WsgParams", "auto_merge_groups",
    "chi_square_sf", "chisq_gof", "compare", "discretize", "fit_baseline", "fit_bgwg",
    "fit_bwg", "jupp_mardia_rho1sq", "load_dataset", "log_likelihood", "pmf_table",
    "sample_joint", "trig_moments_brute", "trig_moments_closed",
]
