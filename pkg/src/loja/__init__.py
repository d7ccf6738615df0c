"""Empirical Lojasiewicz-type inequalities for functions and multifunctions.

The package samples piecewise semialgebraic functions to fit power-law
envelopes between them. It also estimates limits of set-valued maps and
studies the closest-point map of a finite set.
"""

from .domain import Domain
from .errors import LojaError
from .expr import PiecewiseFn, evaluate, evaluate_many, parse, to_source
from .geometry import (
    PointSet,
    dist_point_set,
    hausdorff,
    hausdorff_ext,
    kuratowski_dist,
    stereo_lift,
    stereo_project,
)
from .kernels import BACKEND
from .lojafit import (
    PowerLawFit,
    PowerPhi,
    check_g_bounded,
    check_star_condition,
    fit_exponent,
    min_selector,
    reverse_fit,
    separation_fit,
    value_pair_cloud,
    verify_inequality,
)
from .medial import check_closed, closest_points, medial_axis, medial_loja, n_region
from .multifun import (
    SampledMultifunction,
    classify_semicontinuity,
    kuratowski_limits,
    multifun_loja_fit,
    preimage,
)
from .zeroset import gamma_zero_set

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "Domain", "LojaError", "PiecewiseFn", "PointSet", "PowerLawFit", "PowerPhi",
    "SampledMultifunction", "check_closed", "check_g_bounded", "check_star_condition",
    "classify_semicontinuity", "closest_points", "dist_point_set", "evaluate", "evaluate_many",
    "fit_exponent", "gamma_zero_set", "hausdorff", "hausdorff_ext", "kuratowski_dist",
    "kuratowski_limits", "medial_axis", "medial_loja", "min_selector", "multifun_loja_fit",
    "n_region", "parse", "preimage", "reverse_fit", "separation_fit", "stereo_lift",
    "stereo_project", "to_source", "value_pair_cloud", "verify_inequality",
]
