"""Condition-metric geometry of full-rank matrices and of the linear solution variety."""
from .convexity import (
    ConvexityReport,
    ScalarTrace,
    check_discrete_convexity,
    log_alpha_trace,
    sd2_lower_bound_check,
    sd2_upper,
    verify_selfconvexity,
)
from .errors import CondGeoError
from .geodesic import (
    DiscretePath,
    GeodesicOptions,
    GeodesicResult,
    condition_length,
    minimize_path,
    reparametrize_arclength,
    shoot_geodesic,
)
from .matcore import alpha, grad_alpha, log_alpha, sigma_min, svd
from .strata import classify, codimension, signature, tangent_basis_Pk
from .svdpath import PathSpec, track_svd
from .variety import VarietyPoint, kernel_point, minimize_variety_path

__version__ = "0.1.0"
