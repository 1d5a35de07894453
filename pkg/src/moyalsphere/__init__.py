"""Moyal spheres: curvature, Gauss-Bonnet sums, areas and the theta**2 correction.

Radial functions are diagonal series in the Moyal matrix basis
(:mod:`.diag_series`); general functions are truncated matrices
(:mod:`.band_matrix`). The remaining modules build on those two.
"""

from .area import AreaResult, deformed_area, gamma1_closed, gamma2_closed, gamma_m_series, sphere_area
from .band_matrix import BandMatrix, bm_del, bm_delbar, bm_deriv, bm_star_inv, bm_star_mul, scalar_curvature_generic
from .curvature import CurvatureSeries, eta, lambda_big, s2_coeffs, s4_coeffs
from .diag_series import DiagSeries, ds_eval, ds_integrate, ds_laplacian, ds_star_inv, ds_star_mul
from .errors import (
    Divergent,
    MoyalError,
    ParameterMismatch,
    ParameterWindowError,
    PoleError,
    ResidualTooLarge,
    Singular,
    StepFailure,
    ToleranceNotReached,
    ZeroCoefficient,
)
from .gauss_bonnet import GBResult, GBTerm, gb_direct, gb_limit, gb_telescoped, gb_term
from .params import SphereParams
from .radial_calculus import (
    EpsilonODE,
    RadialFn,
    constant_curvature_residual,
    epsilon_closed_4d,
    epsilon_ode,
    h_ratio,
    ode_solve,
    star_inv_radial,
    star_mul_radial,
)
from .special import polygamma
from .tables import CurveTable

__version__ = "0.1.0"
