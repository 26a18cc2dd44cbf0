"""Laguerre-Sobolev orthonormal polynomials, Mehler-Heine asymptotics, weighted norms and Cohen-type bounds."""

from .asymptotics import (
    BesselLikeProfile,
    LimitDiagnosis,
    bessel_entire,
    limit_diagnose,
    limit_profile,
    mh_profile_laguerre,
    mh_profile_sobolev,
    sign_changes,
    sup_deviation,
)
from .cohen import (
    PARTIAL_SUMS,
    CoefficientFamily,
    TestFunction,
    apply_T,
    build_test_function,
    choose_j,
    cohen_exponent,
    cohen_lower_bound,
    fourier_coeff,
    g_hat_exact,
)
from .config import ExperimentConfig, Tolerances, load_config
from .laguerre import (
    LaguerreExpansion,
    deriv_at_zero,
    eval_L,
    eval_expansion,
    kernel_deriv_zero,
    kernel_expansion,
    log_gamma,
    norm_sq_L,
    orthonormal_deriv_at_zero,
)
from .norms import (
    BetaMode,
    ConvergenceFailure,
    DomainError,
    GrowthReport,
    QuadratureRule,
    build_quadrature,
    lp_norm,
    norm_growth,
    norm_growth_exponent,
    pollard_endpoints,
    sobolev_space_norm,
)
from .sobolev import (
    NumericalFailure,
    SobolevBasisCache,
    SobolevProduct,
    build_gram_oracle,
    build_stagewise,
    connection_coeffs,
    q_deriv_ratio,
    representation_residual,
    sobolev_inner,
)

__version__ = "0.1.0"
