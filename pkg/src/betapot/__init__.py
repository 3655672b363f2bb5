"""Non-isotropic potential theory: beta-distance, Morrey/Stummel classes,
fractional integrals, and numerical checks of the associated inequalities."""

from .errors import (
    BetapotError,
    ContractError,
    DivergenceError,
    DomainError,
    QuadratureError,
    SingularPointError,
)
from .metric import (
    BetaParams,
    BetaSphericalCoord,
    beta_distance,
    beta_norm,
    beta_sphere_jacobian,
    beta_sphere_map,
    homogeneity_scale,
    in_ball,
    quasi_triangle_constant,
)
from .quadrature import (
    IntegralResult,
    QuadratureConfig,
    integrate_annulus,
    integrate_ball,
    integrate_singular,
)

__version__ = "0.1.0"
from .report import VerificationEntry, VerificationReport
from .verify import SUITE_IDS, SuiteConfig, run_example1, run_suite
