"""Light deflection in optical geometries.

Gauss curvature of the Schwarzschild and equatorial Kerr optical metrics,
deflection angles by Gauss-Bonnet integration, by geodesic shooting and by
closed-form series, and numerical checks of the Gauss-Bonnet identity.
"""

from .closed_forms import (
    OrbitSense,
    kerr_riemannian_correction,
    schwarzschild_leading,
    sereno_series,
    spin_coefficient_gap,
)
from .curvature import (
    CurvatureMethod,
    christoffel,
    closed_form_K,
    gauss_curvature,
    gauss_curvature_analytic,
    gauss_curvature_liouville,
    riemann_1212,
)
from .errors import (
    CaptureError,
    DomainError,
    NonConvergence,
    OptilensError,
    StepFailure,
    ToleranceNotMet,
)
from .gauss_bonnet import (
    QuadratureConfig,
    SectorRegion,
    TailHandling,
    deflection_gb,
    gb_residual,
    gb_terms,
)
from .geodesics import (
    DeflectionMethod,
    DeflectionResult,
    GeodesicState,
    ShootConfig,
    StopCondition,
    critical_impact_parameter,
    geodesic_curvature_circle,
    geodesic_curvature_numeric,
    initial_state,
    integrate_geodesic,
    shoot_deflection,
)
from .kernels import BACKEND
from .metrics import (
    MetricId,
    Point,
    SpacetimeParams,
    eval_metric,
    eval_metric_derivatives,
    randers_beta,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "CaptureError",
    "christoffel",
    "closed_form_K",
    "critical_impact_parameter",
    "CurvatureMethod",
    "deflection_gb",
    "DeflectionMethod",
    "DeflectionResult",
    "DomainError",
    "eval_metric",
    "eval_metric_derivatives",
    "gauss_curvature",
    "gauss_curvature_analytic",
    "gauss_curvature_liouville",
    "gb_residual",
    "gb_terms",
    "geodesic_curvature_circle",
    "geodesic_curvature_numeric",
    "GeodesicState",
    "initial_state",
    "integrate_geodesic",
    "kerr_riemannian_correction",
    "MetricId",
    "NonConvergence",
    "OptilensError",
    "OrbitSense",
    "Point",
    "QuadratureConfig",
    "randers_beta",
    "riemann_1212",
    "schwarzschild_leading",
    "SectorRegion",
    "sereno_series",
    "shoot_deflection",
    "ShootConfig",
    "SpacetimeParams",
    "spin_coefficient_gap",
    "StepFailure",
    "StopCondition",
    "TailHandling",
    "ToleranceNotMet",
]
