"""Deflection angles from the Gauss-Bonnet theorem, and numerical checks of the theorem.

For a ray with impact parameter b the lens region is approximated by

    D = {(r, phi) : 0 < phi < pi, r >= b / sin(phi)}

and, with the outer circular arc contributing exactly pi + delta in the
asymptotic limit, the deflection is

    delta = - int_0^pi int_{b/sin phi}^inf K sqrt(det g) dr dphi.

The inner integral is improper.  By default it is mapped to a finite range
with u = 1/r, which leaves a bounded smooth integrand tending to 2M as
u -> 0.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from . import kernels
from .curvature import CurvatureMethod, curvature_function
from .errors import DomainError, ToleranceNotMet
from .geodesics import DeflectionMethod, DeflectionResult, geodesic_curvature_circle
from .metrics import (
    MetricId,
    Point,
    SpacetimeParams,
    check_point,
    eval_metric,
    eval_metric_derivatives,
    parse_metric,
)
from .quadrature import adaptive_gk

__all__ = [
    "TailHandling",
    "QuadratureConfig",
    "LensRegion",
    "SectorRegion",
    "GaussBonnetTerms",
    "deflection_gb",
    "gb_terms",
    "gb_residual",
    "truncation_tail_bound",
]


class TailHandling(enum.Enum):
    U_SUBSTITUTION = "u-substitution"
    TRUNCATE_WITH_BOUND = "truncate"


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances for the nested quadrature.

    The tolerances apply to the final result; each of the two nesting levels
    gets half of them.  ``curvature`` selects where K comes from:
    ``"closed_form"`` (evaluated in the compiled kernel), ``"analytic"``
    (Liouville formula on the closed-form metric partials), ``"riemann"`` or
    ``"liouville"`` (finite-difference routes).

    Only ``"closed_form"`` is accepted by :func:`deflection_gb`.  The other
    routes build K ~ M/r^3 out of O(1/r) terms that cancel, so their relative
    error grows like eps (r/M)^2 and swamps the improper lens integral near
    u = 0; they are meant for finite sectors.
    """

    rel_tol: float = 1e-12
    abs_tol: float = 1e-15
    max_subdivisions: int = 500
    tail_handling: TailHandling = TailHandling.U_SUBSTITUTION
    truncation_radius: float | None = None
    curvature: str = "closed_form"

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("rel_tol and abs_tol must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")
        object.__setattr__(self, "tail_handling", TailHandling(self.tail_handling))
        CurvatureMethod(self.curvature)


@dataclass(frozen=True)
class LensRegion:
    """Region bounded by the straight line r = b / sin(phi) and the circle at infinity."""

    b: float

    def validate(self, metric: MetricId, params: SpacetimeParams) -> None:
        if not self.b > 0:
            raise DomainError(f"impact parameter must be positive, got b={self.b!r}")
        if metric is not MetricId.FLAT and self.b <= 20.0 * params.M:
            raise DomainError(
                f"b={self.b!r} is not in the weak field: need b > 20 M = {20.0 * params.M!r}"
            )


@dataclass(frozen=True)
class SectorRegion:
    """Annular sector r_min <= r <= r_max, phi_min <= phi <= phi_max."""

    r_min: float
    r_max: float
    phi_min: float
    phi_max: float

    def __post_init__(self):
        if not self.r_min < self.r_max:
            raise DomainError(f"need r_min < r_max, got {self.r_min!r}, {self.r_max!r}")
        if not (self.phi_min < self.phi_max and self.phi_max - self.phi_min < 2 * math.pi):
            raise DomainError(f"need 0 < phi_max - phi_min < 2 pi, got [{self.phi_min!r}, {self.phi_max!r}]")

    @property
    def euler_char(self) -> int:
        return 1

    def corners(self) -> list[Point]:
        return [
            Point(self.r_min, self.phi_min),
            Point(self.r_max, self.phi_min),
            Point(self.r_max, self.phi_max),
            Point(self.r_min, self.phi_max),
        ]


@dataclass(frozen=True)
class GaussBonnetTerms:
    boundary_integral: float
    area_integral: float
    corner_sum: float
    euler_char: int
    residual: float
    error_estimate: float
    evaluations: int


def truncation_tail_bound(params: SpacetimeParams, R: float) -> float:
    """Upper bound on the part of the lens integral beyond r = R.

    Uses |integrand in u| <= 2M (1 + 3 a^2 u^2) / (1 - 2 M u)^{5/2} on
    u in (0, 1/R], integrated over u and over phi in [0, pi].
    """
    M, a = params.M, params.a
    if M == 0:
        return 0.0
    x = 2.0 * M / R
    return math.pi * 2.0 * M / R * (1.0 + 3.0 * a * a / (R * R)) / (1.0 - x) ** 2.5


def deflection_gb(metric: MetricId, params: SpacetimeParams, b: float,
                  cfg: QuadratureConfig | None = None) -> DeflectionResult:
    """Deflection angle as minus the curvature integral over the lens region."""
    metric = parse_metric(metric)
    cfg = cfg or QuadratureConfig()
    LensRegion(b).validate(metric, params)
    if cfg.curvature != "closed_form":
        raise ValueError(
            f"deflection_gb needs closed_form curvature, not {cfg.curvature!r}: the "
            "metric-derived routes lose precision like eps r^2 at large r"
        )
    if metric is MetricId.FLAT:
        return DeflectionResult(0.0, DeflectionMethod.GAUSS_BONNET, 0.0, 0)

    rtol, atol = 0.5 * cfg.rel_tol, 0.5 * cfg.abs_tol
    stats = {"evals": 0, "inner_err": 0.0, "failed": False}
    tail = 0.0

    if cfg.tail_handling is TailHandling.U_SUBSTITUTION:
        kern = kernels.impl
        code, M, a = metric.code, params.M, params.a

        def inner(phi):
            v, e, n, ok = kern.gb_inner(code, M, a, math.sin(phi) / b, rtol, atol,
                                        cfg.max_subdivisions)
            stats["evals"] += n
            stats["inner_err"] = max(stats["inner_err"], e)
            stats["failed"] |= not ok
            return v
    else:
        R = cfg.truncation_radius or 1e6 * b
        check_point(metric, params, R)
        K = curvature_function(cfg.curvature)
        tail = truncation_tail_bound(params, R)

        def g(t):
            r = math.exp(t)
            p = Point(r)
            c = eval_metric(metric, params, p)
            return -K(metric, params, p) * math.sqrt(c.E * c.G) * r

        def inner(phi):
            r0 = b / math.sin(phi)
            if r0 >= R:
                return 0.0
            res = adaptive_gk(g, math.log(r0), math.log(R), rtol, atol, cfg.max_subdivisions)
            stats["evals"] += res.evaluations
            stats["inner_err"] = max(stats["inner_err"], res.error)
            stats["failed"] |= not res.converged
            return res.value

    outer = adaptive_gk(inner, 0.0, math.pi, rtol, atol, cfg.max_subdivisions)
    if stats["failed"] or not outer.converged:
        raise ToleranceNotMet(
            f"Gauss-Bonnet quadrature did not converge (outer error {outer.error:.3g})",
            value=outer.value,
            error=outer.error,
        )
    err = outer.error + math.pi * stats["inner_err"] + tail
    return DeflectionResult(outer.value, DeflectionMethod.GAUSS_BONNET, err, stats["evals"])


def gb_terms(metric: MetricId, params: SpacetimeParams, region: SectorRegion,
             cfg: QuadratureConfig | None = None) -> GaussBonnetTerms:
    """All terms of the Gauss-Bonnet identity on an annular sector.

    The boundary is traversed counter-clockwise: radial edge out along
    phi_min, outer arc, radial edge in along phi_max, inner arc backwards.
    """
    metric = parse_metric(metric)
    cfg = cfg or QuadratureConfig(rel_tol=1e-12, curvature="analytic")
    for p in region.corners():
        check_point(metric, params, p.r)
    K = curvature_function(cfg.curvature)
    rtol, atol = 0.5 * cfg.rel_tol, 0.5 * cfg.abs_tol
    n_eval = 0
    err = 0.0

    def dA_density(r):
        p = Point(r)
        c = eval_metric(metric, params, p)
        return K(metric, params, p) * math.sqrt(c.E * c.G - c.F * c.F)

    inner_err = [0.0]

    def radial(phi):
        nonlocal n_eval
        res = adaptive_gk(dA_density, region.r_min, region.r_max, rtol, atol,
                          cfg.max_subdivisions, raise_on_failure=True)
        n_eval += res.evaluations
        inner_err[0] = max(inner_err[0], res.error)
        return res.value

    area = adaptive_gk(radial, region.phi_min, region.phi_max, rtol, atol,
                       cfg.max_subdivisions, raise_on_failure=True)
    n_eval += area.evaluations
    err += area.error + (region.phi_max - region.phi_min) * inner_err[0]

    def arc_density(r0, sign):
        kg = sign * geodesic_curvature_circle(metric, params, r0)
        return lambda phi: kg * math.sqrt(eval_metric(metric, params, Point(r0, phi)).G)

    def radial_edge_density(phi, sign):
        # u-curve: kappa_g = -sign E_phi / (2 E sqrt(G)), ds = sqrt(E) dr
        def f(r):
            p = Point(r, phi)
            c = eval_metric(metric, params, p)
            d = eval_metric_derivatives(metric, params, p)
            return -sign * d.E_phi / (2.0 * math.sqrt(c.E * c.G))
        return f

    pieces = [
        adaptive_gk(radial_edge_density(region.phi_min, +1.0), region.r_min, region.r_max, rtol, atol),
        adaptive_gk(arc_density(region.r_max, +1.0), region.phi_min, region.phi_max, rtol, atol),
        adaptive_gk(radial_edge_density(region.phi_max, -1.0), region.r_min, region.r_max, rtol, atol),
        adaptive_gk(arc_density(region.r_min, -1.0), region.phi_min, region.phi_max, rtol, atol),
    ]
    boundary = sum(p.value for p in pieces)
    err += sum(p.error for p in pieces)
    n_eval += sum(p.evaluations for p in pieces)

    corner_sum = 0.0
    for p in region.corners():
        c = eval_metric(metric, params, p)
        interior = math.acos(c.F / math.sqrt(c.E * c.G))
        corner_sum += math.pi - interior

    chi = region.euler_char
    residual = boundary + area.value + corner_sum - 2.0 * math.pi * chi
    return GaussBonnetTerms(boundary, area.value, corner_sum, chi, residual, err, n_eval)


def gb_residual(metric: MetricId, params: SpacetimeParams, region: SectorRegion,
                cfg: QuadratureConfig | None = None) -> float:
    """Signed residual of the Gauss-Bonnet identity on ``region``."""
    return gb_terms(metric, params, region, cfg).residual
