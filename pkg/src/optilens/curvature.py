"""Christoffel symbols, Riemann tensor and Gauss curvature of the catalog metrics.

Three independent routes to the Gauss curvature K are provided:

* :func:`gauss_curvature` lowers R^1_{212} built from Christoffel symbols and
  their finite-differenced r-derivative, then divides by det(g);
* :func:`gauss_curvature_liouville` uses the orthogonal-coordinate formula
  ``K = -1/(2 sqrt(EG)) [(E_phi/sqrt(EG))_phi + (G_r/sqrt(EG))_r]`` with the
  outer derivatives finite-differenced;
* :func:`closed_form_K` evaluates the known closed forms and serves as the
  oracle for the two numerical routes.

:func:`gauss_curvature_analytic` is the Liouville formula with the outer
derivative expanded analytically from the closed-form second partials; it is
exact to rounding and is what the quadrature code integrates when asked for
metric-derived curvature.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .metrics import (
    MetricId,
    Point,
    SpacetimeParams,
    check_point,
    eval_metric,
    eval_metric_derivatives,
    parse_metric,
)

__all__ = [
    "ChristoffelSymbols",
    "CurvatureMethod",
    "CurvatureSample",
    "FD_REL_STEP",
    "christoffel",
    "riemann_1212",
    "gauss_curvature",
    "gauss_curvature_liouville",
    "gauss_curvature_analytic",
    "closed_form_K",
    "sample_curvature",
]

# Relative step of the five-point stencil used for derivatives of Christoffel
# symbols and of the Liouville quotients.
FD_REL_STEP = 1e-3
_PHI_STEP = 1e-3


class CurvatureMethod(enum.Enum):
    RIEMANN_TENSOR = "riemann"
    LIOUVILLE = "liouville"
    CLOSED_FORM = "closed_form"
    ANALYTIC = "analytic"


@dataclass(frozen=True)
class ChristoffelSymbols:
    """gamma[l, m, n] = Gamma^l_{mn} in coordinate order (r, phi)."""

    gamma: np.ndarray

    def __getitem__(self, idx):
        return self.gamma[idx]


@dataclass(frozen=True)
class CurvatureSample:
    point: Point
    K: float
    method: CurvatureMethod


def _step(metric: MetricId, params: SpacetimeParams, r: float) -> float:
    h = FD_REL_STEP * r
    if metric is not MetricId.FLAT:
        h = max(h, 1e-8 * params.M)
        # the stencil reaches r - 2h; keep it clear of the singularity
        if r - 2.0 * h <= 2.0 * params.M + 10.0 * h:
            raise DomainError(
                f"r={r!r} too close to r = 2M for the finite-difference stencil (h={h:.3g})"
            )
    return h


def _d5(f, x: float, h: float) -> float:
    """Fourth-order central difference."""
    return (f(x - 2 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2 * h)) / (12.0 * h)


def christoffel(metric: MetricId, params: SpacetimeParams, p: Point) -> ChristoffelSymbols:
    """Christoffel symbols of the second kind from the analytic metric partials."""
    metric = parse_metric(metric)
    c = eval_metric(metric, params, p)
    d = eval_metric_derivatives(metric, params, p)
    det = c.E * c.G - c.F * c.F
    gi = np.array([[c.G / det, -c.F / det], [-c.F / det, c.E / det]])
    # dg[i, j, k] = d g_ij / d x^k
    dg = np.array(
        [
            [[d.E_r, d.E_phi], [d.F_r, d.F_phi]],
            [[d.F_r, d.F_phi], [d.G_r, d.G_phi]],
        ]
    )
    gamma = np.zeros((2, 2, 2))
    for lam in range(2):
        for mu in range(2):
            for nu in range(mu, 2):
                s = 0.0
                for rho in range(2):
                    s += 0.5 * gi[lam, rho] * (dg[rho, mu, nu] + dg[rho, nu, mu] - dg[mu, nu, rho])
                gamma[lam, mu, nu] = s
                gamma[lam, nu, mu] = s
    return ChristoffelSymbols(gamma)


def riemann_1212(metric: MetricId, params: SpacetimeParams, p: Point) -> float:
    """The single independent component R_{r phi r phi} of the Riemann tensor.

    R^a_{bcd} = d_c Gamma^a_{db} - d_d Gamma^a_{cb}
                + Gamma^a_{c l} Gamma^l_{db} - Gamma^a_{d l} Gamma^l_{cb}
    is evaluated for (a, b, c, d) = (z, phi, r, phi) and lowered with g_{r z}.
    """
    metric = parse_metric(metric)
    h = _step(metric, params, p.r)
    G0 = christoffel(metric, params, p).gamma

    def gam_r(r):
        return christoffel(metric, params, Point(r, p.phi)).gamma

    def gam_phi(phi):
        return christoffel(metric, params, Point(p.r, phi)).gamma

    dGam_r = _d5(gam_r, p.r, h)
    dGam_phi = _d5(gam_phi, p.phi, _PHI_STEP)
    scale = float(np.max(np.abs(G0))) / _PHI_STEP
    if float(np.max(np.abs(dGam_phi))) > 1e-12 * scale:
        raise RuntimeError(f"phi-derivative of Christoffel symbols is not zero: {dGam_phi!r}")

    # derivative index 0 = r, 1 = phi
    dG = (dGam_r, dGam_phi)
    b, c, d = 1, 0, 1
    R_up = np.zeros(2)
    for z in range(2):
        val = dG[c][z, d, b] - dG[d][z, c, b]
        for lam in range(2):
            val += G0[z, c, lam] * G0[lam, d, b] - G0[z, d, lam] * G0[lam, c, b]
        R_up[z] = val
    comp = eval_metric(metric, params, p)
    return comp.E * R_up[0] + comp.F * R_up[1]


def gauss_curvature(metric: MetricId, params: SpacetimeParams, p: Point) -> float:
    """K = R_1212 / det(g) via the Riemann tensor."""
    c = eval_metric(metric, params, p)
    return riemann_1212(metric, params, p) / (c.E * c.G - c.F * c.F)


def gauss_curvature_liouville(metric: MetricId, params: SpacetimeParams, p: Point) -> float:
    """K from the orthogonal-coordinates formula, outer derivatives by finite differences."""
    metric = parse_metric(metric)
    h = _step(metric, params, p.r)
    c0 = eval_metric(metric, params, p)
    if c0.F != 0.0:
        raise DomainError("the Liouville formula needs orthogonal coordinates (F = 0)")

    def g_quot(r):
        pt = Point(r, p.phi)
        c = eval_metric(metric, params, pt)
        return eval_metric_derivatives(metric, params, pt).G_r / math.sqrt(c.E * c.G)

    def e_quot(phi):
        pt = Point(p.r, phi)
        c = eval_metric(metric, params, pt)
        return eval_metric_derivatives(metric, params, pt).E_phi / math.sqrt(c.E * c.G)

    outer = _d5(e_quot, p.phi, _PHI_STEP) + _d5(g_quot, p.r, h)
    return -outer / (2.0 * math.sqrt(c0.E * c0.G))


def gauss_curvature_analytic(metric: MetricId, params: SpacetimeParams, p: Point) -> float:
    """Liouville formula with the r-derivative expanded from closed-form partials."""
    metric = parse_metric(metric)
    c = eval_metric(metric, params, p)
    d = eval_metric_derivatives(metric, params, p)
    w = math.sqrt(c.E * c.G)
    w_r = (d.E_r * c.G + c.E * d.G_r) / (2.0 * w)
    return -(d.G_rr / w - d.G_r * w_r / (w * w)) / (2.0 * w)


def closed_form_K(metric: MetricId, params: SpacetimeParams, p: Point) -> float:
    """Known closed-form Gauss curvature of each catalog metric."""
    metric = parse_metric(metric)
    check_point(metric, params, p.r)
    r, M = p.r, params.M
    if metric is MetricId.FLAT:
        return 0.0
    if metric is MetricId.SCHWARZSCHILD:
        return M * (3.0 * M - 2.0 * r) / r**4
    a2 = params.a * params.a
    num = M * (6.0 * a2 * (r - M) + r * (6.0 * M * M - 7.0 * M * r + 2.0 * r * r))
    return num / ((2.0 * M - r) * r**5)


_ROUTES = {
    CurvatureMethod.RIEMANN_TENSOR: gauss_curvature,
    CurvatureMethod.LIOUVILLE: gauss_curvature_liouville,
    CurvatureMethod.CLOSED_FORM: closed_form_K,
    CurvatureMethod.ANALYTIC: gauss_curvature_analytic,
}


def curvature_function(method):
    """The K(metric, params, point) callable for a :class:`CurvatureMethod` or its name."""
    return _ROUTES[CurvatureMethod(method)]


def sample_curvature(metric, params, p, methods=None) -> list[CurvatureSample]:
    methods = methods or (
        CurvatureMethod.RIEMANN_TENSOR,
        CurvatureMethod.LIOUVILLE,
        CurvatureMethod.CLOSED_FORM,
    )
    out = []
    for m in methods:
        m = CurvatureMethod(m)
        out.append(CurvatureSample(point=p, K=_ROUTES[m](metric, params, p), method=m))
    return out
