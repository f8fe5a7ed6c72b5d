"""Catalog of two-dimensional optical metrics in polar-like coordinates (r, phi).

Every metric is diagonal and depends on r only::

    dt^2 = E(r) dr^2 + G(r) dphi^2

Geometrized units are used throughout (c = G = 1), so the mass M and the
spin a both carry length units.

Catalog
-------
flat
    Euclidean plane in polar coordinates, E = 1, G = r^2.
schwarzschild
    Optical geometry of the Schwarzschild equatorial plane,
    E = r^2/(r-2M)^2, G = r^3/(r-2M).
kerr
    Diagonal (Riemannian) part of the equatorial Kerr optical metric,
    E = r^3/(Delta (r-2M)), G = r^2 Delta/(r-2M)^2 with
    Delta = r^2 - 2 M r + a^2.  The off-diagonal drag term of the full
    Randers form is available separately through :func:`randers_beta`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import DomainError

__all__ = [
    "MetricId",
    "SpacetimeParams",
    "Point",
    "MetricComponents",
    "MetricDerivatives",
    "eval_metric",
    "eval_metric_derivatives",
    "area_element",
    "randers_beta",
    "check_point",
    "parse_metric",
]


class MetricId(enum.Enum):
    FLAT = "flat"
    SCHWARZSCHILD = "schwarzschild"
    KERR = "kerr"

    @property
    def code(self) -> int:
        """Integer tag used by the compiled kernels."""
        return _CODES[self]


_CODES = {MetricId.FLAT: 0, MetricId.SCHWARZSCHILD: 1, MetricId.KERR: 2}


def parse_metric(name) -> MetricId:
    if isinstance(name, MetricId):
        return name
    try:
        return MetricId(str(name).lower())
    except ValueError:
        choices = ", ".join(m.value for m in MetricId)
        raise ValueError(f"unknown metric {name!r} (choose from {choices})") from None


@dataclass(frozen=True)
class SpacetimeParams:
    """Mass and spin of the lens.

    ``M`` must be non-negative.  ``a`` may carry either sign; every quantity
    computed from the reduced Kerr metric depends on it only through a^2, and
    the retrograde/prograde distinction is carried by an explicit sense flag
    where it matters.
    """

    M: float = 1.0
    a: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.M) and math.isfinite(self.a)):
            raise DomainError(f"non-finite parameters M={self.M!r}, a={self.a!r}")
        if self.M < 0:
            raise DomainError(f"mass must be non-negative, got M={self.M!r}")


@dataclass(frozen=True)
class Point:
    r: float
    phi: float = 0.0


@dataclass(frozen=True)
class MetricComponents:
    E: float
    F: float
    G: float

    @property
    def det(self) -> float:
        return self.E * self.G - self.F * self.F


@dataclass(frozen=True)
class MetricDerivatives:
    E_r: float
    E_phi: float
    F_r: float
    F_phi: float
    G_r: float
    G_phi: float
    E_rr: float
    G_rr: float
    E_phiphi: float
    G_phiphi: float
    E_rphi: float
    G_rphi: float


def check_point(metric: MetricId, params: SpacetimeParams, r: float) -> None:
    """Raise :class:`DomainError` unless ``r`` is inside the metric's domain."""
    if not math.isfinite(r):
        raise DomainError(f"non-finite radius r={r!r}")
    if metric is MetricId.FLAT:
        if r <= 0:
            raise DomainError(f"flat metric needs r > 0, got r={r!r}")
        return
    M = params.M
    if r <= 2 * M:
        raise DomainError(f"r={r!r} is at or inside the optical singularity r = 2M = {2 * M!r}")
    if metric is MetricId.KERR:
        delta = r * r - 2 * M * r + params.a * params.a
        if delta <= 0:
            raise DomainError(f"Delta = {delta!r} <= 0 at r={r!r}")


def _quotient(n, n1, n2, d, d1, d2):
    """Value, first and second derivative of n/d from the parts' derivatives."""
    q = n / d
    q1 = (n1 * d - n * d1) / (d * d)
    q2 = (n2 * d - n * d2) / (d * d) - 2.0 * d1 * (n1 * d - n * d1) / (d * d * d)
    return q, q1, q2


def _radial_profile(metric: MetricId, params: SpacetimeParams, r: float):
    """(E, E_r, E_rr, G, G_r, G_rr) for the r-only diagonal metrics."""
    if metric is MetricId.FLAT:
        return 1.0, 0.0, 0.0, r * r, 2.0 * r, 2.0
    M = params.M
    x = r - 2.0 * M
    if metric is MetricId.SCHWARZSCHILD:
        E = r * r / (x * x)
        E_r = -4.0 * M * r / (x * x * x)
        E_rr = 8.0 * M * (r + M) / (x * x * x * x)
        G = r * r * r / x
        G_r = (2.0 * r * r * r - 6.0 * M * r * r) / (x * x)
        G_rr = 2.0 * r * (r * r - 6.0 * M * r + 12.0 * M * M) / (x * x * x)
        return E, E_r, E_rr, G, G_r, G_rr
    if metric is MetricId.KERR:
        a2 = params.a * params.a
        delta = r * r - 2.0 * M * r + a2
        delta1 = 2.0 * r - 2.0 * M
        # E = r^3 / (Delta x)
        p = delta * x
        p1 = delta1 * x + delta
        p2 = 2.0 * x + 2.0 * delta1
        E, E_r, E_rr = _quotient(r * r * r, 3.0 * r * r, 6.0 * r, p, p1, p2)
        # G = r^2 Delta / x^2
        q = r * r * delta
        q1 = 2.0 * r * delta + r * r * delta1
        q2 = 2.0 * delta + 4.0 * r * delta1 + 2.0 * r * r
        G, G_r, G_rr = _quotient(q, q1, q2, x * x, 2.0 * x, 2.0)
        return E, E_r, E_rr, G, G_r, G_rr
    raise ValueError(f"unsupported metric {metric!r}")


def eval_metric(metric: MetricId, params: SpacetimeParams, p: Point) -> MetricComponents:
    """Closed-form components (E, F, G) of the optical metric at ``p``."""
    metric = parse_metric(metric)
    check_point(metric, params, p.r)
    E, _, _, G, _, _ = _radial_profile(metric, params, p.r)
    return MetricComponents(E=E, F=0.0, G=G)


def eval_metric_derivatives(metric: MetricId, params: SpacetimeParams, p: Point) -> MetricDerivatives:
    """Analytic first and second partials of the components at ``p``.

    All phi-partials vanish identically for the catalog, which is rotationally
    symmetric; they are returned as exact zeros.
    """
    metric = parse_metric(metric)
    check_point(metric, params, p.r)
    _, E_r, E_rr, _, G_r, G_rr = _radial_profile(metric, params, p.r)
    return MetricDerivatives(
        E_r=E_r, E_phi=0.0, F_r=0.0, F_phi=0.0, G_r=G_r, G_phi=0.0,
        E_rr=E_rr, G_rr=G_rr, E_phiphi=0.0, G_phiphi=0.0, E_rphi=0.0, G_rphi=0.0,
    )


def area_element(c: MetricComponents) -> float:
    """sqrt(E G - F^2), the density of dA with respect to dr dphi."""
    det = c.E * c.G - c.F * c.F
    if not det > 0:
        raise DomainError(f"metric determinant must be positive, got {det!r}")
    return math.sqrt(det)


def randers_beta(params: SpacetimeParams, p: Point) -> float:
    """Coefficient of dphi in the frame-dragging one-form of the Kerr optical metric.

    The equatorial Kerr optical line element has the Randers form
    ``dt = sqrt(E dr^2 + G dphi^2) + beta dphi`` with beta = -2 M a / (r - 2M).
    Only the coefficient is exposed; no Finsler curvature is computed from it.
    """
    check_point(MetricId.SCHWARZSCHILD, params, p.r)
    return -2.0 * params.M * params.a / (p.r - 2.0 * params.M)
