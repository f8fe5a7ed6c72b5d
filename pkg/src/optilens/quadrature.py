"""Globally adaptive Gauss-Kronrod (7, 15) quadrature for Python callables.

The rule is open, so integrands are never evaluated at the interval ends.
Interval contributions are accumulated with Neumaier compensated summation
so the result does not depend on the order in which panels were refined.
"""

from __future__ import annotations

from dataclasses import dataclass

from ._pykernels import WG, WGK, XGK, _neumaier
from .errors import ToleranceNotMet

__all__ = ["QuadResult", "gk15", "adaptive_gk", "neumaier_sum"]


@dataclass(frozen=True)
class QuadResult:
    value: float
    error: float
    evaluations: int
    converged: bool


def neumaier_sum(values) -> float:
    values = list(values)
    return _neumaier(values, len(values))


def gk15(f, lo: float, hi: float) -> tuple[float, float]:
    """Kronrod estimate of the integral over [lo, hi] and |K15 - G7|."""
    c = 0.5 * (lo + hi)
    hw = 0.5 * (hi - lo)
    fc = f(c)
    resk = WGK[7] * fc
    resg = WG[3] * fc
    for j in range(7):
        dx = hw * XGK[j]
        f2 = f(c - dx) + f(c + dx)
        resk += WGK[j] * f2
        if j % 2 == 1:
            resg += WG[j // 2] * f2
    return resk * hw, abs((resk - resg) * hw)


def adaptive_gk(
    f,
    lo: float,
    hi: float,
    rel_tol: float = 1e-10,
    abs_tol: float = 1e-14,
    max_subdivisions: int = 200,
    raise_on_failure: bool = False,
) -> QuadResult:
    """Integrate ``f`` over [lo, hi], bisecting the worst panel until
    ``error <= max(abs_tol, rel_tol * |value|)``.
    """
    if hi == lo:
        return QuadResult(0.0, 0.0, 0, True)
    sign = 1.0
    if hi < lo:
        lo, hi, sign = hi, lo, -1.0
    panels = [(lo, hi) + gk15(f, lo, hi)]
    n_eval = 15
    while True:
        total = neumaier_sum(p[2] for p in panels)
        err = neumaier_sum(p[3] for p in panels)
        if err <= max(abs_tol, rel_tol * abs(total)):
            return QuadResult(sign * total, err, n_eval, True)
        k = max(range(len(panels)), key=lambda i: panels[i][3])
        a, b = panels[k][0], panels[k][1]
        mid = 0.5 * (a + b)
        if len(panels) > max_subdivisions or not (a < mid < b):
            if raise_on_failure:
                raise ToleranceNotMet(
                    f"quadrature on [{lo!r}, {hi!r}] stopped at error {err:.3g} "
                    f"after {len(panels)} panels",
                    value=sign * total,
                    error=err,
                )
            return QuadResult(sign * total, err, n_eval, False)
        panels[k] = (a, mid) + gk15(f, a, mid)
        panels.append((mid, b) + gk15(f, mid, b))
        n_eval += 30
