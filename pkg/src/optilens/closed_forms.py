"""Closed-form weak-field deflection angles.

All angles are in radians, all lengths in geometrized units.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

__all__ = [
    "OrbitSense",
    "schwarzschild_leading",
    "kerr_riemannian_correction",
    "sereno_series",
    "SpinCoefficientGap",
    "spin_coefficient_gap",
]


class OrbitSense(enum.IntEnum):
    """+1 for a ray moving against the hole's rotation, -1 for one moving with it."""

    RETROGRADE = 1
    PROGRADE = -1

    @classmethod
    def parse(cls, name) -> "OrbitSense":
        if isinstance(name, OrbitSense):
            return name
        key = str(name).lower()
        if key in ("retro", "retrograde", "+1", "1"):
            return cls.RETROGRADE
        if key in ("pro", "prograde", "-1"):
            return cls.PROGRADE
        raise ValueError(f"unknown orbit sense {name!r} (use 'pro' or 'retro')")

    @property
    def label(self) -> str:
        return "retro" if self is OrbitSense.RETROGRADE else "pro"


def _check_b(b):
    if not b > 0:
        raise ValueError(f"impact parameter must be positive, got {b!r}")


def schwarzschild_leading(M: float, b: float) -> float:
    """Leading-order Schwarzschild deflection 4M/b."""
    _check_b(b)
    return 4.0 * M / b


def kerr_riemannian_correction(M: float, a: float, b: float) -> float:
    """Deflection from the diagonal part of the equatorial Kerr optical metric,
    4M/b (1 + (2/3) a^2/b^2).  Blind to the sign of a.
    """
    _check_b(b)
    return 4.0 * M / b * (1.0 + (2.0 / 3.0) * (a * a) / (b * b))


def sereno_series(M: float, a: float, b: float,
                  sense: OrbitSense = OrbitSense.RETROGRADE) -> float:
    """Third-order weak-deflection series for an equatorial Kerr ray.

    |delta| = 4M/b + 15 pi M^2/(4 b^2) + 128 M^3/(3 b^3)
              + S (4M/b^2 + 10 pi M^2/b^3) a + 2 M a^2/b^3

    with S = +1 retrograde, -1 prograde.
    """
    _check_b(b)
    S = float(OrbitSense.parse(sense))
    m_b = M / b
    even = 4.0 * m_b + (15.0 * math.pi / 4.0) * m_b**2 + (128.0 / 3.0) * m_b**3
    odd = S * (4.0 * M / b**2 + 10.0 * math.pi * M**2 / b**3) * a
    return even + odd + (2.0 * M / b**3) * a * a


@dataclass(frozen=True)
class SpinCoefficientGap:
    """a^2/b^3 coefficients (in units of M) of the two closed forms and their ratio."""

    riemannian: float
    literature: float

    @property
    def ratio(self) -> float:
        return self.riemannian / self.literature


def spin_coefficient_gap(M: float = 1.0, a: float = 1.0, b: float = 1.0) -> SpinCoefficientGap:
    """Extract the a^2 coefficients from the closed forms themselves.

    The diagonal-metric value gives 8/3, the literature series 2; the
    ratio is 4/3.
    """
    scale = b**3 / (M * a * a)
    riem = (kerr_riemannian_correction(M, a, b) - schwarzschild_leading(M, b)) * scale
    pro = sereno_series(M, a, b, OrbitSense.PROGRADE)
    retro = sereno_series(M, a, b, OrbitSense.RETROGRADE)
    lit = (0.5 * (pro + retro) - sereno_series(M, 0.0, b)) * scale
    return SpinCoefficientGap(riemannian=riem, literature=lit)
