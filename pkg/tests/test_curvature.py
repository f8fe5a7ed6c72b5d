import math

import pytest

from optilens.curvature import (
    CurvatureMethod,
    christoffel,
    closed_form_K,
    curvature_function,
    gauss_curvature,
    gauss_curvature_analytic,
    gauss_curvature_liouville,
    sample_curvature,
)
from optilens.errors import DomainError
from optilens.metrics import Point, SpacetimeParams

GRID = [(r, a) for r in (3, 5, 10, 50, 100) for a in (0.0, 0.1, 0.5)]


def test_closed_form_frozen():
    # M (3M - 2r) / r^4 at r = 10
    assert closed_form_K("schwarzschild", SpacetimeParams(1.0), Point(10.0)) == pytest.approx(-0.0017, rel=1e-15)
    assert closed_form_K("flat", SpacetimeParams(1.0), Point(10.0)) == 0.0
    # Kerr, M=1, a=0.5, r=3: (6*0.25*2 + 3*(6-21+18)) / ((2-3)*243)
    assert closed_form_K("kerr", SpacetimeParams(1.0, 0.5), Point(3.0)) == pytest.approx(-12.0 / 243, rel=1e-15)


@pytest.mark.parametrize("r,a", GRID)
@pytest.mark.parametrize("fn", [gauss_curvature, gauss_curvature_liouville, gauss_curvature_analytic])
def test_routes_match_closed_form(fn, r, a):
    p = SpacetimeParams(1.0, a)
    ref = closed_form_K("kerr", p, Point(r))
    assert fn("kerr", p, Point(r, 0.3)) == pytest.approx(ref, rel=1e-8)


@pytest.mark.parametrize("r", [3.0, 10.0, 100.0])
def test_schwarzschild_routes(r):
    p = SpacetimeParams(1.0)
    ref = (3.0 - 2 * r) / r**4
    for m in CurvatureMethod:
        assert curvature_function(m)("schwarzschild", p, Point(r)) == pytest.approx(ref, rel=1e-8)
    assert ref < 0


def test_flat_curvature_vanishes():
    p = SpacetimeParams(0.0)
    for r in (0.5, 1.0, 10.0, 1e3):
        for fn in (gauss_curvature, gauss_curvature_liouville, gauss_curvature_analytic):
            assert abs(fn("flat", p, Point(r))) < 1e-10 / r**2


def test_zero_mass_black_hole_is_flat():
    for a in (0.0, 0.5):
        for fn in (gauss_curvature, gauss_curvature_liouville, closed_form_K):
            assert abs(fn("kerr", SpacetimeParams(0.0, a), Point(7.0))) < 1e-10


def test_scaling_with_mass():
    # K has dimension 1/length^2: K(lambda r; lambda M) = K(r; M) / lambda^2
    k1 = gauss_curvature("kerr", SpacetimeParams(1.0, 0.3), Point(8.0))
    k2 = gauss_curvature("kerr", SpacetimeParams(3.0, 0.9), Point(24.0))
    assert k2 == pytest.approx(k1 / 9.0, rel=1e-8)


def test_christoffel_symmetric_and_flat_values():
    g = christoffel("flat", SpacetimeParams(0.0), Point(2.0)).gamma
    assert g[0, 1, 1] == pytest.approx(-2.0)
    assert g[1, 0, 1] == g[1, 1, 0] == pytest.approx(0.5)
    gk = christoffel("kerr", SpacetimeParams(1.0, 0.5), Point(5.0)).gamma
    assert (gk[:, 0, 1] == gk[:, 1, 0]).all()


def test_near_horizon_stencil_rejected():
    with pytest.raises(DomainError):
        gauss_curvature("schwarzschild", SpacetimeParams(1.0), Point(2.0 + 1e-4))


def test_domain_errors():
    with pytest.raises(DomainError):
        closed_form_K("schwarzschild", SpacetimeParams(1.0), Point(1.5))


def test_sample_curvature():
    s = sample_curvature("schwarzschild", SpacetimeParams(1.0), Point(10.0))
    assert [x.method for x in s] == [CurvatureMethod.RIEMANN_TENSOR, CurvatureMethod.LIOUVILLE,
                                     CurvatureMethod.CLOSED_FORM]
    assert all(math.isclose(x.K, -0.0017, rel_tol=1e-8) for x in s)
