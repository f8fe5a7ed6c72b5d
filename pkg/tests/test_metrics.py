import numpy as np
import pytest

from optilens.errors import DomainError
from optilens.metrics import (
    MetricId,
    Point,
    SpacetimeParams,
    area_element,
    check_point,
    eval_metric,
    eval_metric_derivatives,
    parse_metric,
    randers_beta,
)


def kerr_EG(r, M, a):
    D = r * r - 2 * M * r + a * a
    return r**3 / (D * (r - 2 * M)), r * r * D / (r - 2 * M) ** 2


def cstep(f, r, h=1e-20):
    return f(complex(r, h)).imag / h


def test_parse_metric():
    assert parse_metric("Kerr") is MetricId.KERR
    assert parse_metric(MetricId.FLAT) is MetricId.FLAT
    with pytest.raises(ValueError):
        parse_metric("reissner")


def test_params_validation():
    with pytest.raises(DomainError):
        SpacetimeParams(M=-1.0)
    with pytest.raises(DomainError):
        SpacetimeParams(M=float("nan"))
    assert SpacetimeParams(1.0, -0.3).a == -0.3


@pytest.mark.parametrize("r", [2.5, 3.0, 10.0, 1e4])
@pytest.mark.parametrize("a", [0.0, 0.3, 0.9])
def test_kerr_components_and_partials(r, a):
    M = 1.0
    p = SpacetimeParams(M, a)
    c = eval_metric("kerr", p, Point(r, 0.7))
    E, G = kerr_EG(r, M, a)
    assert c.F == 0.0
    assert c.E == pytest.approx(E, rel=1e-14)
    assert c.G == pytest.approx(G, rel=1e-14)
    d = eval_metric_derivatives("kerr", p, Point(r, 0.7))
    assert d.E_r == pytest.approx(cstep(lambda x: kerr_EG(x, M, a)[0], r), rel=1e-12)
    assert d.G_r == pytest.approx(cstep(lambda x: kerr_EG(x, M, a)[1], r), rel=1e-12)
    h = 1e-4 * r
    Grr = (kerr_EG(r + h, M, a)[1] - 2 * G + kerr_EG(r - h, M, a)[1]) / (h * h)
    assert d.G_rr == pytest.approx(Grr, rel=1e-5)
    assert d.E_phi == d.G_phi == d.F_r == 0.0


def test_schwarzschild_equals_kerr_at_zero_spin():
    for r in [2.1, 3.0, 7.5, 1e3]:
        s = eval_metric("schwarzschild", SpacetimeParams(1.0), Point(r))
        k = eval_metric("kerr", SpacetimeParams(1.0, 0.0), Point(r))
        assert s.E == pytest.approx(k.E, rel=1e-15)
        assert s.G == pytest.approx(k.G, rel=1e-15)


def test_det_independent_of_spin():
    r = 6.0
    dets = [eval_metric("kerr", SpacetimeParams(1.0, a), Point(r)).det for a in (0, 0.4, 0.9)]
    assert np.allclose(dets, r**5 / (r - 2) ** 3, rtol=1e-14, atol=0)


def test_flat():
    c = eval_metric("flat", SpacetimeParams(5.0), Point(3.0))
    assert (c.E, c.F, c.G) == (1.0, 0.0, 9.0)
    assert area_element(c) == 3.0


def test_domain_checks():
    with pytest.raises(DomainError):
        check_point(MetricId.SCHWARZSCHILD, SpacetimeParams(1.0), 2.0)
    with pytest.raises(DomainError):
        check_point(MetricId.FLAT, SpacetimeParams(1.0), 0.0)
    check_point(MetricId.FLAT, SpacetimeParams(1.0), 1.0)


def test_randers_beta():
    assert randers_beta(SpacetimeParams(1.0, 0.5), Point(10.0)) == pytest.approx(-2 * 0.5 / 8)
    assert randers_beta(SpacetimeParams(1.0, 0.0), Point(10.0)) == 0.0
