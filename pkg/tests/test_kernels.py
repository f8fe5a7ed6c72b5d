"""Compiled and pure-Python kernels, and the Gauss-Kronrod quadrature."""

import math
import random

import numpy as np
import pytest

from optilens import _pykernels, kernels
from optilens.errors import ToleranceNotMet
from optilens.quadrature import adaptive_gk, gk15, neumaier_sum

needs_c = pytest.mark.skipif("cython" not in kernels.available(), reason="extension not built")


def test_backend_selection():
    assert kernels.BACKEND in ("cython", "python")
    assert kernels.get("python") is _pykernels
    with pytest.raises(ValueError):
        kernels.get("fortran")


def _ray(code, M, a, b, r0):
    E, _, G, _ = _pykernels.metric_terms(code, M, a, r0)
    return (r0, 0.0, -math.sqrt((1 - b * b / G) / E), b / G)


@needs_c
@pytest.mark.parametrize("code,M,a", [(0, 0.0, 0.0), (1, 1.0, 0.0), (2, 1.0, 0.7)])
def test_integrate_parity(code, M, a):
    C = kernels.get("cython")
    y0 = _ray(code, M, a, 30.0, 1e4)
    args = (code, M, a, y0, 0.0, 1e5, 1e4, 2.5 * M, 1e-10, (1e-12, 1e-12, 1e-12, 0.0), 10.0, 100000, True)
    rp, rc = _pykernels.integrate(*args), C.integrate(*args)
    assert rp[0] == rc[0] == _pykernels.ESCAPED
    assert rp[1:6] == rc[1:6]
    assert [tuple(s) for s in rp[6]] == [tuple(s) for s in rc[6]]


@needs_c
def test_capture_parity():
    C = kernels.get("cython")
    y0 = _ray(1, 1.0, 0.0, 2.0, 1e3)
    args = (1, 1.0, 0.0, y0, 0.0, 1e5, 1e3, 2.5, 1e-10, (1e-12, 1e-12, 1e-12, 0.0), 1.0, 100000, False)
    rp, rc = _pykernels.integrate(*args), C.integrate(*args)
    assert rp[0] == rc[0] == _pykernels.CAPTURED
    assert rp[2] == rc[2]


@needs_c
@pytest.mark.parametrize("code,a", [(1, 0.0), (2, 0.5)])
def test_gb_inner_parity(code, a):
    C = kernels.get("cython")
    for u_max in (1e-5, 1e-3, 0.01):
        assert _pykernels.gb_inner(code, 1.0, a, u_max, 5e-13, 5e-16, 500) == \
            C.gb_inner(code, 1.0, a, u_max, 5e-13, 5e-16, 500)


@needs_c
def test_pointwise_parity():
    C = kernels.get("cython")
    rng = random.Random(7)
    for _ in range(200):
        code = rng.choice([0, 1, 2])
        a = rng.uniform(0, 0.99) if code == 2 else 0.0
        r = rng.uniform(2.6, 1e4)
        st = (r, rng.uniform(-3, 3), rng.uniform(-1, 1), rng.uniform(-1, 1) / r)
        assert _pykernels.geodesic_rhs(code, 1.0, a, *st) == C.geodesic_rhs(code, 1.0, a, *st)
        assert _pykernels.gb_integrand(code, 1.0, a, 1 / r) == C.gb_integrand(code, 1.0, a, 1 / r)


def test_gb_integrand_limit():
    # -K sqrt(det) r^2 -> 2M as r -> infinity
    for code, a in ((1, 0.0), (2, 0.6)):
        assert _pykernels.gb_integrand(code, 1.5, a, 0.0) == 3.0
        assert _pykernels.gb_integrand(code, 1.5, a, 1e-9) == pytest.approx(3.0, rel=1e-7)
    assert _pykernels.gb_integrand(0, 1.0, 0.0, 0.3) == 0.0


def test_dp45_fifth_order():
    """Local error of one step shrinks like h^5 or faster."""
    K = _pykernels
    y = _ray(1, 1.0, 0.0, 10.0, 30.0)
    k1 = K.geodesic_rhs(1, 1.0, 0.0, *y)

    def err_for(h):
        one, _, _, _ = K.dp45_step(1, 1.0, 0.0, y, k1, h)
        half, _, _, _ = K.dp45_step(1, 1.0, 0.0, y, k1, h / 2)
        kh = K.geodesic_rhs(1, 1.0, 0.0, *half)
        two, _, _, _ = K.dp45_step(1, 1.0, 0.0, half, kh, h / 2)
        return abs(one[1] - two[1])

    e1, e2 = err_for(0.8), err_for(0.4)
    assert math.log2(e1 / e2) > 5.5


def test_dp45_rejects_out_of_domain_stage():
    y = (2.6, 0.0, -1.0, 0.0)
    k1 = _pykernels.geodesic_rhs(1, 1.0, 0.0, *y)
    yn, _, _, _ = _pykernels.dp45_step(1, 1.0, 0.0, y, k1, 5.0)
    assert yn is None


# ------------------------------------------------------------------ quadrature


@pytest.mark.parametrize("deg", range(0, 23))
def test_gk15_exact_for_polynomials(deg):
    coef = np.random.default_rng(deg).normal(size=deg + 1)
    f = np.polynomial.Polynomial(coef)
    exact = f.integ()(2.0) - f.integ()(-1.0)
    val, _ = gk15(lambda x: float(f(x)), -1.0, 2.0)
    assert val == pytest.approx(exact, rel=1e-13, abs=1e-13)


def test_gk15_matches_leggauss_sum():
    x, w = np.polynomial.legendre.leggauss(15)
    f = np.cos
    ref = float(np.sum(w * f(x)))
    assert gk15(math.cos, -1.0, 1.0)[0] == pytest.approx(ref, rel=1e-14)


def test_adaptive_gk():
    r = adaptive_gk(math.sqrt, 0.0, 1.0, rel_tol=1e-12)
    assert r.converged
    assert r.value == pytest.approx(2 / 3, rel=1e-11)
    assert adaptive_gk(math.exp, 1.0, 0.0).value == pytest.approx(-(math.e - 1), rel=1e-12)
    assert adaptive_gk(math.exp, 1.0, 1.0).value == 0.0


def test_adaptive_gk_budget():
    f = lambda x: math.sin(1.0 / x) if x else 0.0  # noqa: E731
    r = adaptive_gk(f, 0.0, 1.0, rel_tol=1e-15, abs_tol=1e-300, max_subdivisions=10)
    assert not r.converged
    with pytest.raises(ToleranceNotMet):
        adaptive_gk(f, 0.0, 1.0, rel_tol=1e-15, abs_tol=1e-300, max_subdivisions=10,
                    raise_on_failure=True)


def test_neumaier_sum():
    vals = [1.0, 1e100, 1.0, -1e100] * 50
    assert neumaier_sum(vals) == math.fsum(vals) == 100.0
    rng = random.Random(3)
    xs = [rng.uniform(-1, 1) * 10 ** rng.randint(-10, 10) for _ in range(1000)]
    assert neumaier_sum(xs) == pytest.approx(math.fsum(xs), rel=1e-15, abs=1e-15)


def test_python_fallback_within_runtime_budgets(python_backend):
    import time

    from optilens.gauss_bonnet import deflection_gb
    from optilens.geodesics import shoot_deflection
    from optilens.metrics import SpacetimeParams

    t0 = time.perf_counter()
    d = shoot_deflection("schwarzschild", SpacetimeParams(1.0), 100.0).angle
    t1 = time.perf_counter()
    g = deflection_gb("schwarzschild", SpacetimeParams(1.0), 1e5).angle
    t2 = time.perf_counter()
    assert abs(d - 0.04122076) < 1e-5 and t1 - t0 < 5.0
    assert abs(g * 1e5 / 4 - 1) < 1e-3 and t2 - t1 < 10.0
