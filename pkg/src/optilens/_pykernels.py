"""Pure-Python hot kernels.

This module and ``_ckernels.pyx`` implement the same algorithms with the same
floating-point operation order, so both backends agree to the last few ulps.
Metric codes: 0 = flat, 1 = Schwarzschild optical, 2 = reduced Kerr optical.
"""

from math import sqrt

BACKEND = "python"

# status codes returned by integrate()
ESCAPED = 0
REACHED_SMAX = 1
CAPTURED = 2
STEP_FAILED = 3

# Dormand-Prince 5(4) tableau
C2, C3, C4, C5 = 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0
A21 = 1.0 / 5.0
A31, A32 = 3.0 / 40.0, 9.0 / 40.0
A41, A42, A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
A51, A52, A53, A54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
A61, A62, A63, A64, A65 = 9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0
B1, B3, B4, B5, B6 = 35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0
E1, E3, E4, E5, E6, E7 = (
    71.0 / 57600.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
)

# Gauss-Kronrod 7/15 nodes (non-negative half) and weights
XGK = (
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
)
WGK = (
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
)
# Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7]
WG = (
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
)


def metric_terms(code, M, a, r):
    """(E, E_r, G, G_r) of the radial profile."""
    if code == 0:
        return 1.0, 0.0, r * r, 2.0 * r
    x = r - 2.0 * M
    if code == 1:
        E = r * r / (x * x)
        E_r = -4.0 * M * r / (x * x * x)
        G = r * r * r / x
        G_r = (2.0 * r * r * r - 6.0 * M * r * r) / (x * x)
        return E, E_r, G, G_r
    delta = r * r - 2.0 * M * r + a * a
    delta1 = 2.0 * r - 2.0 * M
    p = delta * x
    p1 = delta1 * x + delta
    E = r * r * r / p
    E_r = (3.0 * r * r * p - r * r * r * p1) / (p * p)
    q = r * r * delta
    q1 = 2.0 * r * delta + r * r * delta1
    G = q / (x * x)
    G_r = (q1 * x * x - q * 2.0 * x) / (x * x * x * x)
    return E, E_r, G, G_r


def geodesic_rhs(code, M, a, r, phi, rd, pd):
    """Derivative of the state (r, phi, r', phi') along the affine parameter."""
    E, E_r, G, G_r = metric_terms(code, M, a, r)
    rdd = -(E_r / (2.0 * E)) * rd * rd + (G_r / (2.0 * E)) * pd * pd
    pdd = -(G_r / G) * rd * pd
    return rd, pd, rdd, pdd


def _stage_ok(code, M, r):
    if code == 0:
        return r > 0.0
    return r > 2.0 * M


def dp45_step(code, M, a, y, k1, h):
    """One Dormand-Prince step.

    Returns (ynew, k7, err, n_eval) where ``err`` is the embedded error
    estimate, or (None, None, None, n_eval) if a stage left the domain.
    """
    y0, y1, y2, y3 = y
    n = 0
    s = [0.0, 0.0, 0.0, 0.0]
    ks = [k1]
    rows = (
        (A21,),
        (A31, A32),
        (A41, A42, A43),
        (A51, A52, A53, A54),
        (A61, A62, A63, A64, A65),
    )
    for row in rows:
        for i in range(4):
            acc = 0.0
            for j in range(len(row)):
                acc += row[j] * ks[j][i]
            s[i] = acc
        r = y0 + h * s[0]
        if not _stage_ok(code, M, r):
            return None, None, None, n
        ks.append(geodesic_rhs(code, M, a, r, y1 + h * s[1], y2 + h * s[2], y3 + h * s[3]))
        n += 1
    k1, k2, k3, k4, k5, k6 = ks
    yn = [0.0, 0.0, 0.0, 0.0]
    for i in range(4):
        yn[i] = y[i] + h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i])
    if not _stage_ok(code, M, yn[0]):
        return None, None, None, n
    k7 = geodesic_rhs(code, M, a, yn[0], yn[1], yn[2], yn[3])
    n += 1
    err = [0.0, 0.0, 0.0, 0.0]
    for i in range(4):
        err[i] = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i])
    return yn, k7, err, n


def _error_ratio(y, yn, err, rtol, atol):
    worst = 0.0
    for i in range(4):
        sc = atol[i] + rtol * max(abs(y[i]), abs(yn[i]))
        e = abs(err[i])
        if sc > 0.0:
            q = e / sc
        elif e > 0.0:
            q = 1e300
        else:
            q = 0.0
        if not q <= 1e300:
            q = 1e300
        if q > worst:
            worst = q
    return worst


def _locate_escape(code, M, a, y, k1, h, r_escape):
    """Step size in (0, h] that lands on r = r_escape (Illinois false position)."""
    lo, flo = 0.0, y[0] - r_escape
    hi = h
    yh, _, _, n_total = dp45_step(code, M, a, y, k1, hi)
    fhi = yh[0] - r_escape
    best_h, best_y = hi, yh
    side = 0
    for _ in range(80):
        if fhi == flo:
            break
        mid = hi - fhi * (hi - lo) / (fhi - flo)
        if not (lo < mid < hi):
            mid = 0.5 * (lo + hi)
        ym, _, _, n = dp45_step(code, M, a, y, k1, mid)
        n_total += n
        fm = ym[0] - r_escape
        best_h, best_y = mid, ym
        if abs(fm) <= 1e-14 * r_escape or hi - lo <= 1e-15 * h:
            break
        if fm < 0.0:
            lo, flo = mid, fm
            if side == -1:
                fhi *= 0.5
            side = -1
        else:
            hi, fhi = mid, fm
            if side == 1:
                flo *= 0.5
            side = 1
    return best_h, best_y, n_total


def integrate(code, M, a, y0, s0, s_max, r_escape, r_min, rtol, atol, h0, max_steps, record):
    """Adaptive Dormand-Prince integration of a light ray.

    Stops when r crosses r_escape from below (status ESCAPED, the final state
    lies on r = r_escape), when s reaches s_max (REACHED_SMAX), when r drops
    to r_min or below (CAPTURED) or when the step controller fails
    (STEP_FAILED).

    Returns (status, s, y, n_steps, n_eval, n_reject, samples); samples is a
    list of (s, r, phi, r', phi') tuples when ``record`` is true, else empty.
    """
    y = [float(v) for v in y0]
    s = float(s0)
    h = float(h0)
    samples = []
    if record:
        samples.append((s, y[0], y[1], y[2], y[3]))
    k1 = geodesic_rhs(code, M, a, y[0], y[1], y[2], y[3])
    n_eval = 1
    n_steps = 0
    n_reject = 0
    status = REACHED_SMAX
    while True:
        if s >= s_max:
            status = REACHED_SMAX
            break
        if n_steps + n_reject >= max_steps:
            status = STEP_FAILED
            break
        if s + h > s_max:
            h = s_max - s
        if h <= 1e-14 * (abs(s) + abs(h0)):
            status = STEP_FAILED
            break
        yn, k7, err, n = dp45_step(code, M, a, y, k1, h)
        n_eval += n
        if yn is None:
            h *= 0.25
            n_reject += 1
            continue
        q = _error_ratio(y, yn, err, rtol, atol)
        if q > 1.0:
            fac = 0.9 * q ** -0.2
            if fac < 0.2:
                fac = 0.2
            h *= fac
            n_reject += 1
            continue
        if y[0] < r_escape <= yn[0]:
            hh, yn, n = _locate_escape(code, M, a, y, k1, h, r_escape)
            n_eval += n
            s += hh
            y = yn
            n_steps += 1
            if record:
                samples.append((s, y[0], y[1], y[2], y[3]))
            status = ESCAPED
            break
        s += h
        y = yn
        k1 = k7
        n_steps += 1
        if record:
            samples.append((s, y[0], y[1], y[2], y[3]))
        if y[0] <= r_min:
            status = CAPTURED
            break
        if q > 0.0:
            fac = 0.9 * q ** -0.2
            if fac > 5.0:
                fac = 5.0
        else:
            fac = 5.0
        h *= fac
    return status, s, tuple(y), n_steps, n_eval, n_reject, samples


def gb_integrand(code, M, a, u):
    """-K sqrt(det g) r^2 at r = 1/u, with K from the closed forms.

    This is the radial Gauss-Bonnet integrand after the substitution u = 1/r.
    """
    if code == 0:
        return 0.0
    if u == 0.0:
        return 2.0 * M
    r = 1.0 / u
    E, E_r, G, G_r = metric_terms(code, M, a, r)
    if code == 1:
        K = M * (3.0 * M - 2.0 * r) / (r * r * r * r)
    else:
        num = M * (6.0 * a * a * (r - M) + r * (6.0 * M * M - 7.0 * M * r + 2.0 * r * r))
        K = num / ((2.0 * M - r) * r * r * r * r * r)
    return -K * sqrt(E * G) * r * r


def _gk15(code, M, a, lo, hi):
    c = 0.5 * (lo + hi)
    hw = 0.5 * (hi - lo)
    fc = gb_integrand(code, M, a, c)
    resk = WGK[7] * fc
    resg = WG[3] * fc
    for j in range(7):
        dx = hw * XGK[j]
        f2 = gb_integrand(code, M, a, c - dx) + gb_integrand(code, M, a, c + dx)
        resk += WGK[j] * f2
        if j % 2 == 1:
            resg += WG[j // 2] * f2
    return resk * hw, abs((resk - resg) * hw)


def _neumaier(values, n):
    total = 0.0
    comp = 0.0
    for i in range(n):
        v = values[i]
        t = total + v
        if abs(total) >= abs(v):
            comp += (total - t) + v
        else:
            comp += (v - t) + total
        total = t
    return total + comp


def gb_inner(code, M, a, u_max, rtol, atol, max_sub):
    """Adaptive GK15 integral of gb_integrand over u in [0, u_max].

    Returns (value, error_estimate, n_eval, converged).
    """
    los = [0.0] * (max_sub + 1)
    his = [0.0] * (max_sub + 1)
    vals = [0.0] * (max_sub + 1)
    errs = [0.0] * (max_sub + 1)
    los[0], his[0] = 0.0, u_max
    vals[0], errs[0] = _gk15(code, M, a, 0.0, u_max)
    n = 1
    n_eval = 15
    while True:
        total = _neumaier(vals, n)
        err = _neumaier(errs, n)
        tol = max(atol, rtol * abs(total))
        if err <= tol:
            return total, err, n_eval, True
        if n > max_sub:
            return total, err, n_eval, False
        k = 0
        for i in range(1, n):
            if errs[i] > errs[k]:
                k = i
        lo, hi = los[k], his[k]
        mid = 0.5 * (lo + hi)
        if not (lo < mid < hi):
            return total, err, n_eval, False
        v1, e1 = _gk15(code, M, a, lo, mid)
        v2, e2 = _gk15(code, M, a, mid, hi)
        n_eval += 30
        his[k], vals[k], errs[k] = mid, v1, e1
        los[n], his[n], vals[n], errs[n] = mid, hi, v2, e2
        n += 1
