# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels; mirrors ``_pykernels`` operation for operation."""

from libc.math cimport sqrt, fabs, pow
from libc.stdlib cimport malloc, free

BACKEND = "cython"

ESCAPED = 0
REACHED_SMAX = 1
CAPTURED = 2
STEP_FAILED = 3

cdef double C2 = 1.0 / 5.0
cdef double A21 = 1.0 / 5.0
cdef double A31 = 3.0 / 40.0, A32 = 9.0 / 40.0
cdef double A41 = 44.0 / 45.0, A42 = -56.0 / 15.0, A43 = 32.0 / 9.0
cdef double A51 = 19372.0 / 6561.0, A52 = -25360.0 / 2187.0, A53 = 64448.0 / 6561.0, A54 = -212.0 / 729.0
cdef double A61 = 9017.0 / 3168.0, A62 = -355.0 / 33.0, A63 = 46732.0 / 5247.0, A64 = 49.0 / 176.0, A65 = -5103.0 / 18656.0
cdef double B1 = 35.0 / 384.0, B3 = 500.0 / 1113.0, B4 = 125.0 / 192.0, B5 = -2187.0 / 6784.0, B6 = 11.0 / 84.0
cdef double E1 = 71.0 / 57600.0, E3 = -71.0 / 16695.0, E4 = 71.0 / 1920.0
cdef double E5 = -17253.0 / 339200.0, E6 = 22.0 / 525.0, E7 = -1.0 / 40.0

cdef double[5][5] AROWS
AROWS[0][:] = [A21, 0.0, 0.0, 0.0, 0.0]
AROWS[1][:] = [A31, A32, 0.0, 0.0, 0.0]
AROWS[2][:] = [A41, A42, A43, 0.0, 0.0]
AROWS[3][:] = [A51, A52, A53, A54, 0.0]
AROWS[4][:] = [A61, A62, A63, A64, A65]

cdef double[8] XGK
XGK[:] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
]
cdef double[8] WGK
WGK[:] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
]
cdef double[4] WG
WG[:] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
]


cdef inline void _terms(int code, double M, double a, double r, double* out) noexcept nogil:
    cdef double x, delta, delta1, p, p1, q, q1
    if code == 0:
        out[0] = 1.0
        out[1] = 0.0
        out[2] = r * r
        out[3] = 2.0 * r
        return
    x = r - 2.0 * M
    if code == 1:
        out[0] = r * r / (x * x)
        out[1] = -4.0 * M * r / (x * x * x)
        out[2] = r * r * r / x
        out[3] = (2.0 * r * r * r - 6.0 * M * r * r) / (x * x)
        return
    delta = r * r - 2.0 * M * r + a * a
    delta1 = 2.0 * r - 2.0 * M
    p = delta * x
    p1 = delta1 * x + delta
    out[0] = r * r * r / p
    out[1] = (3.0 * r * r * p - r * r * r * p1) / (p * p)
    q = r * r * delta
    q1 = 2.0 * r * delta + r * r * delta1
    out[2] = q / (x * x)
    out[3] = (q1 * x * x - q * 2.0 * x) / (x * x * x * x)


def metric_terms(int code, double M, double a, double r):
    """(E, E_r, G, G_r) of the radial profile."""
    cdef double t[4]
    _terms(code, M, a, r, t)
    return t[0], t[1], t[2], t[3]


cdef inline void _rhs(int code, double M, double a, double r, double phi, double rd, double pd,
                      double* k) noexcept nogil:
    cdef double t[4]
    _terms(code, M, a, r, t)
    k[0] = rd
    k[1] = pd
    k[2] = -(t[1] / (2.0 * t[0])) * rd * rd + (t[3] / (2.0 * t[0])) * pd * pd
    k[3] = -(t[3] / t[2]) * rd * pd


def geodesic_rhs(int code, double M, double a, double r, double phi, double rd, double pd):
    cdef double k[4]
    _rhs(code, M, a, r, phi, rd, pd, k)
    return k[0], k[1], k[2], k[3]


cdef inline bint _stage_ok(int code, double M, double r) noexcept nogil:
    if code == 0:
        return r > 0.0
    return r > 2.0 * M


cdef int _step(int code, double M, double a, double* y, double* k1, double h,
               double* yn, double* k7, double* err, int* n_eval) noexcept nogil:
    """Returns 1 on success, 0 if a stage left the domain."""
    cdef double ks[7][4]
    cdef double s[4]
    cdef double acc, r
    cdef int st, i, j
    for i in range(4):
        ks[0][i] = k1[i]
    for st in range(5):
        for i in range(4):
            acc = 0.0
            for j in range(st + 1):
                acc += AROWS[st][j] * ks[j][i]
            s[i] = acc
        r = y[0] + h * s[0]
        if not _stage_ok(code, M, r):
            return 0
        _rhs(code, M, a, r, y[1] + h * s[1], y[2] + h * s[2], y[3] + h * s[3], ks[st + 1])
        n_eval[0] += 1
    for i in range(4):
        yn[i] = y[i] + h * (B1 * ks[0][i] + B3 * ks[2][i] + B4 * ks[3][i] + B5 * ks[4][i] + B6 * ks[5][i])
    if not _stage_ok(code, M, yn[0]):
        return 0
    _rhs(code, M, a, yn[0], yn[1], yn[2], yn[3], k7)
    n_eval[0] += 1
    for i in range(4):
        err[i] = h * (E1 * ks[0][i] + E3 * ks[2][i] + E4 * ks[3][i] + E5 * ks[4][i]
                      + E6 * ks[5][i] + E7 * k7[i])
    return 1


def dp45_step(int code, double M, double a, y, k1, double h):
    cdef double cy[4]
    cdef double ck[4]
    cdef double yn[4]
    cdef double k7[4]
    cdef double err[4]
    cdef int n = 0
    cdef int i
    for i in range(4):
        cy[i] = y[i]
        ck[i] = k1[i]
    if not _step(code, M, a, cy, ck, h, yn, k7, err, &n):
        return None, None, None, n
    return ([yn[0], yn[1], yn[2], yn[3]], (k7[0], k7[1], k7[2], k7[3]),
            [err[0], err[1], err[2], err[3]], n)


cdef double _error_ratio(double* y, double* yn, double* err, double rtol, double* atol) noexcept nogil:
    cdef double worst = 0.0
    cdef double sc, e, q, m
    cdef int i
    for i in range(4):
        m = fabs(y[i])
        if fabs(yn[i]) > m:
            m = fabs(yn[i])
        sc = atol[i] + rtol * m
        e = fabs(err[i])
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


cdef double _locate_escape(int code, double M, double a, double* y, double* k1, double h,
                           double r_escape, double* yout, int* n_eval) noexcept nogil:
    cdef double lo = 0.0, flo = y[0] - r_escape, hi = h, fhi, mid, fm, best_h
    cdef double yh[4]
    cdef double k7[4]
    cdef double err[4]
    cdef int side = 0, it, i
    _step(code, M, a, y, k1, hi, yh, k7, err, n_eval)
    fhi = yh[0] - r_escape
    best_h = hi
    for i in range(4):
        yout[i] = yh[i]
    for it in range(80):
        if fhi == flo:
            break
        mid = hi - fhi * (hi - lo) / (fhi - flo)
        if not (lo < mid and mid < hi):
            mid = 0.5 * (lo + hi)
        _step(code, M, a, y, k1, mid, yh, k7, err, n_eval)
        fm = yh[0] - r_escape
        best_h = mid
        for i in range(4):
            yout[i] = yh[i]
        if fabs(fm) <= 1e-14 * r_escape or hi - lo <= 1e-15 * h:
            break
        if fm < 0.0:
            lo = mid
            flo = fm
            if side == -1:
                fhi *= 0.5
            side = -1
        else:
            hi = mid
            fhi = fm
            if side == 1:
                flo *= 0.5
            side = 1
    return best_h


def integrate(int code, double M, double a, y0, double s0, double s_max, double r_escape,
              double r_min, double rtol, atol, double h0, long max_steps, bint record):
    """Adaptive Dormand-Prince integration of a light ray (see ``_pykernels.integrate``)."""
    cdef double y[4]
    cdef double yn[4]
    cdef double k1[4]
    cdef double k7[4]
    cdef double err[4]
    cdef double at[4]
    cdef double s = s0, h = h0, q, fac, hh
    cdef int n_eval = 0
    cdef long n_steps = 0, n_reject = 0
    cdef int status = REACHED_SMAX
    cdef int i
    for i in range(4):
        y[i] = y0[i]
        at[i] = atol[i]
    samples = []
    if record:
        samples.append((s, y[0], y[1], y[2], y[3]))
    _rhs(code, M, a, y[0], y[1], y[2], y[3], k1)
    n_eval = 1
    while True:
        if s >= s_max:
            status = REACHED_SMAX
            break
        if n_steps + n_reject >= max_steps:
            status = STEP_FAILED
            break
        if s + h > s_max:
            h = s_max - s
        if h <= 1e-14 * (fabs(s) + fabs(h0)):
            status = STEP_FAILED
            break
        if not _step(code, M, a, y, k1, h, yn, k7, err, &n_eval):
            h *= 0.25
            n_reject += 1
            continue
        q = _error_ratio(y, yn, err, rtol, at)
        if q > 1.0:
            fac = 0.9 * pow(q, -0.2)
            if fac < 0.2:
                fac = 0.2
            h *= fac
            n_reject += 1
            continue
        if y[0] < r_escape and r_escape <= yn[0]:
            hh = _locate_escape(code, M, a, y, k1, h, r_escape, yn, &n_eval)
            s += hh
            for i in range(4):
                y[i] = yn[i]
            n_steps += 1
            if record:
                samples.append((s, y[0], y[1], y[2], y[3]))
            status = ESCAPED
            break
        s += h
        for i in range(4):
            y[i] = yn[i]
            k1[i] = k7[i]
        n_steps += 1
        if record:
            samples.append((s, y[0], y[1], y[2], y[3]))
        if y[0] <= r_min:
            status = CAPTURED
            break
        if q > 0.0:
            fac = 0.9 * pow(q, -0.2)
            if fac > 5.0:
                fac = 5.0
        else:
            fac = 5.0
        h *= fac
    return status, s, (y[0], y[1], y[2], y[3]), n_steps, n_eval, n_reject, samples


cdef inline double _gb_integrand(int code, double M, double a, double u) noexcept nogil:
    cdef double r, K, num
    cdef double t[4]
    if code == 0:
        return 0.0
    if u == 0.0:
        return 2.0 * M
    r = 1.0 / u
    _terms(code, M, a, r, t)
    if code == 1:
        K = M * (3.0 * M - 2.0 * r) / (r * r * r * r)
    else:
        num = M * (6.0 * a * a * (r - M) + r * (6.0 * M * M - 7.0 * M * r + 2.0 * r * r))
        K = num / ((2.0 * M - r) * r * r * r * r * r)
    return -K * sqrt(t[0] * t[2]) * r * r


def gb_integrand(int code, double M, double a, double u):
    """-K sqrt(det g) r^2 at r = 1/u, with K from the closed forms."""
    return _gb_integrand(code, M, a, u)


cdef void _gk15(int code, double M, double a, double lo, double hi, double* val, double* err) noexcept nogil:
    cdef double c = 0.5 * (lo + hi)
    cdef double hw = 0.5 * (hi - lo)
    cdef double fc = _gb_integrand(code, M, a, c)
    cdef double resk = WGK[7] * fc
    cdef double resg = WG[3] * fc
    cdef double dx, f2
    cdef int j
    for j in range(7):
        dx = hw * XGK[j]
        f2 = _gb_integrand(code, M, a, c - dx) + _gb_integrand(code, M, a, c + dx)
        resk += WGK[j] * f2
        if j % 2 == 1:
            resg += WG[j // 2] * f2
    val[0] = resk * hw
    err[0] = fabs((resk - resg) * hw)


cdef double _neumaier(double* values, int n) noexcept nogil:
    cdef double total = 0.0, comp = 0.0, v, t
    cdef int i
    for i in range(n):
        v = values[i]
        t = total + v
        if fabs(total) >= fabs(v):
            comp += (total - t) + v
        else:
            comp += (v - t) + total
        total = t
    return total + comp


def gb_inner(int code, double M, double a, double u_max, double rtol, double atol, int max_sub):
    """Adaptive GK15 integral of gb_integrand over [0, u_max] (see ``_pykernels.gb_inner``)."""
    cdef double* buf = <double*> malloc(4 * (max_sub + 1) * sizeof(double))
    if buf == NULL:
        raise MemoryError()
    cdef double* los = buf
    cdef double* his = buf + (max_sub + 1)
    cdef double* vals = buf + 2 * (max_sub + 1)
    cdef double* errs = buf + 3 * (max_sub + 1)
    cdef int n = 1, k, i
    cdef long n_eval = 15
    cdef bint ok
    cdef double total, err, tol, lo, hi, mid
    try:
        los[0] = 0.0
        his[0] = u_max
        _gk15(code, M, a, 0.0, u_max, &vals[0], &errs[0])
        while True:
            total = _neumaier(vals, n)
            err = _neumaier(errs, n)
            tol = rtol * fabs(total)
            if atol > tol:
                tol = atol
            if err <= tol:
                ok = True
                break
            if n > max_sub:
                ok = False
                break
            k = 0
            for i in range(1, n):
                if errs[i] > errs[k]:
                    k = i
            lo = los[k]
            hi = his[k]
            mid = 0.5 * (lo + hi)
            if not (lo < mid and mid < hi):
                ok = False
                break
            _gk15(code, M, a, lo, mid, &vals[k], &errs[k])
            _gk15(code, M, a, mid, hi, &vals[n], &errs[n])
            n_eval += 30
            his[k] = mid
            los[n] = mid
            his[n] = hi
            n += 1
    finally:
        free(buf)
    return total, err, n_eval, ok
