# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled adaptive Dormand-Prince 5(4) kernel.

Hot inner loop of every Poincare-map, manifold, Lyapunov and basin
computation.  Mirrors ``_kernel_py`` expression for expression; the state is
(x, y) plus up to three tangent 3-vectors of the extended autonomous system.
"""

from libc.math cimport cos, sin, fabs, sqrt, pow

COMPILED = True

STATUS_OK = 0
STATUS_ESCAPED = 1

cdef double _ESCAPE = 1.0e3
cdef long _MAX_STEPS = 50000000

cdef double _C2 = 0.2, _C3 = 0.3, _C4 = 0.8, _C5 = 8.0 / 9.0
cdef double _A21 = 0.2
cdef double _A31 = 3.0 / 40.0, _A32 = 9.0 / 40.0
cdef double _A41 = 44.0 / 45.0, _A42 = -56.0 / 15.0, _A43 = 32.0 / 9.0
cdef double _A51 = 19372.0 / 6561.0, _A52 = -25360.0 / 2187.0
cdef double _A53 = 64448.0 / 6561.0, _A54 = -212.0 / 729.0
cdef double _A61 = 9017.0 / 3168.0, _A62 = -355.0 / 33.0
cdef double _A63 = 46732.0 / 5247.0, _A64 = 49.0 / 176.0, _A65 = -5103.0 / 18656.0
cdef double _A71 = 35.0 / 384.0, _A73 = 500.0 / 1113.0, _A74 = 125.0 / 192.0
cdef double _A75 = -2187.0 / 6784.0, _A76 = 11.0 / 84.0
cdef double _E1 = 71.0 / 57600.0, _E3 = -71.0 / 16695.0, _E4 = 71.0 / 1920.0
cdef double _E5 = -17253.0 / 339200.0, _E6 = 22.0 / 525.0, _E7 = -1.0 / 40.0

cdef int _MAXN = 11


cdef inline void _rhs(double t, double* y, int n, double eps, double delta,
                      double gamma, double omega, double beta, double* out) noexcept:
    cdef double x = y[0]
    cdef double v = y[1]
    cdef double ct = cos(omega * t)
    cdef double a, b, c, p, q, r
    cdef int j
    out[0] = v
    out[1] = x - x * x * x + (x - beta * x * x) * eps * gamma * ct - eps * delta * v
    if n > 2:
        a = 1.0 - 3.0 * x * x + (1.0 - 2.0 * beta * x) * eps * gamma * ct
        b = -eps * delta
        c = -(x - beta * x * x) * eps * gamma * omega * sin(omega * t)
        for j in range(2, n, 3):
            p = y[j]
            q = y[j + 1]
            r = y[j + 2]
            out[j] = q
            out[j + 1] = a * p + b * q + c * r
            out[j + 2] = 0.0


def advance(y0, double t_from, double t_to, double eps, double delta,
            double gamma, double omega, double beta, double rtol, double atol,
            double max_step):
    """Integrate the state (plus tangent block) from t_from to t_to.

    Returns (y_out, status, t_reached); see the pure-Python twin for the
    contract.
    """
    cdef int n = len(y0)
    if n < 2 or (n - 2) % 3 != 0 or n > _MAXN:
        raise ValueError("state length must be 2 + 3*m with m <= 3")
    cdef double y[11]
    cdef double ynew[11]
    cdef double ytmp[11]
    cdef double k1[11]
    cdef double k2[11]
    cdef double k3[11]
    cdef double k4[11]
    cdef double k5[11]
    cdef double k6[11]
    cdef double k7[11]
    cdef int i
    for i in range(n):
        y[i] = y0[i]
    cdef double t = t_from
    cdef double span = t_to - t
    if span == 0.0:
        return [y[i] for i in range(n)], STATUS_OK, t
    cdef double direction = 1.0 if span > 0.0 else -1.0
    cdef double h = fabs(span)
    if max_step < h:
        h = max_step
    if 0.1 < h:
        h = 0.1
    h *= direction

    cdef double err, e, ay, ayn, sc, r2, fac
    cdef long step
    cdef int status

    _rhs(t, y, n, eps, delta, gamma, omega, beta, k1)
    for step in range(_MAX_STEPS):
        if direction * (t_to - t) <= 0.0:
            return [y[i] for i in range(n)], STATUS_OK, t
        if fabs(h) > max_step:
            h = direction * max_step
        if direction * (t + h - t_to) > 0.0:
            h = t_to - t

        for i in range(n):
            ytmp[i] = y[i] + h * _A21 * k1[i]
        _rhs(t + _C2 * h, ytmp, n, eps, delta, gamma, omega, beta, k2)
        for i in range(n):
            ytmp[i] = y[i] + h * (_A31 * k1[i] + _A32 * k2[i])
        _rhs(t + _C3 * h, ytmp, n, eps, delta, gamma, omega, beta, k3)
        for i in range(n):
            ytmp[i] = y[i] + h * (_A41 * k1[i] + _A42 * k2[i] + _A43 * k3[i])
        _rhs(t + _C4 * h, ytmp, n, eps, delta, gamma, omega, beta, k4)
        for i in range(n):
            ytmp[i] = y[i] + h * (_A51 * k1[i] + _A52 * k2[i] + _A53 * k3[i] + _A54 * k4[i])
        _rhs(t + _C5 * h, ytmp, n, eps, delta, gamma, omega, beta, k5)
        for i in range(n):
            ytmp[i] = y[i] + h * (_A61 * k1[i] + _A62 * k2[i] + _A63 * k3[i]
                                  + _A64 * k4[i] + _A65 * k5[i])
        _rhs(t + h, ytmp, n, eps, delta, gamma, omega, beta, k6)
        for i in range(n):
            ynew[i] = y[i] + h * (_A71 * k1[i] + _A73 * k3[i] + _A74 * k4[i]
                                  + _A75 * k5[i] + _A76 * k6[i])
        _rhs(t + h, ynew, n, eps, delta, gamma, omega, beta, k7)

        err = 0.0
        for i in range(n):
            e = h * (_E1 * k1[i] + _E3 * k3[i] + _E4 * k4[i] + _E5 * k5[i]
                     + _E6 * k6[i] + _E7 * k7[i])
            ay = fabs(y[i])
            ayn = fabs(ynew[i])
            sc = atol + rtol * (ay if ay > ayn else ayn)
            r2 = e / sc
            err += r2 * r2
        err = sqrt(err / n)

        if err <= 1.0:
            t = t + h
            for i in range(n):
                y[i] = ynew[i]
                k1[i] = k7[i]
            if fabs(y[0]) > _ESCAPE or fabs(y[1]) > _ESCAPE:
                return [y[i] for i in range(n)], STATUS_ESCAPED, t
            fac = 10.0 if err == 0.0 else 0.9 * pow(err, -0.2)
            if fac > 10.0:
                fac = 10.0
            h *= fac
        else:
            fac = 0.9 * pow(err, -0.2)
            if fac < 0.2:
                fac = 0.2
            h *= fac
    raise RuntimeError("step limit exceeded in kernel")
