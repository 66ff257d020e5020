"""Pure-Python adaptive Dormand-Prince 5(4) kernel.

Fallback used when the compiled extension is unavailable (or when
``AFDO_PURE_PYTHON=1``).  The state vector is (x, y) optionally followed by
up to three tangent 3-vectors (vx, vy, vt) of the extended autonomous
system; the tangent block is linear so it rides along in the same step.

The arithmetic mirrors ``_kernel.pyx`` expression for expression so the two
backends agree to rounding.
"""

import math

COMPILED = False

STATUS_OK = 0
STATUS_ESCAPED = 1

_ESCAPE = 1.0e3
_MAX_STEPS = 50_000_000

# Dormand-Prince 5(4) tableau
_C2, _C3, _C4, _C5 = 0.2, 0.3, 0.8, 8.0 / 9.0
_A21 = 0.2
_A31, _A32 = 3.0 / 40.0, 9.0 / 40.0
_A41, _A42, _A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
_A51, _A52, _A53, _A54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
_A61, _A62, _A63, _A64, _A65 = (
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
)
_A71, _A73, _A74, _A75, _A76 = (
    35.0 / 384.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
)
_E1, _E3, _E4, _E5, _E6, _E7 = (
    71.0 / 57600.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
)


def _rhs(t, y, n, eps, delta, gamma, omega, beta):
    x = y[0]
    v = y[1]
    ct = math.cos(omega * t)
    out = [0.0] * n
    out[0] = v
    out[1] = x - x * x * x + (x - beta * x * x) * eps * gamma * ct - eps * delta * v
    if n > 2:
        a = 1.0 - 3.0 * x * x + (1.0 - 2.0 * beta * x) * eps * gamma * ct
        b = -eps * delta
        c = -(x - beta * x * x) * eps * gamma * omega * math.sin(omega * t)
        for j in range(2, n, 3):
            p = y[j]
            q = y[j + 1]
            r = y[j + 2]
            out[j] = q
            out[j + 1] = a * p + b * q + c * r
            out[j + 2] = 0.0
    return out


def advance(y0, t_from, t_to, eps, delta, gamma, omega, beta, rtol, atol, max_step):
    """Integrate the state (plus tangent block) from t_from to t_to.

    Returns (y_out, status, t_reached).  Backward integration (t_to < t_from)
    is supported.  Integration aborts with STATUS_ESCAPED once |x| or |y|
    exceeds 1e3.
    """
    n = len(y0)
    if n < 2 or (n - 2) % 3 != 0:
        raise ValueError("state length must be 2 + 3*m")
    y = list(map(float, y0))
    t = float(t_from)
    span = t_to - t
    if span == 0.0:
        return list(y), STATUS_OK, t
    direction = 1.0 if span > 0.0 else -1.0
    h = direction * min(abs(span), max_step, 0.1)

    k1 = _rhs(t, y, n, eps, delta, gamma, omega, beta)
    ytmp = [0.0] * n
    for _ in range(_MAX_STEPS):
        if direction * (t_to - t) <= 0.0:
            return y, STATUS_OK, t
        if abs(h) > max_step:
            h = direction * max_step
        if direction * (t + h - t_to) > 0.0:
            h = t_to - t

        for i in range(n):
            ytmp[i] = y[i] + h * _A21 * k1[i]
        k2 = _rhs(t + _C2 * h, ytmp, n, eps, delta, gamma, omega, beta)
        for i in range(n):
            ytmp[i] = y[i] + h * (_A31 * k1[i] + _A32 * k2[i])
        k3 = _rhs(t + _C3 * h, ytmp, n, eps, delta, gamma, omega, beta)
        for i in range(n):
            ytmp[i] = y[i] + h * (_A41 * k1[i] + _A42 * k2[i] + _A43 * k3[i])
        k4 = _rhs(t + _C4 * h, ytmp, n, eps, delta, gamma, omega, beta)
        for i in range(n):
            ytmp[i] = y[i] + h * (_A51 * k1[i] + _A52 * k2[i] + _A53 * k3[i] + _A54 * k4[i])
        k5 = _rhs(t + _C5 * h, ytmp, n, eps, delta, gamma, omega, beta)
        for i in range(n):
            ytmp[i] = y[i] + h * (
                _A61 * k1[i] + _A62 * k2[i] + _A63 * k3[i] + _A64 * k4[i] + _A65 * k5[i]
            )
        k6 = _rhs(t + h, ytmp, n, eps, delta, gamma, omega, beta)
        ynew = [0.0] * n
        for i in range(n):
            ynew[i] = y[i] + h * (
                _A71 * k1[i] + _A73 * k3[i] + _A74 * k4[i] + _A75 * k5[i] + _A76 * k6[i]
            )
        k7 = _rhs(t + h, ynew, n, eps, delta, gamma, omega, beta)

        err = 0.0
        for i in range(n):
            e = h * (
                _E1 * k1[i]
                + _E3 * k3[i]
                + _E4 * k4[i]
                + _E5 * k5[i]
                + _E6 * k6[i]
                + _E7 * k7[i]
            )
            ay = abs(y[i])
            ayn = abs(ynew[i])
            sc = atol + rtol * (ay if ay > ayn else ayn)
            r = e / sc
            err += r * r
        err = math.sqrt(err / n)

        if err <= 1.0:
            t = t + h
            y = ynew
            k1 = k7
            if abs(y[0]) > _ESCAPE or abs(y[1]) > _ESCAPE:
                return y, STATUS_ESCAPED, t
            fac = 10.0 if err == 0.0 else 0.9 * err**-0.2
            if fac > 10.0:
                fac = 10.0
            h *= fac
        else:
            fac = 0.9 * err**-0.2
            if fac < 0.2:
                fac = 0.2
            h *= fac
    raise RuntimeError("step limit exceeded in kernel")
