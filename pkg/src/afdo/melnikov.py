"""Closed-form Melnikov machinery for the asymmetric Duffing system.

Side-dependent amplitudes, zeros of the distance function, primary
bifurcation thresholds, the region-I/II/III classification, the critical
frequency where the right amplitude vanishes, and the per-period phase-space
flux out of a saddle loop.

Sign convention: the right-side amplitude F1 - beta*F2 may be negative for
omega beyond the critical frequency; zero finding and flux use its absolute
value, while ``f_side`` returns the signed quantity.
"""

import math
from dataclasses import dataclass
from enum import Enum

from scipy.optimize import brentq

from .dynamics import Params

# Limit of F2/F1 as omega -> 0+, from the small-omega series
# (F1 ~ 2 omega, F2 ~ sqrt(2) pi omega / 3).
RATIO_LOWER_LIMIT = math.sqrt(2.0) * math.pi / 6.0


class Side(Enum):
    LEFT = "left"
    RIGHT = "right"

    @property
    def sign(self):
        return 1.0 if self is Side.LEFT else -1.0


class Region(Enum):
    I = "I"
    II = "II"
    III = "III"


@dataclass(frozen=True)
class MelnikovCoeffs:
    f1: float
    f2: float
    f_left: float
    f_right: float


@dataclass(frozen=True)
class RegionInfo:
    region: Region
    r0_minus: float
    r0_plus: float
    ratio: float  # gamma / delta
    tangency: bool  # ratio sits exactly on a threshold


def f1(omega):
    """Symmetric forcing amplitude pi omega^2 csch(pi omega / 2)."""
    z = 0.5 * math.pi * omega
    # csch(z) = 2 e^-z / (1 - e^-2z), overflow-safe for large omega
    e = math.exp(-z)
    return math.pi * omega * omega * 2.0 * e / (1.0 - e * e)


def f2(omega):
    """Asymmetric forcing amplitude (sqrt2/3) pi omega (1+omega^2) sech(pi omega/2)."""
    z = 0.5 * math.pi * omega
    e = math.exp(-z)
    return (math.sqrt(2.0) / 3.0) * math.pi * omega * (1.0 + omega * omega) * 2.0 * e / (1.0 + e * e)


def coeffs(omega, beta):
    a, b = f1(omega), f2(omega)
    return MelnikovCoeffs(a, b, a + beta * b, a - beta * b)


def f_side(omega, beta, side):
    """Signed amplitude for one saddle-loop side: F1 +- beta F2."""
    return f1(omega) + side.sign * beta * f2(omega)


def melnikov(t0, side, p):
    """First-order signed splitting gamma sin(omega t0) F_side - 4 delta / 3."""
    return p.gamma * math.sin(p.omega * t0) * f_side(p.omega, p.beta, side) - 4.0 * p.delta / 3.0


def melnikov_deriv(t0, side, p):
    """d/dt0 of the splitting function."""
    return p.gamma * p.omega * math.cos(p.omega * t0) * f_side(p.omega, p.beta, side)


def melnikov_zeros(side, p, tol=1e-12):
    """Zeros of the splitting function in one forcing period.

    Returns a list of (t0, kind) with kind 'simple' or 'degenerate', ordered
    by t0 in [0, T).  Empty when the damping term exceeds the forcing
    amplitude on that side.
    """
    if p.gamma <= 0.0:
        raise ValueError("melnikov_zeros needs gamma > 0")
    fs = f_side(p.omega, p.beta, side)
    if fs == 0.0:
        return []
    k = 4.0 * p.delta / (3.0 * p.gamma * fs)  # sin(omega t0) at a zero
    if abs(k) > 1.0 + tol:
        return []
    T = p.forcing_period
    if abs(abs(k) - 1.0) <= tol:
        t0 = (math.asin(max(-1.0, min(1.0, k))) / p.omega) % T
        return [(t0, "degenerate")]
    a = math.asin(k)
    roots = sorted(((a / p.omega) % T, ((math.pi - a) / p.omega) % T))
    return [(r, "simple") for r in roots]


def primary_thresholds(omega, beta):
    """First-tangency ratios (R0-, R0+) of gamma/delta for the two sides.

    R0+ is infinite when the right amplitude vanishes (omega at the
    critical frequency).
    """
    c = coeffs(omega, beta)
    r0_minus = 4.0 / (3.0 * c.f_left)
    r0_plus = math.inf if c.f_right == 0.0 else 4.0 / (3.0 * abs(c.f_right))
    return (r0_minus, r0_plus)


def classify_region_info(p):
    """Region label plus thresholds and a tangency flag.

    Ratios exactly on a threshold classify into the higher region with
    ``tangency`` set.
    """
    if p.gamma <= 0.0 or p.delta <= 0.0:
        raise ValueError("region classification needs gamma > 0 and delta > 0")
    r0_minus, r0_plus = primary_thresholds(p.omega, p.beta)
    ratio = p.gamma / p.delta
    if ratio < r0_minus:
        region = Region.I
    elif ratio < r0_plus:
        region = Region.II
    else:
        region = Region.III
    tangency = ratio in (r0_minus, r0_plus)
    return RegionInfo(region, r0_minus, r0_plus, ratio, tangency)


def classify_region(p):
    return classify_region_info(p).region


def omega_star(beta, bracket=(1e-3, 1e3), rtol=1e-10):
    """Frequency where the right amplitude F1 - beta F2 vanishes.

    Solves F2/F1 = 1/beta by bisection on the monotone ratio; returns None
    when 1/beta never reaches the ratio (beta at or above the reciprocal of
    the small-omega limit ~0.7405).
    """
    if beta <= 0.0:
        raise ValueError("omega_star needs beta > 0")
    target = 1.0 / beta

    def g(om):
        # f2/f1 = (sqrt2/3) (1+om^2)/om tanh(pi om/2); this form stays
        # finite where f1 alone underflows at large om
        ratio = (math.sqrt(2.0) / 3.0) * (1.0 + om * om) / om \
            * math.tanh(0.5 * math.pi * om)
        return ratio - target

    lo, hi = bracket
    if g(hi) < 0.0 or g(lo) > 0.0:
        return None
    return brentq(g, lo, hi, rtol=rtol)


def flux_out(side, p):
    """Per-forcing-period area swept out of one saddle loop, to first order.

    Integral of the positive part of the splitting function over one period;
    zero when the function has no zeros (damping dominates).
    """
    fs = abs(f_side(p.omega, p.beta, side))
    if p.gamma <= 0.0 or fs == 0.0:
        return 0.0
    k = 4.0 * p.delta / (3.0 * p.gamma * fs)
    if k >= 1.0:
        return 0.0
    gf = p.gamma * fs
    return (2.0 / p.omega) * (
        gf * math.sqrt(1.0 - k * k)
        + (4.0 * p.delta / 3.0) * math.asin(k)
        - 2.0 * math.pi * p.delta / 3.0
    )


def melnikov_quadrature(t0, side, p, t_cut=40.0, n=200000):
    """Direct quadrature of the splitting integrand along the saddle loop.

    Independent check of the closed form: integrates
    y*(x - beta x^2) gamma cos(omega (t + t0)) - delta y^2 over the
    unperturbed loop.  Slow; intended for tests.
    """
    import numpy as np

    t = np.linspace(-t_cut, t_cut, n)
    sech = 1.0 / np.cosh(t)
    x = math.sqrt(2.0) * sech
    y = -math.sqrt(2.0) * sech * np.tanh(t)
    if side is Side.LEFT:
        x, y = -x, -y
    integrand = y * (x - p.beta * x * x) * p.gamma * np.cos(p.omega * (t + t0)) - p.delta * y * y
    return float(np.trapezoid(integrand, t))
