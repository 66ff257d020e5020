"""Unperturbed twin-well structures and the forced vector field.

The model is the planar system

    x' = y
    y' = x - x^3 + (x - beta*x^2) * eps * gamma * cos(omega*t) - eps * delta * y

with the quartic potential V(x) = -x^2/2 + x^4/4.  Everything downstream
(Melnikov amplitudes, return-time analysis, manifold geometry) consumes the
exact unperturbed structures defined here: the energy, the saddle loops, and
the period function of the periodic orbit families.
"""

import math
from dataclasses import dataclass
from enum import Enum

from scipy.integrate import quad
from scipy.optimize import brentq

# Center period: the interior orbit family shrinks onto (1, 0) where the
# linearized frequency is sqrt(V''(1)) = sqrt(2).
MIN_INNER_PERIOD = math.pi * math.sqrt(2.0)

ESCAPE_RADIUS = 1.0e3


@dataclass(frozen=True)
class Params:
    """One parameter set (eps, delta, gamma, omega, beta)."""

    epsilon: float
    delta: float
    gamma: float
    omega: float
    beta: float = 0.0

    def __post_init__(self):
        vals = (self.epsilon, self.delta, self.gamma, self.omega, self.beta)
        if not all(math.isfinite(v) for v in vals):
            raise ValueError("parameters must be finite")
        if self.omega <= 0.0:
            raise ValueError("omega must be positive")
        if min(self.epsilon, self.delta, self.gamma, self.beta) < 0.0:
            raise ValueError("epsilon, delta, gamma, beta must be non-negative")

    @property
    def forcing_period(self):
        return 2.0 * math.pi / self.omega


@dataclass(frozen=True)
class PhaseState:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError("phase state must be finite")

    def as_tuple(self):
        return (self.x, self.y)


class EnergyBranch(Enum):
    """Which periodic-orbit family a given energy refers to.

    Interior orbits around (+1, 0) / (-1, 0) exist for H in (-1/4, 0);
    the exterior family encircling all three equilibria exists for H > 0.
    """

    INNER_LEFT = "inner_left"
    INNER_RIGHT = "inner_right"
    OUTER = "outer"

    @property
    def is_inner(self):
        return self is not EnergyBranch.OUTER


def vector_field(s, t, p):
    """Right-hand side (dx/dt, dy/dt) of the forced system at time t."""
    x, y = s.x, s.y
    dy = (
        x
        - x**3
        + (x - p.beta * x * x) * p.epsilon * p.gamma * math.cos(p.omega * t)
        - p.epsilon * p.delta * y
    )
    return (y, dy)


def potential(x):
    return -0.5 * x * x + 0.25 * x**4


def hamiltonian(s):
    """Unperturbed energy y^2/2 - x^2/2 + x^4/4."""
    return 0.5 * s.y * s.y + potential(s.x)


def homoclinic_orbit(t, side="right"):
    """Point on the unperturbed saddle loop at orbit time t.

    The right loop is (sqrt(2) sech t, -sqrt(2) sech t tanh t); the left
    loop is its negation.
    """
    sech = 1.0 / math.cosh(t)
    x = math.sqrt(2.0) * sech
    y = -math.sqrt(2.0) * sech * math.tanh(t)
    if side == "right":
        return PhaseState(x, y)
    if side == "left":
        return PhaseState(-x, -y)
    raise ValueError(f"unknown side {side!r}")


def _energy_roots(H):
    """Roots r-+ of x^4 - 2 x^2 - 4H = 0 in the variable x^2.

    H - V(x) factors as (1/4) (r_plus - x^2)(x^2 - r_minus).
    """
    s = math.sqrt(1.0 + 4.0 * H)
    return 1.0 - s, 1.0 + s


def period(H, branch):
    """Exact period of the unperturbed orbit at energy H on a given branch.

    Computed by adaptive quadrature after a trigonometric substitution that
    absorbs the square-root turning-point singularities, so the integrand
    is smooth.  The outer value is the full period of the orbit encircling
    all three equilibria.
    """
    if branch.is_inner:
        if not (-0.25 < H < 0.0):
            raise ValueError(f"inner branch needs H in (-1/4, 0), got {H}")
        r_minus, r_plus = _energy_roots(H)
        # x^2 = r_minus cos^2(phi) + r_plus sin^2(phi)

        def integrand(phi):
            c, s = math.cos(phi), math.sin(phi)
            return 1.0 / math.sqrt(r_minus * c * c + r_plus * s * s)

        val, _ = quad(integrand, 0.0, 0.5 * math.pi, epsabs=1e-14, epsrel=1e-12, limit=200)
        return 2.0 * math.sqrt(2.0) * val
    if not (H > 0.0):
        raise ValueError(f"outer branch needs H > 0, got {H}")
    r_minus, r_plus = _energy_roots(H)
    # x = sqrt(r_plus) sin(phi); note r_minus < 0 keeps the root positive.

    def integrand(phi):
        s = math.sin(phi)
        return 1.0 / math.sqrt(r_plus * s * s - r_minus)

    val, _ = quad(integrand, 0.0, 0.5 * math.pi, epsabs=1e-14, epsrel=1e-12, limit=200)
    return 4.0 * math.sqrt(2.0) * val


def period_derivative(H, branch):
    """dP/dH, by differentiating the regularized quadrature under the sign."""
    if branch.is_inner:
        if not (-0.25 < H < 0.0):
            raise ValueError(f"inner branch needs H in (-1/4, 0), got {H}")
        r_minus, r_plus = _energy_roots(H)
        ds = 2.0 / math.sqrt(1.0 + 4.0 * H)  # d sqrt(1+4H)/dH

        def integrand(phi):
            c2 = math.cos(phi) ** 2
            s2 = math.sin(phi) ** 2
            base = r_minus * c2 + r_plus * s2
            return (-c2 * ds + s2 * ds) * base**-1.5

        val, _ = quad(integrand, 0.0, 0.5 * math.pi, epsabs=1e-13, epsrel=1e-10, limit=200)
        return -math.sqrt(2.0) * val
    if not (H > 0.0):
        raise ValueError(f"outer branch needs H > 0, got {H}")
    r_minus, r_plus = _energy_roots(H)
    ds = 2.0 / math.sqrt(1.0 + 4.0 * H)

    def integrand(phi):
        s2 = math.sin(phi) ** 2
        base = r_plus * s2 - r_minus
        return (s2 * ds + ds) * base**-1.5

    val, _ = quad(integrand, 0.0, 0.5 * math.pi, epsabs=1e-13, epsrel=1e-10, limit=200)
    return -2.0 * math.sqrt(2.0) * val


def period_asymptotic(H, branch):
    """Leading-order period ln(16/|H|), doubled on the outer branch."""
    lead = math.log(16.0 / abs(H))
    return lead if branch.is_inner else 2.0 * lead


def period_inverse(tau, branch):
    """Energy H with period(H, branch) == tau, by bracketed root finding.

    The bracket starts from the asymptotic inverse (|H| = 16 e^{-tau} inner,
    16 e^{-tau/2} outer) and is expanded geometrically; the period function
    is monotone on each branch so the root is unique.
    """
    if branch.is_inner:
        if tau <= MIN_INNER_PERIOD:
            raise ValueError(
                f"inner period is bounded below by pi*sqrt(2), got tau={tau}"
            )
        h0 = -16.0 * math.exp(-tau)
        h0 = max(h0, -0.2499)

        def f(H):
            return period(H, branch) - tau

        lo, hi = h0, h0  # magnitudes; lo more negative
        # expand toward 0- until f changes sign
        while f(hi) < 0.0:
            hi *= 0.25
            if hi > -1e-300:
                raise ValueError(f"no inner energy with period {tau}")
        while f(lo) > 0.0:
            lo = max(lo * 4.0, -0.25 + 0.25 * (0.25 + lo))
            if lo <= -0.25 + 1e-15 and f(lo) > 0.0:
                raise ValueError(f"no inner energy with period {tau}")
        root = brentq(f, lo, hi, xtol=1e-300, rtol=8.9e-16)
    else:
        if tau <= 0.0:
            raise ValueError(f"outer period must be positive, got tau={tau}")
        h0 = max(16.0 * math.exp(-0.5 * tau), 1e-300)

        def f(H):
            return period(H, branch) - tau

        lo, hi = h0, h0  # outer period decreases with H: f(lo) > 0 wanted at small H
        while f(lo) < 0.0:
            lo *= 0.25
        while f(hi) > 0.0:
            hi *= 4.0
        root = brentq(f, lo, hi, xtol=1e-300, rtol=8.9e-16)
    return root


def equilibria():
    """Fixed points of the unperturbed flow with their stability tags."""
    return [
        (PhaseState(0.0, 0.0), "saddle"),
        (PhaseState(1.0, 0.0), "center"),
        (PhaseState(-1.0, 0.0), "center"),
    ]
