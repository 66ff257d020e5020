"""Two-loop homoclinic bifurcation machinery.

A two-loop homoclinic orbit leaves the saddle along one loop (side c), spends
a return time given by the unperturbed period at energy eps*M_c(t0) inside or
outside the separatrix, and rejoins along side d.  Tangencies of the combined
splitting function

    h2(t0, eps) = M_c(t0) + M_d(t1(t0, eps))

locate the secondary bifurcation points; their transition number counts the
forcing periods spent between the two loops.  This module provides the
closed-form zeroth-order seeds (asymptotic period), Newton refinement against
the exact quadrature period, curve continuation in omega, the per-index lower
bounds and the structural indices.
"""

import math
from dataclasses import dataclass, replace
from enum import Enum

from scipy.optimize import minimize_scalar

from . import melnikov as mel
from .dynamics import EnergyBranch, period, period_derivative, period_inverse
from .melnikov import Side

SEED_GRID = 4096
INDEX_SCAN_CAP = 12


class SmfDomainError(ValueError):
    """Return time undefined at the requested (t0, eps)."""


class ConvergenceError(RuntimeError):
    def __init__(self, msg, last=None):
        super().__init__(msg)
        self.last = last


class IndexMismatchError(RuntimeError):
    """Converged point violates its requested transition-number window."""


class Pair(Enum):
    LL = "ll"
    LR = "lr"
    RL = "rl"
    RR = "rr"

    @property
    def c(self):
        return Side.LEFT if self.value[0] == "l" else Side.RIGHT

    @property
    def d(self):
        return Side.LEFT if self.value[1] == "l" else Side.RIGHT

    @property
    def same(self):
        return self.value[0] == self.value[1]

    @property
    def mirrored(self):
        flip = {"l": "r", "r": "l"}
        return Pair(flip[self.value[0]] + flip[self.value[1]])


@dataclass(frozen=True)
class SecondaryBifurcation:
    t0: float
    epsilon: float
    branch_i: int
    pair: Pair
    transition_j: int
    residuals: tuple  # (h2, dh2/dt0) at the returned point
    refined: bool = True
    resonance_flag: bool = False


@dataclass(frozen=True)
class StructuralIndexSet:
    l_ll: int | None
    l_lr: int | None
    l_rl: int | None
    l_rr: int | None

    def get(self, pair):
        return getattr(self, f"l_{pair.value}")


def _s_of(t0, T):
    return 0 if (t0 % T) < 0.5 * T else 1


def t1_time(t0, eps, pair, p):
    """Rejoin time t1 for a two-loop orbit launched at phase t0.

    Negative M_c(t0): interior transit, t1 = t0 + P(eps*M_c).  Positive:
    exterior transit, t1 = t0 + P(eps*M_c)/2.  Returns None when M_c(t0)=0
    or the energy leaves the period domain.
    """
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    mc = mel.melnikov(t0, pair.c, p)
    if mc == 0.0:
        return None
    H = eps * mc
    if mc < 0.0:
        if H <= -0.25:
            return None
        return t0 + period(H, EnergyBranch.INNER_RIGHT)
    return t0 + 0.5 * period(H, EnergyBranch.OUTER)


def smf_value(t0, eps, pair, p):
    """Combined splitting M_c(t0) + M_d(t1); None if t1 is undefined."""
    t1 = t1_time(t0, eps, pair, p)
    if t1 is None:
        return None
    return mel.melnikov(t0, pair.c, p) + mel.melnikov(t1, pair.d, p)


def transition_number(t0, eps, pair, p):
    """Forcing periods spent between the two loops: floor(t1/T) - s(t0)."""
    T = p.forcing_period
    t0n = t0 % T
    t1 = t1_time(t0n, eps, pair, p)
    if t1 is None:
        raise SmfDomainError(f"t1 undefined at t0={t0}, eps={eps}")
    j = math.floor(t1 / T) - _s_of(t0n, T)
    if j < 0:
        raise IndexMismatchError(f"negative transition number {j} at t0={t0}")
    return j


def melnikov_inverse(x, d, branch_i, p):
    """Phase with M_d(phase) = x, principal branches; None outside range."""
    fd = mel.f_side(p.omega, p.beta, d)
    arg = (x + 4.0 * p.delta / 3.0) / (p.gamma * fd)
    if abs(arg) > 1.0:
        return None
    if branch_i == 1:
        return math.asin(arg) / p.omega
    if branch_i == 2:
        return (math.pi - math.asin(arg)) / p.omega
    raise ValueError("branch_i must be 1 or 2")


def _smf_exact(t0, eps, pair, p):
    """(h2, dh2/dt0, dh2/deps) with the exact quadrature period.

    Raises SmfDomainError off the admissible leg (wrong M_c sign for the
    pair, or energy outside the period domain).
    """
    mc = mel.melnikov(t0, pair.c, p)
    want_negative = pair.same
    if mc == 0.0 or (mc < 0.0) != want_negative:
        raise SmfDomainError(f"M_c(t0) sign inadmissible for pair {pair.value}")
    H = eps * mc
    if pair.same:
        if H <= -0.25:
            raise SmfDomainError(f"energy {H} below interior branch")
        branch, kappa = EnergyBranch.INNER_RIGHT, 1.0
    else:
        branch, kappa = EnergyBranch.OUTER, 0.5
    t1 = t0 + kappa * period(H, branch)
    dP = period_derivative(H, branch)
    mcp = mel.melnikov_deriv(t0, pair.c, p)
    md = mel.melnikov(t1, pair.d, p)
    mdp = mel.melnikov_deriv(t1, pair.d, p)
    h2 = mc + md
    dh2_dt0 = mcp + mdp * (1.0 + kappa * dP * eps * mcp)
    dh2_deps = mdp * kappa * dP * mc
    return h2, dh2_dt0, dh2_deps, t1


def _seed_branch_eps(t0, branch_i, pair, ell, p):
    """Zeroth-order (asymptotic-period) bifurcation curve eps(t0); None off-leg.

    The rejoin phase uses the principal inverse of M_d shifted into the
    transition window [(ell+s)T, (ell+s+1)T), which keeps the transition
    number pinned at ell.
    """
    T = p.forcing_period
    mc = mel.melnikov(t0, pair.c, p)
    if mc == 0.0 or (mc < 0.0) != pair.same:
        return None
    u = melnikov_inverse(-mc, pair.d, branch_i, p)
    if u is None:
        return None
    t1 = (u % T) + (ell + _s_of(t0, T)) * T
    tau = t1 - t0
    if tau <= 0.0:
        return None
    if pair.same:
        eps = -16.0 * math.exp(-tau) / mc
    else:
        eps = 16.0 * math.exp(-tau) / mc
    return eps if eps > 0.0 else None


def approx_secondary_bifurcation(pair, ell, p_shape):
    """Closed-form seeds for the two bifurcation values at one omega.

    Scans the zeroth-order curves eps_i(t0) over both inverse branches for
    interior local minima (the stationary tangency condition) and polishes
    them.  Returns up to two (t0, eps) pairs ordered by eps; near-duplicate
    minima are merged.
    """
    T = p_shape.forcing_period
    cands = []
    for branch_i in (1, 2):
        ts = [k * T / SEED_GRID for k in range(SEED_GRID)]
        vals = [_seed_branch_eps(t, branch_i, pair, ell, p_shape) for t in ts]
        for k in range(SEED_GRID):
            km, kp = k - 1, (k + 1) % SEED_GRID
            v = vals[k]
            if v is None or vals[km] is None or vals[kp] is None:
                continue
            if v <= vals[km] and v <= vals[kp]:
                res = minimize_scalar(
                    lambda t: _seed_branch_eps(t, branch_i, pair, ell, p_shape)
                    or math.inf,
                    bounds=(ts[k] - T / SEED_GRID, ts[k] + T / SEED_GRID),
                    method="bounded",
                    options={"xatol": 1e-13},
                )
                if math.isfinite(res.fun):
                    cands.append((float(res.x) % T, float(res.fun)))
    cands.sort(key=lambda r: r[1])
    out = []
    for t0, e in cands:
        if any(abs(t0 - u0) < 1e-6 * T and abs(e - eu) < 1e-6 * (1.0 + eu)
               for u0, eu in out):
            continue
        out.append((t0, e))
        if len(out) == 2:
            break
    return out


def resonance_unreliable(bif, p_shape):
    """True when an interior-transit ell=0 point sits past the 1:1 resonance.

    The interior transit is reliable only while the transit energy stays
    shallower than the 1:1 resonance energy P^{-1}(T).
    """
    if not (bif.pair.same and bif.transition_j == 0):
        return False
    T = p_shape.forcing_period
    if T <= math.pi * math.sqrt(2.0):
        # no interior orbit as fast as the forcing: the required transit
        # cannot avoid the resonance zone at all
        return True
    h_res = period_inverse(T, EnergyBranch.INNER_RIGHT)
    mc = mel.melnikov(bif.t0, bif.pair.c, p_shape)
    if mc >= 0.0:
        return True
    return not (bif.epsilon < h_res / mc)


def refine_secondary_bifurcation(seed, pair, ell, p_shape, branch_i=1,
                                 tol=1e-10, max_iter=50):
    """Damped Newton on (h2, dh2/dt0) = 0 with the exact quadrature period.

    ``seed`` is (t0, eps) from the closed forms or a continuation step.
    Verifies the transition-number window on output.
    """
    t0, eps = seed
    T = p_shape.forcing_period

    def residual(t0v, epsv):
        h2, dh2, dh2_de, t1 = _smf_exact(t0v, epsv, pair, p_shape)
        return h2, dh2, dh2_de, t1

    try:
        h2, dh2, dh2_de, t1 = residual(t0, eps)
    except SmfDomainError as err:
        raise ConvergenceError(f"seed off-domain: {err}", last=seed) from None
    norm = math.hypot(h2, dh2 / p_shape.omega)
    for _ in range(max_iter):
        if abs(h2) < tol and abs(dh2) < tol:
            t0n = t0 % T
            j = math.floor((t1 - (t0 - t0n)) / T) - _s_of(t0n, T)
            if j != ell:
                raise IndexMismatchError(
                    f"converged to transition number {j}, wanted {ell}"
                )
            bif = SecondaryBifurcation(
                t0=t0n, epsilon=eps, branch_i=branch_i, pair=pair,
                transition_j=j, residuals=(h2, dh2),
            )
            return replace(bif, resonance_flag=resonance_unreliable(bif, p_shape))
        # finite-difference second row of the Jacobian
        dt = 1e-7 * T
        de = max(1e-9, 1e-7 * eps)
        try:
            _, dh2_p, _, _ = residual(t0 + dt, eps)
            _, dh2_m, _, _ = residual(t0 - dt, eps)
            _, dh2_ep, _, _ = residual(t0, eps + de)
            _, dh2_em, _, _ = residual(t0, eps - de)
        except SmfDomainError as err:
            raise ConvergenceError(f"left domain: {err}", last=(t0, eps)) from None
        j11, j12 = dh2, dh2_de
        j21 = (dh2_p - dh2_m) / (2.0 * dt)
        j22 = (dh2_ep - dh2_em) / (2.0 * de)
        det = j11 * j22 - j12 * j21
        if det == 0.0 or not math.isfinite(det):
            raise ConvergenceError("singular Newton system", last=(t0, eps))
        step_t = (h2 * j22 - dh2 * j12) / det
        step_e = (j11 * dh2 - j21 * h2) / det
        lam = 1.0
        for _ in range(8):
            t0n, epsn = t0 - lam * step_t, eps - lam * step_e
            if epsn > 0.0:
                try:
                    h2n, dh2n, dh2_den, t1n = residual(t0n, epsn)
                except SmfDomainError:
                    lam *= 0.5
                    continue
                normn = math.hypot(h2n, dh2n / p_shape.omega)
                if normn < norm or normn < tol:
                    t0, eps = t0n, epsn
                    h2, dh2, dh2_de, t1 = h2n, dh2n, dh2_den, t1n
                    norm = normn
                    break
            lam *= 0.5
        else:
            raise ConvergenceError("damping failed to reduce residual",
                                   last=(t0, eps))
    raise ConvergenceError("Newton did not converge", last=(t0, eps))


def seed_point(pair, ell, branch_i, p_shape):
    """Closed-form seed for one branch; None when no candidate exists."""
    seeds = approx_secondary_bifurcation(pair, ell, p_shape)
    if len(seeds) >= branch_i:
        return seeds[branch_i - 1]
    return None


def unrefined_point(seed, pair, ell, p_shape, branch_i):
    """Wrap a closed-form seed as a flagged, unrefined bifurcation point."""
    t0, eps = seed
    bif = SecondaryBifurcation(
        t0=t0 % p_shape.forcing_period, epsilon=eps, branch_i=branch_i,
        pair=pair, transition_j=ell, residuals=(math.nan, math.nan),
        refined=False,
    )
    return replace(bif, resonance_flag=resonance_unreliable(bif, p_shape))


def lower_bound_epsilon(pair, ell, p_shape, omega=None, exact=True):
    """Minimum eps at which transition number ell becomes reachable.

    Exact form uses the quadrature period inverse at the 1:(ell+1)
    resonance time; the documented approximation is
    16 exp(-2 pi (ell+1)/omega) / max|M_c|.
    """
    p = p_shape if omega is None else replace(p_shape, omega=omega)
    max_mc = p.gamma * abs(mel.f_side(p.omega, p.beta, pair.c)) + 4.0 * p.delta / 3.0
    if max_mc <= 0.0:
        raise ValueError("Melnikov function vanishes identically")
    if not exact:
        return 16.0 * math.exp(-2.0 * math.pi * (ell + 1) / p.omega) / max_mc
    T = p.forcing_period
    if pair.same:
        tau = (ell + 1) * T
        if tau <= math.pi * math.sqrt(2.0):
            # interior family has no orbit that fast; energy saturates
            return 0.25 / max_mc
        h = abs(period_inverse(tau, EnergyBranch.INNER_RIGHT))
    else:
        h = period_inverse(2.0 * (ell + 1) * T, EnergyBranch.OUTER)
    return h / max_mc


@dataclass(frozen=True)
class CurvePoint:
    omega: float
    bifurcation: SecondaryBifurcation | None
    lower_bound: float | None
    failure: str | None = None


def bifurcation_curve(pair, ell, branch_i, omega_values, p_shape,
                      allow_unrefined=True):
    """Sweep omega and continue one secondary bifurcation branch.

    Seeds each Newton solve by linear extrapolation from the previous two
    converged points, falling back to the closed-form seed at the first
    point or after a failure.  Points where the exact system has no
    solution (interior 1:1 resonance) are emitted unrefined and flagged
    when ``allow_unrefined``; other failures are recorded as gaps.
    """
    points = []
    history = []  # (omega, t0, eps) of converged points
    for om in omega_values:
        p = replace(p_shape, omega=om)
        try:
            lb = lower_bound_epsilon(pair, ell, p)
        except ValueError:
            points.append(CurvePoint(om, None, None, failure="no-zeros"))
            history.clear()
            continue
        seed = None
        if len(history) >= 2:
            (o1, t1_, e1), (o2, t2_, e2) = history[-2], history[-1]
            if o2 != o1:
                w = (om - o2) / (o2 - o1)
                seed = (t2_ + w * (t2_ - t1_), e2 + w * (e2 - e1))
                if seed[1] <= 0.0:
                    seed = None
        bif = None
        failure = None
        for attempt_seed in ([seed] if seed else []) + ["closed-form"]:
            if attempt_seed == "closed-form":
                attempt_seed = seed_point(pair, ell, branch_i, p)
                if attempt_seed is None:
                    failure = "no-seed"
                    break
            try:
                bif = refine_secondary_bifurcation(
                    attempt_seed, pair, ell, p, branch_i=branch_i)
                failure = None
                break
            except (ConvergenceError, IndexMismatchError) as err:
                failure = str(err)
                last_seed = attempt_seed
        if bif is None and failure not in (None, "no-seed") and allow_unrefined:
            cf = seed_point(pair, ell, branch_i, p)
            if cf is not None:
                bif = unrefined_point(cf, pair, ell, p, branch_i)
                failure = None
        if bif is not None:
            points.append(CurvePoint(om, bif, lb))
            if bif.refined:
                history.append((om, bif.t0, bif.epsilon))
            else:
                history.clear()
        else:
            points.append(CurvePoint(om, None, lb, failure=failure))
            history.clear()
    return points


def structural_indices(p, cap=INDEX_SCAN_CAP):
    """Smallest transition number reachable at p.epsilon for each pair.

    Scans ell upward and compares p.epsilon against the refined first
    bifurcation value; a pair with no admissible launch leg or with every
    curve above p.epsilon is None.
    """
    if p.epsilon <= 0.0:
        raise ValueError("structural indices need epsilon > 0")
    out = {}
    for pair in Pair:
        idx = None
        # exterior transit needs the launch-side splitting to change sign
        if not pair.same:
            if p.gamma * abs(mel.f_side(p.omega, p.beta, pair.c)) <= 4.0 * p.delta / 3.0:
                out[pair.value] = None
                continue
        for ell in range(cap + 1):
            seed = seed_point(pair, ell, 1, p)
            if seed is None:
                continue
            try:
                bif = refine_secondary_bifurcation(seed, pair, ell, p, branch_i=1)
                eps1 = bif.epsilon
            except (ConvergenceError, IndexMismatchError):
                eps1 = seed[1]
            if eps1 <= p.epsilon:
                idx = ell
                break
        out[pair.value] = idx
    return StructuralIndexSet(out["ll"], out["lr"], out["rl"], out["rr"])
