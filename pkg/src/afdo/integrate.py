"""High-accuracy flow, stroboscopic map and tangent dynamics.

Thin orchestration layer over the Dormand-Prince kernel: exact-time
stroboscopic sampling, the saddle monodromy, and joint state+tangent
integration with periodic QR re-orthonormalization.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import kernel
from .dynamics import PhaseState


@dataclass(frozen=True)
class IntegratorConfig:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_step: float = 10.0

    def __post_init__(self):
        if self.rel_tol <= 0.0 or self.abs_tol <= 0.0 or self.max_step <= 0.0:
            raise ValueError("tolerances and max_step must be positive")


DEFAULT_CONFIG = IntegratorConfig()


class EscapeError(RuntimeError):
    """Orbit left the |x|,|y| <= 1e3 box during integration."""

    def __init__(self, state, t, iterations=None):
        self.state = state
        self.t = t
        self.iterations = iterations
        msg = f"orbit escaped at t={t:.6g}, state=({state.x:.3g}, {state.y:.3g})"
        if iterations is not None:
            msg += f" after {iterations} map iterates"
        super().__init__(msg)


def integrate(s, t_from, t_to, p, cfg=DEFAULT_CONFIG):
    """Flow the state from t_from to t_to (either direction)."""
    y, status, t = kernel.advance(
        [s.x, s.y], t_from, t_to, p.epsilon, p.delta, p.gamma, p.omega, p.beta,
        cfg.rel_tol, cfg.abs_tol, cfg.max_step,
    )
    if status == kernel.STATUS_ESCAPED:
        raise EscapeError(PhaseState(y[0], y[1]), t)
    return PhaseState(y[0], y[1])


def poincare_step(s, theta, p, cfg=DEFAULT_CONFIG, direction=1):
    """One iterate of the stroboscopic map at section phase theta.

    direction=-1 applies the inverse map (backward flow over one period).
    """
    t0 = theta / p.omega
    return integrate(s, t0, t0 + direction * p.forcing_period, p, cfg)


def poincare_map(s, theta, n, p, cfg=DEFAULT_CONFIG):
    """n successive stroboscopic iterates sampled at theta/omega + k*T.

    Raises EscapeError (carrying the iterate index reached) if the orbit
    leaves the escape box.
    """
    if n <= 0:
        raise ValueError("n must be positive")
    out = []
    cur = s
    t0 = theta / p.omega
    T = p.forcing_period
    for k in range(n):
        try:
            cur = integrate(cur, t0 + k * T, t0 + (k + 1) * T, p, cfg)
        except EscapeError as err:
            raise EscapeError(err.state, err.t, iterations=k) from None
        out.append(cur)
    return out


def linearize_at_origin(p, cfg=DEFAULT_CONFIG, theta=0.0):
    """Monodromy of the stroboscopic map at the fixed origin.

    Integrates the variational equations along (0, 0) over one forcing
    period.  Returns (monodromy, eigenvalues, eigenvectors) with the
    expanding eigenvalue first; raises if the spectrum is not of saddle
    type.
    """
    t0 = theta / p.omega
    y0 = [0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0]
    y, status, _ = kernel.advance(
        y0, t0, t0 + p.forcing_period, p.epsilon, p.delta, p.gamma, p.omega,
        p.beta, cfg.rel_tol, cfg.abs_tol, cfg.max_step,
    )
    assert status == kernel.STATUS_OK
    mono = np.array([[y[2], y[5]], [y[3], y[6]]])
    vals, vecs = np.linalg.eig(mono)
    if np.iscomplexobj(vals) and np.max(np.abs(vals.imag)) > 1e-12:
        raise ValueError("monodromy spectrum is not real: origin is not a saddle")
    vals = vals.real
    vecs = vecs.real
    order = np.argsort(-np.abs(vals))
    vals = vals[order]
    vecs = vecs[:, order]
    if not (abs(vals[0]) > 1.0 > abs(vals[1])):
        raise ValueError(f"origin is not a saddle: multipliers {vals}")
    return mono, vals, vecs


def integrate_with_tangents(s, frame, t_from, t_to, p, cfg=DEFAULT_CONFIG,
                            reorth_interval=None):
    """Joint state + tangent-frame integration with QR renormalization.

    ``frame`` is a (d, m) array of m orthonormal columns, d=2 for the plane
    or d=3 for the extended autonomous system (third component along time).
    Returns (state, frame, log_growth) where log_growth[i] is the
    accumulated natural-log stretch of direction i.
    """
    frame = np.asarray(frame, dtype=float)
    d, m = frame.shape
    if d not in (2, 3) or not (1 <= m <= 3):
        raise ValueError("frame must be (2 or 3) x (1..3)")
    if reorth_interval is None:
        reorth_interval = p.forcing_period
    log_growth = np.zeros(m)
    t = t_from
    direction = 1.0 if t_to >= t_from else -1.0
    x, y = s.x, s.y
    while direction * (t_to - t) > 1e-14:
        t_next = t + direction * min(reorth_interval, direction * (t_to - t))
        vec = [x, y]
        for j in range(m):
            vec.extend([frame[0, j], frame[1, j], frame[2, j] if d == 3 else 0.0])
        out, status, t_hit = kernel.advance(
            vec, t, t_next, p.epsilon, p.delta, p.gamma, p.omega, p.beta,
            cfg.rel_tol, cfg.abs_tol, cfg.max_step,
        )
        if status == kernel.STATUS_ESCAPED:
            raise EscapeError(PhaseState(out[0], out[1]), t_hit)
        x, y = out[0], out[1]
        cols = np.empty((d, m))
        for j in range(m):
            cols[0, j] = out[2 + 3 * j]
            cols[1, j] = out[3 + 3 * j]
            if d == 3:
                cols[2, j] = out[4 + 3 * j]
        q, r = np.linalg.qr(cols)
        diag = np.diag(r)
        if np.any(np.abs(diag) < 1e-300) or not np.all(np.isfinite(diag)):
            raise FloatingPointError("tangent frame degenerated; shrink reorth interval")
        # keep a positively oriented frame
        signs = np.sign(diag)
        q = q * signs
        log_growth += np.log(np.abs(diag))
        frame = q
        t = t_next
    return PhaseState(x, y), frame, log_growth
