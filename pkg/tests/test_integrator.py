import math
import os
import subprocess
import sys

import numpy as np
import pytest

from afdo import kernel
from afdo.dynamics import Params, PhaseState, hamiltonian
from afdo.integrate import (DEFAULT_CONFIG, EscapeError, IntegratorConfig,
                            integrate, integrate_with_tangents,
                            linearize_at_origin, poincare_map, poincare_step)


def test_energy_conservation_unperturbed():
    p = Params(epsilon=0.0, delta=0.0, gamma=0.0, omega=1.0, beta=0.0)
    s0 = PhaseState(1.3, 0.0)
    h0 = hamiltonian(s0)
    s = integrate(s0, 0.0, 200.0, p)
    assert hamiltonian(s) == pytest.approx(h0, abs=1e-8)


def test_forward_backward_reversibility():
    p = Params(epsilon=0.1, delta=0.1, gamma=1.0, omega=1.5, beta=0.2)
    s0 = PhaseState(0.4, -0.2)
    s1 = integrate(s0, 0.0, 7.3, p)
    s2 = integrate(s1, 7.3, 0.0, p)
    assert s2.x == pytest.approx(s0.x, abs=1e-9)
    assert s2.y == pytest.approx(s0.y, abs=1e-9)


def test_poincare_step_sections_consistent():
    p = Params(epsilon=0.05, delta=0.1, gamma=1.0, omega=2.0, beta=0.0)
    s0 = PhaseState(0.9, 0.0)
    one = poincare_step(s0, 0.0, p)
    two = poincare_step(one, 0.0, p)
    both = poincare_map(s0, 0.0, 2, p)
    assert both[0].x == pytest.approx(one.x, abs=1e-12)
    assert both[1].x == pytest.approx(two.x, abs=1e-12)


def test_escape_in_backward_time():
    # the quartic potential confines forward orbits; backward time turns
    # the damping into pumping and the orbit leaves the guard box
    p = Params(epsilon=1.0, delta=0.5, gamma=0.0, omega=1.0, beta=0.0)
    with pytest.raises(EscapeError) as err:
        integrate(PhaseState(1.2, 0.0), 0.0, -500.0, p)
    assert max(abs(err.value.state.x), abs(err.value.state.y)) > 1e3


def test_monodromy_determinant_liouville():
    p = Params(epsilon=0.2, delta=0.3, gamma=1.0, omega=1.3, beta=0.1)
    cfg = IntegratorConfig(rel_tol=1e-12, abs_tol=1e-14)
    mono, vals, vecs = linearize_at_origin(p, cfg)
    expected = math.exp(-p.epsilon * p.delta * p.forcing_period)
    assert np.linalg.det(mono) == pytest.approx(expected, abs=1e-10)
    assert abs(vals[0]) > 1.0 > abs(vals[1])


def test_tangent_growth_matches_monodromy_eigenvalues():
    p = Params(epsilon=0.1, delta=0.2, gamma=0.8, omega=1.7, beta=0.3)
    mono, vals, _ = linearize_at_origin(p)
    n = 200
    _, _, growth = integrate_with_tangents(
        PhaseState(0.0, 0.0), np.eye(2), 0.0, n * p.forcing_period, p)
    per_iter = growth / n
    # the leading QR direction aligns with the eigenvector only over many
    # iterates, so the per-exponent error decays like 1/n
    assert per_iter[0] == pytest.approx(math.log(abs(vals[0])), abs=5e-3)
    assert per_iter[1] == pytest.approx(math.log(abs(vals[1])), abs=5e-3)
    # the sum obeys the contraction identity exactly at every n
    assert per_iter.sum() == pytest.approx(
        -p.epsilon * p.delta * p.forcing_period, abs=1e-9)


def test_extended_frame_carries_neutral_direction():
    p = Params(epsilon=0.1, delta=0.2, gamma=1.0, omega=1.3, beta=0.0)
    _, _, growth = integrate_with_tangents(
        PhaseState(0.9, 0.0), np.eye(3), 0.0, 50 * p.forcing_period, p)
    lams = sorted(growth / (50 * p.forcing_period), reverse=True)
    assert min(abs(v) for v in lams) < 1e-2  # one exponent is neutral


def _advance_pure(vec, args):
    env = dict(os.environ, AFDO_PURE_PYTHON="1")
    code = (
        "import json, sys\n"
        "from afdo import kernel\n"
        "vec, args = json.loads(sys.stdin.read())\n"
        "y, status, t = kernel.advance(vec, *args)\n"
        "print(json.dumps([list(y), status, t]))\n")
    import json
    proc = subprocess.run([sys.executable, "-c", code],
                          input=json.dumps([list(vec), list(args)]),
                          capture_output=True, text=True, env=env)
    assert proc.returncode == 0, proc.stderr
    return json.loads(proc.stdout)


def test_backend_parity_compiled_vs_pure():
    if not kernel.COMPILED:
        pytest.skip("compiled kernel not available")
    args = (0.0, 11.0, 0.15, 0.1, 1.0, 1.4, 0.2, 1e-10, 1e-12, 10.0)
    vec = [0.7, -0.3, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0]
    y_c, status_c, t_c = kernel.advance(vec, *args)
    y_p, status_p, t_p = _advance_pure(vec, args)
    assert status_c == status_p
    assert t_c == pytest.approx(t_p, abs=1e-12)
    np.testing.assert_allclose(np.asarray(y_c), np.asarray(y_p),
                               rtol=1e-12, atol=1e-13)
