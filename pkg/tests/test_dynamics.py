import math

import numpy as np
import pytest

from afdo.dynamics import (MIN_INNER_PERIOD, EnergyBranch, Params, PhaseState,
                           equilibria, hamiltonian, homoclinic_orbit, period,
                           period_asymptotic, period_derivative,
                           period_inverse, potential, vector_field)


def test_params_validation():
    with pytest.raises(ValueError):
        Params(epsilon=0.1, delta=0.1, gamma=1.0, omega=0.0, beta=0.0)
    with pytest.raises(ValueError):
        Params(epsilon=-0.1, delta=0.1, gamma=1.0, omega=1.0, beta=0.0)
    with pytest.raises(ValueError):
        Params(epsilon=float("nan"), delta=0.1, gamma=1.0, omega=1.0, beta=0.0)
    p = Params(epsilon=0.1, delta=0.1, gamma=1.0, omega=2.0, beta=0.5)
    assert p.forcing_period == pytest.approx(math.pi)


def test_equilibria_and_potential():
    eqs = equilibria()
    tagged = {(s.x, s.y): tag for s, tag in eqs}
    assert tagged[(0.0, 0.0)] == "saddle"
    assert tagged[(1.0, 0.0)] == "center"
    assert tagged[(-1.0, 0.0)] == "center"
    # wells at x = +-1 with depth -1/4
    assert potential(1.0) == pytest.approx(-0.25)
    assert potential(-1.0) == pytest.approx(-0.25)
    assert potential(0.0) == 0.0


def test_vector_field_unperturbed_fixed_points():
    p = Params(epsilon=0.0, delta=0.0, gamma=0.0, omega=1.0, beta=0.0)
    for x in (-1.0, 0.0, 1.0):
        fx, fy = vector_field(PhaseState(x, 0.0), 0.3, p)
        assert fx == 0.0 and fy == pytest.approx(0.0, abs=1e-15)


def test_homoclinic_orbit_energy_and_symmetry():
    for t in np.linspace(-8.0, 8.0, 41):
        s = homoclinic_orbit(t, side="right")
        assert hamiltonian(s) == pytest.approx(0.0, abs=1e-12)
        sl = homoclinic_orbit(t, side="left")
        assert sl.x == pytest.approx(-s.x)
        assert sl.y == pytest.approx(-s.y)
    apex = homoclinic_orbit(0.0, side="right")
    assert apex.x == pytest.approx(math.sqrt(2.0))
    assert apex.y == pytest.approx(0.0)


def test_period_asymptotics_near_separatrix():
    h = 1e-4
    inner = period(-h, EnergyBranch.INNER_RIGHT)
    outer = period(h, EnergyBranch.OUTER)
    assert inner == pytest.approx(math.log(16.0 / h), rel=1e-2)
    assert outer == pytest.approx(2.0 * math.log(16.0 / h), rel=1e-2)
    assert outer / inner == pytest.approx(2.0, rel=2e-2)
    assert period_asymptotic(-h, EnergyBranch.INNER_RIGHT) == pytest.approx(
        math.log(16.0 / h))


def test_min_inner_period_at_the_well_bottom():
    # small oscillations about the center have period 2*pi/sqrt(2)
    assert period(-0.25 + 1e-10, EnergyBranch.INNER_RIGHT) == pytest.approx(
        MIN_INNER_PERIOD, rel=1e-4)


def test_period_monotone_decreasing_in_depth():
    hs = [-0.2, -0.1, -0.05, -0.01]
    ps = [period(h, EnergyBranch.INNER_RIGHT) for h in hs]
    assert all(a < b for a, b in zip(ps, ps[1:]))


def test_period_derivative_matches_finite_difference():
    for h, branch in ((-0.1, EnergyBranch.INNER_RIGHT),
                      (0.1, EnergyBranch.OUTER)):
        step = 1e-6
        fd = (period(h + step, branch) - period(h - step, branch)) / (2 * step)
        assert period_derivative(h, branch) == pytest.approx(fd, rel=1e-5)


def test_period_inverse_roundtrip():
    for tau in (5.0, 8.0, 12.0, 20.0):
        for branch in (EnergyBranch.INNER_RIGHT, EnergyBranch.OUTER):
            h = period_inverse(tau, branch)
            assert period(h, branch) == pytest.approx(tau, rel=1e-10)


def test_period_inverse_rejects_too_fast():
    with pytest.raises(ValueError):
        period_inverse(0.9 * MIN_INNER_PERIOD, EnergyBranch.INNER_RIGHT)
