import math

import numpy as np
import pytest

from afdo.dynamics import Params
from afdo.melnikov import (RATIO_LOWER_LIMIT, Region, Side, classify_region,
                           classify_region_info, coeffs, f1, f2, flux_out,
                           melnikov, melnikov_deriv, melnikov_quadrature,
                           melnikov_zeros, omega_star, primary_thresholds)


def test_amplitude_values():
    assert f1(1.0) == pytest.approx(1.3651389006617156, rel=1e-12)
    assert f2(1.0) == pytest.approx(1.1804349447299267, rel=1e-12)
    assert f1(2.0) == pytest.approx(1.0881162199285326, rel=1e-12)
    assert f2(2.0) == pytest.approx(1.2775767329164758, rel=1e-12)


def test_amplitudes_against_quadrature():
    # the closed forms must agree with direct integration along the loop
    p = Params(epsilon=0.1, delta=0.2, gamma=1.3, omega=1.7, beta=0.4)
    for side in (Side.LEFT, Side.RIGHT):
        for t0 in (0.0, 0.7, 2.1):
            exact = melnikov(t0, side, p)
            quad = melnikov_quadrature(t0, side, p)
            assert quad == pytest.approx(exact, rel=1e-8, abs=1e-10)


def test_amplitude_overflow_safe():
    assert f1(80.0) >= 0.0
    assert f2(80.0) >= 0.0
    assert np.isfinite(f1(80.0)) and np.isfinite(f2(80.0))


def test_ratio_limit_at_low_frequency():
    assert f2(1e-4) / f1(1e-4) == pytest.approx(RATIO_LOWER_LIMIT, rel=1e-6)
    assert RATIO_LOWER_LIMIT == pytest.approx(math.sqrt(2.0) * math.pi / 6.0)


def test_melnikov_deriv_matches_fd():
    p = Params(epsilon=0.1, delta=0.2, gamma=1.0, omega=1.3, beta=0.3)
    h = 1e-6
    for t0 in (0.2, 1.1):
        fd = (melnikov(t0 + h, Side.LEFT, p)
              - melnikov(t0 - h, Side.LEFT, p)) / (2 * h)
        assert melnikov_deriv(t0, Side.LEFT, p) == pytest.approx(fd, rel=1e-6)


def test_zeros_structure():
    p = Params(epsilon=0.1, delta=0.05, gamma=1.0, omega=2.0, beta=0.0)
    zs = melnikov_zeros(Side.RIGHT, p)
    T = 2.0 * math.pi / p.omega
    assert len(zs) == 2  # two simple zeros per forcing period
    for t0, kind in zs:
        assert 0.0 <= t0 < T
        assert melnikov(t0, Side.RIGHT, p) == pytest.approx(0.0, abs=1e-10)
        assert kind == "simple"


def test_no_zeros_below_threshold():
    # damping dominates: the splitting function keeps one sign
    p = Params(epsilon=0.1, delta=1.0, gamma=0.2, omega=1.0, beta=0.0)
    assert melnikov_zeros(Side.LEFT, p) == []


def test_thresholds_symmetric_case():
    r0m, r0p = primary_thresholds(1.0, 0.0)
    assert r0m == pytest.approx(r0p)
    assert r0m == pytest.approx(4.0 / (3.0 * f1(1.0)))


def test_thresholds_order_for_positive_beta():
    r0m, r0p = primary_thresholds(1.0, 0.3)
    assert r0m < r0p  # the left loop splits first


def test_region_classification():
    # gamma/delta small -> no intersections; large -> both sides intersect
    assert classify_region(Params(epsilon=0.1, delta=1.0, gamma=0.2,
                                  omega=1.0, beta=0.1)) is Region.I
    assert classify_region(Params(epsilon=0.1, delta=0.3, gamma=1.0,
                                  omega=1.0, beta=0.1)) is Region.III
    r0m, r0p = primary_thresholds(1.0, 0.5)
    mid = 0.5 * (r0m + r0p)
    assert classify_region(Params(epsilon=0.1, delta=1.0, gamma=mid,
                                  omega=1.0, beta=0.5)) is Region.II


def test_omega_star_crossover():
    beta = 0.5
    ws = omega_star(beta)
    assert ws is not None
    assert f2(ws) / f1(ws) == pytest.approx(1.0 / beta, rel=1e-8)
    # past the crossover the right amplitude goes negative
    c = coeffs(ws * 1.5, beta)
    assert c.f1 - beta * c.f2 < 0.0


def test_flux_out_positive_part_quadrature():
    p = Params(epsilon=0.01, delta=0.3, gamma=1.0, omega=1.0, beta=0.1)
    for side in (Side.LEFT, Side.RIGHT):
        flux = flux_out(side, p)
        T = 2.0 * math.pi / p.omega
        ts = np.linspace(0.0, T, 40001)
        vals = np.array([melnikov(t, side, p) for t in ts])
        oracle = np.trapezoid(np.clip(vals, 0.0, None), ts)
        assert flux == pytest.approx(oracle, rel=1e-6)


def test_region_info_reports_tangency():
    r0m, _ = primary_thresholds(1.0, 0.2)
    p = Params(epsilon=0.1, delta=1.0, gamma=r0m, omega=1.0, beta=0.2)
    info = classify_region_info(p)
    assert info.tangency
