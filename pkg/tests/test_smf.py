import math

import numpy as np
import pytest

from afdo import smf
from afdo.dynamics import MIN_INNER_PERIOD, Params
from afdo.smf import Pair


SHAPE = Params(epsilon=0.1, delta=0.05, gamma=1.0, omega=2.0, beta=0.5)
SYM = Params(epsilon=0.1, delta=0.05, gamma=1.0, omega=2.0, beta=0.0)


def refine(pair, ell, shape, branch_i=1):
    seed = smf.seed_point(pair, ell, branch_i, shape)
    return smf.refine_secondary_bifurcation(seed, pair, ell, shape,
                                            branch_i=branch_i)


def test_refined_point_is_a_tangency():
    bif = refine(Pair.LL, 1, SHAPE)
    assert bif.refined
    # zero of the secondary splitting function ...
    val = smf.smf_value(bif.t0, bif.epsilon, Pair.LL, SHAPE)
    assert val == pytest.approx(0.0, abs=1e-8)
    # ... that is also stationary in t0 (a tangency, not a crossing)
    h = 1e-7
    d = (smf.smf_value(bif.t0 + h, bif.epsilon, Pair.LL, SHAPE)
         - smf.smf_value(bif.t0 - h, bif.epsilon, Pair.LL, SHAPE)) / (2 * h)
    assert d == pytest.approx(0.0, abs=1e-5)


def test_transition_number_matches_requested():
    for pair in (Pair.LL, Pair.LR):
        for ell in (1, 2):
            bif = refine(pair, ell, SHAPE)
            assert bif.transition_j == ell
            assert smf.transition_number(bif.t0, bif.epsilon, pair,
                                         SHAPE) == ell


def test_branch_ordering():
    lo = refine(Pair.LR, 1, SHAPE, branch_i=1)
    hi = refine(Pair.LR, 1, SHAPE, branch_i=2)
    assert lo.epsilon < hi.epsilon


def test_larger_transition_smaller_epsilon():
    e1 = refine(Pair.LR, 1, SHAPE).epsilon
    e2 = refine(Pair.LR, 2, SHAPE).epsilon
    assert e2 < e1


def test_symmetric_forcing_pairs_coincide():
    assert refine(Pair.LL, 1, SYM).epsilon == pytest.approx(
        refine(Pair.RR, 1, SYM).epsilon, rel=1e-9)
    assert refine(Pair.LR, 1, SYM).epsilon == pytest.approx(
        refine(Pair.RL, 1, SYM).epsilon, rel=1e-9)


def test_seed_approximates_refined_point():
    bif = refine(Pair.LR, 1, SHAPE)
    t0_seed, eps_seed = smf.seed_point(Pair.LR, 1, 1, SHAPE)
    assert eps_seed == pytest.approx(bif.epsilon, rel=0.5)
    assert abs(t0_seed - bif.t0) < 0.5


def test_lower_bound_dominance():
    for pair in (Pair.LL, Pair.LR, Pair.RL):
        for ell in (1, 2):
            bif = refine(pair, ell, SHAPE)
            lb = smf.lower_bound_epsilon(pair, ell, SHAPE)
            assert 0.0 < lb < bif.epsilon
            approx = smf.lower_bound_epsilon(pair, ell, SHAPE, exact=False)
            assert approx == pytest.approx(lb, rel=0.35)


def test_resonance_flag_for_fast_forcing():
    # at omega = 2 the forcing period is below the fastest interior orbit,
    # so a same-side transition-0 point cannot avoid the resonance zone
    seed = smf.seed_point(Pair.LL, 0, 1, SHAPE)
    point = smf.unrefined_point(seed, Pair.LL, 0, SHAPE, 1)
    assert point.resonance_flag
    assert not point.refined
    assert smf.resonance_unreliable(point, SHAPE)
    assert not smf.resonance_unreliable(refine(Pair.LL, 1, SHAPE), SHAPE)


def test_bifurcation_curve_sweep():
    omegas = np.linspace(1.6, 2.4, 5)
    points = smf.bifurcation_curve(Pair.LR, 1, 1, omegas, SYM)
    assert len(points) == 5
    for pt in points:
        assert pt.bifurcation is not None and pt.bifurcation.refined
        assert pt.lower_bound < pt.bifurcation.epsilon
    eps = [pt.bifurcation.epsilon for pt in points]
    assert all(a < b for a, b in zip(eps, eps[1:]))  # grows with omega


def test_structural_indices_against_curve_values():
    p = Params(epsilon=0.08, delta=0.05, gamma=1.0, omega=2.0, beta=0.5)
    idx = smf.structural_indices(p)
    assert idx.l_ll == 1
    assert idx.l_lr == 2
    assert idx.l_rl == 2
    assert idx.l_rr == 2
    # coherence with the curve: epsilon sits between the two curve levels
    assert refine(Pair.LL, 1, p).epsilon < p.epsilon
    assert refine(Pair.LR, 2, p).epsilon < p.epsilon < refine(
        Pair.LR, 1, p).epsilon


def test_structural_indices_symmetric():
    p = Params(epsilon=0.05, delta=0.05, gamma=1.0, omega=2.0, beta=0.0)
    idx = smf.structural_indices(p)
    assert idx.l_ll == idx.l_rr
    assert idx.l_lr == idx.l_rl
