import math

import numpy as np
import pytest

from afdo import manifolds, melnikov, smf
from afdo.dynamics import Params, PhaseState, hamiltonian
from afdo.integrate import poincare_step

TANGLE_P = Params(epsilon=0.15, delta=0.05, gamma=1.0, omega=2.0, beta=0.0)


@pytest.fixture(scope="module")
def tangle():
    U = manifolds.grow_manifold("unstable", "right", TANGLE_P, arc_budget=9.0)
    S = manifolds.grow_manifold("stable", "right", TANGLE_P, arc_budget=9.0)
    return U, S


def test_unperturbed_curve_lies_on_separatrix():
    p = Params(epsilon=0.0, delta=0.3, gamma=1.0, omega=1.0, beta=0.0)
    cur = manifolds.grow_manifold("unstable", "right", p, arc_budget=4.0)
    h = [abs(hamiltonian(PhaseState(x, y))) for x, y in cur.points]
    assert max(h) <= 1e-6
    assert cur.points[0] @ cur.points[0] < 1e-12  # starts at the saddle


def test_unforced_damped_branch_spirals_into_sink():
    p = Params(epsilon=1.0, delta=0.3, gamma=0.0, omega=1.0, beta=0.0)
    cur = manifolds.grow_manifold("unstable", "right", p, arc_budget=10.0)
    dists = np.hypot(cur.points[:, 0] - 1.0, cur.points[:, 1])
    assert dists[-1] < 1e-6
    assert dists.min() < 1e-6


def _distance_to_polyline(pt, pts):
    a = pts[:-1]
    b = pts[1:]
    ab = b - a
    denom = np.einsum("ij,ij->i", ab, ab)
    denom[denom == 0.0] = 1e-300
    t = np.clip(np.einsum("ij,ij->i", pt - a, ab) / denom, 0.0, 1.0)
    proj = a + t[:, None] * ab
    return np.min(np.hypot(*(pt - proj).T))


def test_curve_invariance_under_the_map(tangle):
    U, _ = tangle
    # only points whose image stays within the grown portion of the curve
    inside = np.nonzero(U.u < U.u[-1] - 1.0)[0]
    idx = np.linspace(10, inside[-1], 12, dtype=int)
    for i in idx:
        s = poincare_step(PhaseState(*U.points[i]), 0.0, TANGLE_P)
        d = _distance_to_polyline(np.array([s.x, s.y]), U.points)
        assert d < 2e-3


def test_region_two_has_one_sided_tangle():
    p = Params(epsilon=0.05, delta=1.0, gamma=1.1, omega=1.0, beta=0.5)
    assert melnikov.classify_region(p) is melnikov.Region.II
    Ul = manifolds.grow_manifold("unstable", "left", p, arc_budget=9.0)
    Sl = manifolds.grow_manifold("stable", "left", p, arc_budget=9.0)
    assert len(manifolds.find_pips(Ul, Sl)) > 0
    Ur = manifolds.grow_manifold("unstable", "right", p, arc_budget=9.0)
    Sr = manifolds.grow_manifold("stable", "right", p, arc_budget=9.0)
    assert manifolds.find_pips(Ur, Sr) == []


def test_pips_ordered_and_transverse(tangle):
    pips = manifolds.find_pips(*tangle)
    assert len(pips) >= 6
    u_arcs = [q.u_arc for q in pips]
    s_arcs = [q.s_arc for q in pips]
    assert u_arcs == sorted(u_arcs)
    assert s_arcs == sorted(s_arcs, reverse=True)  # Pareto frontier
    assert not any(q.tangential for q in pips)


def test_lobe_area_contraction(tangle):
    U, S = tangle
    pips = manifolds.find_pips(U, S)
    lobes = manifolds.extract_lobes(U, S, pips)
    ratio = math.exp(-TANGLE_P.epsilon * TANGLE_P.delta
                     * TANGLE_P.forcing_period)
    # the map sends each lobe two positions down the chain
    for k in range(1, len(lobes) - 3):
        measured = lobes[k + 2].area / lobes[k].area
        assert measured == pytest.approx(ratio, rel=1e-2)
    # and mapping a boundary directly shows the same contraction
    img = manifolds.map_polyline(lobes[2].boundary, 1, TANGLE_P)
    from afdo.geometry import shoelace_area
    assert shoelace_area(img) / lobes[2].area == pytest.approx(ratio, rel=1e-2)


def test_measured_index_matches_prediction(tangle):
    U, S = tangle
    ts = manifolds.turnstile_lobes(U, S, TANGLE_P)
    assert ts is not None
    assert ts["inner"].kind == "inner"
    assert ts["outer"].kind == "outer"
    j = manifolds.first_transit_index(ts["inner"], ts["preceding_outer"],
                                      TANGLE_P, cap=4)
    assert j == smf.structural_indices(TANGLE_P).l_rr == 1


def test_intersection_count_even(tangle):
    U, S = tangle
    ts = manifolds.turnstile_lobes(U, S, TANGLE_P)
    boundary = manifolds.map_polyline(ts["inner"].boundary, 1, TANGLE_P)
    n = manifolds.count_lobe_intersections(boundary,
                                           ts["preceding_outer"].boundary)
    assert n >= 2 and n % 2 == 0


def test_splitting_energy_matches_melnikov_prediction():
    p = Params(epsilon=0.01, delta=0.3, gamma=1.0, omega=1.0, beta=0.1)
    theta = 1.0
    measured = manifolds.splitting_energy("right", theta, p)
    predicted = p.epsilon * melnikov.melnikov(theta / p.omega,
                                              melnikov.Side.RIGHT, p)
    assert measured == pytest.approx(predicted, rel=0.03)
