import math
from fractions import Fraction

import numpy as np
import pytest

from dronegrid.model import DroneSpec, NetworkState, Topology, Weights
from dronegrid.scoring import (
    AbsentDroneError,
    SameNodeError,
    decision_cost,
    load_transfer,
    residual_after_hop,
    score,
    traffic_loading,
    transit_energy,
)

from .conftest import random_state


def chain_fixture():
    """E_i=10, D_ij=2 km, P_i=1, C_ij=2 at price 1, drone at BS j with 5 Wh (residual 4), Pi=1."""
    topo = Topology(positions=[[0, 0], [2, 0]], distance=[[0, 2], [2, 0]],
                    transfer_cost=[[0, 2], [2, 0]], success_prob=np.ones((2, 2)))
    state = NetworkState(hour=0, bs_energy=[10, 0], bs_load=[1, 0], drone_energy=[[0.0], [5.0]])
    return state, topo, Weights(price_by_hour=(1.0,) * 24)


def test_chain_matches_exact_arithmetic():
    state, topo, w = chain_fixture()
    F = Fraction
    # exact rational evaluation of the three formulas
    L = F(7, 10) * 10 + F(3, 10) * 2 + F(8, 10) * 1
    T = F(1, 2) * L + F(1, 2) * 2 - F(6, 10) * 4
    cost = F(3, 10) * T + F(7, 10) * 1 + F(4, 10) * 1
    assert (L, T, cost) == (F(42, 5), F(14, 5), F(97, 50))

    assert load_transfer(0, 1, state, topo, w) == pytest.approx(8.4, abs=1e-12)
    assert traffic_loading(0, 1, 0, 0, state, topo, w) == pytest.approx(2.8, abs=1e-12)
    assert decision_cost(0, 1, 0, 0, state, topo, w) == pytest.approx(1.94, abs=1e-12)
    s = score(0, 1, 0, 0, state, topo, w)
    assert (s.load_transfer, s.traffic_loading, s.decision_cost) == pytest.approx((8.4, 2.8, 1.94), abs=1e-12)


def test_same_node_and_absent_drone_errors():
    state, topo, w = chain_fixture()
    with pytest.raises(SameNodeError):
        load_transfer(1, 1, state, topo, w)
    empty = state.evolve(drone_energy=[[0.0], [math.nan]])
    with pytest.raises(AbsentDroneError):
        traffic_loading(0, 1, 0, 0, empty, topo, w)
    with pytest.raises(AbsentDroneError):
        decision_cost(0, 1, 0, 0, empty, topo, w)


def _pairs(rng, n):
    i, j = rng.choice(n, size=2, replace=False)
    return int(i), int(j)


def test_coefficient_collapse_identities_on_random_states():
    rng = np.random.default_rng(2024)
    spec = DroneSpec()
    for _ in range(1000):
        n, m = int(rng.integers(2, 6)), int(rng.integers(1, 5))
        topo = Topology.random(n, rng, spec)
        state = random_state(rng, n, m)
        i, j = _pairs(rng, n)
        h, d = int(rng.integers(0, 24)), int(rng.integers(0, m))
        prices = tuple(rng.uniform(0, 3, 24))
        base = dict(price_by_hour=prices)
        e_i, dist = state.bs_energy[i], topo.distance[i, j]

        assert load_transfer(i, j, state, topo, Weights(alpha=1, zeta=0, **base)) == e_i
        assert load_transfer(i, j, state, topo, Weights(alpha=0, zeta=0, **base)) == dist
        zero = state.evolve(bs_energy=np.where(np.arange(n) == i, 0.0, state.bs_energy),
                            bs_power=np.where(np.arange(n) == i, 0.0, state.bs_power))
        assert load_transfer(i, j, zero, topo, Weights(alpha=0, **base)) == dist

        w = Weights(alpha=float(rng.uniform()), zeta=float(rng.uniform(0, 2)), beta=1, delta=0, **base)
        assert traffic_loading(i, j, h, d, state, topo, w) == load_transfer(i, j, state, topo, w)
        w = Weights(beta=0, delta=0, **base)
        assert traffic_loading(i, j, h, d, state, topo, w) == topo.transfer_cost[i, j] * prices[h]

        w = Weights(gamma=1, epsilon=0, beta=float(rng.uniform()), **base)
        assert decision_cost(i, j, h, d, state, topo, w) == traffic_loading(i, j, h, d, state, topo, w)
        w = Weights(gamma=0, epsilon=0, **base)
        assert decision_cost(i, j, h, d, state, topo, w) == prices[h]


def test_load_transfer_monotone():
    rng = np.random.default_rng(5)
    spec = DroneSpec()
    for _ in range(200):
        topo = Topology.random(3, rng, spec)
        state = random_state(rng, 3, 2)
        w = Weights(alpha=float(rng.uniform(0.01, 0.99)), zeta=float(rng.uniform(0.01, 2)))
        base = load_transfer(0, 1, state, topo, w)
        more_e = state.evolve(bs_energy=state.bs_energy + np.array([1.0, 0, 0]))
        more_p = state.evolve(bs_power=state.bs_power + np.array([1.0, 0, 0]))
        assert load_transfer(0, 1, more_e, topo, w) > base
        assert load_transfer(0, 1, more_p, topo, w) > base
        far = Topology.from_positions(topo.positions * 2, spec)
        assert load_transfer(0, 1, state, far, w) > load_transfer(0, 1, state, topo, w)


def test_transit_energy_anchor(spec, pair_topo):
    assert transit_energy(0, 1, pair_topo, spec) == 1.0
    assert transit_energy(1, 0, pair_topo, spec) == 1.0
    assert transit_energy(0, 0, pair_topo, spec) == 0.0
    four = Topology.from_positions([[0, 0], [4, 0]], spec)
    assert transit_energy(0, 1, four, spec) == 2.0


def test_transit_energy_symmetric_and_above_d0():
    rng = np.random.default_rng(9)
    spec = DroneSpec()
    for _ in range(100):
        n = int(rng.integers(2, 7))
        topo = Topology.random(n, rng, spec)
        for i in range(n):
            for j in range(n):
                assert transit_energy(i, j, topo, spec) == transit_energy(j, i, topo, spec)
                if i != j:
                    assert transit_energy(i, j, topo, spec) >= spec.d0


def test_residual_function():
    assert residual_after_hop(2.0, 5.0) == 4.0
    assert residual_after_hop(100.0, 5.0) == 0.0
