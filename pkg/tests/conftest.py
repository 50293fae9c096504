import numpy as np
import pytest

from dronegrid.model import DroneSpec, NetworkState, SimulationConfig, Topology, Weights
from dronegrid.simulator import default_topology
from dronegrid.traces import synth_traces


@pytest.fixture
def spec():
    return DroneSpec()


@pytest.fixture
def weights():
    return Weights()


@pytest.fixture
def pair_topo(spec):
    """Two BSs 2 km apart."""
    return Topology.from_positions([[0.0, 0.0], [2.0, 0.0]], spec)


def random_instance(rng, n=None, m=None, hi=10):
    """Small integer-valued network for oracle comparisons."""
    n = n or int(rng.choice([2, 3]))
    m = m or int(rng.choice([1, 2, 3]))
    topo = Topology.random(n, rng, DroneSpec(), extent_km=float(rng.uniform(4.0, 12.0)))
    state = NetworkState(
        hour=int(rng.integers(0, 24)),
        bs_energy=rng.integers(0, hi + 1, n),
        bs_load=rng.integers(0, hi + 1, n),
        drone_energy=rng.integers(0, hi + 1, (n, m)),
    )
    return state, topo


def random_state(rng, n, m, capacity=30.0, absent_p=0.0):
    drones = rng.uniform(0, capacity, (n, m))
    drones[rng.random((n, m)) < absent_p] = np.nan
    return NetworkState(hour=int(rng.integers(0, 1000)), bs_energy=rng.uniform(0, 100, n),
                        bs_load=rng.uniform(0, 50, n), drone_energy=drones)


@pytest.fixture(scope="session")
def default_run():
    """Default calibrated year (seed 7), all three cases, shared across tests."""
    from dronegrid.simulator import run_all_cases

    config = SimulationConfig()
    bundle = synth_traces(config)
    topo = default_topology(config)
    return config, bundle, topo, run_all_cases(config, bundle, topo)


ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[k])
