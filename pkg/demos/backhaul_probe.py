"""
Probing drone backhaul during a simulated run
=============================================

Backhaul choice does not feed back into outages, so we observe it with the
per-hour hook: each evening peak, cell 0 asks whether a neighbouring drone
could relay its traffic.
"""

from collections import Counter

from dronegrid import CaseId, SimulationConfig, run_case, synth_traces
from dronegrid.simulator import default_topology
from dronegrid.backhaul import select_backhaul

config = SimulationConfig(horizon_hours=24 * 28, case_id=CaseId.OPTIMAL_REDISTRIBUTION, rng_seed=7)
topo = default_topology(config)
tally = Counter()


def probe(state, record):
    if record.hour % 24 == 20:
        d = select_backhaul(0, state, topo, config.drone_spec, terrestrial_available=True)
        tally[(d.choice.value, d.reason.value)] += 1


run_case(config, synth_traces(config), topo, on_hour=probe)
for (choice, reason), count in sorted(tally.items()):
    print(f"{choice:18s} {reason:18s} {count}")
