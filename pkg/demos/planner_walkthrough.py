"""
One hour of the greedy planner, by hand
=======================================

Two cells 2 km apart.  Cell 0 is 3 Wh short, cell 1 holds a 6 Wh drone
and spare battery.  We follow the swap the planner makes and check it
against the exhaustive search.
"""

from dronegrid import DroneSpec, NetworkState, Topology, Weights
from dronegrid.planner import feasible, oracle_plan, plan_exchanges, plan_to_csv

spec = DroneSpec()
topo = Topology.from_positions([[0.0, 0.0], [2.0, 0.0]], spec)
state = NetworkState(hour=12, bs_energy=[0, 4], bs_load=[3, 0], drone_energy=[[0.0], [6.0]])

print("net per BS:", state.net())
print("network has enough energy overall:", feasible(state, spec))

###############################################################################
# The donor's strongest drone flies over (losing 1 Wh on the way) and the
# recipient's weakest drone flies back so every slot stays filled.
# The move is allowed because 6 - 1 - 1 - 0 = 4 exceeds the 3 Wh deficit.

plan = plan_exchanges(state, topo, spec, Weights())
print(plan_to_csv(plan.moves), end="")
print("net after:", plan.post_state.net())

###############################################################################
# Breadth-first search over all admissible moves agrees: one move suffices.

found = oracle_plan(state, topo, spec)
print("oracle moves:", len(found.plan.moves), "states explored:", found.explored)

###############################################################################
# A deeper deficit cannot be covered by a single 6 Wh drone, and neither
# search finds a way.

deep = state.evolve(bs_load=[5, 0])
print("deep deficit plan:", plan_exchanges(deep, topo, spec, Weights()).result_count, "moves;",
      "oracle found:", oracle_plan(deep, topo, spec).found)
