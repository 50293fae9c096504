"""Greedy drone-exchange planning and an exhaustive oracle for small networks.

A move sends the strongest drone of a surplus BS to a BS in deficit.  When
the recipient has no free slot, its weakest drone flies back to fill the
donor's vacated slot, so every row keeps ``m`` drones.  A move is admissible
when

* the recipient is in deficit (net < 0) and the donor is not,
* ``D - C - d0 - W > |net_recipient|`` where ``D`` is the donor's strongest
  drone, ``C`` the transit energy of the hop and ``W`` the energy of the drone
  sent back (0 if the recipient had a free slot), and
* the donor's net stays non-negative after the swap.

The guard means one admissible move always clears the recipient's deficit,
so a plan never has more moves than there are BSs in deficit.
"""

from __future__ import annotations

import csv
import io
import math
from collections import deque
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .model import HOURS_PER_DAY, DroneSpec, NetworkState, Topology, Weights
from .scoring import decision_cost, residual_after_hop, transit_energy

PLAN_HEADER = ("hour", "from", "to", "slot", "delivered", "loss", "cost_score", "returned", "return_loss")


class SearchBoundError(ValueError):
    pass


@dataclass(frozen=True)
class ExchangeMove:
    from_bs: int
    to_bs: int
    drone_slot: int
    energy_delivered: float
    transit_loss: float
    hour: int
    cost_score: float = math.nan
    returned_energy: float = 0.0  # reaches the donor
    return_loss: float = 0.0

    def __post_init__(self):
        if self.from_bs == self.to_bs:
            raise ValueError("a move needs distinct source and target BSs")
        if self.energy_delivered < 0:
            raise ValueError("delivered energy cannot be negative")

    @property
    def total_loss(self) -> float:
        return self.transit_loss + self.return_loss


@dataclass
class ExchangePlan:
    moves: list[ExchangeMove]
    post_state: NetworkState
    feasible: bool = True

    @property
    def result_count(self) -> int:
        return len(self.moves)

    @property
    def energy_delivered(self) -> float:
        return sum(mv.energy_delivered for mv in self.moves)

    @property
    def transit_loss(self) -> float:
        return sum(mv.total_loss for mv in self.moves)

    def deficit_free(self) -> bool:
        return bool(np.all(self.post_state.net() >= 0))


def feasible(state: NetworkState, spec: DroneSpec, n: int | None = None, m: int | None = None) -> bool:
    """Global precondition for any exchange: ``sum(E - X + D) > n * d0 * m``."""
    n = state.n if n is None else n
    m = state.m if m is None else m
    total = float(state.bs_energy.sum() - state.bs_load.sum() + np.nansum(state.drone_energy))
    return total > n * spec.d0 * m


def sort_row(row: np.ndarray) -> np.ndarray:
    """Ascending with absent (NaN) slots first, so the last slot is the strongest drone."""
    present = np.sort(row[~np.isnan(row)])
    out = np.full(row.shape, np.nan)
    if present.size:
        out[row.size - present.size:] = present
    return out


def sort_drone_rows(state: NetworkState) -> NetworkState:
    drones = np.array([sort_row(r) for r in state.drone_energy]).reshape(state.drone_energy.shape)
    return state.evolve(drone_energy=drones)


@dataclass
class _Candidate:
    donor: int
    recipient: int
    drone: float
    transit: float
    recipient_slot: int
    returned: float | None  # energy of the drone sent back, before its flight
    return_loss: float

    @property
    def delivered(self) -> float:
        return self.drone - self.transit

    @property
    def recipient_gain(self) -> float:
        return self.delivered - (self.returned or 0.0)

    @property
    def donor_change(self) -> float:
        back = 0.0 if self.returned is None else self.returned - self.return_loss
        return back - self.drone


class _Workspace:
    """Mutable copy of the network used while a plan is being built."""

    def __init__(self, state: NetworkState, topo: Topology, spec: DroneSpec):
        self.topo = topo
        self.spec = spec
        self.hour = state.hour
        self.energy = np.array(state.bs_energy)
        self.load = np.array(state.bs_load)
        self.power = np.array(state.bs_power)
        self.drones = np.array([sort_row(r) for r in state.drone_energy]).reshape(state.drone_energy.shape)

    def net(self) -> np.ndarray:
        return self.energy + np.nansum(self.drones, axis=1) - self.load

    def state(self) -> NetworkState:
        return NetworkState(hour=self.hour, bs_energy=self.energy, bs_load=self.load,
                            drone_energy=self.drones, bs_power=self.power)

    def candidate(self, donor: int, recipient: int, net: np.ndarray) -> _Candidate | None:
        """The donor's strongest drone sent to ``recipient``, if admissible."""
        if net[recipient] >= 0 or net[donor] < 0:
            return None
        drone = self.drones[donor, -1]
        if math.isnan(drone):
            return None
        row = self.drones[recipient]
        transit = transit_energy(donor, recipient, self.topo, self.spec)
        if math.isnan(row[0]):
            slot, returned, return_loss = 0, None, 0.0
        else:
            slot, returned = 0, float(row[0])
            return_loss = min(returned, transit_energy(recipient, donor, self.topo, self.spec))
        cand = _Candidate(donor, recipient, float(drone), transit, slot, returned, return_loss)
        if not cand.drone - cand.transit - self.spec.d0 - (returned or 0.0) > -net[recipient]:
            return None
        if net[donor] + cand.donor_change < 0:
            return None
        return cand

    def apply(self, c: _Candidate) -> None:
        m = self.drones.shape[1]
        self.drones[c.donor, m - 1] = math.nan if c.returned is None else c.returned - c.return_loss
        self.drones[c.recipient, c.recipient_slot] = c.delivered
        self.drones[c.donor] = sort_row(self.drones[c.donor])
        self.drones[c.recipient] = sort_row(self.drones[c.recipient])


def _deficits(net: np.ndarray) -> list[int]:
    return [int(i) for i in np.argsort(net, kind="stable") if net[i] < 0]


def _donors(net: np.ndarray) -> list[int]:
    return [int(i) for i in np.argsort(-net, kind="stable") if net[i] >= 0]


def plan_exchanges(
    state: NetworkState,
    topo: Topology,
    spec: DroneSpec,
    w: Weights,
    hour: int | None = None,
) -> ExchangePlan:
    """Greedy max-surplus to max-deficit drone exchanges for one hour.

    The deepest deficit is served first by the highest-net donor whose
    strongest drone passes the guard (ties go to the lowest BS index).  If no
    donor can serve it, the next deficit is tried.  Stops when no deficit is
    left or none can be served.
    """
    hour = state.hour if hour is None else hour
    if not feasible(state, spec):
        return ExchangePlan(moves=[], post_state=state, feasible=False)

    ws = _Workspace(state, topo, spec)
    moves: list[ExchangeMove] = []
    residual = lambda dist, e: residual_after_hop(dist, e, spec)  # noqa: E731
    m = ws.drones.shape[1]
    while True:
        net = ws.net()
        chosen = None
        for r in _deficits(net):
            for k in _donors(net):
                if k != r:
                    chosen = ws.candidate(k, r, net)
                if chosen:
                    break
            if chosen:
                break
        if chosen is None:
            break
        # drone d sits in the donor's last slot; score the pair before the swap
        cost = decision_cost(chosen.recipient, chosen.donor, hour % HOURS_PER_DAY, m - 1,
                             ws.state(), topo, w, residual)
        ws.apply(chosen)
        moves.append(ExchangeMove(
            from_bs=chosen.donor, to_bs=chosen.recipient, drone_slot=m - 1,
            energy_delivered=chosen.delivered, transit_loss=chosen.transit, hour=hour,
            cost_score=cost,
            returned_energy=0.0 if chosen.returned is None else chosen.returned - chosen.return_loss,
            return_loss=chosen.return_loss,
        ))
    return ExchangePlan(moves=moves, post_state=ws.state())


@dataclass
class OracleResult:
    plan: ExchangePlan | None
    explored: int = 0

    @property
    def found(self) -> bool:
        return self.plan is not None


ORACLE_MAX_N = 4
ORACLE_MAX_M = 3
ORACLE_MAX_MOVES = 6


def oracle_plan(state: NetworkState, topo: Topology, spec: DroneSpec, max_moves: int = ORACLE_MAX_MOVES) -> OracleResult:
    """Breadth-first search over every admissible move sequence.

    Applies the move rule and global feasibility gate described in the module
    docstring, written independently of :func:`plan_exchanges` on plain
    tuples (each row is a multiset of drone energies plus a count of free
    slots).  Returns a deficit-clearing sequence with the fewest moves, or
    ``plan=None`` if none exists within ``max_moves``.
    """
    n, m = state.n, state.m
    if n > ORACLE_MAX_N or m > ORACLE_MAX_M or max_moves > ORACLE_MAX_MOVES:
        raise SearchBoundError(
            f"oracle limited to n<={ORACLE_MAX_N}, m<={ORACLE_MAX_M}, max_moves<={ORACLE_MAX_MOVES}; "
            f"got n={n}, m={m}, max_moves={max_moves}")
    base = [float(e) - float(x) for e, x in zip(state.bs_energy, state.bs_load)]
    rows = tuple(
        (sum(1 for v in row if math.isnan(v)), tuple(sorted(float(v) for v in row if not math.isnan(v))))
        for row in state.drone_energy
    )

    def nets(rs):
        return [base[i] + sum(rs[i][1]) for i in range(n)]

    def to_state(rs) -> NetworkState:
        drones = [[math.nan] * free + list(present) for free, present in rs]
        return NetworkState(hour=state.hour, bs_energy=state.bs_energy, bs_load=state.bs_load,
                            drone_energy=drones, bs_power=state.bs_power)

    if all(v >= 0 for v in nets(rows)):
        return OracleResult(ExchangePlan(moves=[], post_state=to_state(rows)), explored=1)
    total = sum(base) + sum(sum(p) for _, p in rows)
    if not total > n * spec.d0 * m:
        return OracleResult(None, explored=1)

    per_km = spec.loss_per_km
    queue = deque([(rows, ())])
    seen = {rows}
    explored = 0
    while queue:
        rs, path = queue.popleft()
        explored += 1
        if len(path) >= max_moves:
            continue
        net = nets(rs)
        for r in range(n):
            if net[r] >= 0:
                continue
            for k in range(n):
                if k == r or net[k] < 0 or not rs[k][1]:
                    continue
                strongest = rs[k][1][-1]
                hop = per_km * float(topo.distance[k, r]) if k != r else 0.0
                free_r, present_r = rs[r]
                if free_r:
                    weakest, back_loss = None, 0.0
                else:
                    weakest = present_r[0]
                    back_loss = min(weakest, per_km * float(topo.distance[r, k]))
                if not strongest - hop - spec.d0 - (weakest or 0.0) > -net[r]:
                    continue
                back = 0.0 if weakest is None else weakest - back_loss
                if net[k] - strongest + back < 0:
                    continue
                donor_present = list(rs[k][1][:-1])
                donor_free = rs[k][0]
                if weakest is None:
                    donor_free += 1
                    new_r = (free_r - 1, tuple(sorted([*present_r, strongest - hop])))
                else:
                    donor_present.append(back)
                    new_r = (0, tuple(sorted([*present_r[1:], strongest - hop])))
                child = list(rs)
                child[k] = (donor_free, tuple(sorted(donor_present)))
                child[r] = new_r
                child = tuple(child)
                if child in seen:
                    continue
                seen.add(child)
                mv = ExchangeMove(from_bs=k, to_bs=r, drone_slot=m - 1, energy_delivered=strongest - hop,
                                  transit_loss=hop, hour=state.hour, returned_energy=back,
                                  return_loss=back_loss)
                if all(v >= 0 for v in nets(child)):
                    return OracleResult(ExchangePlan(moves=[*path, mv], post_state=to_state(child)), explored)
                queue.append((child, (*path, mv)))
    return OracleResult(None, explored)


def plan_to_csv(moves: Iterable[ExchangeMove]) -> str:
    """Line-oriented plan text, one move per row, floats in round-trip ``repr`` form."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(PLAN_HEADER)
    for mv in moves:
        writer.writerow([mv.hour, mv.from_bs, mv.to_bs, mv.drone_slot, repr(mv.energy_delivered),
                         repr(mv.transit_loss), repr(mv.cost_score), repr(mv.returned_energy),
                         repr(mv.return_loss)])
    return buf.getvalue()


def plan_from_csv(text: str) -> list[ExchangeMove]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or tuple(header) != PLAN_HEADER:
        raise ValueError(f"plan header must be {','.join(PLAN_HEADER)}")
    moves = []
    for lineno, row in enumerate(reader, start=2):
        if len(row) != len(PLAN_HEADER):
            raise ValueError(f"line {lineno}: expected {len(PLAN_HEADER)} fields, got {len(row)}")
        moves.append(ExchangeMove(
            hour=int(row[0]), from_bs=int(row[1]), to_bs=int(row[2]), drone_slot=int(row[3]),
            energy_delivered=float(row[4]), transit_loss=float(row[5]), cost_score=float(row[6]),
            returned_energy=float(row[7]), return_loss=float(row[8])))
    return moves
