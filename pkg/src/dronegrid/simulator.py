"""Hour-by-hour simulation of the three evaluation cases.

Each hour: solar intake and drone charging, case-specific support, then the
load is served from the BS battery and (when allowed) the BS's own docked
drones.  Load that cannot be served is dropped and the BS-hour counts as an
outage.
"""

from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .charging import charge_hour
from .model import CaseId, NetworkState, SimulationConfig, Topology
from .planner import ExchangeMove, plan_exchanges
from .traces import TraceBundle

HOURS_PER_WEEK = 168
TOPOLOGY_STREAM = 2  # rng stream id for the default site layout


class EndOfHorizon(Exception):
    pass


@dataclass
class HourRecord:
    hour: int
    per_bs_net: np.ndarray  # after charging and exchanges, before serving load
    outages: frozenset[int]
    moves: list[ExchangeMove]
    energy_transferred: float
    grid_import: float
    solar_in: float = 0.0
    spilled: float = 0.0
    load_demanded: float = 0.0
    load_served: float = 0.0
    transit_loss: float = 0.0
    drone_support: float = 0.0
    energy_before: float = 0.0
    energy_after: float = 0.0
    served_by_bs: np.ndarray | None = None
    load_by_bs: np.ndarray | None = None
    pre_exchange_net: np.ndarray | None = None  # after charging, before any exchange

    def balance_error(self) -> float:
        """Stored-energy change minus the flows that explain it (zero when energy is conserved)."""
        expected = self.solar_in - self.spilled + self.grid_import - self.load_served - self.transit_loss
        return (self.energy_after - self.energy_before) - expected


def drain_row(row: np.ndarray, need: float) -> tuple[np.ndarray, float]:
    """Take up to ``need`` Wh from present drones, weakest first."""
    out = row.copy()
    remaining = need
    for j in np.argsort(np.nan_to_num(row, nan=np.inf), kind="stable"):
        if remaining <= 0:
            break
        e = out[j]
        if np.isnan(e) or e <= 0:
            continue
        take = min(e, remaining)
        out[j] = e - take
        remaining -= take
    return out, need - remaining


def default_topology(config: SimulationConfig) -> Topology:
    rng = np.random.default_rng([config.rng_seed, TOPOLOGY_STREAM])
    return Topology.random(config.n, rng, config.drone_spec)


def initial_state(config: SimulationConfig) -> NetworkState:
    return NetworkState.initial(config.n, config.m, config.drone_spec, config.initial_bs_energy)


def step(
    state: NetworkState,
    bundle: TraceBundle,
    config: SimulationConfig,
    topo: Topology,
) -> tuple[NetworkState, HourRecord]:
    hour = state.hour
    if hour >= min(bundle.horizon_hours, config.horizon_hours):
        raise EndOfHorizon(hour)
    before = state.total_energy()
    solar = bundle.solar_at(hour)
    load = bundle.load_at(hour)

    state = state.evolve(bs_load=load, bs_power=load)
    state, flows = charge_hour(state, solar, load, config.charging_policy, config.drone_spec, hour,
                               config.bs_capacity)

    moves: list[ExchangeMove] = []
    case = config.case_id
    pre_net = state.net()
    if case is CaseId.OPTIMAL_REDISTRIBUTION and np.any(state.net() < 0):
        plan = plan_exchanges(state, topo, config.drone_spec, config.weights, hour)
        moves = plan.moves
        state = plan.post_state
    net = state.net()

    battery = np.array(state.bs_energy)
    drones = np.array(state.drone_energy)
    served = np.array(load, dtype=float)
    outages = []
    support = 0.0
    for i in range(state.n):
        need = load[i] - battery[i]
        if need <= 0:
            battery[i] -= load[i]
            continue
        taken = 0.0
        if case is not CaseId.BASELINE:
            drones[i], taken = drain_row(drones[i], need)
            support += taken
        battery[i] = 0.0
        unmet = need - taken
        if unmet > 0:
            outages.append(i)
            served[i] = load[i] - unmet

    nxt = NetworkState(hour=hour + 1, bs_energy=battery, bs_load=load, drone_energy=drones, bs_power=load)
    transit = sum(mv.total_loss for mv in moves)
    record = HourRecord(
        hour=hour, per_bs_net=net, outages=frozenset(outages), moves=moves,
        energy_transferred=sum(mv.energy_delivered for mv in moves), grid_import=flows.grid_import,
        solar_in=flows.solar_in, spilled=flows.spilled, load_demanded=float(np.sum(load)),
        load_served=float(served.sum()), transit_loss=transit, drone_support=support,
        energy_before=before, energy_after=nxt.total_energy(), served_by_bs=served, load_by_bs=np.array(load),
        pre_exchange_net=pre_net,
    )
    return nxt, record


@dataclass
class MetricsReport:
    case: CaseId
    weekly_outages: np.ndarray  # (weeks, n) outage BS-hours
    weekly_exchanges: np.ndarray  # (weeks,)
    total_outages: int
    total_energy_transferred: float
    total_grid_import: float
    runtime_ms: float = 0.0
    total_transit_loss: float = 0.0
    total_unmet_energy: float = 0.0
    moves: list[ExchangeMove] = field(default_factory=list)
    records: list[HourRecord] | None = None

    @property
    def n(self) -> int:
        return self.weekly_outages.shape[1]

    @property
    def weeks(self) -> int:
        return self.weekly_outages.shape[0]

    @property
    def total_exchanges(self) -> int:
        return int(self.weekly_exchanges.sum())

    def mean_weekly_outages(self) -> float:
        return self.total_outages / self.weeks

    def reduction_vs(self, baseline: MetricsReport) -> float:
        """Percent fewer outages than ``baseline`` (0 when the baseline has none)."""
        if baseline.total_outages == 0:
            return 0.0
        return 100.0 * (baseline.total_outages - self.total_outages) / baseline.total_outages

    def to_dict(self) -> dict:
        """Deterministic summary; runtime is left out so repeated runs compare equal."""
        return {
            "case": self.case.value,
            "n": self.n,
            "weeks": self.weeks,
            "total_outages": int(self.total_outages),
            "total_exchanges": self.total_exchanges,
            "total_energy_transferred_wh": float(self.total_energy_transferred),
            "total_grid_import_wh": float(self.total_grid_import),
            "total_transit_loss_wh": float(self.total_transit_loss),
            "total_unmet_energy_wh": float(self.total_unmet_energy),
            "weekly_outages": self.weekly_outages.astype(int).tolist(),
            "weekly_exchanges": self.weekly_exchanges.astype(int).tolist(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> MetricsReport:
        return cls(
            case=CaseId.parse(data["case"]),
            weekly_outages=np.array(data["weekly_outages"], dtype=int).reshape(data["weeks"], data["n"]),
            weekly_exchanges=np.array(data["weekly_exchanges"], dtype=int),
            total_outages=int(data["total_outages"]),
            total_energy_transferred=float(data["total_energy_transferred_wh"]),
            total_grid_import=float(data["total_grid_import_wh"]),
            total_transit_loss=float(data["total_transit_loss_wh"]),
            total_unmet_energy=float(data["total_unmet_energy_wh"]),
        )

    @classmethod
    def from_json(cls, text: str) -> MetricsReport:
        return cls.from_dict(json.loads(text))

    def weekly_outages_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["week", "bs", "outages"])
        for week, row in enumerate(self.weekly_outages):
            for bs, count in enumerate(row):
                w.writerow([week, bs, int(count)])
        return buf.getvalue()

    def weekly_exchanges_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["week", "exchanges"])
        for week, count in enumerate(self.weekly_exchanges):
            w.writerow([week, int(count)])
        return buf.getvalue()


def read_weekly_outages_csv(text: str) -> np.ndarray:
    rows = list(csv.DictReader(io.StringIO(text)))
    weeks = 1 + max(int(r["week"]) for r in rows)
    n = 1 + max(int(r["bs"]) for r in rows)
    out = np.zeros((weeks, n), dtype=int)
    for r in rows:
        out[int(r["week"]), int(r["bs"])] = int(r["outages"])
    return out


def read_weekly_exchanges_csv(text: str) -> np.ndarray:
    rows = list(csv.DictReader(io.StringIO(text)))
    out = np.zeros(len(rows), dtype=int)
    for r in rows:
        out[int(r["week"])] = int(r["exchanges"])
    return out


def run_case(
    config: SimulationConfig,
    bundle: TraceBundle,
    topo: Topology | None = None,
    keep_records: bool = False,
    on_hour: Callable[[NetworkState, HourRecord], None] | None = None,
) -> MetricsReport:
    """Simulate ``config.horizon_hours`` hours and aggregate per 168-hour week.

    ``on_hour(next_state, record)`` is called after every hour, e.g. to probe
    backhaul decisions; it cannot alter the run.
    """
    t0 = time.perf_counter()
    topo = topo or default_topology(config)
    if bundle.n != config.n:
        raise ValueError(f"bundle has {bundle.n} BSs, config expects {config.n}")
    hours = min(config.horizon_hours, bundle.horizon_hours)
    weeks = -(-hours // HOURS_PER_WEEK)
    weekly_outages = np.zeros((weeks, config.n), dtype=int)
    weekly_exchanges = np.zeros(weeks, dtype=int)
    transferred = grid = transit = unmet = 0.0
    all_moves: list[ExchangeMove] = []
    records: list[HourRecord] | None = [] if keep_records else None

    state = initial_state(config)
    for _ in range(hours):
        state, rec = step(state, bundle, config, topo)
        week = rec.hour // HOURS_PER_WEEK
        for i in rec.outages:
            weekly_outages[week, i] += 1
        weekly_exchanges[week] += len(rec.moves)
        transferred += rec.energy_transferred
        grid += rec.grid_import
        transit += rec.transit_loss
        unmet += rec.load_demanded - rec.load_served
        all_moves.extend(rec.moves)
        if records is not None:
            records.append(rec)
        if on_hour is not None:
            on_hour(state, rec)

    return MetricsReport(
        case=config.case_id,
        weekly_outages=weekly_outages,
        weekly_exchanges=weekly_exchanges,
        total_outages=int(weekly_outages.sum()),
        total_energy_transferred=transferred,
        total_grid_import=grid,
        runtime_ms=1000.0 * (time.perf_counter() - t0),
        total_transit_loss=transit,
        total_unmet_energy=unmet,
        moves=all_moves,
        records=records,
    )


def run_all_cases(
    config: SimulationConfig,
    bundle: TraceBundle,
    topo: Topology | None = None,
    cases=tuple(CaseId),
) -> dict[CaseId, MetricsReport]:
    topo = topo or default_topology(config)
    return {CaseId.parse(c): run_case(config.with_case(c), bundle, topo) for c in cases}
