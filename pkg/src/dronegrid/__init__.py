"""Drone-assisted energy redistribution among solar small-cell base stations."""

from .backhaul import BackhaulChoice, BackhaulDecision, BackhaulReason, select_backhaul
from .charging import ChargeFlows, apply_charging, charge_hour
from .model import (
    CaseId,
    ChargingPolicy,
    DroneSpec,
    NetworkState,
    SimulationConfig,
    Topology,
    Weights,
    validate_state,
)
from .planner import (
    ExchangeMove,
    ExchangePlan,
    feasible,
    oracle_plan,
    plan_exchanges,
    sort_drone_rows,
)
from .scoring import decision_cost, load_transfer, traffic_loading, transit_energy
from .simulator import HourRecord, MetricsReport, run_all_cases, run_case, step
from .traces import SynthProfile, TraceBundle, clean_trace, ingest_traces, synth_traces, write_traces

__version__ = "0.1.0"

__all__ = [
    "BackhaulChoice",
    "BackhaulDecision",
    "BackhaulReason",
    "CaseId",
    "ChargeFlows",
    "ChargingPolicy",
    "DroneSpec",
    "ExchangeMove",
    "ExchangePlan",
    "HourRecord",
    "MetricsReport",
    "NetworkState",
    "SimulationConfig",
    "SynthProfile",
    "Topology",
    "TraceBundle",
    "Weights",
    "apply_charging",
    "charge_hour",
    "clean_trace",
    "decision_cost",
    "feasible",
    "ingest_traces",
    "load_transfer",
    "oracle_plan",
    "plan_exchanges",
    "run_all_cases",
    "run_case",
    "select_backhaul",
    "sort_drone_rows",
    "step",
    "synth_traces",
    "traffic_loading",
    "transit_energy",
    "validate_state",
    "write_traces",
]
