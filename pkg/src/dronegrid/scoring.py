"""Pairwise transfer scores and the drone transit-energy model.

The three scores mix Wh, km, W and price units; they are used as
dimensionless rankings, not physical quantities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .model import DroneSpec, NetworkState, Topology, Weights


class SameNodeError(ValueError):
    pass


class AbsentDroneError(ValueError):
    pass


@dataclass(frozen=True)
class TransferScore:
    load_transfer: float
    traffic_loading: float
    decision_cost: float


def transit_energy(i: int, j: int, topo: Topology, spec: DroneSpec) -> float:
    """Energy a drone spends flying from BS ``i`` to BS ``j``.

    Per-km loss only; moving within one BS is free.
    """
    if i == j:
        return 0.0
    return spec.loss_per_km * float(topo.distance[i, j])


def hover_energy(spec: DroneSpec, minutes: float | None = None) -> float:
    return spec.loss_per_min * (spec.hover_minutes if minutes is None else minutes)


def residual_after_hop(distance_km: float, drone_energy: float, spec: DroneSpec | None = None) -> float:
    """Drone energy left after flying ``distance_km``, floored at zero."""
    per_km = (spec or DroneSpec()).loss_per_km
    return max(drone_energy - per_km * distance_km, 0.0)


ResidualFn = Callable[[float, float], float]


def hourly_transfer_cost(i: int, j: int, h: int, topo: Topology, w: Weights) -> float:
    """Energy cost of the hop priced at hour-of-day ``h``."""
    return float(topo.transfer_cost[i, j]) * w.price(h)


def load_transfer(i: int, j: int, state: NetworkState, topo: Topology, w: Weights) -> float:
    if i == j:
        raise SameNodeError(f"load transfer needs two distinct BSs, got {i} twice")
    return (w.alpha * float(state.bs_energy[i])
            + (1.0 - w.alpha) * float(topo.distance[i, j])
            + w.zeta * float(state.bs_power[i]))


def _drone_at(state: NetworkState, j: int, d: int) -> float:
    e = float(state.drone_energy[j, d])
    if math.isnan(e):
        raise AbsentDroneError(f"drone slot {d} at BS {j} is empty")
    return e


def traffic_loading(
    i: int,
    j: int,
    h: int,
    d: int,
    state: NetworkState,
    topo: Topology,
    w: Weights,
    residual: ResidualFn | None = None,
) -> float:
    """Score of loading BS ``i`` via drone ``d`` docked at BS ``j`` during hour ``h``.

    ``residual(distance_km, drone_energy)`` rewards drones that arrive with
    energy to spare; it defaults to :func:`residual_after_hop`.
    """
    e_drone = _drone_at(state, j, d)
    residual = residual or residual_after_hop
    return (w.beta * load_transfer(i, j, state, topo, w)
            + (1.0 - w.beta) * hourly_transfer_cost(i, j, h, topo, w)
            - w.delta * residual(float(topo.distance[i, j]), e_drone))


def decision_cost(
    i: int,
    j: int,
    h: int,
    d: int,
    state: NetworkState,
    topo: Topology,
    w: Weights,
    residual: ResidualFn | None = None,
) -> float:
    t = traffic_loading(i, j, h, d, state, topo, w, residual)
    return w.gamma * t + (1.0 - w.gamma) * w.price(h) + w.epsilon * float(topo.success_prob[i, j])


def score(i: int, j: int, h: int, d: int, state: NetworkState, topo: Topology, w: Weights) -> TransferScore:
    lt = load_transfer(i, j, state, topo, w)
    tl = traffic_loading(i, j, h, d, state, topo, w)
    dc = w.gamma * tl + (1.0 - w.gamma) * w.price(h) + w.epsilon * float(topo.success_prob[i, j])
    return TransferScore(lt, tl, dc)
