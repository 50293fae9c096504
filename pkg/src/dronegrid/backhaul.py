"""Energy-aware backhaul selection for a BS asking for drone relay support."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable

from .model import DroneSpec, NetworkState, Topology
from .scoring import transit_energy

DEFAULT_BACKHAUL_COST = 5.0
DEFAULT_RESERVE_MARGIN = 2.0


class BackhaulChoice(str, enum.Enum):
    DRONE = "DroneBackhaul"
    TERRESTRIAL = "TerrestrialRoute"
    DEFER = "Defer"


class BackhaulReason(str, enum.Enum):
    SUFFICIENT_RESERVE = "SufficientReserve"
    ALL_DRONES_LOW = "AllDronesLow"
    DEPLETION_RISK = "DepletionRisk"


@dataclass(frozen=True)
class BackhaulDecision:
    choice: BackhaulChoice
    reason: BackhaulReason
    bs: int | None = None
    slot: int | None = None
    residual: float | None = None  # best drone's energy left after hop and duty

    def __post_init__(self):
        if self.choice is BackhaulChoice.DRONE and (self.bs is None or self.slot is None):
            raise ValueError("a drone backhaul decision must name the drone's BS and slot")


def select_backhaul(
    requesting_bs: int,
    state: NetworkState,
    topo: Topology,
    spec: DroneSpec,
    backhaul_cost: float = DEFAULT_BACKHAUL_COST,
    reserve_margin: float = DEFAULT_RESERVE_MARGIN,
    neighbors: Iterable[int] | None = None,
    terrestrial_available: bool = False,
) -> BackhaulDecision:
    """Pick the docked drone that keeps the most energy after serving as backhaul.

    A drone's residual is its energy minus the hop to ``requesting_bs`` and
    the ``backhaul_cost`` of the duty.  The best drone is used only if that
    residual is at least ``d0 + reserve_margin``; otherwise traffic goes over
    a terrestrial route when one is available, or the request is deferred.
    Ties go to the lowest ``(bs, slot)``.
    """
    if not 0 <= requesting_bs < state.n:
        raise IndexError(f"BS {requesting_bs} out of range for n={state.n}")
    if backhaul_cost < 0:
        raise ValueError("backhaul_cost must be >= 0")
    pool = [k for k in range(state.n) if k != requesting_bs] if neighbors is None else sorted(set(neighbors))
    threshold = spec.d0 + reserve_margin

    best: tuple[float, int, int] | None = None
    any_charged = False
    for k in pool:
        hop = transit_energy(k, requesting_bs, topo, spec)
        for slot, e in enumerate(state.drone_energy[k]):
            if math.isnan(e):
                continue
            any_charged |= e >= threshold
            residual = float(e) - hop - backhaul_cost
            if best is None or residual > best[0]:
                best = (residual, k, slot)

    if best is not None and best[0] >= threshold:
        return BackhaulDecision(BackhaulChoice.DRONE, BackhaulReason.SUFFICIENT_RESERVE, best[1], best[2], best[0])
    reason = BackhaulReason.DEPLETION_RISK if any_charged else BackhaulReason.ALL_DRONES_LOW
    choice = BackhaulChoice.TERRESTRIAL if terrestrial_available else BackhaulChoice.DEFER
    return BackhaulDecision(choice, reason, residual=None if best is None else best[0])
