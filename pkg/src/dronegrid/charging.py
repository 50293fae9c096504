"""Hourly solar intake and drone charging.

NocturnalFull is the default. SolarWeighted and EnergyBuffer are kept
deliberately simple and are not tuned.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import HOURS_PER_DAY, ChargingPolicy, DroneSpec, NetworkState
from .traces import TraceBundle

__all__ = ["ChargingPolicy", "ChargeFlows", "apply_charging", "charge_hour", "fill_row"]


@dataclass(frozen=True)
class ChargeFlows:
    """Energy moved during one charging step, summed over all BSs (Wh)."""

    solar_in: float = 0.0
    spilled: float = 0.0
    grid_import: float = 0.0
    battery_to_drones: float = 0.0


def fill_row(row: np.ndarray, amount: float, capacity: float) -> tuple[np.ndarray, float]:
    """Charge present drones weakest-first with up to ``amount`` Wh.

    Returns the new row and the energy actually used.
    """
    out = row.copy()
    used = 0.0
    order = np.argsort(np.nan_to_num(row, nan=np.inf), kind="stable")
    for j in order:
        if np.isnan(out[j]) or used >= amount:
            continue
        add = min(capacity - out[j], amount - used)
        if add > 0:
            out[j] += add
            used += add
    return out, used


def _headroom(drones: np.ndarray, capacity: float) -> np.ndarray:
    return np.nansum(capacity - drones, axis=1)


def charge_hour(
    state: NetworkState,
    solar: np.ndarray,
    load: np.ndarray,
    policy: ChargingPolicy,
    spec: DroneSpec,
    hour: int,
    bs_capacity: float | None = None,
) -> tuple[NetworkState, ChargeFlows]:
    """Add this hour's solar to each BS battery, then charge drones per ``policy``."""
    solar = np.asarray(solar, dtype=float)
    energy = state.bs_energy + solar
    spilled = 0.0
    if bs_capacity is not None:
        over = np.maximum(energy - bs_capacity, 0.0)
        spilled = float(over.sum())
        energy = energy - over

    drones = np.array(state.drone_energy)
    cap = spec.capacity
    hod = hour % HOURS_PER_DAY
    grid = 0.0
    from_battery = 0.0
    pid = policy.policy_id

    if pid == "NocturnalFull":
        if hod in policy.night_hours:
            grid = float(_headroom(drones, cap).sum())
            present = ~np.isnan(drones)
            drones[present] = cap
    elif pid == "SolarWeighted":
        if hod in policy.cheap_window:
            surplus = np.minimum(np.maximum(solar - np.asarray(load, dtype=float), 0.0), energy)
            for i, row in enumerate(drones):
                need = float(np.nansum(cap - row))
                local = min(need, float(surplus[i]))
                drones[i], _ = fill_row(row, need, cap)
                energy[i] -= local
                from_battery += local
                grid += need - local
    elif pid == "EnergyBuffer":
        for i, row in enumerate(drones):
            available = max(float(energy[i]) - policy.buffer_floor, 0.0)
            if available <= 0:
                continue
            drones[i], used = fill_row(row, available, cap)
            energy[i] -= used
            from_battery += used

    new = state.evolve(bs_energy=energy, drone_energy=drones)
    return new, ChargeFlows(float(solar.sum()), spilled, grid, from_battery)


def apply_charging(
    state: NetworkState,
    bundle: TraceBundle,
    policy: ChargingPolicy,
    spec: DroneSpec,
    hour: int,
    bs_capacity: float | None = None,
) -> NetworkState:
    if not 0 <= hour < bundle.horizon_hours:
        raise IndexError(f"hour {hour} outside trace horizon {bundle.horizon_hours}")
    new, _ = charge_hour(state, bundle.solar_at(hour), bundle.load_at(hour), policy, spec, hour, bs_capacity)
    return new
