"""Domain types shared across the package.

All energies are in Wh and all distances in km.  An hourly load of ``x`` Wh is
treated as an average power draw of ``x`` W for that hour.

Drone slots are the columns of an ``n x m`` matrix.  A slot whose drone has
left is *absent* and is stored as ``NaN``; a present drone with an empty
battery is ``0.0``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

ABSENT = math.nan
HOURS_PER_DAY = 24
MIN_INTER_BS_KM = 2.0

# reference scenario
DEFAULTS = dict(n=5, m=10, alpha=0.7, beta=0.5, gamma=0.3, zeta=0.8, delta=0.6, epsilon=0.4)


def default_prices() -> tuple[float, ...]:
    """Three-tier time-of-use price per Wh: cheap nights, dear evening peak."""
    prices = []
    for h in range(HOURS_PER_DAY):
        if h < 6 or h >= 22:
            prices.append(0.8)
        elif 17 <= h < 21:
            prices.append(1.2)
        else:
            prices.append(1.0)
    return tuple(prices)


class CaseId(str, enum.Enum):
    BASELINE = "Baseline"
    STATIC_DRONE_SUPPORT = "StaticDroneSupport"
    OPTIMAL_REDISTRIBUTION = "OptimalRedistribution"

    @classmethod
    def parse(cls, name: str | CaseId) -> CaseId:
        if isinstance(name, CaseId):
            return name
        aliases = {"1": cls.BASELINE, "2": cls.STATIC_DRONE_SUPPORT, "3": cls.OPTIMAL_REDISTRIBUTION}
        if name in aliases:
            return aliases[name]
        for case in cls:
            if name.lower() in (case.value.lower(), case.name.lower()):
                return case
        raise ValueError(f"unknown case {name!r}; expected one of {[c.value for c in cls]}")


@dataclass(frozen=True)
class Weights:
    alpha: float = DEFAULTS["alpha"]
    beta: float = DEFAULTS["beta"]
    gamma: float = DEFAULTS["gamma"]
    zeta: float = DEFAULTS["zeta"]
    delta: float = DEFAULTS["delta"]
    epsilon: float = DEFAULTS["epsilon"]
    price_by_hour: tuple[float, ...] = field(default_factory=default_prices)

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name}={v} must lie in [0, 1]")
        for name in ("zeta", "delta", "epsilon"):
            v = getattr(self, name)
            if v < 0:
                raise ValueError(f"{name}={v} must be >= 0")
        prices = tuple(float(p) for p in self.price_by_hour)
        if len(prices) != HOURS_PER_DAY:
            raise ValueError(f"price_by_hour needs {HOURS_PER_DAY} entries, got {len(prices)}")
        if any(p < 0 or not math.isfinite(p) for p in prices):
            raise ValueError("price_by_hour entries must be finite and >= 0")
        object.__setattr__(self, "price_by_hour", prices)

    def price(self, hour: int) -> float:
        return self.price_by_hour[hour % HOURS_PER_DAY]


@dataclass(frozen=True)
class DroneSpec:
    """Battery and flight-loss parameters of one drone.

    ``d0`` defaults to the transit energy of the shortest allowed hop
    (2 km at 0.5 Wh/km).  ``loss_per_min`` applies to hover time only.
    """

    capacity: float = 30.0
    speed: float = 60.0
    loss_per_min: float = 0.5
    loss_per_km: float = 0.5
    d0: float = 1.0
    hover_minutes: float = 0.0

    def __post_init__(self):
        if not self.capacity > self.d0 > 0:
            raise ValueError(f"need capacity > d0 > 0, got capacity={self.capacity}, d0={self.d0}")
        if self.speed <= 0:
            raise ValueError("speed must be positive")
        if self.loss_per_km < 0 or self.loss_per_min < 0 or self.hover_minutes < 0:
            raise ValueError("loss rates and hover time must be >= 0")

    def flight_minutes(self, km: float) -> float:
        return 60.0 * km / self.speed


@dataclass(frozen=True)
class ChargingPolicy:
    """Named drone-charging policy.

    ``NocturnalFull`` tops every docked drone up from the grid during
    ``night_hours``.  ``SolarWeighted`` charges only inside ``cheap_window``,
    from the hour's solar surplus first.  ``EnergyBuffer`` charges from the BS
    battery whenever it holds more than ``buffer_floor``.
    """

    policy_id: str = "NocturnalFull"
    buffer_floor: float = 0.0
    cheap_window: frozenset[int] = frozenset(range(0, 6))
    night_hours: frozenset[int] = frozenset([*range(0, 6), *range(20, 24)])

    POLICIES = ("NocturnalFull", "SolarWeighted", "EnergyBuffer")

    def __post_init__(self):
        if self.policy_id not in self.POLICIES:
            raise ValueError(f"unknown charging policy {self.policy_id!r}; expected one of {self.POLICIES}")
        if self.buffer_floor < 0:
            raise ValueError("buffer_floor must be >= 0")
        for name in ("cheap_window", "night_hours"):
            hours = frozenset(int(h) for h in getattr(self, name))
            if not hours <= set(range(HOURS_PER_DAY)):
                raise ValueError(f"{name} must be a subset of 0..23")
            object.__setattr__(self, name, hours)


@dataclass(frozen=True)
class Topology:
    """BS layout plus the pairwise distance, transfer-cost and success matrices."""

    positions: np.ndarray
    distance: np.ndarray
    transfer_cost: np.ndarray
    success_prob: np.ndarray

    def __post_init__(self):
        for name in ("positions", "distance", "transfer_cost", "success_prob"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        n = self.n
        if self.positions.shape != (n, 2):
            raise ValueError(f"positions must be ({n}, 2), got {self.positions.shape}")
        for name in ("transfer_cost", "success_prob"):
            if getattr(self, name).shape != (n, n):
                raise ValueError(f"{name} must be ({n}, {n})")

    @property
    def n(self) -> int:
        return self.distance.shape[0]

    @classmethod
    def from_positions(
        cls,
        positions: Sequence[Sequence[float]],
        spec: DroneSpec | None = None,
        decay_km: float | None = None,
    ) -> Topology:
        """Build distances from planar coordinates.

        Transfer cost is the drone transit energy over each hop.  Success
        probability is 1 everywhere unless ``decay_km`` is given, in which case
        it is ``exp(-distance / decay_km)``.
        """
        spec = spec or DroneSpec()
        pos = np.asarray(positions, dtype=float).reshape(-1, 2)
        diff = pos[:, None, :] - pos[None, :, :]
        dist = np.sqrt((diff**2).sum(axis=-1))
        np.fill_diagonal(dist, 0.0)
        cost = spec.loss_per_km * dist
        if decay_km is None:
            prob = np.ones_like(dist)
        else:
            prob = np.exp(-dist / decay_km)
            np.fill_diagonal(prob, 1.0)
        return cls(positions=pos, distance=dist, transfer_cost=cost, success_prob=prob)

    @classmethod
    def random(
        cls,
        n: int,
        rng: np.random.Generator,
        spec: DroneSpec | None = None,
        extent_km: float | None = None,
        min_km: float = MIN_INTER_BS_KM,
        decay_km: float | None = None,
    ) -> Topology:
        """Scatter ``n`` sites uniformly in a square, rejecting any closer than ``min_km``."""
        extent = extent_km if extent_km is not None else max(3.0 * min_km, 2.5 * min_km * math.sqrt(n))
        for _ in range(1000):
            pts: list[np.ndarray] = []
            for _ in range(1000):
                p = rng.uniform(0.0, extent, size=2)
                if all(np.hypot(*(p - q)) >= min_km for q in pts):
                    pts.append(p)
                    if len(pts) == n:
                        return cls.from_positions(pts, spec, decay_km)
        raise RuntimeError(f"could not place {n} sites {min_km} km apart in {extent} km square")

    @classmethod
    def uniform(cls, n: int, km: float = MIN_INTER_BS_KM, spec: DroneSpec | None = None) -> Topology:
        """Every pair exactly ``km`` apart (a graph-only layout; positions are nominal)."""
        spec = spec or DroneSpec()
        dist = np.full((n, n), float(km))
        np.fill_diagonal(dist, 0.0)
        pos = np.column_stack([np.arange(n) * km, np.zeros(n)])
        return cls(positions=pos, distance=dist, transfer_cost=spec.loss_per_km * dist,
                   success_prob=np.ones((n, n)))


def _frozen(values, ndim: int) -> np.ndarray:
    arr = np.array(values, dtype=float, ndmin=ndim)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class NetworkState:
    """One-hour snapshot: BS batteries, loads and the drone matrix.

    Arrays are copied and made read-only on construction; build the next hour
    with :meth:`evolve`.
    """

    hour: int
    bs_energy: np.ndarray
    bs_load: np.ndarray
    drone_energy: np.ndarray
    bs_power: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "bs_energy", _frozen(self.bs_energy, 1))
        object.__setattr__(self, "bs_load", _frozen(self.bs_load, 1))
        object.__setattr__(self, "drone_energy", _frozen(self.drone_energy, 2))
        power = self.bs_load if self.bs_power is None else self.bs_power
        object.__setattr__(self, "bs_power", _frozen(power, 1))
        n = self.bs_energy.shape[0]
        if self.bs_load.shape != (n,) or self.bs_power.shape != (n,) or self.drone_energy.shape[0] != n:
            raise ValueError("bs_energy, bs_load, bs_power and drone_energy rows must agree on n")

    @property
    def n(self) -> int:
        return self.bs_energy.shape[0]

    @property
    def m(self) -> int:
        return self.drone_energy.shape[1]

    @classmethod
    def initial(cls, n: int, m: int, spec: DroneSpec | None = None, bs_energy: float = 0.0) -> NetworkState:
        """Empty loads, every slot holding a fully charged drone."""
        spec = spec or DroneSpec()
        return cls(hour=0, bs_energy=np.full(n, float(bs_energy)), bs_load=np.zeros(n),
                   drone_energy=np.full((n, m), spec.capacity))

    def evolve(self, **changes) -> NetworkState:
        return replace(self, **changes)

    def present(self) -> np.ndarray:
        return ~np.isnan(self.drone_energy)

    def drone_totals(self) -> np.ndarray:
        """Docked drone energy per BS (absent slots count as zero)."""
        return np.nansum(self.drone_energy, axis=1)

    def net(self) -> np.ndarray:
        """Per-BS battery plus docked drone energy minus load; negative is a deficit."""
        return self.bs_energy + self.drone_totals() - self.bs_load

    def total_energy(self) -> float:
        return float(self.bs_energy.sum() + np.nansum(self.drone_energy))

    def to_dict(self) -> dict:
        return {
            "hour": int(self.hour),
            "bs_energy": [float(v) for v in self.bs_energy],
            "bs_load": [float(v) for v in self.bs_load],
            "bs_power": [float(v) for v in self.bs_power],
            "drone_energy": [[None if math.isnan(v) else float(v) for v in row] for row in self.drone_energy],
        }

    @classmethod
    def from_dict(cls, data: dict) -> NetworkState:
        drones = [[ABSENT if v is None else float(v) for v in row] for row in data["drone_energy"]]
        return cls(hour=int(data["hour"]), bs_energy=data["bs_energy"], bs_load=data["bs_load"],
                   drone_energy=drones, bs_power=data.get("bs_power"))

    def __eq__(self, other) -> bool:
        if not isinstance(other, NetworkState):
            return NotImplemented
        return (
            self.hour == other.hour
            and _same(self.bs_energy, other.bs_energy)
            and _same(self.bs_load, other.bs_load)
            and _same(self.bs_power, other.bs_power)
            and _same(self.drone_energy, other.drone_energy)
        )

    __hash__ = None


def _same(a: np.ndarray, b: np.ndarray) -> bool:
    return a.shape == b.shape and np.array_equal(a, b, equal_nan=True)


@dataclass(frozen=True)
class SimulationConfig:
    n: int = DEFAULTS["n"]
    m: int = DEFAULTS["m"]
    weights: Weights = field(default_factory=Weights)
    drone_spec: DroneSpec = field(default_factory=DroneSpec)
    case_id: CaseId = CaseId.OPTIMAL_REDISTRIBUTION
    horizon_hours: int = 8760
    charging_policy: ChargingPolicy = field(default_factory=ChargingPolicy)
    rng_seed: int = 7
    initial_bs_energy: float = 0.0
    bs_capacity: float | None = None

    def __post_init__(self):
        if self.n < 1 or self.m < 1 or self.horizon_hours < 1:
            raise ValueError("n, m and horizon_hours must all be >= 1")
        object.__setattr__(self, "case_id", CaseId.parse(self.case_id))
        if isinstance(self.charging_policy, str):
            object.__setattr__(self, "charging_policy", ChargingPolicy(self.charging_policy))
        if self.bs_capacity is not None and self.bs_capacity < 0:
            raise ValueError("bs_capacity must be >= 0")

    def with_case(self, case: CaseId | str) -> SimulationConfig:
        return replace(self, case_id=CaseId.parse(case))


def validate_state(state: NetworkState, topo: Topology, spec: DroneSpec) -> list[str]:
    """Check every state and topology invariant; return the violations found.

    An empty list means the state is valid.  Never raises on numeric input.
    """
    problems: list[str] = []

    def check_vector(name: str, vec: np.ndarray) -> None:
        for i, v in enumerate(vec):
            if not math.isfinite(v):
                problems.append(f"{name} not finite at {i}")
            elif v < 0:
                problems.append(f"{name} negative at {i}")

    if state.hour < 0:
        problems.append("hour negative")
    check_vector("bs_energy", state.bs_energy)
    check_vector("bs_load", state.bs_load)
    check_vector("bs_power", state.bs_power)

    for (i, j), v in np.ndenumerate(state.drone_energy):
        if math.isnan(v):
            continue  # absent slot
        if math.isinf(v):
            problems.append(f"drone energy not finite at ({i},{j})")
        elif v < 0:
            problems.append(f"drone energy negative at ({i},{j})")
        elif v > spec.capacity:
            problems.append(f"capacity exceeded at ({i},{j})")

    n = state.n
    if topo.n != n:
        problems.append(f"topology has {topo.n} nodes but state has {n}")
        return problems

    d = topo.distance
    for i in range(n):
        if d[i, i] != 0:
            problems.append(f"distance diagonal nonzero at ({i},{i})")
        if topo.transfer_cost[i, i] != 0:
            problems.append(f"transfer cost diagonal nonzero at ({i},{i})")
        if topo.success_prob[i, i] != 1:
            problems.append(f"success probability diagonal not 1 at ({i},{i})")
        for j in range(n):
            p = topo.success_prob[i, j]
            if not 0.0 <= p <= 1.0:
                problems.append(f"success probability outside [0,1] at ({i},{j})")
            if i == j:
                continue
            if d[i, j] != d[j, i]:
                problems.append(f"distance not symmetric at ({i},{j})")
            if not d[i, j] >= MIN_INTER_BS_KM:
                problems.append(f"inter-BS distance below {MIN_INTER_BS_KM:g} km at ({i},{j})")
            if not topo.transfer_cost[i, j] > 0:
                problems.append(f"transfer cost not positive at ({i},{j})")
    return problems


def stack_rows(rows: Iterable[Sequence[float | None]]) -> np.ndarray:
    """Drone matrix from nested lists, with ``None`` marking absent slots."""
    return np.array([[ABSENT if v is None else float(v) for v in row] for row in rows], dtype=float)
