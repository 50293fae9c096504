"""Hourly solar-harvest and load traces: file I/O, cleaning and synthesis."""

from __future__ import annotations

import enum
import io
import math
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .model import HOURS_PER_DAY, SimulationConfig

SMOOTH_WINDOW = 3
TRACE_STREAM = 1  # rng stream id for synthetic traces


class TraceParseError(ValueError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class TraceShapeError(ValueError):
    pass


class InsufficientDataError(ValueError):
    pass


class TraceKind(str, enum.Enum):
    SOLAR = "SolarHarvest"
    LOAD = "Load"


@dataclass(frozen=True, eq=False)
class HourlyTrace:
    bs_id: int
    values: np.ndarray
    kind: TraceKind


@dataclass(frozen=True, eq=False)
class TraceBundle:
    """Solar and load traces for ``n`` BSs, stored as ``(n, hours)`` arrays."""

    solar: np.ndarray
    load: np.ndarray

    def __post_init__(self):
        for name in ("solar", "load"):
            arr = np.array(getattr(self, name), dtype=float, ndmin=2)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if self.solar.shape != self.load.shape:
            raise TraceShapeError(f"solar {self.solar.shape} and load {self.load.shape} shapes differ")

    @property
    def n(self) -> int:
        return self.solar.shape[0]

    @property
    def horizon_hours(self) -> int:
        return self.solar.shape[1]

    def solar_at(self, hour: int) -> np.ndarray:
        return self.solar[:, hour]

    def load_at(self, hour: int) -> np.ndarray:
        return self.load[:, hour]

    def traces(self) -> list[HourlyTrace]:
        out = [HourlyTrace(i, self.solar[i], TraceKind.SOLAR) for i in range(self.n)]
        out += [HourlyTrace(i, self.load[i], TraceKind.LOAD) for i in range(self.n)]
        return out

    def truncated(self, hours: int) -> TraceBundle:
        return TraceBundle(self.solar[:, :hours], self.load[:, :hours])

    def __eq__(self, other) -> bool:
        if not isinstance(other, TraceBundle):
            return NotImplemented
        return np.array_equal(self.solar, other.solar) and np.array_equal(self.load, other.load)

    __hash__ = None


def fill_missing(raw: Sequence[float | None]) -> np.ndarray:
    """Linear interpolation over gaps; leading/trailing gaps copy the nearest value."""
    vals = np.array([math.nan if v is None else float(v) for v in raw], dtype=float)
    known = ~np.isnan(vals)
    if vals.size and known.all():
        return vals
    if known.sum() < 2:
        raise InsufficientDataError(f"need at least two present values, got {int(known.sum())}")
    idx = np.arange(vals.size)
    return np.interp(idx, idx[known], vals[known])


def smooth(values: np.ndarray, window: int = SMOOTH_WINDOW) -> np.ndarray:
    """Centered moving average; the ends are padded by repeating the edge value."""
    if window < 1 or window % 2 == 0:
        raise ValueError("window must be a positive odd integer")
    if window == 1:
        return np.asarray(values, dtype=float).copy()
    half = window // 2
    padded = np.pad(np.asarray(values, dtype=float), half, mode="edge")
    return np.convolve(padded, np.ones(window) / window, mode="valid")


def clean_trace(raw: Sequence[float | None], window: int = SMOOTH_WINDOW) -> np.ndarray:
    """Fill gaps, smooth, and clamp negatives to zero.

    >>> clean_trace([4, None, 8]).round(2).tolist()
    [4.67, 6.0, 7.33]
    """
    return np.maximum(smooth(fill_missing(raw), window), 0.0)


def _header(n: int) -> list[str]:
    return ["hour", *[f"bs{i + 1}_solar" for i in range(n)], *[f"bs{i + 1}_load" for i in range(n)]]


def _fmt(v: float) -> str:
    return repr(float(v))


def write_traces(bundle: TraceBundle, path: str | os.PathLike | None = None) -> str:
    """Serialize to the comma-separated trace format; returns the text and writes it if ``path`` is given."""
    buf = io.StringIO()
    buf.write(",".join(_header(bundle.n)) + "\n")
    for h in range(bundle.horizon_hours):
        cells = [str(h), *map(_fmt, bundle.solar[:, h]), *map(_fmt, bundle.load[:, h])]
        buf.write(",".join(cells) + "\n")
    text = buf.getvalue()
    if path is not None:
        _atomic_write(Path(path), text)
    return text


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_name(f".{path.name}.tmp{os.getpid()}")
    with open(tmp, "w", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)


def parse_traces(text: str, n: int, horizon_hours: int | None = None, smooth_window: int | None = None) -> TraceBundle:
    """Parse trace text.  Gaps are filled by :func:`fill_missing`.

    Longer files are truncated to ``horizon_hours``; shorter ones are repeated
    cyclically.  ``smooth_window`` additionally applies :func:`clean_trace`.
    """
    lines = text.splitlines()
    if not lines:
        raise TraceParseError(1, "empty file")
    header = [c.strip() for c in lines[0].split(",")]
    if header[:1] != ["hour"] or (len(header) - 1) % 2:
        raise TraceParseError(1, "header must be hour,bs1_solar,...,bsN_solar,bs1_load,...,bsN_load")
    file_n = (len(header) - 1) // 2
    if file_n != n:
        raise TraceShapeError(f"file has {file_n} BS columns, expected {n}")
    if header != _header(n):
        raise TraceParseError(1, f"unexpected column names {header}")

    columns: list[list[float | None]] = [[] for _ in range(2 * n)]
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        cells = line.split(",")
        if len(cells) != 2 * n + 1:
            raise TraceParseError(lineno, f"expected {2 * n + 1} fields, got {len(cells)}")
        try:
            int(cells[0])
        except ValueError:
            raise TraceParseError(lineno, f"bad hour index {cells[0]!r}") from None
        for c, cell in enumerate(cells[1:]):
            cell = cell.strip()
            if cell == "":
                columns[c].append(None)
                continue
            try:
                v = float(cell)
            except ValueError:
                raise TraceParseError(lineno, f"not a number: {cell!r}") from None
            if not math.isfinite(v) or v < 0:
                raise TraceParseError(lineno, f"value must be finite and >= 0, got {cell!r}")
            columns[c].append(v)
    if not columns[0]:
        raise TraceParseError(2, "no data rows")

    filled = []
    for c, col in enumerate(columns):
        try:
            vals = fill_missing(col) if smooth_window is None else clean_trace(col, smooth_window)
        except InsufficientDataError as exc:
            raise TraceParseError(1, f"column {header[c + 1]}: {exc}") from None
        filled.append(vals)
    data = np.array(filled)
    if horizon_hours is not None and data.shape[1] != horizon_hours:
        data = np.array([np.resize(row, horizon_hours) for row in data])
    return TraceBundle(solar=data[:n], load=data[n:])


def ingest_traces(path: str | os.PathLike, n: int, horizon_hours: int | None = None,
                  smooth_window: int | None = None) -> TraceBundle:
    return parse_traces(Path(path).read_text(), n, horizon_hours, smooth_window)


@dataclass(frozen=True)
class SynthProfile:
    """Parameters of the synthetic year.

    Solar is a half-sine between ``sunrise`` and ``sunset`` scaled by a
    seasonal cosine and a per-day cloudiness factor.  Load is a base level
    plus morning and evening Gaussian bumps.  When ``solar_to_load`` is set,
    each BS's solar trace is rescaled so its yearly total equals that fraction
    of its yearly load.
    """

    sunrise: int = 6
    sunset: int = 19
    solar_peak: float = 1.0
    seasonal_amplitude: float = 0.3
    cloud_sigma: float = 0.7
    hourly_sigma: float = 0.1
    solar_to_load: float | None = 0.95
    bs_scale_sigma: float = 0.15
    load_base: float = 20.0
    load_scale: tuple[float, ...] = (1.6, 1.0, 0.8, 1.2, 0.7)
    morning_peak: float = 10.0
    evening_peak: float = 20.0
    peak_width: float = 2.5
    morning_amplitude: float = 6.0
    evening_amplitude: float = 9.0
    load_sigma: float = 0.15
    busy_week_sigma: float = 0.2

    def __post_init__(self):
        if not 0 <= self.sunrise < self.sunset <= HOURS_PER_DAY:
            raise ValueError("need 0 <= sunrise < sunset <= 24")
        if self.solar_peak < 0 or self.load_base < 0:
            raise ValueError("solar_peak and load_base must be >= 0")

    def night_hours(self) -> frozenset[int]:
        return frozenset(h for h in range(HOURS_PER_DAY) if h < self.sunrise or h >= self.sunset)

    def scale_for(self, i: int) -> float:
        return self.load_scale[i % len(self.load_scale)] if self.load_scale else 1.0


def _day_shape(profile: SynthProfile) -> np.ndarray:
    hod = np.arange(HOURS_PER_DAY) + 0.5
    span = profile.sunset - profile.sunrise
    shape = np.sin(np.pi * (hod - profile.sunrise) / span)
    shape[(hod < profile.sunrise) | (hod > profile.sunset)] = 0.0
    return np.maximum(shape, 0.0)


def _load_shape(profile: SynthProfile) -> np.ndarray:
    hod = np.arange(HOURS_PER_DAY, dtype=float)

    def bump(center):
        d = np.minimum(np.abs(hod - center), HOURS_PER_DAY - np.abs(hod - center))
        return np.exp(-0.5 * (d / profile.peak_width) ** 2)

    return 1.0 + (profile.morning_amplitude * bump(profile.morning_peak)
                  + profile.evening_amplitude * bump(profile.evening_peak)) / max(profile.load_base, 1e-12)


def synth_traces(config: SimulationConfig, profile: SynthProfile | None = None) -> TraceBundle:
    """Seeded synthetic solar and load traces for ``config.n`` BSs over ``config.horizon_hours``."""
    profile = profile or SynthProfile()
    rng = np.random.default_rng([config.rng_seed, TRACE_STREAM])
    n, hours = config.n, config.horizon_hours
    days = -(-hours // HOURS_PER_DAY)
    weeks = -(-days // 7)

    day_of_year = np.arange(days)
    # northern-hemisphere season: peak sun in late June (day ~172)
    season = 1.0 + profile.seasonal_amplitude * np.cos(2 * np.pi * (day_of_year - 172) / 365.0)
    shared_cloud = rng.lognormal(0.0, profile.cloud_sigma, size=days)

    solar_day = _day_shape(profile)
    load_day = _load_shape(profile)
    night = np.array([h in profile.night_hours() for h in range(HOURS_PER_DAY)])

    solar = np.empty((n, days * HOURS_PER_DAY))
    load = np.empty((n, days * HOURS_PER_DAY))
    for i in range(n):
        own_cloud = shared_cloud * rng.lognormal(0.0, profile.cloud_sigma / 2, size=days)
        hourly = rng.lognormal(0.0, profile.hourly_sigma, size=(days, HOURS_PER_DAY))
        s = profile.solar_peak * rng.lognormal(0.0, profile.bs_scale_sigma)
        s_mat = s * season[:, None] * own_cloud[:, None] * solar_day[None, :] * hourly
        s_mat[:, night] = 0.0

        busy = np.repeat(rng.lognormal(0.0, profile.busy_week_sigma, size=weeks), 7)[:days]
        noise = rng.lognormal(0.0, profile.load_sigma, size=(days, HOURS_PER_DAY))
        l_mat = profile.load_base * profile.scale_for(i) * busy[:, None] * load_day[None, :] * noise

        solar[i] = s_mat.ravel()
        load[i] = l_mat.ravel()

    solar, load = solar[:, :hours], load[:, :hours]
    if profile.solar_to_load is not None:
        totals = solar.sum(axis=1)
        ok = totals > 0
        solar[ok] *= (profile.solar_to_load * load[ok].sum(axis=1) / totals[ok])[:, None]
    return TraceBundle(solar=solar, load=load)
