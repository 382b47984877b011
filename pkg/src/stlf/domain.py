"""Core data types and min-max load normalization."""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DatasetTooShortError,
    DegenerateRangeError,
    GapInSeriesError,
    HumidityRangeError,
    InvalidRecordError,
    NegativeLoadError,
    OutOfRangeError,
)

HOUR = np.timedelta64(1, "h")
MIN_HOURS = 96

WEATHER_FIELDS = ("temperature", "humidity", "wind_speed", "wind_chill")


@dataclass(frozen=True)
class HourlyRecord:
    timestamp: dt.datetime
    load: float
    temperature: float
    humidity: float
    wind_speed: float
    wind_chill: float


def _frozen(a, dtype) -> np.ndarray:
    arr = np.array(a, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class LoadDataset:
    """Aligned hourly load and weather series.

    Stored column-wise; ``records`` rebuilds the row view on demand.
    Construction does not validate, call :func:`validate_dataset`.
    """

    timestamps: np.ndarray  # datetime64[h]
    load: np.ndarray
    temperature: np.ndarray
    humidity: np.ndarray
    wind_speed: np.ndarray
    wind_chill: np.ndarray
    holidays: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "timestamps", _frozen(self.timestamps, "datetime64[h]"))
        for name in ("load",) + WEATHER_FIELDS:
            object.__setattr__(self, name, _frozen(getattr(self, name), np.float64))
        object.__setattr__(self, "holidays", frozenset(self.holidays))
        n = len(self.timestamps)
        for name in ("load",) + WEATHER_FIELDS:
            if getattr(self, name).shape != (n,):
                raise InvalidRecordError(f"column {name!r} has length {len(getattr(self, name))}, expected {n}")

    @classmethod
    def from_records(cls, records: Iterable[HourlyRecord], holidays: Iterable[dt.date] = ()) -> "LoadDataset":
        records = list(records)
        return cls(
            timestamps=np.array([np.datetime64(r.timestamp, "h") for r in records], dtype="datetime64[h]"),
            load=[r.load for r in records],
            temperature=[r.temperature for r in records],
            humidity=[r.humidity for r in records],
            wind_speed=[r.wind_speed for r in records],
            wind_chill=[r.wind_chill for r in records],
            holidays=frozenset(holidays),
        )

    def __len__(self) -> int:
        return len(self.timestamps)

    @property
    def records(self) -> tuple[HourlyRecord, ...]:
        return tuple(
            HourlyRecord(
                timestamp=self.timestamps[i].astype(dt.datetime),
                load=float(self.load[i]),
                temperature=float(self.temperature[i]),
                humidity=float(self.humidity[i]),
                wind_speed=float(self.wind_speed[i]),
                wind_chill=float(self.wind_chill[i]),
            )
            for i in range(len(self))
        )

    @property
    def start(self) -> np.datetime64:
        return self.timestamps[0]

    def index_of(self, timestamp) -> int:
        """Row index of ``timestamp``; may fall outside ``[0, len)``."""
        delta = np.datetime64(timestamp, "h") - self.timestamps[0]
        return int(delta / HOUR)

    def slice_hours(self, start: int, stop: int) -> "LoadDataset":
        sl = slice(start, stop)
        return LoadDataset(
            timestamps=self.timestamps[sl],
            load=self.load[sl],
            temperature=self.temperature[sl],
            humidity=self.humidity[sl],
            wind_speed=self.wind_speed[sl],
            wind_chill=self.wind_chill[sl],
            holidays=self.holidays,
        )

    def between(self, first: dt.date, last: dt.date) -> "LoadDataset":
        """Rows whose calendar date lies in ``[first, last]``."""
        days = self.timestamps.astype("datetime64[D]")
        mask = (days >= np.datetime64(first, "D")) & (days <= np.datetime64(last, "D"))
        idx = np.flatnonzero(mask)
        if idx.size == 0:
            return self.slice_hours(0, 0)
        return self.slice_hours(int(idx[0]), int(idx[-1]) + 1)

    def equals(self, other: "LoadDataset") -> bool:
        return (
            np.array_equal(self.timestamps, other.timestamps)
            and all(np.array_equal(getattr(self, f), getattr(other, f)) for f in ("load",) + WEATHER_FIELDS)
            and self.holidays == other.holidays
        )


@dataclass(frozen=True)
class NormalizationSpec:
    p_min: float
    p_max: float

    def __post_init__(self):
        if not (np.isfinite(self.p_min) and np.isfinite(self.p_max)):
            raise DegenerateRangeError("normalization bounds must be finite")
        if not self.p_max > self.p_min:
            raise DegenerateRangeError(f"p_max ({self.p_max}) must exceed p_min ({self.p_min})")

    @property
    def span(self) -> float:
        return self.p_max - self.p_min

    def to_dict(self) -> dict:
        return {"p_min": self.p_min, "p_max": self.p_max}

    @classmethod
    def from_dict(cls, d: dict) -> "NormalizationSpec":
        return cls(float(d["p_min"]), float(d["p_max"]))


def validate_dataset(dataset: LoadDataset) -> LoadDataset:
    """Check the dataset invariants and return it unchanged.

    Raises
    ------
    GapInSeriesError
        Spacing is not exactly one hour; names the first expected hour missing.
    NegativeLoadError, HumidityRangeError, InvalidRecordError
        A record violates a field constraint.
    DatasetTooShortError
        Fewer than 96 hours.
    """
    ts = dataset.timestamps
    if len(ts) > 1:
        steps = np.diff(ts)
        bad = np.flatnonzero(steps != HOUR)
        if bad.size:
            i = int(bad[0])
            missing = (ts[i] + HOUR).astype(dt.datetime)
            raise GapInSeriesError(missing)
    for name in ("load",) + WEATHER_FIELDS:
        col = getattr(dataset, name)
        bad = np.flatnonzero(~np.isfinite(col))
        if bad.size:
            raise InvalidRecordError(f"non-finite {name} at {ts[bad[0]]}")
    bad = np.flatnonzero(dataset.load < 0)
    if bad.size:
        i = int(bad[0])
        raise NegativeLoadError(f"negative load {dataset.load[i]} MW at {ts[i]}")
    bad = np.flatnonzero((dataset.humidity < 0) | (dataset.humidity > 100))
    if bad.size:
        i = int(bad[0])
        raise HumidityRangeError(f"humidity {dataset.humidity[i]} outside [0, 100] at {ts[i]}")
    bad = np.flatnonzero(dataset.wind_speed < 0)
    if bad.size:
        i = int(bad[0])
        raise InvalidRecordError(f"negative wind speed {dataset.wind_speed[i]} at {ts[i]}")
    if len(dataset) < MIN_HOURS:
        raise DatasetTooShortError(f"dataset has {len(dataset)} hours, need at least {MIN_HOURS}")
    return dataset


def fit_range(values: Sequence[float]) -> NormalizationSpec:
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0:
        raise DegenerateRangeError("cannot fit a range on no values")
    lo, hi = float(values.min()), float(values.max())
    if not hi > lo:
        raise DegenerateRangeError(f"all values equal {lo}; range is degenerate")
    return NormalizationSpec(lo, hi)


def fit_normalizer(dataset: LoadDataset) -> NormalizationSpec:
    """Min-max range of the dataset's load column."""
    return fit_range(dataset.load)


def fit_weather_normalizers(dataset: LoadDataset) -> dict[str, NormalizationSpec]:
    return {name: fit_range(getattr(dataset, name)) for name in WEATHER_FIELDS}


def normalize(spec: NormalizationSpec, p):
    """Map MW onto [0, 1]; values outside the fitted range clamp."""
    out = (np.asarray(p, dtype=np.float64) - spec.p_min) / (spec.p_max - spec.p_min)
    out = np.clip(out, 0.0, 1.0)
    return float(out) if out.ndim == 0 else out


def denormalize(spec: NormalizationSpec, p_n):
    """Inverse of :func:`normalize`: ``p_min + p_n * (p_max - p_min)``.

    Strict: ``p_n`` outside [0, 1] raises :class:`OutOfRangeError`.
    """
    arr = np.asarray(p_n, dtype=np.float64)
    if not np.all((arr >= 0.0) & (arr <= 1.0)):
        raise OutOfRangeError("normalized value outside [0, 1]")
    out = spec.p_min + arr * (spec.p_max - spec.p_min)
    return float(out) if out.ndim == 0 else out
