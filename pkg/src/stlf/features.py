"""62-input / 48-output sample encoding.

Input layout (0-based):

====== =====================================================
0-47   normalized load, hours t-48 ... t-1 (chronological)
48-50  temperature max, min, mean of day d-1
51-53  temperature max, min, mean of day d-2
54-55  mean humidity of d-1, d-2
56-57  mean wind speed of d-1, d-2
58-59  mean wind chill of d-1, d-2
60-61  weekday of the first target day as ((sin+1)/2, (cos+1)/2),
       Monday at angle 0
====== =====================================================

The target is the normalized load of hours t ... t+47.
"""

from __future__ import annotations

import datetime as dt
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .data import daytype_of
from .domain import LoadDataset, NormalizationSpec, fit_normalizer, fit_weather_normalizers, normalize
from .errors import InsufficientFutureError, InsufficientHistoryError, LayoutMismatchError

N_INPUTS = 62
N_OUTPUTS = 48
HISTORY_HOURS = 48

LOAD_SLICE = slice(0, 48)
TEMP_SLICE = slice(48, 54)
HUMIDITY_SLICE = slice(54, 56)
WIND_SLICE = slice(56, 58)
CHILL_SLICE = slice(58, 60)
DOW_SLICE = slice(60, 62)


@dataclass(frozen=True, eq=False)
class Sample:
    input: np.ndarray
    target: np.ndarray | None
    target_start: dt.datetime
    daytype: str

    def __post_init__(self):
        x = np.array(self.input, dtype=np.float64)
        if x.shape != (N_INPUTS,):
            raise LayoutMismatchError(f"input must have {N_INPUTS} entries, got shape {x.shape}")
        if not np.all(np.isfinite(x)) or x.min() < 0.0 or x.max() > 1.0:
            raise LayoutMismatchError("input entries must be finite and within [0, 1]")
        x.setflags(write=False)
        object.__setattr__(self, "input", x)
        if self.target is not None:
            y = np.array(self.target, dtype=np.float64)
            if y.shape != (N_OUTPUTS,):
                raise LayoutMismatchError(f"target must have {N_OUTPUTS} entries, got shape {y.shape}")
            y.setflags(write=False)
            object.__setattr__(self, "target", y)
        ts = self.target_start
        if (ts.hour, ts.minute, ts.second, ts.microsecond) != (0, 0, 0, 0):
            raise LayoutMismatchError(f"target_start {ts} is not midnight")

    @property
    def target_day(self) -> dt.date:
        return self.target_start.date()

    def without_target(self) -> "Sample":
        return Sample(self.input, None, self.target_start, self.daytype)


def weekday_code(weekday: int) -> tuple[float, float]:
    angle = 2.0 * math.pi * weekday / 7.0
    return (math.sin(angle) + 1.0) / 2.0, (math.cos(angle) + 1.0) / 2.0


def weekday_from_code(sin01: float, cos01: float) -> int:
    angle = math.atan2(2.0 * sin01 - 1.0, 2.0 * cos01 - 1.0)
    return int(round(angle / (2.0 * math.pi) * 7.0)) % 7


def _window(dataset: LoadDataset, target_start) -> int:
    t = dataset.index_of(target_start)
    if t < HISTORY_HOURS or t > len(dataset):
        raise InsufficientHistoryError(f"need {HISTORY_HOURS} hours of history before {target_start}")
    return t


def encode_input(
    dataset: LoadDataset,
    target_start,
    load_norm: NormalizationSpec,
    weather_norms: Mapping[str, NormalizationSpec],
) -> np.ndarray:
    """Build the 62-entry input vector for a forecast starting at ``target_start``."""
    t = _window(dataset, target_start)
    x = np.empty(N_INPUTS)
    x[LOAD_SLICE] = normalize(load_norm, dataset.load[t - 48 : t])
    d1, d2 = slice(t - 24, t), slice(t - 48, t - 24)

    temp = dataset.temperature
    tn = weather_norms["temperature"]
    stats = [f(temp[d]) for d in (d1, d2) for f in (np.max, np.min, np.mean)]
    x[TEMP_SLICE] = normalize(tn, np.array(stats))

    for name, sl in (("humidity", HUMIDITY_SLICE), ("wind_speed", WIND_SLICE), ("wind_chill", CHILL_SLICE)):
        col = getattr(dataset, name)
        x[sl] = normalize(weather_norms[name], np.array([col[d1].mean(), col[d2].mean()]))

    day = np.datetime64(target_start, "D").astype(dt.date)
    x[DOW_SLICE] = weekday_code(day.weekday())
    return x


def encode_target(dataset: LoadDataset, target_start, load_norm: NormalizationSpec) -> np.ndarray:
    t = dataset.index_of(target_start)
    if t < 0 or t + N_OUTPUTS > len(dataset):
        raise InsufficientFutureError(f"need {N_OUTPUTS} hours from {target_start}")
    return normalize(load_norm, dataset.load[t : t + N_OUTPUTS])


def fit_norms(dataset: LoadDataset) -> tuple[NormalizationSpec, dict[str, NormalizationSpec]]:
    return fit_normalizer(dataset), fit_weather_normalizers(dataset)


def eligible_starts(dataset: LoadDataset) -> list[int]:
    """Row indices of midnights with 48 h of history and 48 h of future."""
    ts = dataset.timestamps
    hours = (ts - ts.astype("datetime64[D]").astype("datetime64[h]")).astype(int)
    idx = np.flatnonzero(hours == 0)
    return [int(i) for i in idx if i >= HISTORY_HOURS and i + N_OUTPUTS <= len(dataset)]


def build_samples(
    dataset: LoadDataset,
    stride: int = 1,
    load_norm: NormalizationSpec | None = None,
    weather_norms: Mapping[str, NormalizationSpec] | None = None,
    *,
    with_target: bool = True,
) -> list[Sample]:
    """One sample per eligible midnight, stepping ``stride`` days.

    Normalizers default to ranges fitted on ``dataset`` itself; pass the
    training-range normalizers when encoding held-out data.
    """
    if stride < 1:
        raise ValueError("stride must be >= 1")
    if load_norm is None or weather_norms is None:
        fitted_load, fitted_weather = fit_norms(dataset)
        load_norm = load_norm or fitted_load
        weather_norms = weather_norms or fitted_weather
    samples = []
    for i in eligible_starts(dataset)[::stride]:
        start = dataset.timestamps[i].astype(dt.datetime)
        target = encode_target(dataset, start, load_norm) if with_target else None
        samples.append(
            Sample(
                input=encode_input(dataset, start, load_norm, weather_norms),
                target=target,
                target_start=start,
                daytype=daytype_of(start.date(), dataset.holidays),
            )
        )
    return samples


def stack(samples: Sequence[Sample]) -> tuple[np.ndarray, np.ndarray | None]:
    """Stack inputs (and targets, if every sample has one) into matrices."""
    X = np.array([s.input for s in samples], dtype=np.float64).reshape(len(samples), N_INPUTS)
    if all(s.target is not None for s in samples):
        Y = np.array([s.target for s in samples], dtype=np.float64).reshape(len(samples), N_OUTPUTS)
    else:
        Y = None
    return X, Y


def select_daytype(samples: Sequence[Sample], daytype: str) -> list[Sample]:
    if daytype == "both":
        return list(samples)
    return [s for s in samples if s.daytype == daytype]
