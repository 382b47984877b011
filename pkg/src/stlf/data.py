"""CSV ingestion and the deterministic synthetic load generator."""

from __future__ import annotations

import csv
import datetime as dt
import io
import math
from dataclasses import dataclass, field
from typing import Iterable, TextIO

import numpy as np

from .domain import LoadDataset, validate_dataset
from .errors import ConfigError, MalformedRowError, SchemaMismatchError

CSV_HEADER = ("timestamp", "load_mw", "temp_c", "humidity_pct", "wind_mps", "wind_chill_c")
TIMESTAMP_FORMAT = "%Y-%m-%dT%H:%M"

WEEKDAY = "weekday"
WEEKEND = "weekend"
DAY_NAMES = ("Monday", "Tuesday", "Wednesday", "Thursday", "Friday", "Saturday", "Sunday")

# Temperature at which the working-day peak equals base_peak (January mean).
TEMP_REF_C = -4.0
SEASONAL_MEAN_C = 8.0
SEASONAL_AMPLITUDE_C = 12.0
DIURNAL_AMPLITUDE_C = 4.0
TEMP_AR_COEF = 0.95
TEMP_NOISE_STD_C = 1.0
WEEKDAY_ADJUST = 0.03
# humidity and wind: bounded mean-reverting walks
WALK_REVERSION = 0.97
HUMIDITY_MEAN = 72.0
HUMIDITY_TEMP_SLOPE = 1.5
HUMIDITY_STEP = 1.5
WIND_MEAN_MPS = 4.0
WIND_MAX_MPS = 25.0
WIND_STEP = 0.4


# -- calendar -----------------------------------------------------------------


def daytype_of(day: dt.date, holidays: Iterable[dt.date] = ()) -> str:
    """``weekend`` for Saturday, Sunday and holidays, else ``weekday``."""
    if day.weekday() >= 5 or day in holidays:
        return WEEKEND
    return WEEKDAY


def dataset_days(dataset: LoadDataset) -> list[dt.date]:
    days = np.unique(dataset.timestamps.astype("datetime64[D]"))
    return [d.astype(dt.date) for d in days]


def split_by_daytype(dataset: LoadDataset) -> tuple[list[dt.date], list[dt.date]]:
    """Partition the dataset's calendar days into (weekday, weekend) lists."""
    weekday, weekend = [], []
    for day in dataset_days(dataset):
        (weekday if daytype_of(day, dataset.holidays) == WEEKDAY else weekend).append(day)
    return weekday, weekend


# -- CSV ----------------------------------------------------------------------


def _read_text(text) -> str:
    if isinstance(text, str):
        return text
    return text.read()


def parse_holidays(text) -> frozenset[dt.date]:
    """One ``YYYY-MM-DD`` per line; blank lines and ``#`` comments ignored."""
    days = set()
    for lineno, line in enumerate(_read_text(text).splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            days.add(dt.date.fromisoformat(line))
        except ValueError:
            raise MalformedRowError(lineno, f"bad holiday date {line!r}") from None
    return frozenset(days)


def format_holidays(holidays: Iterable[dt.date]) -> str:
    return "".join(f"{d.isoformat()}\n" for d in sorted(holidays))


def _parse_timestamp(raw: str, lineno: int) -> dt.datetime:
    try:
        ts = dt.datetime.strptime(raw, TIMESTAMP_FORMAT)
    except ValueError:
        raise MalformedRowError(lineno, f"bad timestamp {raw!r}") from None
    if ts.minute != 0:
        raise MalformedRowError(lineno, f"timestamp {raw!r} is not on a whole hour")
    return ts


def parse_csv(text, holidays: Iterable[dt.date] = ()) -> LoadDataset:
    """Parse the hourly CSV format and return a validated dataset.

    ``text`` may be a string or a readable text stream. Line numbers in
    errors count the header as line 1.
    """
    reader = csv.reader(io.StringIO(_read_text(text)))
    try:
        header = next(reader)
    except StopIteration:
        raise SchemaMismatchError("empty input: header row missing") from None
    if tuple(h.strip() for h in header) != CSV_HEADER:
        raise SchemaMismatchError(f"expected header {','.join(CSV_HEADER)!r}, got {','.join(header)!r}")

    stamps, cols = [], [[] for _ in range(5)]
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(CSV_HEADER):
            raise MalformedRowError(lineno, f"expected {len(CSV_HEADER)} fields, got {len(row)}")
        stamps.append(np.datetime64(_parse_timestamp(row[0].strip(), lineno), "h"))
        for k, (name, raw) in enumerate(zip(CSV_HEADER[1:], row[1:])):
            raw = raw.strip()
            if not raw:
                raise MalformedRowError(lineno, f"missing {name}")
            try:
                value = float(raw)
            except ValueError:
                raise MalformedRowError(lineno, f"non-numeric {name} {raw!r}") from None
            cols[k].append(value)

    dataset = LoadDataset(
        timestamps=np.array(stamps, dtype="datetime64[h]"),
        load=cols[0],
        temperature=cols[1],
        humidity=cols[2],
        wind_speed=cols[3],
        wind_chill=cols[4],
        holidays=frozenset(holidays),
    )
    return validate_dataset(dataset)


def format_csv(dataset: LoadDataset) -> str:
    out = io.StringIO()
    out.write(",".join(CSV_HEADER) + "\n")
    stamps = dataset.timestamps.astype(dt.datetime)
    for i, ts in enumerate(stamps):
        values = (dataset.load[i], dataset.temperature[i], dataset.humidity[i], dataset.wind_speed[i], dataset.wind_chill[i])
        out.write(ts.strftime(TIMESTAMP_FORMAT) + "".join(f",{float(v)!r}" for v in values) + "\n")
    return out.getvalue()


def write_csv(dataset: LoadDataset, stream: TextIO) -> None:
    stream.write(format_csv(dataset))


# -- synthetic generator --------------------------------------------------------


@dataclass(frozen=True)
class SyntheticConfig:
    start_date: dt.date = dt.date(2000, 1, 1)
    num_days: int = 365
    base_peak: float = 1000.0
    weekend_dip: float = 0.15
    holiday_dates: frozenset = field(default_factory=frozenset)
    temp_coupling: float = 8.0
    noise_std: float = 10.0
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "holiday_dates", frozenset(self.holiday_dates))
        if int(self.num_days) != self.num_days or self.num_days < 4:
            raise ConfigError(f"num_days must be an integer >= 4, got {self.num_days}")
        if not self.base_peak > 0:
            raise ConfigError(f"base_peak must be positive, got {self.base_peak}")
        if not 0 < self.weekend_dip < 1:
            raise ConfigError(f"weekend_dip must lie in (0, 1), got {self.weekend_dip}")
        if not self.noise_std >= 0:
            raise ConfigError(f"noise_std must be >= 0, got {self.noise_std}")
        if not math.isfinite(self.temp_coupling):
            raise ConfigError("temp_coupling must be finite")


def _bump(h, center, width):
    return np.exp(-((h - center) ** 2) / (2.0 * width**2))


def _profile(h, base_level, base_swing, bumps):
    # sinusoidal night trough at 03:00 plus Gaussian activity bumps
    shape = base_level - base_swing * np.cos(2 * np.pi * (h - 3) / 24)
    for height, center, width in bumps:
        shape = shape + height * _bump(h, center, width)
    return shape


_HOURS = np.arange(24, dtype=np.float64)


def _unit_peak(shape):
    return shape / shape.max()


WORKDAY_SHAPE = _unit_peak(_profile(_HOURS, 0.62, 0.06, [(0.28, 9.0, 2.5), (0.30, 19.0, 2.0)]))
SATURDAY_SHAPE = _unit_peak(_profile(_HOURS, 0.62, 0.06, [(0.18, 10.5, 3.0), (0.26, 19.0, 2.2)]))
SUNDAY_SHAPE = _unit_peak(_profile(_HOURS, 0.58, 0.05, [(0.12, 11.5, 3.0), (0.25, 19.5, 2.2)]))


def day_shape(day: dt.date, holidays: Iterable[dt.date], weekend_dip: float) -> np.ndarray:
    """Relative 24-hour load shape (peak 1 on an ordinary working day)."""
    wd = day.weekday()
    if day in holidays or wd == 6:
        return SUNDAY_SHAPE * (1.0 - weekend_dip)
    if wd == 5:
        return SATURDAY_SHAPE * (1.0 - weekend_dip)
    shape = WORKDAY_SHAPE.copy()
    if wd == 0:
        shape[5:12] *= 1.0 + WEEKDAY_ADJUST
    elif wd == 4:
        shape[16:24] *= 1.0 - WEEKDAY_ADJUST
    return shape


def seasonal_temperature(day: dt.date, hours=_HOURS) -> np.ndarray:
    doy = day.timetuple().tm_yday
    seasonal = SEASONAL_MEAN_C - SEASONAL_AMPLITUDE_C * math.cos(2 * math.pi * (doy - 15) / 365.25)
    return seasonal + DIURNAL_AMPLITUDE_C * np.sin(2 * np.pi * (hours - 9) / 24)


def synthetic_load(timestamps, temperature, config: SyntheticConfig) -> np.ndarray:
    """Noise-free load for the given hours and temperatures.

    Pure function of (date, hour, temperature); the generator adds noise on top.
    """
    stamps = np.asarray(timestamps, dtype="datetime64[h]")
    temperature = np.asarray(temperature, dtype=np.float64)
    days = stamps.astype("datetime64[D]")
    hours = (stamps - days.astype("datetime64[h]")).astype(int)
    out = np.empty(len(stamps))
    cache: dict = {}
    for i, (d, h) in enumerate(zip(days, hours)):
        if d not in cache:
            cache[d] = day_shape(d.astype(dt.date), config.holiday_dates, config.weekend_dip)
        out[i] = config.base_peak * cache[d][h]
    return out - config.temp_coupling * (temperature - TEMP_REF_C)


def wind_chill(temp_c, wind_mps) -> np.ndarray:
    """Environment Canada wind-chill index; equals air temperature outside its domain."""
    temp_c = np.asarray(temp_c, dtype=np.float64)
    v = np.asarray(wind_mps, dtype=np.float64) * 3.6
    vp = np.power(np.maximum(v, 0.0), 0.16)
    wci = 13.12 + 0.6215 * temp_c - 11.37 * vp + 0.3965 * temp_c * vp
    return np.where((temp_c <= 10.0) & (v > 4.8), wci, temp_c)


def generate_synthetic(config: SyntheticConfig) -> LoadDataset:
    """Deterministic synthetic hourly load and weather series.

    All randomness comes from one ``numpy`` generator seeded with
    ``config.seed``; a shorter run with the same seed and start date is an
    exact prefix of a longer one.
    """
    n = config.num_days * 24
    rng = np.random.default_rng(config.seed)
    # columns: temperature innovation, humidity step, wind step, load noise
    draws = rng.standard_normal((n, 4))

    start = np.datetime64(config.start_date, "h")
    stamps = start + np.arange(n) * np.timedelta64(1, "h")

    base_temp = np.concatenate(
        [seasonal_temperature(config.start_date + dt.timedelta(days=d)) for d in range(config.num_days)]
    )
    innov = TEMP_NOISE_STD_C * math.sqrt(1 - TEMP_AR_COEF**2)
    ar = np.empty(n)
    humidity = np.empty(n)
    wind = np.empty(n)
    ar_prev, hum_prev, wind_prev = draws[0, 0] * TEMP_NOISE_STD_C, 0.0, WIND_MEAN_MPS
    for i in range(n):
        if i:
            ar_prev = TEMP_AR_COEF * ar_prev + innov * draws[i, 0]
            hum_prev = WALK_REVERSION * hum_prev + HUMIDITY_STEP * draws[i, 1]
            wind_prev = WIND_MEAN_MPS + WALK_REVERSION * (wind_prev - WIND_MEAN_MPS) + WIND_STEP * draws[i, 2]
            wind_prev = min(WIND_MAX_MPS, max(0.0, wind_prev))
        ar[i], humidity[i], wind[i] = ar_prev, hum_prev, wind_prev
    temperature = base_temp + ar
    # relative humidity runs opposite to temperature, plus its own walk
    humidity = np.clip(HUMIDITY_MEAN - HUMIDITY_TEMP_SLOPE * (temperature - SEASONAL_MEAN_C) + humidity, 20.0, 100.0)

    load = synthetic_load(stamps, temperature, config)
    if config.noise_std > 0:
        load = load + config.noise_std * draws[:, 3]
    load = np.maximum(load, 0.0)

    dataset = LoadDataset(
        timestamps=stamps,
        load=load,
        temperature=temperature,
        humidity=humidity,
        wind_speed=wind,
        wind_chill=wind_chill(temperature, wind),
        holidays=config.holiday_dates,
    )
    return validate_dataset(dataset)
