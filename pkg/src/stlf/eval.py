"""Forecast accuracy metrics, per-model reports and comparison tables."""

from __future__ import annotations

import csv
import datetime as dt
import io
import json
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .data import WEEKDAY, WEEKEND, daytype_of
from .domain import LoadDataset, NormalizationSpec, denormalize
from .errors import (
    ConfigError,
    EmptyInputError,
    LayoutMismatchError,
    MismatchedEvaluationSetsError,
    ZeroActualError,
    ZeroPredictedError,
)
from .features import N_INPUTS, N_OUTPUTS, Sample, stack

MAP_DENOMINATORS = ("predicted", "actual")
WEEKDAY_COLUMNS = ("Mon", "Tue", "Wed", "Thu", "Fri")
WEEKEND_COLUMNS = ("Sat", "Sun", "Hol")
OVERALL = "Overall"
ABSENT = "-"
_DOW = ("Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun")


def _pair(actual, predicted) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(actual, dtype=np.float64).reshape(-1)
    p = np.asarray(predicted, dtype=np.float64).reshape(-1)
    if a.size == 0 or p.size == 0:
        raise EmptyInputError("metrics need at least one hour")
    if a.size != p.size:
        raise LayoutMismatchError(f"{a.size} actual values against {p.size} predictions")
    return a, p


def mape(actual, predicted) -> float:
    """Mean absolute percentage error, ``100/N sum |a - p| / a``."""
    a, p = _pair(actual, predicted)
    if np.any(a <= 0):
        raise ZeroActualError("actual load must be positive")
    # scaling before dividing keeps hand cases like 10/100 exact
    return float(np.mean(100.0 * np.abs(a - p) / a))


def map_err(actual, predicted, denominator: str = "predicted") -> float:
    """Maximum absolute percentage error, ``100 max |a - p| / p``.

    ``denominator="actual"`` divides by the actual load instead.
    """
    a, p = _pair(actual, predicted)
    if denominator == "predicted":
        d = p
        if np.any(d <= 0):
            raise ZeroPredictedError("predicted load must be positive")
    elif denominator == "actual":
        d = a
        if np.any(d <= 0):
            raise ZeroActualError("actual load must be positive")
    else:
        raise ConfigError(f"map denominator must be one of {MAP_DENOMINATORS}")
    return float(np.max(100.0 * np.abs(a - p) / d))


@dataclass(frozen=True)
class HourRow:
    timestamp: dt.datetime
    actual: float
    predicted: float
    lead: int  # 1 or 2: which day of the 48-hour horizon


@dataclass(frozen=True)
class DayRow:
    date: dt.date
    daytype: str
    lead: int
    mape: float
    map: float

    @property
    def column(self) -> str:
        """Table column: weekday name, or ``Hol`` for a holiday on Mon-Fri."""
        wd = self.date.weekday()
        if self.daytype == WEEKEND and wd < 5:
            return "Hol"
        return _DOW[wd]


@dataclass(frozen=True)
class ForecastReport:
    model_name: str
    per_hour: tuple[HourRow, ...]
    per_day: tuple[DayRow, ...]
    overall: tuple[float, float]  # (MAPE %, MAP %)
    map_denominator: str = "predicted"

    def hours_of(self, day_rows: Iterable[DayRow]) -> tuple[np.ndarray, np.ndarray]:
        """Actual and predicted MW over the hours of the given day blocks."""
        index = {(d.date, d.lead) for d in day_rows}
        rows = [h for h in self.per_hour if (h.timestamp.date(), h.lead) in index]
        return np.array([h.actual for h in rows]), np.array([h.predicted for h in rows])

    def to_dict(self) -> dict:
        return {
            "model": self.model_name,
            "map_denominator": self.map_denominator,
            "overall": {"mape": self.overall[0], "map": self.overall[1]},
            "per_day": [
                {"date": d.date.isoformat(), "daytype": d.daytype, "lead": d.lead, "mape": d.mape, "map": d.map}
                for d in self.per_day
            ],
            "per_hour": [
                {
                    "timestamp": h.timestamp.strftime("%Y-%m-%dT%H:%M"),
                    "actual_mw": h.actual,
                    "predicted_mw": h.predicted,
                    "lead": h.lead,
                }
                for h in self.per_hour
            ],
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "ForecastReport":
        hours = tuple(
            HourRow(dt.datetime.strptime(h["timestamp"], "%Y-%m-%dT%H:%M"), h["actual_mw"], h["predicted_mw"], h["lead"])
            for h in d["per_hour"]
        )
        days = tuple(
            DayRow(dt.date.fromisoformat(r["date"]), r["daytype"], r["lead"], r["mape"], r["map"]) for r in d["per_day"]
        )
        return cls(d["model"], hours, days, (d["overall"]["mape"], d["overall"]["map"]), d["map_denominator"])


def build_report(
    model_name: str,
    starts: Sequence[dt.datetime],
    actual_mw,
    predicted_mw,
    holidays: Iterable[dt.date] = (),
    map_denominator: str = "predicted",
) -> ForecastReport:
    """Report from per-forecast 48-hour actual and predicted blocks in MW."""
    A = np.atleast_2d(np.asarray(actual_mw, dtype=np.float64))
    P = np.atleast_2d(np.asarray(predicted_mw, dtype=np.float64))
    if A.shape != P.shape or A.shape[0] != len(starts):
        raise LayoutMismatchError("actual and predicted blocks disagree in shape")
    holidays = frozenset(holidays)
    hours, days = [], []
    for start, a48, p48 in zip(starts, A, P):
        for lead in range(A.shape[1] // 24):
            block = slice(24 * lead, 24 * lead + 24)
            day = (start + dt.timedelta(days=lead)).date()
            a, p = a48[block], p48[block]
            for h in range(24):
                hours.append(HourRow(start + dt.timedelta(hours=24 * lead + h), float(a[h]), float(p[h]), lead + 1))
            days.append(DayRow(day, daytype_of(day, holidays), lead + 1, mape(a, p), map_err(a, p, map_denominator)))
    overall = (mape(A, P), map_err(A, P, map_denominator))
    return ForecastReport(model_name, tuple(hours), tuple(days), overall, map_denominator)


def evaluate_model(
    model,
    samples: Sequence[Sample],
    norm: NormalizationSpec,
    *,
    name: str | None = None,
    dataset: LoadDataset | None = None,
    map_denominator: str = "predicted",
) -> ForecastReport:
    """Forecast every sample, convert to MW and score the 24-hour blocks.

    Model outputs are clipped to [0, 1] before denormalizing. Actual loads
    come from ``dataset`` when given (exact MW), otherwise from the sample
    targets.
    """
    if not samples:
        raise EmptyInputError("no evaluation samples")
    X, T = stack(samples)
    n_in = getattr(model, "n_inputs", N_INPUTS)
    if n_in != X.shape[1]:
        raise LayoutMismatchError(f"model expects {n_in} inputs, samples have {X.shape[1]}")
    P = np.asarray(model.predict(X), dtype=np.float64)
    if P.shape != (len(samples), N_OUTPUTS):
        raise LayoutMismatchError(f"model produced shape {P.shape}, expected {(len(samples), N_OUTPUTS)}")
    predicted = denormalize(norm, np.clip(P, 0.0, 1.0))
    starts = [s.target_start for s in samples]
    if dataset is not None:
        idx = [dataset.index_of(s) for s in starts]
        actual = np.array([dataset.load[i : i + N_OUTPUTS] for i in idx])
        holidays = dataset.holidays
    else:
        if T is None:
            raise EmptyInputError("samples carry no targets and no dataset was given")
        actual = denormalize(norm, T)
        holidays = frozenset(s.target_day for s in samples if s.daytype == WEEKEND and s.target_day.weekday() < 5)
    return build_report(name or getattr(model, "kind", "model"), starts, actual, predicted, holidays, map_denominator)


# -- comparison tables ----------------------------------------------------------------


@dataclass(frozen=True)
class ComparisonTable:
    title: str
    columns: tuple[str, ...]
    rows: tuple[tuple[str, tuple[float | None, ...]], ...]  # (model, cells); None marks absent
    row_label: str = "model"

    def cell(self, model: str, column: str) -> float | None:
        for name, cells in self.rows:
            if name == model:
                return cells[self.columns.index(column)]
        raise KeyError(model)

    def to_dict(self) -> dict:
        return {"title": self.title, "columns": list(self.columns), "rows": {m: list(c) for m, c in self.rows}}


def _check_same_set(reports: Sequence[ForecastReport]):
    ref = [(h.timestamp, h.lead, h.actual) for h in reports[0].per_hour]
    for r in reports[1:]:
        if [(h.timestamp, h.lead, h.actual) for h in r.per_hour] != ref:
            raise MismatchedEvaluationSetsError(
                f"{r.model_name!r} was evaluated on different hours than {reports[0].model_name!r}"
            )


def _cell(report: ForecastReport, days: list[DayRow]) -> float | None:
    if not days:
        return None
    a, p = report.hours_of(days)
    return mape(a, p)


def _table(title, columns, reports, daytype, leads) -> ComparisonTable:
    rows = []
    for r in reports:
        days = [d for d in r.per_day if d.daytype == daytype and d.lead in leads]
        cells = [_cell(r, [d for d in days if d.column == c]) for c in columns]
        cells.append(_cell(r, days))
        rows.append((r.model_name, tuple(cells)))
    return ComparisonTable(title, tuple(columns) + (OVERALL,), tuple(rows))


def compare_models(reports: Sequence[ForecastReport], leads: Iterable[int] = (1, 2)) -> tuple[ComparisonTable, ComparisonTable]:
    """Weekday (Mon-Fri) and weekend (Sat, Sun, holidays) MAPE tables.

    A cell is the MAPE over every hour of every day in that column, which
    for whole days equals the mean of the per-day MAPEs. Columns with no
    days are ``None`` (absent), never zero.
    """
    reports = list(reports)
    if len(reports) < 2:
        raise ConfigError("comparison needs at least two reports")
    _check_same_set(reports)
    leads = tuple(leads)
    return (
        _table("Weekday MAPE (%)", WEEKDAY_COLUMNS, reports, WEEKDAY, leads),
        _table("Weekend MAPE (%)", WEEKEND_COLUMNS, reports, WEEKEND, leads),
    )


def mf_sweep_grid(reports: Mapping[str, ForecastReport], daytype: str = WEEKDAY) -> ComparisonTable:
    """One row per membership shape: MAPE and MAP for each day column."""
    columns = WEEKDAY_COLUMNS if daytype == WEEKDAY else WEEKEND_COLUMNS
    header = []
    for c in columns + (OVERALL,):
        header += [f"{c} MAPE", f"{c} MAP"]
    rows = []
    for shape, r in reports.items():
        days = [d for d in r.per_day if d.daytype == daytype]
        cells = []
        for c in columns + (OVERALL,):
            sel = days if c == OVERALL else [d for d in days if d.column == c]
            if sel:
                a, p = r.hours_of(sel)
                cells += [mape(a, p), map_err(a, p, r.map_denominator)]
            else:
                cells += [None, None]
        rows.append((shape, tuple(cells)))
    kind = "working days" if daytype == WEEKDAY else "weekend days"
    return ComparisonTable(f"MAPE and MAP (%) for {kind} by membership shape", tuple(header), tuple(rows), "shape")


# -- output formats -----------------------------------------------------------------


def format_table(table: ComparisonTable, digits: int = 2) -> str:
    def fmt(v):
        return ABSENT if v is None else f"{v:.{digits}f}"

    header = [table.row_label, *table.columns]
    body = [[name, *(fmt(v) for v in cells)] for name, cells in table.rows]
    widths = [max(len(row[i]) for row in [header, *body]) for i in range(len(header))]
    lines = [table.title]
    for row in [header, *body]:
        first = row[0].ljust(widths[0])
        rest = [cell.rjust(w) for cell, w in zip(row[1:], widths[1:])]
        lines.append("  ".join([first, *rest]).rstrip())
    return "\n".join(lines) + "\n"


def _clean(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def dumps_json(obj) -> str:
    """Deterministic JSON: sorted keys, shortest round-trip floats."""
    return json.dumps(_clean(obj), sort_keys=True, indent=1) + "\n"


def report_json(report: ForecastReport) -> str:
    return dumps_json(report.to_dict())


def plot_csv(reports: Iterable[ForecastReport]) -> str:
    """``timestamp,actual_mw,predicted_mw,model`` rows for every forecast hour."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["timestamp", "actual_mw", "predicted_mw", "model"])
    for r in reports:
        for h in r.per_hour:
            w.writerow([h.timestamp.strftime("%Y-%m-%dT%H:%M"), repr(h.actual), repr(h.predicted), r.model_name])
    return buf.getvalue()
