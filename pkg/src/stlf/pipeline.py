"""Training dispatch by model kind, date-range splits and the standard benchmark."""

from __future__ import annotations

import datetime as dt
import logging
from dataclasses import asdict, dataclass, fields
from typing import Sequence

import numpy as np

from .data import SyntheticConfig, dataset_days, generate_synthetic
from .domain import LoadDataset
from .errors import ConfigError, InsufficientSamplesError, OverlappingRangesError
from .eval import ForecastReport, evaluate_model
from .features import Sample, build_samples, fit_norms, select_daytype
from .fnn import HEADS, train_fnn
from .fuzzy.forecaster import fis_train
from .fuzzy.membership import SHAPES
from .neural.hopfield import hopfield_train
from .neural.rbf import rbf_train
from .neural.train import TrainConfig, train_elman, train_mlp
from .persist import ModelBundle

log = logging.getLogger(__name__)

MODEL_KINDS = ("mlp", "elman", "rbfn", "hopfield", "fis", "fnn")
SCOPES = ("weekday", "weekend", "both")
DEFAULT_HIDDEN = {"mlp": 24, "elman": 60, "fnn": 24}


@dataclass(frozen=True)
class RunConfig:
    model: str = "mlp"
    scope: str = "both"
    learning_rate: float = 0.01
    max_epochs: int = 10000
    error_target: float = 1e-4
    seed: int = 0
    momentum: float = 0.9
    shape: str = "gaussian"
    n_hidden: int | None = None  # None: the per-kind default
    n_centers: int = 298
    fnn_head: str = "ann"
    map_denominator: str = "predicted"

    def __post_init__(self):
        if self.model not in MODEL_KINDS:
            raise ConfigError(f"unknown model {self.model!r}; expected one of {MODEL_KINDS}")
        if self.scope not in SCOPES:
            raise ConfigError(f"unknown scope {self.scope!r}; expected one of {SCOPES}")
        if self.shape not in SHAPES:
            raise ConfigError(f"unknown membership shape {self.shape!r}; expected one of {SHAPES}")
        if self.fnn_head not in HEADS:
            raise ConfigError(f"unknown FNN head {self.fnn_head!r}; expected one of {HEADS}")
        if self.n_hidden is not None and self.n_hidden < 1:
            raise ConfigError("n_hidden must be positive")
        if self.n_centers < 1:
            raise ConfigError("n_centers must be positive")
        self.train_config()  # validates the optimizer fields

    def train_config(self) -> TrainConfig:
        return TrainConfig(self.learning_rate, self.max_epochs, self.error_target, self.seed, self.momentum)

    def hidden(self) -> int:
        return self.n_hidden if self.n_hidden is not None else DEFAULT_HIDDEN.get(self.model, 0)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def field_names(cls) -> tuple[str, ...]:
        return tuple(f.name for f in fields(cls))


def train_model(samples: Sequence[Sample], run: RunConfig, load_norm=None):
    """Train the kind named by ``run.model``; return ``(model, trace or None)``.

    Only backprop-trained kinds produce a trace. RBF center counts above the
    number of samples are reduced to it (with a warning).
    """
    samples = list(samples)
    if not samples:
        raise InsufficientSamplesError(f"no {run.scope} training samples")
    cfg = run.train_config()
    kind = run.model
    if kind == "mlp":
        return train_mlp(samples, cfg, n_hidden=run.hidden())
    if kind == "elman":
        return train_elman(samples, cfg, n_hidden=run.hidden())
    if kind == "rbfn":
        c = run.n_centers
        if c > len(samples):
            log.warning("rbfn: %d centers requested, only %d samples; using %d", c, len(samples), len(samples))
            c = len(samples)
        return rbf_train(samples, c, cfg), None
    if kind == "hopfield":
        return hopfield_train(samples, seed=run.seed), None
    if kind == "fis":
        return fis_train(samples, run.shape), None
    return train_fnn(samples, cfg, head=run.fnn_head, load_norm=load_norm, n_hidden=run.hidden(), shape=run.shape)


# -- date ranges ----------------------------------------------------------------------


@dataclass(frozen=True)
class DateRange:
    first: dt.date
    last: dt.date

    def __post_init__(self):
        if self.last < self.first:
            raise ConfigError(f"range ends ({self.last}) before it starts ({self.first})")

    def overlaps(self, other: "DateRange") -> bool:
        return self.first <= other.last and other.first <= self.last

    def as_strings(self) -> tuple[str, str]:
        return self.first.isoformat(), self.last.isoformat()


def parse_range(text: str) -> DateRange:
    """``YYYY-MM-DD:YYYY-MM-DD`` (inclusive)."""
    try:
        a, b = text.split(":")
        return DateRange(dt.date.fromisoformat(a.strip()), dt.date.fromisoformat(b.strip()))
    except ValueError as exc:
        raise ConfigError(f"bad date range {text!r}: expected YYYY-MM-DD:YYYY-MM-DD") from exc


def default_split(dataset: LoadDataset) -> tuple[DateRange, DateRange]:
    """Hold out the last 365 days (or the last quarter of a shorter dataset)."""
    days = dataset_days(dataset)
    if len(days) < 8:
        raise InsufficientSamplesError("dataset too short to split into training and test ranges")
    n_test = 365 if len(days) >= 2 * 365 else max(4, len(days) // 4)
    return DateRange(days[0], days[-n_test - 1]), DateRange(days[-n_test], days[-1])


def check_disjoint(train: DateRange, test: DateRange) -> None:
    if train.overlaps(test):
        raise OverlappingRangesError(
            f"training range {train.first}..{train.last} overlaps test range {test.first}..{test.last}"
        )


def _target_days(s: Sample) -> tuple[dt.date, dt.date]:
    return s.target_day, s.target_day + dt.timedelta(days=1)


def samples_in(samples: Sequence[Sample], rng: DateRange) -> list[Sample]:
    """Samples whose whole 48-hour target lies inside ``rng``."""
    return [s for s in samples if rng.first <= _target_days(s)[0] and _target_days(s)[1] <= rng.last]


@dataclass(frozen=True)
class Split:
    train: list[Sample]
    test: list[Sample]
    bundle_norms: tuple  # (load_norm, weather_norms) fitted on the training range


def split_samples(dataset: LoadDataset, train: DateRange, test: DateRange, scope: str = "both") -> Split:
    """Normalizers fitted on the training range; samples filtered by scope.

    Test forecasts may use history from before the test range; only the
    forecast targets have to lie inside it.
    """
    check_disjoint(train, test)
    train_ds = dataset.between(train.first, train.last)
    if len(train_ds) == 0:
        raise InsufficientSamplesError("training range holds no data")
    load_norm, weather_norms = fit_norms(train_ds)
    allS = build_samples(dataset, 1, load_norm, weather_norms)
    tr = select_daytype(samples_in(allS, train), scope)
    te = select_daytype(samples_in(allS, test), scope)
    return Split(tr, te, (load_norm, weather_norms))


# -- the standard synthetic benchmark ------------------------------------------------

BENCHMARK_DAYS = 365
BENCHMARK_TRAIN_DAYS = 300
BENCHMARK_TEST_DAYS = 61


def benchmark_ranges(dataset: LoadDataset) -> tuple[DateRange, DateRange]:
    """First 300 days train, last 61 days test."""
    days = dataset_days(dataset)
    return DateRange(days[0], days[BENCHMARK_TRAIN_DAYS - 1]), DateRange(days[-BENCHMARK_TEST_DAYS], days[-1])


def run_benchmark(
    seed: int,
    kinds: Sequence[str] = MODEL_KINDS,
    *,
    noise_std: float | None = None,
    overrides: dict | None = None,
) -> dict[str, ForecastReport]:
    """Train and evaluate each kind on one synthetic year.

    365 generated days with default generator settings (``noise_std``
    overrides the noise), train on the first 300 days, test on forecasts
    whose targets fall in the last 61. Every kind uses its defaults with
    ``seed``; ``overrides`` maps a kind to extra :class:`RunConfig` fields.
    """
    cfg = SyntheticConfig(num_days=BENCHMARK_DAYS, seed=seed)
    if noise_std is not None:
        cfg = SyntheticConfig(**{**asdict(cfg), "noise_std": noise_std})
    dataset = generate_synthetic(cfg)
    train, test = benchmark_ranges(dataset)
    split = split_samples(dataset, train, test)
    load_norm, _ = split.bundle_norms
    reports = {}
    for kind in kinds:
        run = RunConfig(model=kind, seed=seed, **(overrides or {}).get(kind, {}))
        model, _ = train_model(split.train, run, load_norm)
        reports[kind] = evaluate_model(model, split.test, load_norm, name=kind, dataset=dataset)
    return reports


def make_bundle(model, split: Split, run: RunConfig, train: DateRange) -> ModelBundle:
    load_norm, weather_norms = split.bundle_norms
    return ModelBundle(model, load_norm, dict(weather_norms), run.to_dict(), train.as_strings(), run.scope)


def median(values) -> float:
    return float(np.median(np.asarray(list(values), dtype=np.float64)))
