"""Fuzzy-neural cascade: fuzzify the inputs, learn on membership degrees, defuzzify.

The 62-wide normalized input is reduced to 20 raw features, each fuzzified
through its own evenly spaced partition, then concatenated in this order:

====  ======================================  ======  =====
 #    feature                                  terms   width
====  ======================================  ======  =====
 0-2  load mean / min / max of day d-1          7       21
 3-5  load mean / min / max of day d-2          7       21
 6    load of the last hour (t-1)               7        7
 7    load 24 hours before that (t-24)          7        7
 8-13 temperature max/min/avg of d-1, d-2       8       48
14-15 humidity means of d-1, d-2                7       14
16-17 wind speed means of d-1, d-2              7       14
18-19 wind chill means of d-1, d-2              7       14
====  ======================================  ======  =====

The crisp day-of-week pair is appended last, for a core input width of 148.
The core is a :class:`DenseNet` with a logistic output, so each of the 48
outputs is a normalized load ``P_n`` in [0, 1] and the forecast in MW is
``denormalize(load_norm, P_n)``.

A Takagi-Sugeno head (:class:`TsForecaster`) is the alternative: rules over
yesterday's mean load, yesterday's mean temperature and the weekday with
one linear consequent per rule and forecast hour.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .domain import NormalizationSpec, denormalize
from .errors import ConfigError, InsufficientSamplesError, LayoutMismatchError
from .features import DOW_SLICE, N_INPUTS, Sample, stack, weekday_from_code
from .fuzzy.rules import TsRule
from .fuzzy.variables import (
    HUMIDITY_LABELS,
    LOAD_LABELS,
    TEMPERATURE_LABELS,
    WIND_CHILL_LABELS,
    WIND_SPEED_LABELS,
    LinguisticVariable,
    day_variable,
    fuzzify,
    make_partition,
    padded_universe,
)
from .neural.mlp import DenseNet, init_dense
from .neural.train import TrainConfig, TrainTrace, fit_arrays

log = logging.getLogger(__name__)

FEATURE_NAMES = (
    "load_mean_d1", "load_min_d1", "load_max_d1",
    "load_mean_d2", "load_min_d2", "load_max_d2",
    "load_last", "load_lag24",
    "temp_max_d1", "temp_min_d1", "temp_avg_d1",
    "temp_max_d2", "temp_min_d2", "temp_avg_d2",
    "humidity_d1", "humidity_d2",
    "wind_d1", "wind_d2",
    "chill_d1", "chill_d2",
)  # fmt: skip
FEATURE_LABELS = (LOAD_LABELS,) * 8 + (TEMPERATURE_LABELS,) * 6 + (HUMIDITY_LABELS,) * 2 + (
    WIND_SPEED_LABELS,
) * 2 + (WIND_CHILL_LABELS,) * 2
N_CRISP = 2
HEADS = ("ann", "ts")


def raw_features(X) -> np.ndarray:
    """The 20 raw features for a batch of 62-wide inputs (or one input)."""
    X = np.asarray(X, dtype=np.float64)
    single = X.ndim == 1
    X = np.atleast_2d(X)
    if X.shape[1] != N_INPUTS:
        raise LayoutMismatchError(f"expected {N_INPUTS} inputs, got {X.shape[1]}")
    d1, d2 = X[:, 24:48], X[:, 0:24]
    F = np.column_stack(
        [
            d1.mean(axis=1), d1.min(axis=1), d1.max(axis=1),
            d2.mean(axis=1), d2.min(axis=1), d2.max(axis=1),
            X[:, 47], X[:, 24],
            X[:, 48:60],
        ]
    )  # fmt: skip
    return F[0] if single else F


def fit_partitions(X, shape: str = "gaussian") -> tuple[LinguisticVariable, ...]:
    """One partition per raw feature over its padded training range."""
    F = raw_features(np.atleast_2d(X))
    return tuple(
        make_partition(name, padded_universe(F[:, k]), labels, shape)
        for k, (name, labels) in enumerate(zip(FEATURE_NAMES, FEATURE_LABELS))
    )


def encoded_width(partitions: Sequence[LinguisticVariable]) -> int:
    return sum(len(v) for v in partitions) + N_CRISP


def _encode_batch(X, partitions) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    F = raw_features(X)
    blocks = [fuzzify(var, F[:, k]) for k, var in enumerate(partitions)]
    blocks.append(X[:, DOW_SLICE])
    return np.concatenate(blocks, axis=1)


@dataclass(eq=False)
class FnnModel:
    input_partitions: tuple[LinguisticVariable, ...]
    core: DenseNet
    load_norm: NormalizationSpec

    kind = "fnn"

    def __post_init__(self):
        self.input_partitions = tuple(self.input_partitions)
        if len(self.input_partitions) != len(FEATURE_NAMES):
            raise ConfigError(f"need {len(FEATURE_NAMES)} partitions, got {len(self.input_partitions)}")
        if self.core.n_inputs != encoded_width(self.input_partitions):
            raise ConfigError(
                f"core takes {self.core.n_inputs} inputs but the partitions encode "
                f"{encoded_width(self.input_partitions)}"
            )
        if self.core.output_activation != "logistic":
            raise ConfigError("the core output must be squashed (logistic)")

    @property
    def shape(self) -> str:
        return self.input_partitions[0].terms[0][1].shape

    def encode(self, X) -> np.ndarray:
        return _encode_batch(X, self.input_partitions)

    def predict(self, X) -> np.ndarray:
        """Normalized 48-hour outputs ``P_n`` for a batch of inputs."""
        return self.core.predict(self.encode(X))


def fnn_encode(sample, model: FnnModel) -> np.ndarray:
    """Fuzzified core input for one sample (or one raw 62-wide input)."""
    x = sample.input if isinstance(sample, Sample) else sample
    return model.encode(x)[0]


def fnn_train(
    samples: Sequence[Sample],
    cfg: TrainConfig = TrainConfig(),
    *,
    load_norm: NormalizationSpec | None = None,
    n_hidden: int = 24,
    shape: str = "gaussian",
) -> tuple[FnnModel, TrainTrace]:
    """Fit the partitions on the training inputs, then backprop-train the core.

    ``load_norm`` is the spec the sample loads were normalized with; it is
    kept for defuzzification and defaults to the identity on [0, 1].
    """
    if not samples:
        raise InsufficientSamplesError("no training samples")
    X, T = stack(samples)
    if T is None:
        raise InsufficientSamplesError("training samples need targets")
    partitions = fit_partitions(X, shape)
    E = _encode_batch(X, partitions)
    core = init_dense(
        E.shape[1], n_hidden, T.shape[1], seed=cfg.seed, hidden_activation="tanh", output_activation="logistic"
    )
    core, trace = fit_arrays(core, E, T, cfg)
    model = FnnModel(partitions, core, load_norm or NormalizationSpec(0.0, 1.0))
    return model, trace


def fnn_forecast(model, sample) -> np.ndarray:
    """48 hourly loads in MW for one sample input."""
    x = sample.input if isinstance(sample, Sample) else np.asarray(sample, dtype=np.float64)
    p_n = model.predict(x)[0]
    return denormalize(model.load_norm, np.clip(p_n, 0.0, 1.0))


# -- Takagi-Sugeno head -------------------------------------------------------

TS_INPUTS = ("load", "temp", "day")


def ts_inputs(X) -> np.ndarray:
    """``(load mean d-1, temp avg d-1, weekday of the first target day)`` per row."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    F = raw_features(X)
    day = np.array([weekday_from_code(*row) for row in X[:, DOW_SLICE]], dtype=np.float64)
    return np.column_stack([F[:, 0], F[:, 10], day])


def _rule_weights(Z, variables, antecedents) -> np.ndarray:
    deg = [fuzzify(variables[name], Z[:, k]) for k, name in enumerate(TS_INPUTS)]
    W = np.ones((Z.shape[0], len(antecedents)))
    for r, labels in enumerate(antecedents):
        for k, idx in enumerate(labels):
            W[:, r] = np.minimum(W[:, r], deg[k][:, idx])
    return W


@dataclass(eq=False)
class TsForecaster:
    """One Takagi-Sugeno rule base per forecast hour, sharing antecedents.

    ``coefficients[h, r]`` holds ``(q0, q_load, q_temp, q_day)`` for rule
    ``r`` at hour ``h``.
    """

    variables: dict[str, LinguisticVariable]
    antecedents: tuple[tuple[int, ...], ...]  # term index per input
    coefficients: np.ndarray  # hours x rules x 4
    load_norm: NormalizationSpec

    kind = "fnn-ts"

    def __post_init__(self):
        self.antecedents = tuple(tuple(int(i) for i in a) for a in self.antecedents)
        self.coefficients = np.ascontiguousarray(self.coefficients, dtype=np.float64)
        if self.coefficients.shape[1:] != (len(self.antecedents), len(TS_INPUTS) + 1):
            raise ConfigError("coefficient array does not match the rule base")

    def rules(self, hour: int) -> list[TsRule]:
        return [
            TsRule(
                tuple((name, self.variables[name].labels[i]) for name, i in zip(TS_INPUTS, a)),
                tuple(self.coefficients[hour, r]),
            )
            for r, a in enumerate(self.antecedents)
        ]

    def predict(self, X) -> np.ndarray:
        Z = ts_inputs(X)
        W = _rule_weights(Z, self.variables, self.antecedents)
        total = W.sum(axis=1, keepdims=True)
        Wn = np.divide(W, total, out=np.full_like(W, 1.0 / W.shape[1]), where=total > 0)
        Z1 = np.column_stack([np.ones(len(Z)), Z])
        # f[n, h, r] = q[h, r] . z[n]
        f = np.einsum("nk,hrk->nhr", Z1, self.coefficients)
        return np.einsum("nr,nhr->nh", Wn, f)


def ts_train(
    samples: Sequence[Sample],
    *,
    load_norm: NormalizationSpec | None = None,
    shape: str = "gaussian",
    ridge: float = 1e-6,
) -> TsForecaster:
    """Rules from the observed best-term combinations; consequents by least squares."""
    if not samples:
        raise InsufficientSamplesError("no training samples")
    X, T = stack(samples)
    if T is None:
        raise InsufficientSamplesError("training samples need targets")
    Z = ts_inputs(X)
    variables = {
        "load": make_partition("load", padded_universe(Z[:, 0]), LOAD_LABELS, shape),
        "temp": make_partition("temp", padded_universe(Z[:, 1]), TEMPERATURE_LABELS, shape),
        "day": day_variable(),
    }
    best = np.column_stack([np.argmax(fuzzify(variables[n], Z[:, k]), axis=1) for k, n in enumerate(TS_INPUTS)])
    antecedents = tuple(dict.fromkeys(map(tuple, best.tolist())))
    W = _rule_weights(Z, variables, antecedents)
    Wn = W / np.maximum(W.sum(axis=1, keepdims=True), 1e-300)
    Z1 = np.column_stack([np.ones(len(Z)), Z])
    # design row for sample n: concat over rules of Wn[n, r] * z1[n]
    D = (Wn[:, :, None] * Z1[:, None, :]).reshape(len(Z), -1)
    A = D.T @ D + ridge * np.eye(D.shape[1])
    Q = np.linalg.solve(A, D.T @ T)  # (rules*4) x hours
    coeffs = Q.T.reshape(T.shape[1], len(antecedents), Z1.shape[1])
    log.debug("ts head: %d rules", len(antecedents))
    return TsForecaster(variables, antecedents, coeffs, load_norm or NormalizationSpec(0.0, 1.0))


def train_fnn(
    samples: Sequence[Sample],
    cfg: TrainConfig = TrainConfig(),
    *,
    head: str = "ann",
    load_norm: NormalizationSpec | None = None,
    n_hidden: int = 24,
    shape: str = "gaussian",
):
    """Dispatch on ``head``; returns ``(model, trace or None)``."""
    if head == "ann":
        return fnn_train(samples, cfg, load_norm=load_norm, n_hidden=n_hidden, shape=shape)
    if head == "ts":
        return ts_train(samples, load_norm=load_norm, shape=shape), None
    raise ConfigError(f"unknown FNN head {head!r}; expected one of {HEADS}")

