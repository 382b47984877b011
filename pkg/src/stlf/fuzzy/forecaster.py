"""Mamdani forecaster: one induced rule base per forecast hour.

Rule base ``h`` predicts the normalized load of forecast hour ``h`` from

* ``load1`` - load at the same clock hour one day before the target day,
* ``load2`` - the same, two days before,
* ``temp``  - mean temperature of the day before the forecast starts,
* ``day``   - weekday of the hour's calendar day (crisp, Mon..Sun).

If no rule fires for an input the hour falls back to ``load1``
(persistence); such hours are counted in ``fallbacks``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..errors import NoRuleFiredError
from ..features import DOW_SLICE, N_OUTPUTS, Sample, stack, weekday_from_code
from .rules import MamdaniRule, MamdaniSystem, generate_rules
from .variables import LOAD_LABELS, TEMPERATURE_LABELS, LinguisticVariable, day_variable, make_partition, padded_universe

log = logging.getLogger(__name__)

TEMP_MEAN_D1 = 50


def hour_inputs(x: np.ndarray, hour: int) -> dict[str, float]:
    clock = hour % 24
    day = (weekday_from_code(*x[DOW_SLICE]) + hour // 24) % 7
    return {"load1": float(x[24 + clock]), "load2": float(x[clock]), "temp": float(x[TEMP_MEAN_D1]), "day": float(day)}


@dataclass(eq=False)
class FisForecaster:
    variables: dict[str, LinguisticVariable]
    output_var: LinguisticVariable
    rulebases: list[list[MamdaniRule]]
    shape: str = "gaussian"
    fallbacks: int = 0
    _systems: list = field(default=None, repr=False)

    kind = "fis"

    def __post_init__(self):
        self._systems = [MamdaniSystem(rules, self.variables, self.output_var) for rules in self.rulebases]

    @property
    def n_outputs(self) -> int:
        return len(self.rulebases)

    def forecast(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        out = np.empty(self.n_outputs)
        for h, system in enumerate(self._systems):
            inputs = hour_inputs(x, h)
            try:
                out[h] = system.infer(inputs)
            except NoRuleFiredError:
                self.fallbacks += 1
                out[h] = inputs["load1"]
        return out

    def predict(self, X) -> np.ndarray:
        return np.array([self.forecast(x) for x in np.atleast_2d(X)])


def fis_train(samples: Sequence[Sample], shape: str = "gaussian") -> FisForecaster:
    """Induce the 48 hourly rule bases from training samples."""
    X, Y = stack(samples)
    loads = X[:, :48]
    variables = {
        "load1": make_partition("load1", padded_universe(loads), LOAD_LABELS, shape),
        "load2": make_partition("load2", padded_universe(loads), LOAD_LABELS, shape),
        "temp": make_partition("temp", padded_universe(X[:, TEMP_MEAN_D1]), TEMPERATURE_LABELS, shape),
        "day": day_variable(),
    }
    output_var = make_partition("out", padded_universe(Y), LOAD_LABELS, shape)
    rulebases = []
    for h in range(Y.shape[1]):
        pairs = [(hour_inputs(x, h), float(y[h])) for x, y in zip(X, Y)]
        rulebases.append(generate_rules(pairs, variables, output_var))
    log.debug("fis: %d rules per hour on average", np.mean([len(r) for r in rulebases]))
    return FisForecaster(variables, output_var, rulebases, shape)
