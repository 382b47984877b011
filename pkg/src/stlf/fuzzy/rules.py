"""Mamdani and Takagi-Sugeno rule bases, inference and rule induction."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .. import _accel
from ..errors import AllRulesZeroError, ConfigError, NoRuleFiredError
from .variables import LinguisticVariable, fuzzify

CENTROID_POINTS = 201


@dataclass(frozen=True)
class MamdaniRule:
    antecedent: tuple[tuple[str, str], ...]  # (variable, label) conjuncts
    consequent: tuple[str, str]  # (output variable, label)

    def __post_init__(self):
        object.__setattr__(self, "antecedent", tuple(tuple(c) for c in self.antecedent))
        object.__setattr__(self, "consequent", tuple(self.consequent))
        if not self.antecedent:
            raise ConfigError("a rule needs at least one antecedent")


@dataclass(frozen=True)
class TsRule:
    """``IF x1 IS A1 AND ... THEN f = q0 + q1 x1 + ...``.

    Coefficient ``k >= 1`` multiplies the ``k``-th antecedent variable.
    """

    antecedent: tuple[tuple[str, str], ...]
    coefficients: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "antecedent", tuple(tuple(c) for c in self.antecedent))
        object.__setattr__(self, "coefficients", tuple(float(q) for q in self.coefficients))
        if not self.antecedent:
            raise ConfigError("a rule needs at least one antecedent")
        if len(self.coefficients) != len(self.antecedent) + 1:
            raise ConfigError(
                f"{len(self.antecedent)} antecedents need {len(self.antecedent) + 1} coefficients, "
                f"got {len(self.coefficients)}"
            )

    def consequent(self, inputs: Mapping[str, float]) -> float:
        q = self.coefficients
        return q[0] + sum(qk * float(inputs[var]) for qk, (var, _) in zip(q[1:], self.antecedent))


def _check_rule_vars(rules, variables: Mapping[str, LinguisticVariable]):
    for rule in rules:
        for var, label in rule.antecedent:
            if var not in variables:
                raise ConfigError(f"rule references undeclared variable {var!r}")
            variables[var].index(label)


def firing_strength(antecedent, variables: Mapping[str, LinguisticVariable], inputs: Mapping[str, float]) -> float:
    """Minimum of the antecedent membership degrees."""
    w = 1.0
    for var, label in antecedent:
        v = variables[var]
        w = min(w, float(fuzzify(v, inputs[var])[v.index(label)]))
    return w


def centroid(grid: np.ndarray, aggregated: np.ndarray) -> float:
    area = aggregated.sum()
    if not area > 0:
        raise NoRuleFiredError("aggregated output set is empty")
    return float(np.dot(grid, aggregated) / area)


class MamdaniSystem:
    """A Mamdani rule base compiled to index arrays for repeated inference.

    min t-norm, min implication, max aggregation, centroid on a
    201-point grid of the output universe.
    """

    def __init__(
        self,
        rules: Sequence[MamdaniRule],
        variables: Mapping[str, LinguisticVariable],
        output_var: LinguisticVariable,
        points: int = CENTROID_POINTS,
    ):
        _check_rule_vars(rules, variables)
        for rule in rules:
            if rule.consequent[0] != output_var.name:
                raise ConfigError(f"rule concludes on {rule.consequent[0]!r}, expected {output_var.name!r}")
            output_var.index(rule.consequent[1])
        self.rules = list(rules)
        self.variables = dict(variables)
        self.output_var = output_var
        self.input_names = list(self.variables)
        self.grid = np.linspace(output_var.universe[0], output_var.universe[1], points)
        self.term_grid = fuzzify(output_var, self.grid).T.copy()  # terms x points
        offsets, o = {}, 0
        for name in self.input_names:
            offsets[name] = o
            o += len(self.variables[name])
        self._width = o
        # column of each conjunct in the concatenated degree vector; -1 pads
        depth = max((len(r.antecedent) for r in self.rules), default=1)
        cols = np.full((len(self.rules), depth), -1, dtype=np.int64)
        for i, r in enumerate(self.rules):
            for j, (var, label) in enumerate(r.antecedent):
                cols[i, j] = offsets[var] + self.variables[var].index(label)
        self._cols = cols
        self._consequent = np.array([output_var.index(r.consequent[1]) for r in self.rules], dtype=np.int64)

    def degrees(self, inputs: Mapping[str, float]) -> np.ndarray:
        return np.concatenate([fuzzify(self.variables[n], inputs[n]) for n in self.input_names])

    def firing(self, degrees: np.ndarray) -> np.ndarray:
        padded = np.append(degrees, 1.0)  # index -1 -> neutral element of min
        return padded[self._cols].min(axis=1) if len(self.rules) else np.zeros(0)

    def aggregate(self, inputs: Mapping[str, float]) -> np.ndarray:
        w = self.firing(self.degrees(inputs))
        if not np.any(w > 0):
            raise NoRuleFiredError("no rule fired for the given inputs")
        return _accel.mamdani_aggregate(w, self._consequent, self.term_grid)

    def infer(self, inputs: Mapping[str, float]) -> float:
        return centroid(self.grid, self.aggregate(inputs))


def mamdani_infer(
    rules: Sequence[MamdaniRule],
    variables: Mapping[str, LinguisticVariable],
    inputs: Mapping[str, float],
    output_var: LinguisticVariable,
) -> float:
    """Crisp Mamdani output for one set of named inputs."""
    return MamdaniSystem(rules, variables, output_var).infer(inputs)


def ts_weights(rules: Sequence[TsRule], variables, inputs) -> np.ndarray:
    return np.array([firing_strength(r.antecedent, variables, inputs) for r in rules])


def weighted_average(weights, outputs) -> float:
    """``sum(w_i f_i) / sum(w_i)``; raises when every weight is zero."""
    w = np.asarray(weights, dtype=np.float64)
    total = w.sum()
    if not total > 0:
        raise AllRulesZeroError("every rule has zero firing strength")
    return float(np.dot(w, np.asarray(outputs, dtype=np.float64)) / total)


def ts_infer(
    rules: Sequence[TsRule],
    variables: Mapping[str, LinguisticVariable],
    inputs: Mapping[str, float],
) -> float:
    """Firing-strength weighted average of the rules' linear consequents."""
    _check_rule_vars(rules, variables)
    w = ts_weights(rules, variables, inputs)
    return weighted_average(w, [r.consequent(inputs) for r in rules])


def generate_rules(
    samples: Sequence[tuple[Mapping[str, float], float]],
    variables: Mapping[str, LinguisticVariable],
    output_var: LinguisticVariable,
) -> list[MamdaniRule]:
    """Induce one rule per distinct antecedent from data.

    Each value maps to its highest-degree term (lowest index on ties). When
    several samples share an antecedent, the one with the largest product of
    degrees (antecedent and consequent) supplies the rule. Rules come out in
    order of first appearance.
    """
    if not samples:
        raise ConfigError("rule induction needs at least one sample")
    names = list(variables)
    labels_idx, degree = [], np.ones(len(samples))
    for name in names:
        mu = fuzzify(variables[name], np.array([float(inputs[name]) for inputs, _ in samples]))
        k = np.argmax(mu, axis=1)
        labels_idx.append(k)
        degree *= mu[np.arange(len(samples)), k]
    mu_out = fuzzify(output_var, np.array([float(out) for _, out in samples]))
    k_out = np.argmax(mu_out, axis=1)
    degree *= mu_out[np.arange(len(samples)), k_out]

    best: dict[tuple, tuple[float, MamdaniRule]] = {}
    for i in range(len(samples)):
        key = tuple((name, variables[name].labels[labels_idx[j][i]]) for j, name in enumerate(names))
        if key not in best or degree[i] > best[key][0]:
            rule = MamdaniRule(key, (output_var.name, output_var.labels[k_out[i]]))
            best[key] = (float(degree[i]), rule)
    return [rule for _, rule in best.values()]
