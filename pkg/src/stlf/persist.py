"""Versioned JSON persistence for every model kind.

A model file is one JSON object::

    {"format": "stlf-model", "version": 1, "kind": "mlp", "dims": {...},
     "params": {"weights_hidden": {"shape": [62, 24], "data": [...]}, ...},
     "norms": {"load": {...}, "weather": {...}},
     "train_config": {...}, "train_range": ["1999-01-01", "1999-12-31"],
     "scope": "both", ...kind-specific sections}

Arrays are flattened row-major. Floats are written in Python's shortest
round-trip form, so loading reproduces every parameter bit for bit, and
keys are sorted so identical models give identical bytes.
"""

from __future__ import annotations

import datetime as dt
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from .domain import NormalizationSpec
from .errors import PersistenceError
from .fnn import FEATURE_NAMES, FnnModel, TsForecaster
from .fuzzy.forecaster import FisForecaster
from .fuzzy.membership import MembershipFunction
from .fuzzy.rulefile import format_rulebases, parse_rulebases
from .fuzzy.variables import LinguisticVariable
from .neural.elman import ElmanNet
from .neural.hopfield import HopfieldForecaster, HopfieldNet, ThermometerCodec
from .neural.mlp import DenseNet
from .neural.rbf import RbfNet

FORMAT = "stlf-model"
VERSION = 1


@dataclass(eq=False)
class ModelBundle:
    """A trained model plus everything needed to forecast with it."""

    model: Any
    load_norm: NormalizationSpec
    weather_norms: dict[str, NormalizationSpec]
    train_config: dict = field(default_factory=dict)
    train_range: tuple[str, str] | None = None
    scope: str = "both"

    @property
    def kind(self) -> str:
        return self.model.kind


def _array(a) -> dict:
    a = np.asarray(a, dtype=np.float64)
    return {"shape": list(a.shape), "data": [float(v) for v in a.reshape(-1)]}


def _unarray(d: Mapping) -> np.ndarray:
    return np.array(d["data"], dtype=np.float64).reshape(d["shape"])


def _variable(v: LinguisticVariable) -> dict:
    return {
        "name": v.name,
        "universe": list(v.universe),
        "terms": [{"label": label, "shape": mf.shape, "params": list(mf.params)} for label, mf in v.terms],
    }


def _unvariable(d: Mapping) -> LinguisticVariable:
    terms = tuple((t["label"], MembershipFunction(t["shape"], tuple(t["params"]))) for t in d["terms"])
    return LinguisticVariable(d["name"], tuple(d["universe"]), terms)


def _dense_params(net: DenseNet) -> dict:
    return {name: _array(p) for name, p in net.params().items()}


def _encode_model(model) -> dict:
    kind = model.kind
    if kind in ("mlp", "elman"):
        return {
            "dims": {"inputs": model.n_inputs, "hidden": model.n_hidden, "outputs": model.n_outputs},
            "params": _dense_params(model),
            "activations": {"hidden": model.hidden_activation, "output": model.output_activation},
        }
    if kind == "rbfn":
        return {
            "dims": {"inputs": model.n_inputs, "centers": model.n_centers, "outputs": model.n_outputs},
            "params": {name: _array(p) for name, p in model.params().items()},
            "ridge_active": bool(model.ridge_active),
        }
    if kind == "hopfield":
        W = model.net.weights
        n = model.net.n
        numer = np.round(W * n)
        if np.array_equal(numer / n, W):
            # Hebbian weights are integers over n; store them exactly and compactly
            weights = {"divisor": n, "shape": [n, n], "numerators": [int(v) for v in numer.reshape(-1)]}
        else:
            weights = _array(W)
        return {
            "dims": {"inputs": model.n_inputs, "outputs": model.n_outputs, "units": n},
            "params": {"weights": weights},
            "levels": model.codec.levels,
            "probe_seed": model.seed,
        }
    if kind == "fis":
        return {
            "dims": {"inputs": len(model.variables), "outputs": model.n_outputs},
            "variables": [_variable(v) for v in model.variables.values()],
            "output_variable": _variable(model.output_var),
            "shape": model.shape,
            "rules": format_rulebases({f"h{h:02d}": rules for h, rules in enumerate(model.rulebases)}),
        }
    if kind == "fnn":
        core = model.core
        return {
            "dims": {"inputs": core.n_inputs, "hidden": core.n_hidden, "outputs": core.n_outputs},
            "params": _dense_params(core),
            "activations": {"hidden": core.hidden_activation, "output": core.output_activation},
            "partitions": [_variable(v) for v in model.input_partitions],
        }
    if kind == "fnn-ts":
        return {
            "dims": {"rules": len(model.antecedents), "outputs": model.coefficients.shape[0]},
            "params": {"coefficients": _array(model.coefficients)},
            "variables": [_variable(v) for v in model.variables.values()],
            "antecedents": [list(a) for a in model.antecedents],
        }
    raise PersistenceError(f"cannot persist model kind {kind!r}")


def bundle_to_dict(bundle: ModelBundle) -> dict:
    doc = {
        "format": FORMAT,
        "version": VERSION,
        "kind": bundle.kind,
        "norms": {
            "load": bundle.load_norm.to_dict(),
            "weather": {k: v.to_dict() for k, v in sorted(bundle.weather_norms.items())},
        },
        "train_config": dict(bundle.train_config),
        "train_range": list(bundle.train_range) if bundle.train_range else None,
        "scope": bundle.scope,
    }
    doc.update(_encode_model(bundle.model))
    return doc


def dumps_bundle(bundle: ModelBundle) -> str:
    return json.dumps(bundle_to_dict(bundle), sort_keys=True, separators=(",", ":")) + "\n"


def _decode_model(doc: Mapping, load_norm: NormalizationSpec):
    kind = doc["kind"]
    p = doc.get("params", {})
    if kind in ("mlp", "elman", "fnn"):
        act = doc["activations"]
        arrays = {name: _unarray(v) for name, v in p.items()}
        cls = ElmanNet if kind == "elman" else DenseNet
        net = cls(**arrays, hidden_activation=act["hidden"], output_activation=act["output"])
        if kind == "fnn":
            partitions = tuple(_unvariable(v) for v in doc["partitions"])
            if tuple(v.name for v in partitions) != FEATURE_NAMES:
                raise PersistenceError("FNN partitions are not in the expected feature order")
            return FnnModel(partitions, net, load_norm)
        return net
    if kind == "rbfn":
        return RbfNet(**{name: _unarray(v) for name, v in p.items()}, ridge_active=bool(doc["ridge_active"]))
    if kind == "hopfield":
        w = p["weights"]
        if "numerators" in w:
            W = np.array(w["numerators"], dtype=np.float64).reshape(w["shape"]) / w["divisor"]
        else:
            W = _unarray(w)
        dims = doc["dims"]
        return HopfieldForecaster(
            HopfieldNet(W), ThermometerCodec(int(doc["levels"])), int(doc["probe_seed"]), dims["inputs"], dims["outputs"]
        )
    if kind == "fis":
        variables = {v["name"]: _unvariable(v) for v in doc["variables"]}
        bases = parse_rulebases(doc["rules"])
        rulebases = [bases.get(f"h{h:02d}", []) for h in range(doc["dims"]["outputs"])]
        return FisForecaster(variables, _unvariable(doc["output_variable"]), rulebases, doc["shape"])
    if kind == "fnn-ts":
        variables = {v["name"]: _unvariable(v) for v in doc["variables"]}
        return TsForecaster(variables, tuple(map(tuple, doc["antecedents"])), _unarray(p["coefficients"]), load_norm)
    raise PersistenceError(f"unknown model kind {kind!r}")


def bundle_from_dict(doc: Mapping) -> ModelBundle:
    if doc.get("format") != FORMAT:
        raise PersistenceError("not a model file")
    if doc.get("version") != VERSION:
        raise PersistenceError(f"unsupported model file version {doc.get('version')!r}")
    try:
        load_norm = NormalizationSpec.from_dict(doc["norms"]["load"])
        weather = {k: NormalizationSpec.from_dict(v) for k, v in doc["norms"]["weather"].items()}
        model = _decode_model(doc, load_norm)
    except (KeyError, TypeError, ValueError) as exc:
        raise PersistenceError(f"malformed model file: {exc}") from exc
    rng = doc.get("train_range")
    return ModelBundle(model, load_norm, weather, dict(doc.get("train_config") or {}), tuple(rng) if rng else None, doc.get("scope", "both"))


def loads_bundle(text: str) -> ModelBundle:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PersistenceError(f"model file is not valid JSON: {exc}") from exc
    return bundle_from_dict(doc)


def save_bundle(bundle: ModelBundle, path) -> Path:
    path = Path(path)
    path.write_text(dumps_bundle(bundle), encoding="utf-8")
    return path


def load_bundle(path) -> ModelBundle:
    return loads_bundle(Path(path).read_text(encoding="utf-8"))


def train_range_of(first: dt.date, last: dt.date) -> tuple[str, str]:
    return first.isoformat(), last.isoformat()
