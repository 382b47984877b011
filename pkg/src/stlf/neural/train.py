"""Batch gradient descent with momentum, and the finite-difference gradient check."""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from ..errors import ConfigError, DivergenceError, InsufficientSamplesError
from ..features import Sample, stack
from . import elman as _elman
from . import mlp as _mlp
from .elman import ElmanNet, init_elman
from .mlp import DenseNet, init_dense

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.01
    max_epochs: int = 10000
    error_target: float = 1e-4
    seed: int = 0
    momentum: float = 0.9

    def __post_init__(self):
        if not self.learning_rate > 0:
            raise ConfigError("learning_rate must be positive")
        if not self.error_target > 0:
            raise ConfigError("error_target must be positive")
        if not 0 <= self.momentum < 1:
            raise ConfigError("momentum must lie in [0, 1)")
        if int(self.max_epochs) != self.max_epochs or self.max_epochs < 1:
            raise ConfigError("max_epochs must be a positive integer")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class TrainTrace:
    mse: list[float] = field(default_factory=list)
    converged: bool = False
    final_mse: float = float("nan")

    @property
    def epochs(self) -> int:
        return len(self.mse)


def _mse(Y, T) -> float:
    return float(np.mean((Y - T) ** 2))


def fit_arrays(net, X, T, cfg: TrainConfig):
    """Train ``net`` on input/target matrices; return ``(net, trace)``.

    Full-batch gradient descent with momentum on ``sum((y - t)**2) / 2N``.
    The epoch MSE (mean over all output entries) is recorded before each
    update; training stops once it reaches ``cfg.error_target``. An
    :class:`ElmanNet` treats the rows as one chronological sequence.
    """
    X = np.asarray(X, dtype=np.float64)
    T = np.asarray(T, dtype=np.float64)
    if X.shape[0] == 0:
        raise InsufficientSamplesError("no training samples")
    net = net.copy()
    is_elman = isinstance(net, ElmanNet)
    velocity = {k: np.zeros_like(v) for k, v in net.params().items()}
    trace = TrainTrace()

    def evaluate():
        if is_elman:
            Y, contexts, _ = _elman.elman_forward(net, X)
            return Y, contexts
        return _mlp.forward(net, X)[1], None

    with np.errstate(over="ignore", invalid="ignore"):
        for epoch in range(1, cfg.max_epochs + 1):
            if is_elman:
                A, Y, contexts = _elman.sequence_activations(net, X)
                grads, delta_hidden = _mlp.backward(net, X, A, Y, T)
                grads["weights_context"] = contexts.T @ delta_hidden
            else:
                A, Y = _mlp.forward(net, X)
                grads, _ = _mlp.backward(net, X, A, Y, T)
            mse = _mse(Y, T)
            if not np.isfinite(mse):
                raise DivergenceError(epoch)
            trace.mse.append(mse)
            if mse <= cfg.error_target:
                trace.converged = True
                break
            for name, g in grads.items():
                v = velocity[name]
                v *= cfg.momentum
                v -= cfg.learning_rate * g
                getattr(net, name)[...] += v
        Y, _ = evaluate()
        final = _mse(Y, T)
    if not np.isfinite(final) or not all(np.all(np.isfinite(p)) for p in net.params().values()):
        raise DivergenceError(trace.epochs)
    trace.final_mse = final
    trace.converged = trace.converged or final <= cfg.error_target
    log.debug("%s trained: %d epochs, final MSE %.3g", net.kind, trace.epochs, final)
    return net, trace


def train_backprop(net, samples: Sequence[Sample], cfg: TrainConfig):
    """Backpropagation training on samples (inputs -> 48 targets)."""
    if not samples:
        raise InsufficientSamplesError("no training samples")
    X, T = stack(samples)
    if T is None:
        raise InsufficientSamplesError("training samples need targets")
    return fit_arrays(net, X, T, cfg)


def train_mlp(samples: Sequence[Sample], cfg: TrainConfig, n_hidden: int = 24):
    net = init_dense(n_hidden=n_hidden, seed=cfg.seed)
    return train_backprop(net, samples, cfg)


def train_elman(samples: Sequence[Sample], cfg: TrainConfig, n_hidden: int = 60):
    net = init_elman(n_hidden=n_hidden, seed=cfg.seed)
    return train_backprop(net, samples, cfg)


# -- gradient check --------------------------------------------------------------

GRAD_FLOOR = 1e-6


def analytic_gradient(net, x, t, context=None):
    X = np.atleast_2d(np.asarray(x, dtype=np.float64))
    T = np.atleast_2d(np.asarray(t, dtype=np.float64))
    if isinstance(net, ElmanNet):
        C = np.atleast_2d(net.zero_context() if context is None else np.asarray(context, dtype=np.float64))
        return _elman.loss_and_grad(net, X, T, C)
    return _mlp.loss_and_grad(net, X, T)


def _loss(net, x, t, context=None) -> float:
    X = np.atleast_2d(np.asarray(x, dtype=np.float64))
    T = np.atleast_2d(np.asarray(t, dtype=np.float64))
    if isinstance(net, ElmanNet):
        C = np.atleast_2d(net.zero_context() if context is None else np.asarray(context, dtype=np.float64))
        Y = _elman.step_forward(net, X, C)[1]
    else:
        Y = _mlp.forward(net, X)[1]
    return _mlp.half_sse(Y, T)


def numeric_gradient(net, x, t, epsilon: float = 1e-5, context=None) -> dict[str, np.ndarray]:
    """Central-difference gradient of the loss for every parameter."""
    out = {}
    for name, param in net.params().items():
        flat = param.reshape(-1)
        g = np.empty(flat.size)
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + epsilon
            up = _loss(net, x, t, context)
            flat[i] = orig - epsilon
            down = _loss(net, x, t, context)
            flat[i] = orig
            g[i] = (up - down) / (2.0 * epsilon)
        out[name] = g.reshape(param.shape)
    return out


def gradient_check(net, sample, epsilon: float = 1e-5, context=None) -> float:
    """Largest relative gap between backprop and central-difference gradients.

    ``sample`` is a :class:`Sample` or an ``(input, target)`` pair. Elman
    nets are checked for a single step with ``context`` frozen (zeros by
    default). The relative error of each entry is
    ``|a - n| / max(|a|, |n|, 1e-6)``.
    """
    if not 1e-7 <= epsilon <= 1e-3:
        raise ConfigError("epsilon must lie in [1e-7, 1e-3]")
    x, t = (sample.input, sample.target) if isinstance(sample, Sample) else sample
    _, grads = analytic_gradient(net, x, t, context)
    numeric = numeric_gradient(net, x, t, epsilon, context)
    worst = 0.0
    for name, num in numeric.items():
        ana = grads[name]
        rel = np.abs(ana - num) / np.maximum(np.maximum(np.abs(ana), np.abs(num)), GRAD_FLOOR)
        worst = max(worst, float(rel.max()))
    return worst
