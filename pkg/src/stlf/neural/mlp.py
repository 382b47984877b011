"""One-hidden-layer feedforward network (MLP) and its backprop gradients."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .._kernels_py import logsig
from ..features import N_INPUTS, N_OUTPUTS

ACTIVATIONS = ("tanh", "logsig")
OUTPUT_ACTIVATIONS = ("linear", "logistic")


def activate(kind: str, z):
    if kind == "tanh":
        return np.tanh(z)
    if kind == "logsig":
        return logsig(z)
    raise ValueError(f"unknown activation {kind!r}")


def activation_slope(kind: str, a):
    """Derivative expressed through the activation value ``a``."""
    if kind == "tanh":
        return 1.0 - a * a
    if kind == "logsig":
        return a * (1.0 - a)
    raise ValueError(f"unknown activation {kind!r}")


def _check_finite(**arrays):
    for name, a in arrays.items():
        if not np.all(np.isfinite(a)):
            raise ValueError(f"{name} contains non-finite values")


@dataclass(eq=False)
class DenseNet:
    """``y = out(b_o + W_o^T act(b_h + W_h^T x))``.

    Weight matrices are stored input-major (``weights_hidden`` is
    ``n_inputs x n_hidden``) so batches multiply as ``X @ W``.
    """

    weights_hidden: np.ndarray
    bias_hidden: np.ndarray
    weights_out: np.ndarray
    bias_out: np.ndarray
    hidden_activation: str = "tanh"
    output_activation: str = "linear"

    PARAM_NAMES = ("weights_hidden", "bias_hidden", "weights_out", "bias_out")
    kind = "mlp"

    def __post_init__(self):
        for name in self.PARAM_NAMES:
            setattr(self, name, np.array(getattr(self, name), dtype=np.float64))
        n_in, h = self.weights_hidden.shape
        if h < 1:
            raise ValueError("hidden layer needs at least one unit")
        if self.bias_hidden.shape != (h,) or self.weights_out.shape[0] != h:
            raise ValueError("hidden layer shapes disagree")
        if self.bias_out.shape != (self.weights_out.shape[1],):
            raise ValueError("output layer shapes disagree")
        if self.hidden_activation not in ACTIVATIONS:
            raise ValueError(f"hidden_activation must be one of {ACTIVATIONS}")
        if self.output_activation not in OUTPUT_ACTIVATIONS:
            raise ValueError(f"output_activation must be one of {OUTPUT_ACTIVATIONS}")
        _check_finite(**self.params())

    @property
    def n_inputs(self) -> int:
        return self.weights_hidden.shape[0]

    @property
    def n_hidden(self) -> int:
        return self.weights_hidden.shape[1]

    @property
    def n_outputs(self) -> int:
        return self.weights_out.shape[1]

    def params(self) -> dict[str, np.ndarray]:
        return {name: getattr(self, name) for name in self.PARAM_NAMES}

    def with_params(self, params: dict[str, np.ndarray]):
        return replace(self, **{k: np.array(v, dtype=np.float64) for k, v in params.items()})

    def copy(self):
        return self.with_params({k: v.copy() for k, v in self.params().items()})

    def predict(self, X) -> np.ndarray:
        return forward(self, np.atleast_2d(X))[1]


def _uniform(rng, fan_in, shape):
    bound = 1.0 / np.sqrt(fan_in)
    return rng.uniform(-bound, bound, size=shape)


def init_dense(
    n_inputs: int = N_INPUTS,
    n_hidden: int = 24,
    n_outputs: int = N_OUTPUTS,
    *,
    seed: int = 0,
    hidden_activation: str = "tanh",
    output_activation: str = "linear",
) -> DenseNet:
    """Weights uniform in +-1/sqrt(fan_in), drawn from ``seed``."""
    rng = np.random.default_rng(seed)
    return DenseNet(
        weights_hidden=_uniform(rng, n_inputs, (n_inputs, n_hidden)),
        bias_hidden=_uniform(rng, n_inputs, n_hidden),
        weights_out=_uniform(rng, n_hidden, (n_hidden, n_outputs)),
        bias_out=_uniform(rng, n_hidden, n_outputs),
        hidden_activation=hidden_activation,
        output_activation=output_activation,
    )


def forward(net: DenseNet, X: np.ndarray, extra_pre: np.ndarray | None = None):
    """Return ``(hidden, output)`` activations for a batch ``X``.

    ``extra_pre`` is added to the hidden pre-activation (the Elman context term).
    """
    Z = X @ net.weights_hidden + net.bias_hidden
    if extra_pre is not None:
        Z = Z + extra_pre
    A = activate(net.hidden_activation, Z)
    Y = A @ net.weights_out + net.bias_out
    if net.output_activation == "logistic":
        Y = logsig(Y)
    return A, Y


def mlp_forward(net: DenseNet, x) -> np.ndarray:
    """Outputs for one input vector."""
    return forward(net, np.asarray(x, dtype=np.float64)[None, :])[1][0]


def backward(net: DenseNet, X, A, Y, T):
    """Gradients of ``E = sum((Y - T)**2) / (2 N)`` for a batch of N rows.

    Returns the parameter gradients and the hidden-layer delta (needed by
    the Elman context weights).
    """
    N = X.shape[0]
    delta_out = (Y - T) / N
    if net.output_activation == "logistic":
        delta_out = delta_out * Y * (1.0 - Y)
    delta_hidden = (delta_out @ net.weights_out.T) * activation_slope(net.hidden_activation, A)
    grads = {
        "weights_hidden": X.T @ delta_hidden,
        "bias_hidden": delta_hidden.sum(axis=0),
        "weights_out": A.T @ delta_out,
        "bias_out": delta_out.sum(axis=0),
    }
    return grads, delta_hidden


def half_sse(Y, T) -> float:
    return float(np.sum((Y - T) ** 2) / (2.0 * Y.shape[0]))


def loss_and_grad(net: DenseNet, X, T):
    A, Y = forward(net, X)
    grads, _ = backward(net, X, A, Y, T)
    return half_sse(Y, T), grads
