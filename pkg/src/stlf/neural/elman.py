"""Elman recurrent network.

Each hidden unit feeds one context unit through a fixed unit weight, so the
context after step k is an exact copy of the hidden activations of step k.
Training uses truncated gradients: the context is treated as a constant
input at every step.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import _accel
from .._kernels_py import logsig
from ..features import N_INPUTS, N_OUTPUTS
from .mlp import DenseNet, _uniform, backward, forward, half_sse


@dataclass(eq=False)
class ElmanNet(DenseNet):
    weights_context: np.ndarray = None  # n_hidden x n_hidden, context -> hidden
    hidden_activation: str = "logsig"

    PARAM_NAMES = DenseNet.PARAM_NAMES + ("weights_context",)
    kind = "elman"

    def __post_init__(self):
        if self.weights_context is None:
            h = np.shape(self.weights_hidden)[1]
            self.weights_context = np.zeros((h, h))
        super().__post_init__()
        if self.weights_context.shape != (self.n_hidden, self.n_hidden):
            raise ValueError("weights_context must be n_hidden x n_hidden")
        if self.hidden_activation != "logsig":
            raise ValueError("Elman hidden layer is log-sigmoid")

    def zero_context(self) -> np.ndarray:
        return np.zeros(self.n_hidden)

    def predict(self, X) -> np.ndarray:
        """Outputs for the rows of ``X`` run as one sequence from a zero context."""
        return elman_forward(self, np.atleast_2d(X))[0]


def init_elman(
    n_inputs: int = N_INPUTS,
    n_hidden: int = 60,
    n_outputs: int = N_OUTPUTS,
    *,
    seed: int = 0,
) -> ElmanNet:
    rng = np.random.default_rng(seed)
    return ElmanNet(
        weights_hidden=_uniform(rng, n_inputs, (n_inputs, n_hidden)),
        bias_hidden=_uniform(rng, n_inputs, n_hidden),
        weights_out=_uniform(rng, n_hidden, (n_hidden, n_outputs)),
        bias_out=_uniform(rng, n_hidden, n_outputs),
        weights_context=_uniform(rng, n_hidden, (n_hidden, n_hidden)),
    )


def hidden_sequence(net: ElmanNet, X: np.ndarray, context0=None) -> np.ndarray:
    pre = X @ net.weights_hidden + net.bias_hidden
    c0 = net.zero_context() if context0 is None else np.asarray(context0, dtype=np.float64)
    return _accel.elman_scan(pre, net.weights_context, c0)


def elman_forward(net: ElmanNet, xs, context0=None):
    """Run a sequence; return ``(outputs, contexts, final_context)``.

    ``contexts[t]`` is the context seen by step ``t`` (zeros at ``t = 0``
    unless ``context0`` is given).
    """
    A, Y, contexts = sequence_activations(net, xs, context0)
    return Y, contexts, A[-1].copy()


def sequence_activations(net: ElmanNet, xs, context0=None):
    """Hidden activations, outputs and per-step contexts for a sequence."""
    X = np.atleast_2d(np.asarray(xs, dtype=np.float64))
    c0 = net.zero_context() if context0 is None else np.asarray(context0, dtype=np.float64)
    A = hidden_sequence(net, X, c0)
    contexts = np.vstack([c0[None, :], A[:-1]])
    Y = A @ net.weights_out + net.bias_out
    if net.output_activation == "logistic":
        Y = logsig(Y)
    return A, Y, contexts


def step_forward(net: ElmanNet, X, contexts):
    """Forward pass with given (frozen) contexts, one per row."""
    return forward(net, X, extra_pre=contexts @ net.weights_context)


def loss_and_grad(net: ElmanNet, X, T, contexts):
    """Truncated loss and gradients with the contexts held constant."""
    A, Y = step_forward(net, X, contexts)
    grads, delta_hidden = backward(net, X, A, Y, T)
    grads["weights_context"] = contexts.T @ delta_hidden
    return half_sse(Y, T), grads
