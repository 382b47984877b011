"""Neural forecasters: MLP, Elman, RBF and Hopfield."""

from .elman import ElmanNet, elman_forward, init_elman
from .hopfield import (
    HopfieldForecaster,
    HopfieldNet,
    ThermometerCodec,
    energy,
    hopfield_forecast,
    hopfield_recall,
    hopfield_store,
    hopfield_train,
)
from .mlp import DenseNet, init_dense, mlp_forward
from .rbf import RbfNet, rbf_forward, rbf_train
from .train import TrainConfig, TrainTrace, gradient_check, train_backprop, train_elman, train_mlp

__all__ = [
    "DenseNet",
    "ElmanNet",
    "HopfieldForecaster",
    "HopfieldNet",
    "RbfNet",
    "ThermometerCodec",
    "TrainConfig",
    "TrainTrace",
    "elman_forward",
    "energy",
    "gradient_check",
    "hopfield_forecast",
    "hopfield_recall",
    "hopfield_store",
    "hopfield_train",
    "init_dense",
    "init_elman",
    "mlp_forward",
    "rbf_forward",
    "rbf_train",
    "train_backprop",
    "train_elman",
    "train_mlp",
]
