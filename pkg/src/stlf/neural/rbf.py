"""Gaussian radial basis function network with a least-squares output layer."""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.cluster.vq import kmeans2
from scipy.spatial.distance import cdist

from ..errors import InsufficientSamplesError
from ..features import Sample, stack
from .train import TrainConfig

log = logging.getLogger(__name__)

RIDGE = 1e-8
KMEANS_ITER = 50


@dataclass(eq=False)
class RbfNet:
    centers: np.ndarray  # C x n_inputs
    widths: np.ndarray  # C
    weights_out: np.ndarray  # C x n_outputs
    bias_out: np.ndarray  # n_outputs
    ridge_active: bool = False

    kind = "rbfn"
    PARAM_NAMES = ("centers", "widths", "weights_out", "bias_out")

    def __post_init__(self):
        for name in self.PARAM_NAMES:
            setattr(self, name, np.array(getattr(self, name), dtype=np.float64))
        self.centers = np.atleast_2d(self.centers)
        c = self.centers.shape[0]
        if c < 1:
            raise ValueError("need at least one center")
        if self.widths.shape != (c,) or not np.all(self.widths > 0):
            raise ValueError("widths must be positive, one per center")
        if self.weights_out.shape[0] != c or self.bias_out.shape != (self.weights_out.shape[1],):
            raise ValueError("output layer shapes disagree")

    @property
    def n_centers(self) -> int:
        return self.centers.shape[0]

    @property
    def n_inputs(self) -> int:
        return self.centers.shape[1]

    @property
    def n_outputs(self) -> int:
        return self.weights_out.shape[1]

    def params(self) -> dict[str, np.ndarray]:
        return {name: getattr(self, name) for name in self.PARAM_NAMES}

    def basis(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        d2 = cdist(X, self.centers, "sqeuclidean")
        return np.exp(-d2 / (2.0 * self.widths**2))

    def predict(self, X) -> np.ndarray:
        return self.basis(X) @ self.weights_out + self.bias_out


def rbf_forward(net: RbfNet, x) -> np.ndarray:
    return net.predict(np.asarray(x, dtype=np.float64)[None, :])[0]


def center_widths(centers: np.ndarray, k: int = 2) -> np.ndarray:
    """Mean distance from each center to its ``k`` nearest other centers.

    A single center gets width 1. Zero widths (coincident centers) take the
    mean of the positive widths.
    """
    c = centers.shape[0]
    if c == 1:
        return np.ones(1)
    d = cdist(centers, centers)
    np.fill_diagonal(d, np.inf)
    k = min(k, c - 1)
    widths = np.sort(d, axis=1)[:, :k].mean(axis=1)
    positive = widths[widths > 0]
    fallback = positive.mean() if positive.size else 1.0
    return np.where(widths > 0, widths, fallback)


def choose_centers(X: np.ndarray, n_centers: int, seed: int) -> np.ndarray:
    if n_centers == X.shape[0]:
        return X.copy()
    with warnings.catch_warnings():
        # an empty cluster keeps its previous centroid
        warnings.simplefilter("ignore", UserWarning)
        centers, _ = kmeans2(X, n_centers, iter=KMEANS_ITER, minit="++", missing="warn", rng=np.random.default_rng(seed))
    return centers


def solve_output_layer(Phi: np.ndarray, Y: np.ndarray):
    """Least-squares output weights and bias; ridge-regularized if rank deficient."""
    D = np.hstack([Phi, np.ones((Phi.shape[0], 1))])
    sol, _, rank, _ = np.linalg.lstsq(D, Y, rcond=None)
    ridge = rank < min(D.shape)
    if ridge:
        log.warning("RBF design matrix is rank deficient (%d < %d); using ridge %.0e", rank, min(D.shape), RIDGE)
        A = D.T @ D + RIDGE * np.eye(D.shape[1])
        sol = np.linalg.solve(A, D.T @ Y)
    return sol[:-1], sol[-1], ridge


def fit_rbf(X, Y, n_centers: int, seed: int = 0, centers: np.ndarray | None = None) -> RbfNet:
    X = np.asarray(X, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.float64)
    if X.shape[0] < n_centers:
        raise InsufficientSamplesError(f"{X.shape[0]} samples cannot place {n_centers} centers")
    if n_centers < 1:
        raise InsufficientSamplesError("need at least one center")
    if centers is None:
        centers = choose_centers(X, n_centers, seed)
    widths = center_widths(centers)
    net = RbfNet(centers, widths, np.zeros((centers.shape[0], Y.shape[1])), np.zeros(Y.shape[1]))
    w, b, ridge = solve_output_layer(net.basis(X), Y)
    return RbfNet(centers, widths, w, b, ridge_active=bool(ridge))


def rbf_train(samples: Sequence[Sample], n_centers: int = 298, cfg: TrainConfig | None = None) -> RbfNet:
    """k-means centers (seeded by ``cfg.seed``), nearest-neighbour widths, closed-form output layer.

    With as many centers as samples the inputs themselves become the centers.
    """
    cfg = cfg or TrainConfig()
    if len(samples) < n_centers:
        raise InsufficientSamplesError(f"{len(samples)} samples cannot place {n_centers} centers")
    X, Y = stack(samples)
    return fit_rbf(X, Y, n_centers, seed=cfg.seed)
