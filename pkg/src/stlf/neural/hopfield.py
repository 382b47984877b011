"""Hopfield associative memory and the pattern-completion load forecaster.

The forecaster stores training days as bipolar words
``code(inputs) || code(targets)`` using a thermometer code. To forecast,
it probes the memory with the coded inputs followed by a seeded random
target segment, lets the network settle, and decodes the target segment.
"""

from __future__ import annotations

import logging
import zlib
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .. import _accel
from .._kernels_py import TIE_TOL
from ..errors import CapacityExceededError, EnergyIncreaseError, MaxIterationsError, NonBipolarInputError
from ..features import N_INPUTS, N_OUTPUTS, Sample, stack

log = logging.getLogger(__name__)

MAX_SWEEPS = 1000
CAPACITY_RATIO = 0.1


@dataclass(eq=False)
class HopfieldNet:
    weights: np.ndarray

    def __post_init__(self):
        W = np.array(self.weights, dtype=np.float64)
        if W.ndim != 2 or W.shape[0] != W.shape[1]:
            raise ValueError("weights must be square")
        if not np.array_equal(W, W.T):
            raise ValueError("weights must be symmetric")
        if np.any(np.diag(W) != 0):
            raise ValueError("weights must have a zero diagonal")
        self.weights = W

    @property
    def n(self) -> int:
        return self.weights.shape[0]


@dataclass
class RecallResult:
    state: np.ndarray
    sweeps: int
    energies: list[float] = field(default_factory=list)


def _as_bipolar(v) -> np.ndarray:
    v = np.asarray(v, dtype=np.float64)
    if not np.all((v == 1.0) | (v == -1.0)):
        raise NonBipolarInputError("patterns must contain only +1 and -1")
    return v


def energy(net: HopfieldNet, state) -> float:
    s = np.asarray(state, dtype=np.float64)
    return float(-0.5 * s @ net.weights @ s)


def hopfield_store(patterns) -> HopfieldNet:
    """Hebbian storage ``W = (1/n) sum_p p p^T`` with the diagonal zeroed.

    At most ``0.1 n`` patterns are accepted, except that a single pattern
    is always storable (it is trivially a fixed point).
    """
    P = np.atleast_2d(_as_bipolar(patterns))
    count, n = P.shape
    if count < 1:
        raise CapacityExceededError("need at least one pattern")
    if count > max(1, CAPACITY_RATIO * n):
        raise CapacityExceededError(f"{count} patterns exceed capacity {int(CAPACITY_RATIO * n)} for n={n}")
    W = (P.T @ P) / n
    W = 0.5 * (W + W.T)
    np.fill_diagonal(W, 0.0)
    return HopfieldNet(W)


def _recall_checked(W, s, max_sweeps):
    """Reference loop that recomputes the full energy around every update."""
    n = s.shape[0]
    e = float(-0.5 * s @ W @ s)
    energies = [e]
    for sweep in range(1, max_sweeps + 1):
        changed = False
        for i in range(n):
            h = float(W[i] @ s)
            if h > TIE_TOL:
                new = 1.0
            elif h < -TIE_TOL:
                new = -1.0
            else:
                continue
            if new != s[i]:
                s[i] = new
                changed = True
                e_new = float(-0.5 * s @ W @ s)
                if e_new > e + 1e-12 * max(1.0, abs(e)):
                    raise EnergyIncreaseError(f"energy rose from {e} to {e_new} updating unit {i}")
                e = e_new
                energies.append(e)
        if not changed:
            return s, sweep, True, energies
    return s, max_sweeps, False, energies


def hopfield_recall(net: HopfieldNet, probe, max_sweeps: int = MAX_SWEEPS, check_energy: bool = False) -> RecallResult:
    """Asynchronous recall in fixed index order.

    Unit ``i`` becomes ``sign(sum_j w_ij s_j)``; a zero field keeps the
    current state. Stops at the first sweep that changes nothing (that
    sweep is counted). With ``check_energy`` every single-unit update is
    verified not to raise the energy and the energy after each update is
    returned.
    """
    s = _as_bipolar(probe).copy()
    if s.shape != (net.n,):
        raise ValueError(f"probe length {s.shape} does not match network size {net.n}")
    if check_energy:
        s, sweeps, ok, energies = _recall_checked(net.weights, s, max_sweeps)
    else:
        s, sweeps, ok = _accel.hopfield_recall(net.weights, s, max_sweeps)
        energies = []
    if not ok:
        raise MaxIterationsError(f"no stable state after {max_sweeps} sweeps")
    return RecallResult(state=np.asarray(s), sweeps=int(sweeps), energies=energies)


# -- thermometer codec -----------------------------------------------------------


@dataclass(frozen=True)
class ThermometerCodec:
    """Value v in [0, 1] -> first ``round(v * levels)`` bits +1, the rest -1."""

    levels: int = 8

    def encode(self, values) -> np.ndarray:
        v = np.clip(np.asarray(values, dtype=np.float64).reshape(-1), 0.0, 1.0)
        k = np.clip(np.floor(v * self.levels + 0.5), 0, self.levels).astype(int)
        bits = np.where(np.arange(self.levels)[None, :] < k[:, None], 1.0, -1.0)
        return bits.reshape(-1)

    def decode(self, bits) -> tuple[np.ndarray, int]:
        """Return ``(values, n_invalid)``.

        Words that are not valid thermometer codes decode to the nearest
        valid word in Hamming distance (fewest +1 bits on ties);
        ``n_invalid`` counts them.
        """
        words = np.asarray(bits, dtype=np.float64).reshape(-1, self.levels)
        pos = words > 0
        # distance to the code with k leading +1 bits, k = 0..levels
        neg_prefix = np.concatenate([np.zeros((len(words), 1)), np.cumsum(~pos, axis=1)], axis=1)
        pos_total = pos.sum(axis=1, keepdims=True)
        pos_prefix = np.concatenate([np.zeros((len(words), 1)), np.cumsum(pos, axis=1)], axis=1)
        dist = neg_prefix + (pos_total - pos_prefix)
        k = np.argmin(dist, axis=1)
        invalid = int(np.count_nonzero(dist[np.arange(len(words)), k] > 0))
        return k / self.levels, invalid


# -- forecaster ------------------------------------------------------------------


@dataclass(eq=False)
class HopfieldForecaster:
    net: HopfieldNet
    codec: ThermometerCodec = ThermometerCodec()
    seed: int = 0
    n_inputs: int = N_INPUTS
    n_outputs: int = N_OUTPUTS
    decode_failures: int = 0

    kind = "hopfield"

    @property
    def history_bits(self) -> int:
        return self.n_inputs * self.codec.levels

    def probe_for(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        # seeded from the input bytes so a forecast is a pure function of x
        rng = np.random.default_rng([self.seed, zlib.crc32(x.tobytes())])
        unknown = rng.choice(np.array([-1.0, 1.0]), size=self.n_outputs * self.codec.levels)
        return np.concatenate([self.codec.encode(x), unknown])

    def forecast(self, x) -> tuple[np.ndarray, int]:
        result = hopfield_recall(self.net, self.probe_for(x))
        values, invalid = self.codec.decode(result.state[self.history_bits :])
        return values, invalid

    def predict(self, X) -> np.ndarray:
        X = np.atleast_2d(X)
        out = np.empty((X.shape[0], self.n_outputs))
        for i, x in enumerate(X):
            out[i], invalid = self.forecast(x)
            if invalid:
                self.decode_failures += invalid
                log.debug("hopfield decode: %d invalid thermometer words", invalid)
        return out


def hopfield_forecast(model: HopfieldForecaster, history) -> np.ndarray:
    return model.forecast(history)[0]


def hopfield_train(
    samples: Sequence[Sample], levels: int = 8, seed: int = 0, max_patterns: int | None = None
) -> HopfieldForecaster:
    """Store the most recent training days that fit the 0.1 n capacity."""
    codec = ThermometerCodec(levels)
    X, Y = stack(samples)
    patterns = np.array([np.concatenate([codec.encode(x), codec.encode(y)]) for x, y in zip(X, Y)])
    n = patterns.shape[1]
    limit = max(1, int(CAPACITY_RATIO * n))
    if max_patterns is not None:
        limit = min(limit, max_patterns)
    chosen, seen = [], set()
    for p in patterns[::-1]:
        key = p.tobytes()
        if key in seen:
            continue
        seen.add(key)
        chosen.append(p)
        if len(chosen) == limit:
            break
    return HopfieldForecaster(hopfield_store(np.array(chosen[::-1])), codec, seed, X.shape[1], Y.shape[1])
