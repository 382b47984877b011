"""Linguistic variables and evenly spaced partitions."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import ConfigError
from .membership import SHAPES, MembershipFunction, membership

LOAD_LABELS = ("ExL", "VL", "L", "N", "H", "VH", "ExH")
TEMPERATURE_LABELS = ("ExC", "VC", "C", "N", "W", "H", "VH", "ExH")
HUMIDITY_LABELS = ("ExL", "VL", "L", "M", "H", "VH", "ExH")
WIND_SPEED_LABELS = ("Z", "PVS", "PS", "M", "PM", "B", "PB")
WIND_CHILL_LABELS = ("Z", "VVL", "VL", "L", "H", "VH", "ExH")
DAY_LABELS = ("Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun")

# sigma giving degree 0.5 half-way between neighbouring centers
FWHM_FACTOR = 2.0 * np.sqrt(2.0 * np.log(2.0))
UNIVERSE_PAD = 0.05


@dataclass(frozen=True)
class LinguisticVariable:
    name: str
    universe: tuple[float, float]
    terms: tuple[tuple[str, MembershipFunction], ...]

    def __post_init__(self):
        lo, hi = (float(v) for v in self.universe)
        object.__setattr__(self, "universe", (lo, hi))
        object.__setattr__(self, "terms", tuple((str(l), mf) for l, mf in self.terms))
        if not hi > lo:
            raise ConfigError(f"variable {self.name!r}: empty universe [{lo}, {hi}]")
        labels = self.labels
        if len(set(labels)) != len(labels):
            raise ConfigError(f"variable {self.name!r}: duplicate labels")
        if not labels:
            raise ConfigError(f"variable {self.name!r} has no terms")
        for label, mf in self.terms:
            a, b = mf.support
            inside = lo <= mf.peak <= hi if np.isinf(a) else (lo <= a and b <= hi)
            if not inside:
                raise ConfigError(f"term {label!r} of {self.name!r} reaches outside the universe")

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(l for l, _ in self.terms)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise ConfigError(f"variable {self.name!r} has no term {label!r}") from None

    def term(self, label: str) -> MembershipFunction:
        return self.terms[self.index(label)][1]

    def __len__(self) -> int:
        return len(self.terms)


def fuzzify(var: LinguisticVariable, x):
    """Membership degree of ``x`` in every term, in term order.

    ``x`` is clamped to the universe first. A scalar gives shape
    ``(n_terms,)``; an array of shape ``s`` gives ``s + (n_terms,)``.
    """
    lo, hi = var.universe
    xc = np.clip(np.asarray(x, dtype=np.float64), lo, hi)
    return np.stack([membership(mf, xc) for _, mf in var.terms], axis=-1)


def make_partition(
    name: str,
    universe: tuple[float, float],
    labels: Sequence[str],
    shape: str = "triangular",
) -> LinguisticVariable:
    """Evenly spaced terms over ``universe``.

    Term ``k`` of ``m`` peaks at ``lo + k (hi - lo) / (m - 1)``. Triangles
    reach their neighbours' peaks, the two end terms are shoulders. Trapezoids
    have a flat core of half a spacing and cross their neighbours at 0.5.
    Gaussians use ``sigma = spacing / 2.355`` and bells ``width = spacing / 2``
    (slope 2), so neighbours also cross at 0.5.
    """
    labels = list(labels)
    m = len(labels)
    if m < 2:
        raise ConfigError(f"a partition needs at least two labels, got {m}")
    if shape not in SHAPES:
        raise ConfigError(f"unknown membership shape {shape!r}")
    lo, hi = float(universe[0]), float(universe[1])
    if not hi > lo:
        raise ConfigError(f"empty universe [{lo}, {hi}]")
    s = (hi - lo) / (m - 1)
    peaks = [lo + k * s for k in range(m)]
    peaks[-1] = hi
    terms = []
    for k, (label, p) in enumerate(zip(labels, peaks)):
        first, last = k == 0, k == m - 1
        if shape == "triangular":
            mf = MembershipFunction.triangular(lo if first else peaks[k - 1], p, hi if last else peaks[k + 1])
        elif shape == "trapezoidal":
            q = s / 4.0
            a = lo if first else p - 3 * q
            b = lo if first else p - q
            c = hi if last else p + q
            d = hi if last else p + 3 * q
            mf = MembershipFunction.trapezoidal(a, b, c, d)
        elif shape == "gaussian":
            mf = MembershipFunction.gaussian(p, s / FWHM_FACTOR)
        else:
            mf = MembershipFunction.bell(p, s / 2.0, 2.0)
        terms.append((label, mf))
    return LinguisticVariable(name, (lo, hi), tuple(terms))


def padded_universe(values, pad: float = UNIVERSE_PAD) -> tuple[float, float]:
    """Training min/max widened by ``pad`` of the range on each side."""
    v = np.asarray(values, dtype=np.float64)
    lo, hi = float(v.min()), float(v.max())
    span = hi - lo if hi > lo else max(abs(lo), 1.0)
    return lo - pad * span, hi + pad * span


def day_variable(name: str = "day") -> LinguisticVariable:
    """Weekday 0..6 as seven crisp triangular terms."""
    return make_partition(name, (0.0, 6.0), DAY_LABELS, "triangular")
