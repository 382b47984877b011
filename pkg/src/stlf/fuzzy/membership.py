"""Membership function shapes."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SHAPES = ("triangular", "trapezoidal", "gaussian", "bell")
_ARITY = {"triangular": 3, "trapezoidal": 4, "gaussian": 2, "bell": 3}


@dataclass(frozen=True)
class MembershipFunction:
    """A shape name and its parameters.

    ``triangular(a, b, c)``, ``trapezoidal(a, b, c, d)``,
    ``gaussian(center, sigma)`` or ``bell(center, width, slope)``.
    """

    shape: str
    params: tuple

    def __post_init__(self):
        if self.shape not in SHAPES:
            raise ValueError(f"unknown membership shape {self.shape!r}")
        p = tuple(float(v) for v in self.params)
        object.__setattr__(self, "params", p)
        if len(p) != _ARITY[self.shape]:
            raise ValueError(f"{self.shape} takes {_ARITY[self.shape]} parameters, got {len(p)}")
        if not all(np.isfinite(p)):
            raise ValueError("membership parameters must be finite")
        if self.shape == "triangular":
            a, b, c = p
            if not (a <= b <= c and a < c):
                raise ValueError(f"triangular needs a <= b <= c and a < c, got {p}")
        elif self.shape == "trapezoidal":
            a, b, c, d = p
            if not (a <= b <= c <= d and a < d):
                raise ValueError(f"trapezoidal needs a <= b <= c <= d and a < d, got {p}")
        elif self.shape == "gaussian":
            if not p[1] > 0:
                raise ValueError("gaussian sigma must be positive")
        elif not (p[1] > 0 and p[2] > 0):
            raise ValueError("bell width and slope must be positive")

    @classmethod
    def triangular(cls, a, b, c):
        return cls("triangular", (a, b, c))

    @classmethod
    def trapezoidal(cls, a, b, c, d):
        return cls("trapezoidal", (a, b, c, d))

    @classmethod
    def gaussian(cls, center, sigma):
        return cls("gaussian", (center, sigma))

    @classmethod
    def bell(cls, center, width, slope):
        return cls("bell", (center, width, slope))

    @property
    def peak(self) -> float:
        """A point of full membership."""
        if self.shape == "trapezoidal":
            return 0.5 * (self.params[1] + self.params[2])
        if self.shape == "triangular":
            return self.params[1]
        return self.params[0]

    @property
    def support(self) -> tuple[float, float]:
        if self.shape == "triangular":
            return self.params[0], self.params[2]
        if self.shape == "trapezoidal":
            return self.params[0], self.params[3]
        return -np.inf, np.inf

    def __call__(self, x):
        return membership(self, x)


def _triangular(x, a, b, c):
    out = np.zeros_like(x)
    rising = (x > a) & (x < b)
    falling = (x > b) & (x < c)
    out[rising] = (x[rising] - a) / (b - a)
    out[falling] = (c - x[falling]) / (c - b)
    out[x == b] = 1.0
    return out


def _trapezoidal(x, a, b, c, d):
    out = np.zeros_like(x)
    rising = (x > a) & (x < b)
    falling = (x > c) & (x < d)
    out[rising] = (x[rising] - a) / (b - a)
    out[falling] = (d - x[falling]) / (d - c)
    out[(x >= b) & (x <= c)] = 1.0
    return out


def membership(mf: MembershipFunction, x):
    """Degree of membership of ``x`` (scalar or array) in ``mf``.

    The triangular case is the piecewise rule: 1 at ``b``; ``(x-a)/(b-a)``
    on ``(a, b)``; ``(c-x)/(c-b)`` on ``(b, c)``; 0 at or beyond ``a`` and ``c``.
    """
    arr = np.asarray(x, dtype=np.float64)
    flat = np.atleast_1d(arr).astype(np.float64)
    p = mf.params
    if mf.shape == "triangular":
        out = _triangular(flat, *p)
    elif mf.shape == "trapezoidal":
        out = _trapezoidal(flat, *p)
    elif mf.shape == "gaussian":
        out = np.exp(-((flat - p[0]) ** 2) / (2.0 * p[1] ** 2))
    else:
        with np.errstate(over="ignore"):
            out = 1.0 / (1.0 + np.abs((flat - p[0]) / p[1]) ** (2.0 * p[2]))
    out = np.clip(out, 0.0, 1.0)
    return float(out[0]) if arr.ndim == 0 else out.reshape(arr.shape)
