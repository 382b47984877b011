"""Time the compiled kernels against the NumPy fallback.

    python benchmarks/bench_kernels.py [--repeat 5]

Inputs are sized like real runs: a 300-step Elman sequence with 60 hidden
units, an 880-unit Hopfield memory holding 88 patterns, and a 200-rule
Mamdani aggregation over a 201-point grid. Both backends must agree
(to rounding for the Elman scan, whose dot products sum in a different order).
"""

import argparse
import sys
import timeit

import numpy as np

from stlf import _kernels_py

try:
    from stlf import _kernels
except ImportError:
    _kernels = None


def cases(rng):
    H = 60
    pre = rng.normal(size=(300, H))
    wc = rng.uniform(-0.1, 0.1, size=(H, H))
    ctx = np.zeros(H)

    n, m = 880, 88
    P = rng.choice([-1.0, 1.0], size=(m, n))
    W = P.T @ P / n
    np.fill_diagonal(W, 0.0)
    probe = P[0].copy()
    probe[rng.choice(n, 40, replace=False)] *= -1

    firing = rng.uniform(0, 1, size=200) * (rng.uniform(size=200) < 0.3)
    consequent = rng.integers(0, 7, size=200).astype(np.int64)
    grid = rng.uniform(0, 1, size=(7, 201))
    return {
        "elman_scan": (pre, wc, ctx),
        "hopfield_recall": (W, probe, 1000),
        "mamdani_aggregate": (firing, consequent, grid),
    }


def same(a, b) -> bool:
    if isinstance(a, tuple):
        return all(same(x, y) for x, y in zip(a, b))
    return np.allclose(np.asarray(a), np.asarray(b), rtol=0, atol=1e-12)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if _kernels is None:
        print("compiled extension not built; run `pip install -e . --no-build-isolation`", file=sys.stderr)
        return 1
    rng = np.random.default_rng(0)
    print(f"{'kernel':<20}{'python ms':>12}{'cython ms':>12}{'speedup':>10}")
    for name, inputs in cases(rng).items():
        py, cy = getattr(_kernels_py, name), getattr(_kernels, name)
        if not same(py(*inputs), cy(*inputs)):
            print(f"{name}: backends disagree", file=sys.stderr)
            return 1
        t_py = min(timeit.repeat(lambda: py(*inputs), number=1, repeat=args.repeat)) * 1e3
        t_cy = min(timeit.repeat(lambda: cy(*inputs), number=1, repeat=args.repeat)) * 1e3
        print(f"{name:<20}{t_py:>12.3f}{t_cy:>12.3f}{t_py / t_cy:>9.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
