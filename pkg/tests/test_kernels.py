import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from stlf import _accel, _kernels_py

compiled = pytest.importorskip("stlf._kernels", reason="compiled extension not built")


def test_extension_selected_by_default():
    assert _accel.HAVE_EXTENSION and _accel.BACKEND_NAME == "cython"


def test_environment_forces_fallback():
    code = "from stlf import _accel; print(_accel.BACKEND_NAME)"
    env = {**os.environ, "STLF_PURE_PYTHON": "1"}
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


@given(st.integers(0, 10_000), st.integers(1, 40), st.integers(1, 12))
def test_elman_scan_agrees(seed, T, H):
    rng = np.random.default_rng(seed)
    pre, wc, c0 = rng.normal(size=(T, H)), rng.normal(scale=0.5, size=(H, H)), rng.uniform(size=H)
    # the compiled loop sums dot products in a different order
    np.testing.assert_allclose(compiled.elman_scan(pre, wc, c0), _kernels_py.elman_scan(pre, wc, c0), rtol=0, atol=1e-12)


@given(st.integers(0, 10_000), st.integers(10, 60))
def test_hopfield_recall_agrees(seed, n):
    rng = np.random.default_rng(seed)
    P = rng.choice([-1.0, 1.0], size=(max(1, n // 10), n))
    W = P.T @ P / n
    np.fill_diagonal(W, 0.0)
    probe = rng.choice([-1.0, 1.0], size=n)
    a, b = compiled.hopfield_recall(W, probe, 1000), _kernels_py.hopfield_recall(W, probe, 1000)
    np.testing.assert_array_equal(np.asarray(a[0]), b[0])
    assert a[1:] == b[1:]


def test_hopfield_recall_reports_non_convergence():
    W = np.array([[0.0, 1.0], [1.0, 0.0]])
    for backend in (compiled, _kernels_py):
        _, sweeps, ok = backend.hopfield_recall(W, np.array([1.0, -1.0]), 1)
        assert (sweeps, ok) == (1, False)


@given(st.integers(0, 10_000), st.integers(1, 30), st.integers(1, 9))
def test_mamdani_aggregate_agrees(seed, rules, terms):
    rng = np.random.default_rng(seed)
    firing = rng.uniform(size=rules) * (rng.uniform(size=rules) < 0.6)
    consequent = rng.integers(0, terms, size=rules).astype(np.int64)
    grid = rng.uniform(size=(terms, 201))
    np.testing.assert_array_equal(
        compiled.mamdani_aggregate(firing, consequent, grid), _kernels_py.mamdani_aggregate(firing, consequent, grid)
    )


def test_models_agree_across_backends(tmp_path):
    """A full forecast run under each backend gives the same numbers."""
    code = (
        "import numpy as np\n"
        "from stlf.pipeline import run_benchmark\n"
        "r = run_benchmark(2, ('elman', 'hopfield', 'fis'), overrides={'elman': {'max_epochs': 20}})\n"
        "np.save(r'%s', np.array([[h.predicted for h in x.per_hour] for x in r.values()]))\n"
    )
    results = []
    for flag in ("0", "1"):
        path = tmp_path / f"out{flag}.npy"
        env = {**os.environ, "STLF_PURE_PYTHON": flag}
        subprocess.run([sys.executable, "-c", code % path], env=env, check=True)
        results.append(np.load(path))
    np.testing.assert_allclose(results[0], results[1], rtol=1e-9, atol=0)
