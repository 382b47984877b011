"""Pure NumPy versions of the inner loops in ``_kernels.pyx``.

Signatures and results must match the compiled module exactly; the test
suite runs both side by side.
"""

import numpy as np

# Local fields with |h| at or below this count as ties (state kept).
TIE_TOL = 1e-10


def logsig(z):
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def elman_scan(pre, w_context, context0):
    """Hidden states of an Elman layer over a sequence.

    ``pre[t]`` holds the input-driven pre-activation of step ``t``; the
    recurrence is ``h[t] = logsig(pre[t] + h[t-1] @ w_context)`` with
    ``h[-1] = context0``.
    """
    pre = np.ascontiguousarray(pre, dtype=np.float64)
    w_context = np.ascontiguousarray(w_context, dtype=np.float64)
    T, H = pre.shape
    hidden = np.empty((T, H))
    ctx = np.array(context0, dtype=np.float64)
    for t in range(T):
        z = pre[t] + ctx @ w_context
        hidden[t] = logsig(z)
        ctx = hidden[t]
    return hidden


def hopfield_recall(weights, state, max_sweeps):
    """Asynchronous sign updates in index order until a sweep changes nothing.

    Returns ``(state, sweeps, converged)``; ``sweeps`` counts the final
    verification sweep.
    """
    W = np.ascontiguousarray(weights, dtype=np.float64)
    s = np.array(state, dtype=np.float64)
    n = s.shape[0]
    for sweep in range(1, max_sweeps + 1):
        changed = False
        for i in range(n):
            h = float(np.dot(W[i], s))
            if h > TIE_TOL:
                new = 1.0
            elif h < -TIE_TOL:
                new = -1.0
            else:
                continue
            if new != s[i]:
                s[i] = new
                changed = True
        if not changed:
            return s, sweep, True
    return s, max_sweeps, False


def mamdani_aggregate(firing, consequent, term_grid):
    """Max over rules of the consequent term clipped at the rule's firing degree."""
    firing = np.asarray(firing, dtype=np.float64)
    grid = np.asarray(term_grid, dtype=np.float64)
    agg = np.zeros(grid.shape[1])
    for r in range(firing.shape[0]):
        if firing[r] > 0.0:
            np.maximum(agg, np.minimum(firing[r], grid[consequent[r]]), out=agg)
    return agg
