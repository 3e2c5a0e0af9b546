"""Hot numeric kernels with a numba fast path and a pure-numpy fallback.

The two places this package spends nearly all of its time are (i) batched
objective evaluations inside the two-point gradient estimator and (ii) the
conditional-gradient inner loop, whose iteration counts can reach 1e5 per
prox approximation.  Both carry @njit implementations here.

Backend selection: numba is used when importable unless the environment
variable ``ZOBLOCKS_NO_NUMBA`` is set to a non-empty value other than "0".
Results agree across backends up to floating-point summation order; within
one backend all outputs are bit-reproducible.

``benchmarks/kernel_bench.py`` times both paths side by side.
"""

from __future__ import annotations

import os

import numpy as np

_flag = os.environ.get("ZOBLOCKS_NO_NUMBA", "")
_numba_requested = _flag in ("", "0")

try:
    if not _numba_requested:
        raise ImportError
    from numba import njit

    NUMBA_AVAILABLE = True
except ImportError:
    NUMBA_AVAILABLE = False


def backend() -> str:
    """Active kernel backend, 'numba' or 'numpy'."""
    return "numba" if NUMBA_AVAILABLE else "numpy"


# ---------------------------------------------------------------------------
# objective kernels (rows in, values out)
# ---------------------------------------------------------------------------

def quad_values_numpy(X, a, c):
    """Rowwise 0.5 * sum_i a_i x_i^2 - <c, x>."""
    return 0.5 * (X * X) @ a - X @ c


def sigmoid_ls_values_numpy(X, A, y, lam):
    """Rowwise 0.5 * ||A x - y||^2 + lam * sum_i x_i^2 / (1 + x_i^2)."""
    R = X @ A.T - y
    Xsq = X * X
    return 0.5 * np.einsum("ij,ij->i", R, R) + lam * (Xsq / (1.0 + Xsq)).sum(axis=1)


def _quad_values_loop(X, a, c):
    m, n = X.shape
    out = np.empty(m)
    for r in range(m):
        acc = 0.0
        for i in range(n):
            acc += 0.5 * a[i] * X[r, i] * X[r, i] - c[i] * X[r, i]
        out[r] = acc
    return out


def _sigmoid_ls_values_loop(X, A, y, lam):
    m, n = X.shape
    rows = A.shape[0]
    out = np.empty(m)
    for r in range(m):
        acc = 0.0
        for j in range(rows):
            dot = 0.0
            for i in range(n):
                dot += A[j, i] * X[r, i]
            resid = dot - y[j]
            acc += 0.5 * resid * resid
        for i in range(n):
            xsq = X[r, i] * X[r, i]
            acc += lam * xsq / (1.0 + xsq)
        out[r] = acc
    return out


# ---------------------------------------------------------------------------
# conditional-gradient inner loop over a box with euclidean distance and an
# optional l1 term
# ---------------------------------------------------------------------------

def cndg_box_numpy(x, g, lo, hi, l1w, alpha, delta, max_inner):
    """Frank-Wolfe approximation of the euclidean prox over a box.

    Minimizes <g, u> + (1/(2*alpha)) ||u - x||^2 + l1w*||u||_1 over the box,
    stopping when the linearized gap at the candidate vertex is >= -delta.
    Returns (u, inner_count); inner_count is -1 when the cap was hit.
    """
    u = x.copy()
    t = 1
    while t <= max_inner:
        cvec = g + (u - x) / alpha
        v = _box_l1_argmin_numpy(cvec, lo, hi, l1w)
        gap = cvec @ (v - u)
        if l1w > 0.0:
            gap += l1w * (np.abs(v).sum() - np.abs(u).sum())
        if gap >= -delta:
            return u, t
        u = u + (2.0 / (t + 1)) * (v - u)
        t += 1
    return u, -1


def _box_l1_argmin_numpy(cvec, lo, hi, l1w):
    """Per-coordinate argmin of c*y + l1w*|y| over [lo, hi]; candidate order
    (lo, 0, hi) with strict improvement, so ties resolve to the lower bound."""
    vals_lo = cvec * lo + l1w * np.abs(lo)
    vals_hi = cvec * hi + l1w * np.abs(hi)
    v = lo.copy()
    best = vals_lo.copy()
    better0 = (lo <= 0.0) & (hi >= 0.0) & (best > 0.0)
    v[better0] = 0.0
    best[better0] = 0.0
    betterh = vals_hi < best
    v[betterh] = hi[betterh]
    return v


def _cndg_box_loop(x, g, lo, hi, l1w, alpha, delta, max_inner):
    n = x.shape[0]
    u = x.copy()
    v = np.empty(n)
    t = 1
    while t <= max_inner:
        gap = 0.0
        for i in range(n):
            ci = g[i] + (u[i] - x[i]) / alpha
            vi = lo[i]
            best = ci * lo[i] + l1w * abs(lo[i])
            if lo[i] <= 0.0 and hi[i] >= 0.0 and best > 0.0:
                vi = 0.0
                best = 0.0
            cand = ci * hi[i] + l1w * abs(hi[i])
            if cand < best:
                vi = hi[i]
                best = cand
            v[i] = vi
            gap += ci * (vi - u[i])
            if l1w > 0.0:
                gap += l1w * (abs(vi) - abs(u[i]))
        if gap >= -delta:
            return u, t
        st = 2.0 / (t + 1)
        for i in range(n):
            u[i] = u[i] + st * (v[i] - u[i])
        t += 1
    return u, -1


if NUMBA_AVAILABLE:
    quad_values_numba = njit(cache=True)(_quad_values_loop)
    sigmoid_ls_values_numba = njit(cache=True)(_sigmoid_ls_values_loop)
    cndg_box_numba = njit(cache=True)(_cndg_box_loop)
    quad_values = quad_values_numba
    sigmoid_ls_values = sigmoid_ls_values_numba
    cndg_box = cndg_box_numba
else:
    quad_values_numba = None
    sigmoid_ls_values_numba = None
    cndg_box_numba = None
    quad_values = quad_values_numpy
    sigmoid_ls_values = sigmoid_ls_values_numpy
    cndg_box = cndg_box_numpy
