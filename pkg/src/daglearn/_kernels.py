"""Hot numeric kernels: the proximal-gradient inner loop and a coordinate-descent
lasso used as its independent reference.

Two interchangeable implementations exist for each kernel: explicit loops
compiled with numba, and a vectorized pure-numpy fallback.  The active one is
picked at import time from the DAGLEARN_BACKEND environment variable
("numba" or "numpy"; default is numba when importable).  Results agree to
solver tolerance but are not guaranteed bit-identical across backends because
the floating-point summation order differs.
"""

from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False


def _prox_solve_loops(gram2, lam, lip, tol, max_iter, t0):
    """Iterate T <- proj(shrink(T - grad/L, lam/L)) on the strictly lower triangle.

    gram2 is (2/n) Y^T Y for the order-aligned data Y = X P; the gradient of the
    smooth term at T is then gram2 @ (T - I), and the smooth objective equals
    -0.5 <I - T, gradient>.  Returns (T, objective trace, iterations, converged).
    """
    p = gram2.shape[0]
    t = t0.copy()
    trace = np.empty(max_iter + 1)
    thr = lam / lip
    grad = np.empty((p, p))
    iters = 0
    converged = False
    for k in range(max_iter):
        obj = 0.0
        l1 = 0.0
        for i in range(p):
            for j in range(p):
                acc = -gram2[i, j]
                for m in range(j + 1, p):
                    acc += gram2[i, m] * t[m, j]
                grad[i, j] = acc
                a = (1.0 if i == j else 0.0) - t[i, j]
                obj -= 0.5 * a * acc
                if i > j:
                    l1 += abs(t[i, j])
        trace[k] = obj + lam * l1
        delta2 = 0.0
        for i in range(1, p):
            for j in range(i):
                u = t[i, j] - grad[i, j] / lip
                mag = abs(u) - thr
                v = mag if mag > 0.0 else 0.0
                if u < 0.0:
                    v = -v
                d = v - t[i, j]
                delta2 += d * d
                t[i, j] = v
        iters = k + 1
        if np.sqrt(delta2) <= tol:
            converged = True
            break
        if not np.isfinite(delta2):  # diverging; let the caller flag it
            break
    obj = 0.0
    l1 = 0.0
    for i in range(p):
        for j in range(p):
            acc = -gram2[i, j]
            for m in range(j + 1, p):
                acc += gram2[i, m] * t[m, j]
            a = (1.0 if i == j else 0.0) - t[i, j]
            obj -= 0.5 * a * acc
            if i > j:
                l1 += abs(t[i, j])
    trace[iters] = obj + lam * l1
    return t, trace[: iters + 1].copy(), iters, converged


def _prox_solve_numpy(gram2, lam, lip, tol, max_iter, t0):
    """Vectorized twin of _prox_solve_loops."""
    p = gram2.shape[0]
    eye = np.eye(p)
    t = t0.copy()
    trace = np.empty(max_iter + 1)
    thr = lam / lip
    iters = 0
    converged = False
    with np.errstate(invalid="ignore", over="ignore"):  # divergence is caught by the caller
        for k in range(max_iter):
            grad = gram2 @ t - gram2
            trace[k] = -0.5 * np.sum((eye - t) * grad) + lam * np.sum(np.abs(t))
            u = t - grad / lip
            t_new = np.tril(np.sign(u) * np.maximum(np.abs(u) - thr, 0.0), -1)
            delta = float(np.linalg.norm(t_new - t))
            t = t_new
            iters = k + 1
            if delta <= tol:
                converged = True
                break
            if not np.isfinite(delta):
                break
        grad = gram2 @ t - gram2
        trace[iters] = -0.5 * np.sum((eye - t) * grad) + lam * np.sum(np.abs(t))
    return t, trace[: iters + 1].copy(), iters, converged


def _lasso_cd_loops(z, y, lam, tol, max_sweeps):
    """Cyclic coordinate descent for min (1/n)||y - z beta||^2 + lam ||beta||_1.

    Residual-update formulation; stops when no coordinate moves by more than
    tol over a full sweep.
    """
    n, m = z.shape
    beta = np.zeros(m)
    resid = y.copy()
    scale = 2.0 / n
    col_sq = np.empty(m)
    for i in range(m):
        s = 0.0
        for a in range(n):
            s += z[a, i] * z[a, i]
        col_sq[i] = scale * s
    for _ in range(max_sweeps):
        max_step = 0.0
        for i in range(m):
            b_old = beta[i]
            if b_old != 0.0:
                for a in range(n):
                    resid[a] += z[a, i] * b_old
            rho = 0.0
            for a in range(n):
                rho += z[a, i] * resid[a]
            rho *= scale
            if col_sq[i] > 0.0:
                mag = abs(rho) - lam
                b_new = mag / col_sq[i] if mag > 0.0 else 0.0
                if rho < 0.0:
                    b_new = -b_new
            else:
                b_new = 0.0
            if b_new != 0.0:
                for a in range(n):
                    resid[a] -= z[a, i] * b_new
            beta[i] = b_new
            step = abs(b_new - b_old)
            if step > max_step:
                max_step = step
        if max_step <= tol:
            break
    return beta


def _lasso_cd_numpy(z, y, lam, tol, max_sweeps):
    """Vectorized-column twin of _lasso_cd_loops."""
    n, m = z.shape
    beta = np.zeros(m)
    resid = y.copy()
    scale = 2.0 / n
    col_sq = scale * np.einsum("ai,ai->i", z, z)
    for _ in range(max_sweeps):
        max_step = 0.0
        for i in range(m):
            b_old = beta[i]
            if b_old != 0.0:
                resid = resid + z[:, i] * b_old
            rho = scale * float(z[:, i] @ resid)
            if col_sq[i] > 0.0:
                mag = abs(rho) - lam
                b_new = mag / col_sq[i] if mag > 0.0 else 0.0
                if rho < 0.0:
                    b_new = -b_new
            else:
                b_new = 0.0
            if b_new != 0.0:
                resid = resid - z[:, i] * b_new
            beta[i] = b_new
            max_step = max(max_step, abs(b_new - b_old))
        if max_step <= tol:
            break
    return beta


if HAVE_NUMBA:
    _prox_solve_njit = njit(cache=True, nogil=True)(_prox_solve_loops)
    _lasso_cd_njit = njit(cache=True, nogil=True)(_lasso_cd_loops)

_flag = os.environ.get("DAGLEARN_BACKEND", "").strip().lower()
if _flag not in ("", "numba", "numpy"):
    raise RuntimeError(f"DAGLEARN_BACKEND must be 'numba' or 'numpy', got {_flag!r}")
if _flag == "numba" and not HAVE_NUMBA:
    raise RuntimeError("DAGLEARN_BACKEND=numba but numba is not importable")

BACKEND = _flag or ("numba" if HAVE_NUMBA else "numpy")

if BACKEND == "numba":
    prox_solve = _prox_solve_njit
    lasso_cd = _lasso_cd_njit
else:
    prox_solve = _prox_solve_numpy
    lasso_cd = _lasso_cd_numpy


def available_backends() -> dict[str, dict]:
    """Kernel implementations by backend name, for benchmarks and tests."""
    out = {"numpy": {"prox_solve": _prox_solve_numpy, "lasso_cd": _lasso_cd_numpy}}
    if HAVE_NUMBA:
        out["numba"] = {"prox_solve": _prox_solve_njit, "lasso_cd": _lasso_cd_njit}
    return out
