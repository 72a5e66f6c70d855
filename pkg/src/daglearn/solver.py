"""Proximal-gradient solver for the penalized least-squares weight problem at a
fixed node ordering:

    min over strictly lower-triangular T of
        (1/n) ||X (I - P T P^T)||_F^2 + lam ||T||_1

Starting from T = 0, each step takes a gradient move of length 1/L, shrinks
every entry toward zero by lam/L, and projects back onto the strictly
lower-triangular set; it stops when successive iterates are closer than `tol`
in Frobenius norm.  The gradient of the smooth term is
-(2/n) (XP)^T (X - X P T P^T) P.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import _kernels
from .errors import NonFiniteError, ZeroDataError
from .model import Dataset, Permutation, StrictLowerTriangular

DEFAULT_TOL = 1e-6
DEFAULT_MAX_ITER = 1_000_000


def data_matrix(X) -> np.ndarray:
    """Accept a Dataset or a raw 2-d array and return float64 data."""
    if isinstance(X, Dataset):
        return X.X
    m = np.asarray(X, dtype=np.float64)
    if m.ndim != 2:
        raise ValueError("expected an n x p data matrix")
    return m


@dataclass(frozen=True)
class SolverConfig:
    """Tunables of the inner solver.

    `lipschitz` may be left None, in which case solve() uses the closed-form
    bound (2/n) ||X^T X||_F from the data.
    """

    lam: float
    lipschitz: float | None = None
    tol: float = DEFAULT_TOL
    max_iter: int = DEFAULT_MAX_ITER

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError("lam must be >= 0")
        if self.lipschitz is not None and not self.lipschitz > 0:
            raise ValueError("lipschitz must be > 0 when given")
        if not self.tol > 0:
            raise ValueError("tol must be > 0")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")


@dataclass(frozen=True)
class SolveReport:
    t_star: StrictLowerTriangular
    objective: float
    iterations: int
    converged: bool
    objective_trace: np.ndarray
    warm_started: bool = False


def lipschitz_bound(X) -> float:
    """Step-size bound L = (2/n) ||X^T X||_F; always at least the gradient's
    true Lipschitz constant (2/n) ||X^T X||_2."""
    x = data_matrix(X)
    n = x.shape[0]
    value = 2.0 / n * float(np.linalg.norm(x.T @ x))
    if value == 0.0:
        raise ZeroDataError("data matrix is identically zero")
    return value


def soft_threshold(u, threshold: float) -> np.ndarray:
    """Entrywise shrinkage toward zero by `threshold`; exact zero within it."""
    if threshold < 0:
        raise ValueError("threshold must be >= 0")
    u = np.asarray(u, dtype=np.float64)
    return np.sign(u) * np.maximum(np.abs(u) - threshold, 0.0)


def project_strict_lower(m) -> StrictLowerTriangular:
    """Zero everything on and above the diagonal."""
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("expected a square matrix")
    return StrictLowerTriangular(np.tril(m, -1))


def _tri_entries(t) -> np.ndarray:
    return t.entries if isinstance(t, StrictLowerTriangular) else np.asarray(t, dtype=np.float64)


def objective(X, perm: Permutation, t, lam: float) -> float:
    """(1/n) ||X (I - P T P^T)||_F^2 + lam * sum |T|; this is also the fitness
    of `perm` when t is its optimal inner solution."""
    x = data_matrix(X)
    entries = _tri_entries(t)
    n, p = x.shape
    if perm.p != p or entries.shape != (p, p):
        raise ValueError("dimension mismatch between data, permutation, and T")
    pos = perm.positions()
    g = entries[np.ix_(pos, pos)]  # P T P^T by index permutation
    resid = x - x @ g
    return float(np.sum(resid * resid) / n + lam * np.sum(np.abs(entries)))


def gradient(X, perm: Permutation, t) -> np.ndarray:
    """Gradient of the smooth fit term with respect to T:
    -(2/n) (XP)^T (X - X P T P^T) P."""
    x = data_matrix(X)
    entries = _tri_entries(t)
    n, p = x.shape
    if perm.p != p or entries.shape != (p, p):
        raise ValueError("dimension mismatch between data, permutation, and T")
    ranks0 = np.asarray(perm.ranks, dtype=np.intp) - 1
    pos = perm.positions()
    y = x[:, ranks0]  # X P
    fitted = (y @ entries)[:, pos]  # X P T P^T
    return -(2.0 / n) * (y.T @ (x - fitted)[:, ranks0])


def solve(X, perm: Permutation, cfg: SolverConfig, t_init=None) -> SolveReport:
    """Run the proximal-gradient iteration from T = 0 (or `t_init` when warm
    starting) and report the solution, objective, and per-iteration trace."""
    x = data_matrix(X)
    n, p = x.shape
    if perm.p != p:
        raise ValueError(f"permutation has p={perm.p} but data has p={p}")
    lip = cfg.lipschitz if cfg.lipschitz is not None else lipschitz_bound(x)
    ranks0 = np.asarray(perm.ranks, dtype=np.intp) - 1
    y = x[:, ranks0]
    gram2 = (2.0 / n) * (y.T @ y)
    if t_init is None:
        t0 = np.zeros((p, p))
    else:
        t0 = np.array(_tri_entries(t_init), dtype=np.float64)
        if t0.shape != (p, p) or np.any(np.triu(t0) != 0):
            raise ValueError("t_init must be a p x p strictly lower-triangular matrix")
    t, trace, iters, converged = _kernels.prox_solve(
        gram2, float(cfg.lam), float(lip), float(cfg.tol), int(cfg.max_iter), t0
    )
    if not (np.all(np.isfinite(t)) and np.all(np.isfinite(trace))):
        raise NonFiniteError("non-finite values during solve; check L and the data")
    t_star = StrictLowerTriangular(t)
    return SolveReport(
        t_star=t_star,
        objective=objective(x, perm, t_star, cfg.lam),
        iterations=iters,
        converged=converged,
        objective_trace=trace,
        warm_started=t_init is not None,
    )
