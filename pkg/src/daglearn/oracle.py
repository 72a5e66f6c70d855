"""Brute-force references for validating the main pipeline at desk scale:
exhaustive enumeration of all orderings, and a per-column coordinate-descent
lasso that must agree with the proximal solver on the same convex problem.

After the change of variables Y = X P the fit term separates by column,
||X (I - P T P^T)||_F = ||Y (I - T)||_F, so column j of the optimal T is a
lasso of Y^j on the later columns Y^{j+1..p}.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import permutations

import numpy as np

from . import _kernels
from .errors import DaglearnError, ExplicitRefusalError
from .model import Permutation, StrictLowerTriangular
from .solver import SolverConfig, data_matrix, lipschitz_bound, objective, solve

MAX_EXHAUSTIVE_P = 8
CD_TOL = 1e-12
CD_MAX_SWEEPS = 100_000


@dataclass(frozen=True)
class OracleReport:
    best_perm: Permutation
    best_objective: float
    per_perm_objectives: tuple[tuple[tuple[int, ...], float], ...] | None = None


def exhaustive_best_permutation(
    X,
    lam: float,
    solver: SolverConfig | None = None,
    *,
    keep_table: bool = False,
    threads: int | None = None,
) -> OracleReport:
    """Solve the inner problem for every one of the p! orderings and return the
    global minimizer (ties broken by lexicographic order, restricted to fully
    converged solves)."""
    x = data_matrix(X)
    n, p = x.shape
    if p > MAX_EXHAUSTIVE_P:
        raise ExplicitRefusalError(
            f"refusing exhaustive search at p={p}: {math.factorial(p)} inner solves; "
            f"the desk-scale ceiling is p <= {MAX_EXHAUSTIVE_P}"
        )
    template = solver if solver is not None else SolverConfig(lam=lam)
    lip = template.lipschitz if template.lipschitz is not None else lipschitz_bound(x)
    cfg = SolverConfig(lam=lam, lipschitz=lip, tol=template.tol, max_iter=template.max_iter)

    def solve_one(ranks: tuple[int, ...]) -> tuple[float, bool]:
        report = solve(x, Permutation(ranks), cfg)
        return report.objective, report.converged

    all_ranks = list(permutations(range(1, p + 1)))
    if threads is not None and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(solve_one, all_ranks))
    else:
        results = [solve_one(r) for r in all_ranks]

    best_ranks = None
    best_objective = math.inf
    table = []
    for ranks, (obj, converged) in zip(all_ranks, results):
        if keep_table:
            table.append((ranks, obj))
        if converged and obj < best_objective:
            best_objective = obj
            best_ranks = ranks
    if best_ranks is None:
        raise DaglearnError("no ordering produced a converged inner solve")
    return OracleReport(
        best_perm=Permutation(best_ranks),
        best_objective=best_objective,
        per_perm_objectives=tuple(table) if keep_table else None,
    )


def lasso_cd_column(Y, j: int, lam: float) -> np.ndarray:
    """Lasso weights of column j (1-based) of Y on its later columns, solved by
    cyclic coordinate descent; column p has no predictors and returns []."""
    y = np.asarray(Y, dtype=np.float64)
    n, p = y.shape
    if not 1 <= j <= p:
        raise ValueError(f"column index must be in 1..{p}, got {j}")
    z = np.ascontiguousarray(y[:, j:])
    if z.shape[1] == 0:
        return np.zeros(0)
    target = np.ascontiguousarray(y[:, j - 1])
    return _kernels.lasso_cd(z, target, float(lam), CD_TOL, CD_MAX_SWEEPS)


@dataclass(frozen=True)
class SolverComparison:
    t_prox: StrictLowerTriangular
    t_cd: StrictLowerTriangular
    max_abs_diff: float
    objective_gap: float


def compare_inner_solvers(
    X, perm: Permutation, lam: float, solver: SolverConfig | None = None
) -> SolverComparison:
    """Assemble the full T from per-column coordinate descent and diff it
    against the proximal solution, entrywise and in objective value."""
    x = data_matrix(X)
    p = x.shape[1]
    ranks0 = np.asarray(perm.ranks, dtype=np.intp) - 1
    y = x[:, ranks0]
    t_cd = np.zeros((p, p))
    for j in range(1, p + 1):
        t_cd[j:, j - 1] = lasso_cd_column(y, j, lam)
    template = solver if solver is not None else SolverConfig(lam=lam)
    cfg = SolverConfig(
        lam=lam, lipschitz=template.lipschitz, tol=template.tol, max_iter=template.max_iter
    )
    prox = solve(x, perm, cfg)
    cd_tri = StrictLowerTriangular(t_cd)
    gap = abs(objective(x, perm, cd_tri, lam) - prox.objective)
    return SolverComparison(
        t_prox=prox.t_star,
        t_cd=cd_tri,
        max_abs_diff=float(np.max(np.abs(t_cd - prox.t_star.entries))),
        objective_gap=gap,
    )
