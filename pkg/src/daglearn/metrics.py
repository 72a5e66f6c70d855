"""Edge ranking along the penalty path and precision/recall scoring against a
known graph.

Sweeping the penalty from large to small introduces edges into the best model
one block at a time; an edge's score is the largest penalty at which it first
appears, so earlier entry means higher confidence.  Precision/recall points
are taken after each score block and the area under the curve uses right-step
integration over recall, anchored at recall 0 with the first point's
precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from .errors import EmptyGridError
from .fileio import read_edges_tsv
from .ga import GaConfig, GaReport
from .ga import run as ga_run
from .model import StrictLowerTriangular, WeightedDag, compose
from .solver import SolverConfig, data_matrix


@dataclass(frozen=True)
class RankedEdges:
    """Directed edges ordered by non-increasing confidence score."""

    edges: tuple[tuple[int, int, float], ...]

    def __post_init__(self):
        edges = tuple((int(s), int(t), float(v)) for s, t, v in self.edges)
        object.__setattr__(self, "edges", edges)
        seen = set()
        previous = math.inf
        for s, t, score in edges:
            if s == t:
                raise ValueError(f"self-loop {s}->{t} in ranking")
            if (s, t) in seen:
                raise ValueError(f"duplicate edge {s}->{t} in ranking")
            seen.add((s, t))
            if score > previous:
                raise ValueError("scores must be non-increasing")
            previous = score

    def __len__(self) -> int:
        return len(self.edges)


@dataclass(frozen=True)
class PrCurve:
    points: tuple[tuple[float, float], ...]  # (recall, precision) per score block
    aupr: float

    def __post_init__(self):
        previous = 0.0
        for recall, precision in self.points:
            if not (0.0 <= recall <= 1.0 and 0.0 <= precision <= 1.0):
                raise ValueError("recall and precision must lie in [0, 1]")
            if recall < previous:
                raise ValueError("recall must be non-decreasing")
            previous = recall
        if not 0.0 <= self.aupr <= 1.0:
            raise ValueError("aupr must lie in [0, 1]")


def confusion(pred, truth: WeightedDag) -> tuple[int, int, int, int]:
    """(TP, FP, FN, TN) over the p(p-1) ordered node pairs, directed comparison."""
    p = truth.p
    true_set = truth.edge_set
    pred_set = set()
    for edge in pred:
        s, t = int(edge[0]), int(edge[1])
        if not (1 <= s <= p and 1 <= t <= p):
            raise ValueError(f"edge {s}->{t} outside 1..{p}")
        if s == t:
            raise ValueError(f"self-loop {s}->{t} in prediction")
        pred_set.add((s, t))
    tp = len(pred_set & true_set)
    fp = len(pred_set - true_set)
    fn = len(true_set - pred_set)
    tn = p * (p - 1) - tp - fp - fn
    return tp, fp, fn, tn


def _score_blocks(ranked: RankedEdges):
    """Group consecutive edges sharing a score; ties enter the model together."""
    blocks: list[list[tuple[int, int, float]]] = []
    for edge in ranked.edges:
        if blocks and edge[2] == blocks[-1][-1][2]:
            blocks[-1].append(edge)
        else:
            blocks.append([edge])
    return blocks


def pr_curve_rows(
    ranked: RankedEdges, truth: WeightedDag
) -> list[tuple[int, float, float, float]]:
    """(rank, score, recall, precision) after each score block is introduced."""
    p = truth.p
    true_set = truth.edge_set
    total = len(true_set)
    rows = []
    tp = fp = 0
    for block in _score_blocks(ranked):
        for s, t, _ in block:
            if not (1 <= s <= p and 1 <= t <= p):
                raise ValueError(f"edge {s}->{t} outside 1..{p}")
            if (s, t) in true_set:
                tp += 1
            else:
                fp += 1
        recall = tp / total if total else 0.0
        precision = tp / (tp + fp)
        rows.append((tp + fp, block[0][2], recall, precision))
    return rows


def pr_curve(ranked: RankedEdges, truth: WeightedDag) -> PrCurve:
    """Precision/recall points along the ranking and the area under the curve."""
    rows = pr_curve_rows(ranked, truth)
    points = tuple((recall, precision) for _, _, recall, precision in rows)
    aupr = 0.0
    prev_recall = 0.0
    for recall, precision in points:
        aupr += (recall - prev_recall) * precision
        prev_recall = recall
    return PrCurve(points=points, aupr=aupr)


def default_lambda_grid(X, size: int = 30, decades: float = 3.0) -> np.ndarray:
    """Log-spaced penalties from lambda_max (an empty model for every ordering)
    down through `decades` orders of magnitude."""
    x = data_matrix(X)
    n = x.shape[0]
    gram = x.T @ x
    off = np.abs(gram - np.diag(np.diag(gram)))
    lam_max = 2.0 / n * float(off.max())
    if lam_max == 0.0:
        raise EmptyGridError("data has no off-diagonal signal; the grid would be all zeros")
    if size < 1:
        raise EmptyGridError("grid size must be >= 1")
    return np.geomspace(lam_max, lam_max * 10.0 ** (-decades), size)


def heuristic_lambda(n: int, p: int, c: float = 1.0, s: float | None = None) -> float:
    """Single-penalty default 2 c sqrt(s log(p) / n) with s = sqrt(p) unless given."""
    if s is None:
        s = math.sqrt(p)
    return 2.0 * c * math.sqrt(s * math.log(p) / n)


def lambda_path(
    X,
    grid: Sequence[float],
    cfg: GaConfig,
    *,
    solver: SolverConfig | None = None,
    threads: int | None = None,
    on_lambda: Callable[[float, GaReport], None] | None = None,
) -> RankedEdges:
    """Rank edges by the largest penalty at which they first enter the best model.

    The search runs once per grid value, largest first; each subsequent run
    gets the previous best ordering injected into its initial population and
    the inner solver warm-started from the previous best weights.  Ties in
    first-entry penalty are ordered by |weight| at first entry, then by
    (source, target).
    """
    values = [float(v) for v in grid]
    if not values:
        raise EmptyGridError("the penalty grid is empty")
    if any(v < 0 for v in values):
        raise ValueError("grid values must be >= 0")
    if any(b >= a for a, b in zip(values, values[1:])):
        raise ValueError("grid must be strictly decreasing (no duplicates)")
    x = data_matrix(X)
    seed_rng = np.random.default_rng(cfg.seed)
    first_entry: dict[tuple[int, int], tuple[float, float]] = {}
    previous = None
    for lam in values:
        sub_cfg = replace(cfg, seed=int(seed_rng.integers(2**63)))
        kwargs = {}
        if previous is not None:
            kwargs["seed_individuals"] = [previous.perm]
            kwargs["warm_start"] = (previous.perm, previous.t_star)
        report = ga_run(x, lam, sub_cfg, solver=solver, threads=threads, **kwargs)
        best = report.best
        dag = compose(best.perm, StrictLowerTriangular(best.t_star))
        for s, t, w in dag.edges:
            if (s, t) not in first_entry:
                first_entry[(s, t)] = (lam, abs(w))
        previous = best
        if on_lambda is not None:
            on_lambda(lam, report)
    ordered = sorted(
        first_entry.items(), key=lambda kv: (-kv[1][0], -kv[1][1], kv[0][0], kv[0][1])
    )
    return RankedEdges(tuple((s, t, lam) for (s, t), (lam, _) in ordered))


def ingest_external_ranking(path) -> RankedEdges:
    """Load a `source<TAB>target<TAB>score` TSV and sort by descending score."""
    edges = read_edges_tsv(path)
    edges.sort(key=lambda e: -e[2])
    return RankedEdges(tuple(edges))
