"""Node orderings, strictly lower-triangular weight matrices, and the DAG algebra
connecting them.

A permutation vector lists nodes from most-downstream to most-upstream; its
matrix form P has the 1 of column j in row ranks[j].  Any weight matrix G of a
DAG factors as G = P T P^T with T strictly lower triangular, and conversely any
such product is a DAG.  Entry G[i, j] is the weight of edge i -> j (row is the
parent, column the child).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CyclicGraphError


def _frozen_matrix(values, dtype=np.float64) -> np.ndarray:
    m = np.array(values, dtype=dtype)
    m.setflags(write=False)
    return m


@dataclass(frozen=True)
class Permutation:
    """A node ordering as a vector of 1-based ranks (a bijection on 1..p)."""

    ranks: tuple[int, ...]

    def __post_init__(self):
        ranks = tuple(int(r) for r in self.ranks)
        object.__setattr__(self, "ranks", ranks)
        p = len(ranks)
        if p == 0 or sorted(ranks) != list(range(1, p + 1)):
            raise ValueError(f"ranks must be a permutation of 1..{p}, got {ranks}")

    @property
    def p(self) -> int:
        return len(self.ranks)

    def positions(self) -> np.ndarray:
        """0-based position of each node in the ordering: positions[i] is the
        index at which value i+1 sits in `ranks`."""
        pos = np.empty(self.p, dtype=np.intp)
        pos[np.asarray(self.ranks, dtype=np.intp) - 1] = np.arange(self.p)
        return pos

    def matrix(self) -> np.ndarray:
        """0/1 matrix form; one 1 per row and column, P P^T = I."""
        m = np.zeros((self.p, self.p))
        m[np.asarray(self.ranks, dtype=np.intp) - 1, np.arange(self.p)] = 1.0
        return m

    @classmethod
    def identity(cls, p: int) -> "Permutation":
        return cls(tuple(range(1, p + 1)))

    @classmethod
    def random(cls, p: int, rng: np.random.Generator) -> "Permutation":
        return cls(tuple(int(v) for v in rng.permutation(p) + 1))

    @classmethod
    def from_matrix(cls, m) -> "Permutation":
        m = np.asarray(m)
        p = m.shape[0]
        if m.shape != (p, p):
            raise ValueError("permutation matrix must be square")
        rows, cols = np.nonzero(m)
        if len(rows) != p or not np.all(m[rows, cols] == 1):
            raise ValueError("matrix is not a permutation matrix")
        ranks = np.empty(p, dtype=np.intp)
        ranks[cols] = rows + 1
        return cls(tuple(int(r) for r in ranks))


def permutation_to_matrix(perm: Permutation) -> np.ndarray:
    """Matrix form of a permutation vector (reading the ranks column by column)."""
    return perm.matrix()


def matrix_to_permutation(m) -> Permutation:
    """Exact inverse of permutation_to_matrix."""
    return Permutation.from_matrix(m)


@dataclass(frozen=True)
class StrictLowerTriangular:
    """A p x p matrix that is zero on and above the diagonal."""

    entries: np.ndarray

    def __post_init__(self):
        m = _frozen_matrix(self.entries)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("entries must be a square matrix")
        if np.any(np.triu(m) != 0):
            raise ValueError("entries must vanish on and above the diagonal")
        object.__setattr__(self, "entries", m)

    @property
    def p(self) -> int:
        return self.entries.shape[0]

    @classmethod
    def zeros(cls, p: int) -> "StrictLowerTriangular":
        return cls(np.zeros((p, p)))


@dataclass(frozen=True)
class WeightedDag:
    """Weighted adjacency matrix of a DAG; G[i, j] is the weight of edge i -> j."""

    weights: np.ndarray

    def __post_init__(self):
        m = _frozen_matrix(self.weights)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("weights must be a square matrix")
        if not is_dag(m):
            raise CyclicGraphError("weight matrix support contains a cycle or self-loop")
        object.__setattr__(self, "weights", m)

    @property
    def p(self) -> int:
        return self.weights.shape[0]

    @property
    def edges(self) -> tuple[tuple[int, int, float], ...]:
        """Directed edges (source, target, weight), 1-based, sorted by (source, target)."""
        rows, cols = np.nonzero(self.weights)
        triples = sorted(
            (int(i) + 1, int(j) + 1, float(self.weights[i, j])) for i, j in zip(rows, cols)
        )
        return tuple(triples)

    @property
    def edge_set(self) -> frozenset[tuple[int, int]]:
        return frozenset((s, t) for s, t, _ in self.edges)


@dataclass(frozen=True)
class Dataset:
    """An n x p observation matrix; rows are samples, columns are nodes."""

    X: np.ndarray

    def __post_init__(self):
        m = _frozen_matrix(self.X)
        if m.ndim != 2:
            raise ValueError("X must be a 2-d matrix")
        if m.shape[0] < 1 or m.shape[1] < 2:
            raise ValueError(f"need n >= 1 and p >= 2, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise ValueError("X contains non-finite entries")
        object.__setattr__(self, "X", m)

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]


def is_dag(m) -> bool:
    """True iff the nonzero pattern of a square matrix admits a topological order.

    Checked by peeling nodes without remaining parents; a self-loop counts as a
    cycle of length one.
    """
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("expected a square matrix")
    support = m != 0
    p = m.shape[0]
    indegree = support.sum(axis=0).astype(np.int64)
    alive = np.ones(p, dtype=bool)
    for _ in range(p):
        sources = np.flatnonzero(alive & (indegree == 0))
        if sources.size == 0:
            break
        for s in sources:
            alive[s] = False
            indegree -= support[s]
    return not alive.any()


def compose(perm: Permutation, tri: StrictLowerTriangular) -> WeightedDag:
    """Build the DAG weight matrix G = P T P^T.

    Implemented by index permutation, so the nonzero weights of T are carried
    over exactly.
    """
    if perm.p != tri.p:
        raise ValueError(f"dimension mismatch: permutation has p={perm.p}, matrix p={tri.p}")
    pos = perm.positions()
    return WeightedDag(tri.entries[np.ix_(pos, pos)])


def decompose(dag) -> tuple[Permutation, StrictLowerTriangular]:
    """Split a DAG weight matrix into (P, T) with compose(P, T) equal to it.

    The ranks vector is filled front to back (most-downstream node first) by
    peeling, at each step, the lowest-index node with no remaining children;
    the zero matrix therefore decomposes to the identity ordering.
    """
    g = dag.weights if isinstance(dag, WeightedDag) else np.asarray(dag, dtype=np.float64)
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise ValueError("expected a square matrix")
    p = g.shape[0]
    support = g != 0
    outdegree = support.sum(axis=1).astype(np.int64)
    alive = np.ones(p, dtype=bool)
    order: list[int] = []
    for _ in range(p):
        sinks = np.flatnonzero(alive & (outdegree == 0))
        if sinks.size == 0:
            raise CyclicGraphError("matrix support contains a cycle or self-loop")
        s = int(sinks[0])
        order.append(s)
        alive[s] = False
        outdegree -= support[:, s]
    perm = Permutation(tuple(v + 1 for v in order))
    tri = StrictLowerTriangular(g[np.ix_(order, order)])
    return perm, tri
