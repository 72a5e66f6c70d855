"""Synthetic ground truths and observational data from a linear Gaussian
structural equation model.

Each node is a linear function of its parents plus independent Gaussian noise,
X = X G0 + eps in matrix form, so a sample row is eps (I - G0)^{-1}.  Sampling
works in the order-aligned basis where the system is triangular and is solved
by forward substitution, which is exact and O(p^2) per row.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidSpecError
from .fileio import read_dataset_csv, read_edges_tsv, write_dataset_csv, write_edges_tsv
from .model import Dataset, Permutation, StrictLowerTriangular, WeightedDag, compose


@dataclass(frozen=True)
class GraphSpec:
    """Parameters of a random sparse ground-truth DAG."""

    p: int
    n_edges: int
    weight_range: tuple[float, float] = (0.5, 2.0)
    noise_sd: float = 0.1
    seed: int = 0

    def __post_init__(self):
        w_min, w_max = self.weight_range
        if self.p < 2:
            raise InvalidSpecError(f"need p >= 2, got {self.p}")
        max_edges = self.p * (self.p - 1) // 2
        if not 0 <= self.n_edges <= max_edges:
            raise InvalidSpecError(
                f"n_edges must be in [0, {max_edges}] for p={self.p}, got {self.n_edges}"
            )
        if not 0 < w_min <= w_max:
            raise InvalidSpecError(f"need 0 < w_min <= w_max, got {self.weight_range}")
        if not self.noise_sd > 0:
            raise InvalidSpecError(f"noise_sd must be > 0, got {self.noise_sd}")


@dataclass(frozen=True)
class GroundTruth:
    """A ground-truth DAG together with its ordering/triangular factorization."""

    dag: WeightedDag
    perm: Permutation
    tri: StrictLowerTriangular

    def __post_init__(self):
        recomposed = compose(self.perm, self.tri)
        if not np.array_equal(recomposed.weights, self.dag.weights):
            raise InvalidSpecError("perm and tri do not compose to dag")


def sample_dag(spec: GraphSpec) -> GroundTruth:
    """Draw a uniformly random ordering and a strictly lower-triangular weight
    matrix with exactly `n_edges` nonzeros, magnitudes uniform in the weight
    range and signs uniform."""
    rng = np.random.default_rng(spec.seed)
    p = spec.p
    tri = np.zeros((p, p))
    slots = [(i, j) for i in range(1, p) for j in range(i)]
    chosen = rng.choice(len(slots), size=spec.n_edges, replace=False)
    w_min, w_max = spec.weight_range
    magnitudes = rng.uniform(w_min, w_max, size=spec.n_edges)
    signs = rng.integers(0, 2, size=spec.n_edges) * 2.0 - 1.0
    for idx, mag, sign in zip(chosen, magnitudes, signs):
        i, j = slots[int(idx)]
        tri[i, j] = sign * mag
    perm = Permutation.random(p, rng)
    tri = StrictLowerTriangular(tri)
    return GroundTruth(dag=compose(perm, tri), perm=perm, tri=tri)


def sample_data(
    truth: GroundTruth,
    n: int,
    noise_sd,
    seed: int,
    return_noise: bool = False,
):
    """Draw n i.i.d. rows of X = eps (I - G0)^{-1} with eps ~ N(0, sd^2) per node.

    `noise_sd` is a scalar for the default equal-variance model, or a length-p
    vector for explicitly heteroscedastic noise.  With `return_noise` the drawn
    eps matrix is returned as well, so callers can check X - X G0 == eps.
    """
    if n < 1:
        raise InvalidSpecError(f"need n >= 1, got {n}")
    p = truth.perm.p
    sd = np.asarray(noise_sd, dtype=np.float64)
    if sd.ndim not in (0, 1) or (sd.ndim == 1 and sd.shape[0] != p):
        raise InvalidSpecError("noise_sd must be a scalar or a length-p vector")
    if np.any(sd < 0):
        raise InvalidSpecError("noise_sd must be >= 0")
    rng = np.random.default_rng(seed)
    eps = rng.normal(0.0, 1.0, size=(n, p)) * sd
    ranks0 = np.asarray(truth.perm.ranks, dtype=np.intp) - 1
    eta = eps[:, ranks0]  # noise in the order-aligned basis
    t = truth.tri.entries
    z = np.empty((n, p))
    for j in range(p - 1, -1, -1):
        col = eta[:, j]
        if j < p - 1:
            col = col + z[:, j + 1 :] @ t[j + 1 :, j]
        z[:, j] = col
    x = z[:, truth.perm.positions()]
    ds = Dataset(x)
    return (ds, eps) if return_noise else ds


def write_dataset(ds: Dataset, path) -> None:
    """Dataset to CSV with a V1..Vp header, lossless at 17 significant digits."""
    write_dataset_csv(ds, path)


def read_dataset(path) -> Dataset:
    return read_dataset_csv(path)


def write_truth(truth: GroundTruth, path) -> None:
    """Ground-truth edges as a headerless TSV `source<TAB>target<TAB>weight`."""
    write_edges_tsv(truth.dag.edges, path)


def read_truth_matrix(path, p: int) -> WeightedDag:
    """Read an edge TSV back into a p x p weight matrix."""
    weights = np.zeros((p, p))
    for source, target, value in read_edges_tsv(path):
        if source > p or target > p:
            raise InvalidSpecError(f"edge {source}->{target} exceeds p={p}")
        weights[source - 1, target - 1] = value
    return WeightedDag(weights)
