"""Sparse DAG structure learning from observational data.

Edge weights for a fixed node ordering come from a proximal-gradient solve of
the penalized least-squares problem; the ordering itself is found by a genetic
search over permutation vectors.  A synthetic SEM benchmark generator,
precision/recall evaluation along the penalty path, and brute-force oracles
round out the toolkit.
"""

from ._kernels import BACKEND
from .errors import (
    CyclicGraphError,
    DaglearnError,
    EmptyGridError,
    ExplicitRefusalError,
    InvalidSpecError,
    MalformedCsvError,
    MalformedEdgeListError,
    NonFiniteError,
    NonPositiveFitnessError,
    ZeroDataError,
)
from .ga import GaConfig, GaReport, Individual, StopReason
from .ga import run as ga_run
from .metrics import (
    PrCurve,
    RankedEdges,
    confusion,
    default_lambda_grid,
    heuristic_lambda,
    ingest_external_ranking,
    lambda_path,
    pr_curve,
)
from .model import (
    Dataset,
    Permutation,
    StrictLowerTriangular,
    WeightedDag,
    compose,
    decompose,
    is_dag,
    matrix_to_permutation,
    permutation_to_matrix,
)
from .oracle import OracleReport, compare_inner_solvers, exhaustive_best_permutation, lasso_cd_column
from .sem import GraphSpec, GroundTruth, read_dataset, sample_dag, sample_data, write_dataset
from .solver import (
    SolveReport,
    SolverConfig,
    gradient,
    lipschitz_bound,
    objective,
    project_strict_lower,
    soft_threshold,
    solve,
)

__version__ = "0.1.0"
