import numpy as np
import pytest

from daglearn import (
    CyclicGraphError,
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

# Golden 5-node instance: a permutation, its matrix form, a strictly
# lower-triangular weight matrix, and their composed DAG.
GOLDEN_RANKS = (5, 3, 4, 1, 2)
GOLDEN_P = np.array(
    [
        [0, 0, 0, 1, 0],
        [0, 0, 0, 0, 1],
        [0, 1, 0, 0, 0],
        [0, 0, 1, 0, 0],
        [1, 0, 0, 0, 0],
    ],
    dtype=float,
)
GOLDEN_T = np.array(
    [
        [0, 0, 0, 0, 0],
        [0, 0, 0, 0, 0],
        [3, 0, 0, 0, 0],
        [5, 0, 7, 0, 0],
        [4, 1, 6, 2, 0],
    ],
    dtype=float,
)
GOLDEN_G = np.array(
    [
        [0, 0, 0, 7, 5],
        [2, 0, 1, 6, 4],
        [0, 0, 0, 0, 0],
        [0, 0, 0, 0, 3],
        [0, 0, 0, 0, 0],
    ],
    dtype=float,
)
# The golden DAG admits exactly four orderings.
GOLDEN_VALID_RANKS = {
    (5, 4, 1, 3, 2),
    (5, 4, 3, 1, 2),
    (5, 3, 4, 1, 2),
    (3, 5, 4, 1, 2),
}


class TestPermutation:
    def test_golden_matrix(self):
        assert np.array_equal(permutation_to_matrix(Permutation(GOLDEN_RANKS)), GOLDEN_P)

    def test_identity(self):
        p = 6
        assert np.array_equal(permutation_to_matrix(Permutation.identity(p)), np.eye(p))

    def test_two_node_swap_is_antidiagonal(self):
        assert np.array_equal(
            permutation_to_matrix(Permutation((2, 1))), np.array([[0.0, 1.0], [1.0, 0.0]])
        )

    def test_matrix_roundtrip(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            perm = Permutation.random(int(rng.integers(2, 12)), rng)
            assert matrix_to_permutation(permutation_to_matrix(perm)) == perm

    def test_matrix_is_orthogonal(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            m = Permutation.random(int(rng.integers(2, 10)), rng).matrix()
            assert np.array_equal(m @ m.T, np.eye(m.shape[0]))
            assert np.array_equal(m.T @ m, np.eye(m.shape[0]))

    @pytest.mark.parametrize("ranks", [(), (1, 1), (0, 1), (1, 3), (2, 2, 1)])
    def test_invalid_ranks_rejected(self, ranks):
        with pytest.raises(ValueError):
            Permutation(ranks)

    def test_from_matrix_rejects_non_permutation(self):
        with pytest.raises(ValueError):
            matrix_to_permutation(np.ones((3, 3)))


class TestComposeDecompose:
    def test_golden_compose_exact(self):
        dag = compose(Permutation(GOLDEN_RANKS), StrictLowerTriangular(GOLDEN_T))
        assert np.array_equal(dag.weights, GOLDEN_G)

    def test_golden_matches_matrix_product(self):
        product = GOLDEN_P @ GOLDEN_T @ GOLDEN_P.T
        assert np.array_equal(product, GOLDEN_G)

    def test_golden_decompose_is_valid_ordering(self):
        perm, tri = decompose(WeightedDag(GOLDEN_G))
        assert perm.ranks in GOLDEN_VALID_RANKS
        assert np.array_equal(compose(perm, tri).weights, GOLDEN_G)

    def test_golden_decompose_deterministic_tiebreak(self):
        perm, _ = decompose(WeightedDag(GOLDEN_G))
        assert perm.ranks == (3, 5, 4, 1, 2)

    def test_zero_matrix_composes_to_zero(self):
        rng = np.random.default_rng(2)
        perm = Permutation.random(7, rng)
        dag = compose(perm, StrictLowerTriangular.zeros(7))
        assert np.array_equal(dag.weights, np.zeros((7, 7)))

    def test_identity_perm_keeps_t(self):
        t = np.tril(np.arange(16, dtype=float).reshape(4, 4), -1)
        dag = compose(Permutation.identity(4), StrictLowerTriangular(t))
        assert np.array_equal(dag.weights, t)

    def test_decompose_zero_matrix(self):
        perm, tri = decompose(np.zeros((4, 4)))
        assert perm == Permutation.identity(4)
        assert np.array_equal(tri.entries, np.zeros((4, 4)))

    def test_decompose_cycle_raises(self):
        cycle = np.zeros((3, 3))
        cycle[0, 1] = cycle[1, 2] = cycle[2, 0] = 1.0
        with pytest.raises(CyclicGraphError):
            decompose(cycle)

    def test_roundtrip_random(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            p = int(rng.integers(2, 10))
            perm = Permutation.random(p, rng)
            t = np.tril(rng.normal(size=(p, p)), -1) * (rng.random((p, p)) < 0.5)
            t = np.tril(t, -1)
            dag = compose(perm, StrictLowerTriangular(t))
            perm2, tri2 = decompose(dag)
            assert np.array_equal(compose(perm2, tri2).weights, dag.weights)

    def test_compose_preserves_weight_multiset(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            p = int(rng.integers(2, 9))
            perm = Permutation.random(p, rng)
            t = np.tril(rng.normal(size=(p, p)), -1)
            dag = compose(perm, StrictLowerTriangular(t))
            assert sorted(t[t != 0].tolist()) == sorted(
                dag.weights[dag.weights != 0].tolist()
            )

    def test_compose_always_dag(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            p = int(rng.integers(2, 9))
            perm = Permutation.random(p, rng)
            t = np.tril(rng.normal(size=(p, p)), -1)
            assert is_dag(compose(perm, StrictLowerTriangular(t)).weights)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            compose(Permutation((1, 2)), StrictLowerTriangular.zeros(3))


class TestIsDag:
    def test_golden_graph(self):
        assert is_dag(GOLDEN_G)

    def test_identity_has_self_loops(self):
        assert not is_dag(np.eye(3))

    def test_two_cycle(self):
        m = np.array([[0.0, 1.0], [1.0, 0.0]])
        assert not is_dag(m)

    def test_weighted_dag_rejects_cycles(self):
        with pytest.raises(CyclicGraphError):
            WeightedDag(np.eye(2))


class TestTypes:
    def test_strict_lower_rejects_diagonal(self):
        m = np.zeros((3, 3))
        m[1, 1] = 1.0
        with pytest.raises(ValueError):
            StrictLowerTriangular(m)

    def test_strict_lower_rejects_upper(self):
        m = np.zeros((3, 3))
        m[0, 2] = 1.0
        with pytest.raises(ValueError):
            StrictLowerTriangular(m)

    def test_weighted_dag_edges_sorted_one_based(self):
        dag = WeightedDag(GOLDEN_G)
        assert dag.edges == (
            (1, 4, 7.0),
            (1, 5, 5.0),
            (2, 1, 2.0),
            (2, 3, 1.0),
            (2, 4, 6.0),
            (2, 5, 4.0),
            (4, 5, 3.0),
        )

    def test_dataset_validation(self):
        with pytest.raises(ValueError):
            Dataset(np.zeros((0, 3)))
        with pytest.raises(ValueError):
            Dataset(np.zeros((5, 1)))
        with pytest.raises(ValueError):
            Dataset(np.array([[1.0, np.nan], [0.0, 1.0]]))

    def test_types_are_immutable(self):
        dag = WeightedDag(GOLDEN_G)
        with pytest.raises(ValueError):
            dag.weights[0, 0] = 9.0
        tri = StrictLowerTriangular(GOLDEN_T)
        with pytest.raises(ValueError):
            tri.entries[2, 0] = 1.0
