import numpy as np
import pytest

from daglearn import (
    ExplicitRefusalError,
    GaConfig,
    GraphSpec,
    GroundTruth,
    Permutation,
    SolverConfig,
    StrictLowerTriangular,
    compare_inner_solvers,
    compose,
    exhaustive_best_permutation,
    ga_run,
    lasso_cd_column,
    objective,
    sample_dag,
    sample_data,
    solve,
)


class TestExhaustive:
    def test_refuses_large_p(self):
        rng = np.random.default_rng(0)
        x = rng.normal(size=(20, 9))
        with pytest.raises(ExplicitRefusalError) as err:
            exhaustive_best_permutation(x, 0.1)
        assert "362880" in str(err.value)

    def test_full_shrinkage_all_tie(self):
        rng = np.random.default_rng(1)
        x = rng.normal(size=(30, 4))
        lam = 1e6
        report = exhaustive_best_permutation(x, lam, keep_table=True)
        expected = float(np.sum(x * x)) / 30
        assert report.best_objective == expected
        assert len(report.per_perm_objectives) == 24
        assert {obj for _, obj in report.per_perm_objectives} == {expected}
        # lexicographic tie-break
        assert report.best_perm == Permutation((1, 2, 3, 4))

    def test_two_node_picks_parent_first_order(self):
        t = np.zeros((2, 2))
        t[1, 0] = 8.0
        perm = Permutation((2, 1))
        tri = StrictLowerTriangular(t)
        truth = GroundTruth(dag=compose(perm, tri), perm=perm, tri=tri)
        ds = sample_data(truth, n=500, noise_sd=0.1, seed=2)
        report = exhaustive_best_permutation(ds, 0.1, keep_table=True)
        assert report.best_perm == Permutation((2, 1))
        table = dict(report.per_perm_objectives)
        assert table[(2, 1)] < table[(1, 2)]

    def test_threads_do_not_change_result(self):
        truth = sample_dag(GraphSpec(p=4, n_edges=4, seed=3))
        ds = sample_data(truth, n=200, noise_sd=0.1, seed=4)
        serial = exhaustive_best_permutation(ds, 0.05, threads=1, keep_table=True)
        parallel = exhaustive_best_permutation(ds, 0.05, threads=8, keep_table=True)
        assert serial.best_perm == parallel.best_perm
        assert serial.best_objective == parallel.best_objective
        assert serial.per_perm_objectives == parallel.per_perm_objectives

    def test_pure_noise_table_is_permutation_symmetric(self):
        truth = sample_dag(GraphSpec(p=4, n_edges=0, seed=5))
        ds = sample_data(truth, n=5000, noise_sd=1.0, seed=6)
        lam = 2.0  # above every entry threshold for i.i.d. noise at this n
        report = exhaustive_best_permutation(ds, lam, keep_table=True)
        objs = np.array([obj for _, obj in report.per_perm_objectives])
        assert np.max(objs) - np.min(objs) < 1e-9

    def test_ga_never_beats_oracle(self):
        truth = sample_dag(GraphSpec(p=5, n_edges=6, seed=7))
        ds = sample_data(truth, n=300, noise_sd=0.1, seed=8)
        oracle = exhaustive_best_permutation(ds, 0.05)
        ga = ga_run(ds, 0.05, GaConfig(seed=9))
        assert ga.best.fitness >= oracle.best_objective - 1e-9


class TestLassoCdColumn:
    def test_orthonormal_predictors_unpenalized(self):
        rng = np.random.default_rng(10)
        q, _ = np.linalg.qr(rng.normal(size=(50, 5)))
        y_target = rng.normal(size=50)
        y = np.column_stack([y_target, q[:, 1:]])
        beta = lasso_cd_column(y, 1, 0.0)
        expected = q[:, 1:].T @ y_target
        assert np.allclose(beta, expected, atol=1e-10)

    def test_large_lambda_gives_zero(self):
        rng = np.random.default_rng(11)
        y = rng.normal(size=(40, 5))
        target = y[:, 0]
        lam = 2.0 * float(np.max(np.abs(y[:, 1:].T @ target))) / 40
        assert np.array_equal(lasso_cd_column(y, 1, lam), np.zeros(4))

    def test_last_column_empty(self):
        rng = np.random.default_rng(12)
        y = rng.normal(size=(30, 4))
        assert lasso_cd_column(y, 4, 0.1).shape == (0,)

    def test_index_validation(self):
        rng = np.random.default_rng(13)
        y = rng.normal(size=(30, 4))
        with pytest.raises(ValueError):
            lasso_cd_column(y, 0, 0.1)
        with pytest.raises(ValueError):
            lasso_cd_column(y, 5, 0.1)

    def test_cd_objective_not_worse_than_prox(self):
        rng = np.random.default_rng(14)
        for _ in range(5):
            n, p = 50, 6
            x = rng.normal(size=(n, p))
            perm = Permutation.random(p, rng)
            lam = float(10.0 ** rng.uniform(-3, -0.5))
            cmp = compare_inner_solvers(x, perm, lam, SolverConfig(lam=lam, tol=1e-8))
            cd_obj = objective(x, perm, cmp.t_cd, lam)
            px_obj = objective(x, perm, cmp.t_prox, lam)
            assert cd_obj <= px_obj + 1e-8
            assert px_obj <= cd_obj + 1e-8


class TestCompareInnerSolvers:
    def test_random_instances_agree(self):
        rng = np.random.default_rng(15)
        for _ in range(8):
            n, p = 50, int(rng.integers(3, 9))
            x = rng.normal(size=(n, p))
            perm = Permutation.random(p, rng)
            lam = float(10.0 ** rng.uniform(-3, 0))
            cmp = compare_inner_solvers(x, perm, lam, SolverConfig(lam=lam, tol=1e-8))
            assert cmp.max_abs_diff <= 1e-5
            assert cmp.objective_gap <= 1e-8

    def test_full_shrinkage_exact_zero(self):
        rng = np.random.default_rng(16)
        x = rng.normal(size=(40, 5))
        cmp = compare_inner_solvers(x, Permutation.random(5, rng), 1e6)
        assert np.array_equal(cmp.t_prox.entries, np.zeros((5, 5)))
        assert np.array_equal(cmp.t_cd.entries, np.zeros((5, 5)))
        assert cmp.max_abs_diff == 0.0
        assert cmp.objective_gap == 0.0

    def test_unpenalized_matches_least_squares(self):
        # lam = 0 reduces every column to ordinary least squares on the later
        # columns; check both solvers against the normal equations.
        rng = np.random.default_rng(17)
        n, p = 200, 5
        x = rng.normal(size=(n, p))
        perm = Permutation.random(p, rng)
        cmp = compare_inner_solvers(x, perm, 0.0, SolverConfig(lam=0.0, tol=1e-10))
        y = x[:, np.asarray(perm.ranks) - 1]
        expected = np.zeros((p, p))
        for j in range(p - 1):
            z = y[:, j + 1 :]
            expected[j + 1 :, j] = np.linalg.lstsq(z, y[:, j], rcond=None)[0]
        assert np.max(np.abs(cmp.t_cd.entries - expected)) < 1e-6
        assert np.max(np.abs(cmp.t_prox.entries - expected)) < 1e-6
