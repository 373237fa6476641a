import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sklearn.covariance import graphical_lasso

from precis.estimators import (EstimatorConfig, adaptive_glasso, adaptive_weights, clime, elastic_net, fit,
                               glasso, mcp, mcp_weight, ridge, scad, scad_weight, symmetrize_min_magnitude,
                               tiger, weighted_glasso)
from precis.estimators.clime import clime_raw
from precis.estimators.glasso import weighted_objective
from precis.estimators.nonconvex import mcp_penalty, nonconvex_objective, scad_penalty
from precis.estimators.tiger import default_lambda, sqrt_lasso_column, standardize
from precis.exceptions import DegenerateColumn, InputValidationError, NotPositiveDefinite
from precis.linalg import is_pd, sample_covariance

import oracles
from conftest import random_cov, random_pd, sparse_pd

PD_METHODS = ("glasso", "ridge", "adapt", "scad", "mcp")


def _data(rng, n=120, p=6):
    omega = sparse_pd(rng, p)
    L = np.linalg.cholesky(np.linalg.inv(omega))
    return rng.standard_normal((n, p)) @ L.T


class TestGlasso:
    def test_lambda_zero_is_inverse(self, rng):
        S = random_pd(rng, 6, cond=50)
        np.testing.assert_allclose(glasso(S, 0.0).omega, np.linalg.inv(S), atol=1e-6)

    def test_iterative_path_near_zero(self, rng):
        # lambda = 0 short-circuits to inv(S); the iterative solvers must agree
        S = random_pd(rng, 10, cond=50)
        inv = np.linalg.inv(S)
        assert np.max(np.abs(glasso(S, 1e-9).omega - inv)) <= 1e-6
        for g in (0.3, 0.9):
            assert np.max(np.abs(elastic_net(S, 1e-9, g).omega - inv)) <= 1e-6

    def test_identity_separable(self):
        est = glasso(np.eye(4), 0.1)
        np.testing.assert_allclose(est.omega, np.eye(4) / 1.1, atol=1e-10)
        assert est.omega[0, 0] == pytest.approx(0.9091, abs=1e-4)

    def test_identity_unpenalized_diagonal(self):
        est = glasso(np.eye(3), 0.3, EstimatorConfig(penalize_diagonal=False))
        np.testing.assert_allclose(est.omega, np.eye(3), atol=1e-10)

    def test_matches_sklearn_without_diagonal_penalty(self, rng):
        cfg = EstimatorConfig(penalize_diagonal=False, tol=1e-8)
        for _ in range(5):
            S = random_cov(rng, 8, 60)
            ours = glasso(S, 0.1, cfg).omega
            _, ref = graphical_lasso(S, 0.1, tol=1e-10, max_iter=1000, mode="cd")
            np.testing.assert_allclose(ours, ref, atol=1e-6)

    def test_oracle_objective(self, rng):
        S = random_cov(rng, 5, 40)
        est = glasso(S, 0.1)
        _, ref, _ = oracles.prox_gradient(S, np.full((5, 5), 0.1))
        assert est.objective == pytest.approx(ref, rel=1e-6)

    def test_symmetric_pd(self, rng):
        est = glasso(random_cov(rng, 15, 30), 0.05)
        assert np.array_equal(est.omega, est.omega.T)
        assert is_pd(est.omega)
        assert est.converged

    def test_large_lambda_is_diagonal(self, rng):
        S = random_cov(rng, 6, 50)
        lam = np.max(np.abs(S - np.diag(np.diag(S)))) * 1.01
        omega = glasso(S, lam).omega
        assert np.count_nonzero(omega - np.diag(np.diag(omega))) == 0
        np.testing.assert_allclose(np.diag(omega), 1.0 / (np.diag(S) + lam), rtol=1e-10)

    def test_sparsity_path(self, rng):
        # The exact glasso path is not monotone in general: an edge can leave
        # the support as lambda decreases. Every dip must therefore be a
        # property of the true optimum, certified by an independent solver
        # and a strict dual gap on the dropped edge.
        dips = 0
        for _ in range(10):
            S = random_cov(rng, 10, 40)
            off = np.max(np.abs(S - np.diag(np.diag(S))))
            lams = np.geomspace(off, off * 0.01, 20)
            fits = [glasso(S, lam).omega for lam in lams]
            counts = [np.count_nonzero(np.triu(o, 1)) for o in fits]
            assert counts[0] == 0 and counts[-1] >= counts[len(counts) // 2]
            for k in range(1, 20):
                if counts[k] >= counts[k - 1]:
                    continue
                dips += 1
                ref, _, _ = oracles.prox_gradient(S, np.full((10, 10), lams[k]), tol=1e-12)
                assert np.count_nonzero(np.triu(np.abs(ref) > 1e-12, 1)) == counts[k]
                dropped = (np.triu(fits[k - 1], 1) != 0) & (np.triu(fits[k], 1) == 0)
                grad = np.abs(S - np.linalg.inv(fits[k]))
                assert np.all(grad[dropped] < lams[k] * (1 - 1e-3))
        assert dips < 10

    def test_permutation_equivariance(self, rng):
        S = random_cov(rng, 8, 40)
        perm = rng.permutation(8)
        P = np.eye(8)[perm]
        cfg = EstimatorConfig(tol=1e-10)
        a = glasso(P @ S @ P.T, 0.1, cfg).omega
        b = P @ glasso(S, 0.1, cfg).omega @ P.T
        assert np.max(np.abs(a - b)) <= 1e-6

    def test_warm_start_same_answer(self, rng):
        S = random_cov(rng, 8, 40)
        cold = glasso(S, 0.1, EstimatorConfig(tol=1e-8))
        warm = glasso(S, 0.1, EstimatorConfig(tol=1e-8), warm_start=glasso(S, 0.2).omega)
        assert np.max(np.abs(cold.omega - warm.omega)) <= 1e-6

    def test_negative_lambda(self):
        with pytest.raises(InputValidationError):
            glasso(np.eye(2), -0.1)

    def test_asymmetric(self):
        with pytest.raises(InputValidationError):
            glasso(np.array([[1.0, 0.2], [0.1, 1.0]]), 0.1)

    def test_rank_deficient_with_penalty(self, rng):
        S = sample_covariance(rng.standard_normal((5, 12)))
        est = glasso(S, 0.2)
        assert is_pd(est.omega)


class TestWeightedGlasso:
    def test_uniform_weights_equal_glasso(self, rng):
        S = random_cov(rng, 6, 40)
        np.testing.assert_array_equal(weighted_glasso(S, np.ones((6, 6)), 0.1).omega, glasso(S, 0.1).omega)

    def test_oracle_weighted(self, rng):
        S = random_cov(rng, 5, 40)
        V = rng.uniform(0.2, 3.0, (5, 5))
        V = (V + V.T) / 2
        est = weighted_glasso(S, V, 0.1)
        _, ref, _ = oracles.prox_gradient(S, 0.1 * V)
        assert est.objective == pytest.approx(ref, rel=1e-6)
        assert weighted_objective(est.omega, S, 0.1 * V) == pytest.approx(est.objective, rel=1e-12)

    def test_rejects_bad_weights(self):
        with pytest.raises(InputValidationError):
            weighted_glasso(np.eye(2), np.array([[1.0, -1.0], [-1.0, 1.0]]), 0.1)
        with pytest.raises(InputValidationError):
            weighted_glasso(np.eye(2), np.ones((3, 3)), 0.1)


class TestRidge:
    def test_lambda_zero(self):
        S = np.array([[2.0, 1.0], [1.0, 2.0]])
        np.testing.assert_allclose(ridge(S, 0.0).omega, np.array([[2, -1], [-1, 2]]) / 3.0, atol=1e-12)

    def test_identity_closed_form(self):
        np.testing.assert_allclose(ridge(np.eye(3), 2.0).omega, 0.5 * np.eye(3), atol=1e-14)

    def test_identity_half(self):
        np.testing.assert_allclose(ridge(np.eye(3), 0.5).omega, np.eye(3) * (np.sqrt(0.75) - 0.5) / 0.5,
                                   atol=1e-12)

    def test_stationarity(self, rng):
        S = random_cov(rng, 6, 20)
        O = ridge(S, 0.3).omega
        assert np.max(np.abs(-np.linalg.inv(O) + S + 0.3 * O)) <= 1e-8

    def test_singular_lambda_zero(self):
        with pytest.raises(NotPositiveDefinite):
            ridge(np.ones((2, 2)), 0.0)

    def test_dense(self, rng):
        O = ridge(random_cov(rng, 6, 30), 0.2).omega
        assert np.all(np.abs(O) > 1e-8)


class TestElasticNet:
    def test_gamma_one_is_glasso(self, rng):
        S = random_cov(rng, 6, 40)
        assert np.max(np.abs(elastic_net(S, 0.1, 1.0).omega - glasso(S, 0.1).omega)) <= 1e-10

    def test_gamma_zero_is_ridge(self, rng):
        S = random_cov(rng, 6, 40)
        assert np.max(np.abs(elastic_net(S, 0.2, 0.0).omega - ridge(S, 0.2).omega)) <= 1e-6

    def test_oracle(self, rng):
        S = random_cov(rng, 5, 40)
        est = elastic_net(S, 0.2, 0.5)
        _, ref, _ = oracles.prox_gradient(S, np.full((5, 5), 0.1), mu=0.1)
        assert est.objective == pytest.approx(ref, rel=1e-6)

    @pytest.mark.parametrize("gamma", [-0.1, 1.5])
    def test_gamma_range(self, gamma):
        with pytest.raises(InputValidationError):
            elastic_net(np.eye(2), 0.1, gamma)

    def test_pd_symmetric(self, rng):
        est = elastic_net(random_cov(rng, 12, 20), 0.1, 0.3)
        assert np.array_equal(est.omega, est.omega.T) and is_pd(est.omega)
        assert all(a >= b - 1e-12 for a, b in zip(est.trace, est.trace[1:]))


class TestAdaptive:
    def test_inv_abs_cov_weights(self):
        V = adaptive_weights("inv-abs-cov", np.diag([2.0, 4.0]))
        np.testing.assert_allclose(np.diag(V), [0.5, 0.25])
        assert V[0, 1] == V[1, 0] == 1e10

    def test_identity_pilot(self):
        V = adaptive_weights("inv-sample-precision", np.eye(3), gamma=0.5)
        np.testing.assert_array_equal(np.diag(V), np.ones(3))
        assert np.all(V[~np.eye(3, dtype=bool)] == 1e10)

    def test_power_rule(self):
        pilot = np.array([[1.0, 0.25], [0.25, 1.0]])
        V = adaptive_weights("inv-sample-precision", np.linalg.inv(pilot), gamma=0.5)
        assert V[0, 1] == pytest.approx(2.0, rel=1e-12)

    def test_uniform_weights_is_glasso(self, rng):
        S = random_cov(rng, 6, 40)
        np.testing.assert_array_equal(adaptive_glasso(S, 0.1, weights=np.ones((6, 6))).omega,
                                      glasso(S, 0.1).omega)

    def test_identity_gives_diagonal(self):
        omega = adaptive_glasso(np.eye(4), 0.05).omega
        assert np.count_nonzero(omega - np.diag(np.diag(omega))) == 0

    def test_singular_sample_precision(self):
        with pytest.raises(NotPositiveDefinite):
            adaptive_weights("inv-sample-precision", np.ones((2, 2)))

    def test_all_sources_run(self, rng):
        X = _data(rng, 60, 5)
        S = sample_covariance(X)
        for src in ("inv-abs-cov", "inv-glasso-pow", "inv-sample-precision", "inv-lw-linear"):
            est = adaptive_glasso(S, 0.05, EstimatorConfig(weight_source=src), X=X)
            assert is_pd(est.omega)

    def test_rank_deficient_falls_back_to_lw(self, rng):
        X = rng.standard_normal((8, 12))
        est = adaptive_glasso(sample_covariance(X), 0.1, X=X)
        assert is_pd(est.omega)

    def test_needs_data_for_lw(self):
        with pytest.raises(InputValidationError):
            adaptive_weights("inv-lw-linear", np.eye(2))


class TestPenaltyWeights:
    def test_scad_regimes(self):
        assert scad_weight(0.5, 1.0, 3.7) == 1.0
        assert scad_weight(2.0, 1.0, 3.7) == pytest.approx(1.7 / 2.7)
        assert scad_weight(5.0, 1.0, 3.7) == 0.0

    def test_mcp_regimes(self):
        assert mcp_weight(0.0, 1.0, 3.0) == 1.0
        assert mcp_weight(1.5, 1.0, 3.0) == pytest.approx(0.5)
        assert mcp_weight(3.0, 1.0, 3.0) == 0.0
        assert mcp_weight(3.5, 1.0, 3.0) == 0.0

    def test_gamma_validation(self):
        with pytest.raises(InputValidationError):
            scad_weight(1.0, 1.0, 2.0)
        with pytest.raises(InputValidationError):
            mcp_weight(1.0, 1.0, 1.0)

    def test_penalty_is_integral_of_weight(self):
        from scipy.integrate import quad
        for x in (0.3, 1.0, 2.2, 4.0, 6.0):
            assert scad_penalty(x, 1.0, 3.7) == pytest.approx(quad(lambda t: scad_weight(t, 1.0, 3.7), 0, x,
                                                                   points=[1.0, 3.7])[0], abs=1e-10)
            assert mcp_penalty(x, 1.0, 3.0) == pytest.approx(quad(lambda t: mcp_weight(t, 1.0, 3.0), 0, x,
                                                                  points=[3.0])[0], abs=1e-10)

    @settings(max_examples=200, deadline=None)
    @given(x=st.floats(-20, 20), lam=st.floats(0.01, 5), gamma=st.floats(2.01, 10))
    def test_scad_bounds(self, x, lam, gamma):
        w = scad_weight(x, lam, gamma)
        assert 0.0 <= w <= lam
        assert w == oracles.scad_weight_scalar(x, lam, gamma)

    @settings(max_examples=200, deadline=None)
    @given(x=st.floats(-20, 20), lam=st.floats(0.01, 5), gamma=st.floats(1.01, 10))
    def test_mcp_bounds(self, x, lam, gamma):
        w = mcp_weight(x, lam, gamma)
        assert 0.0 <= w <= lam
        assert w == oracles.mcp_weight_scalar(x, lam, gamma)


class TestNonconvex:
    def test_identity_diagonal(self):
        for f in (scad, mcp):
            omega = f(np.eye(4), 0.2).omega
            assert np.count_nonzero(omega - np.diag(np.diag(omega))) == 0

    def test_large_gamma_matches_glasso(self, rng):
        S = random_cov(rng, 10, 50)
        g = glasso(S, 0.1).omega
        for f in (scad, mcp):
            est = f(S, 0.1, EstimatorConfig(gamma=1e6))
            assert np.max(np.abs(est.omega - g)) <= 1e-4

    def test_objective_descends_from_glasso(self, rng):
        S = random_cov(rng, 5, 40)
        for f, kind, gamma in ((scad, "scad", 3.7), (mcp, "mcp", 3.0)):
            est = f(S, 0.15)
            start = nonconvex_objective(glasso(S, 0.15).omega, S, 0.15, gamma, kind)
            assert est.objective <= start + 1e-8
            assert all(b <= a + 1e-8 for a, b in zip(est.trace, est.trace[1:]))

    def test_gamma_override(self, rng):
        S = random_cov(rng, 5, 40)
        assert scad(S, 0.1, EstimatorConfig(gamma=5.0)).gamma_used == 5.0
        with pytest.raises(InputValidationError):
            mcp(S, 0.1, EstimatorConfig(gamma=0.5))

    def test_less_bias_than_glasso(self, rng):
        # strong true entries are shrunk less than by glasso
        omega = np.eye(6)
        omega[0, 1] = omega[1, 0] = 0.45
        L = np.linalg.cholesky(np.linalg.inv(omega))
        S = sample_covariance(rng.standard_normal((5000, 6)) @ L.T)
        g = glasso(S, 0.1).omega[0, 1]
        assert abs(mcp(S, 0.1).omega[0, 1] - 0.45) < abs(g - 0.45)


class TestSymmetrizeMinMagnitude:
    def test_smaller_wins(self):
        out = symmetrize_min_magnitude(np.array([[1.0, 0.3], [-0.2, 1.0]]))
        assert out[0, 1] == out[1, 0] == -0.2

    def test_symmetric_unchanged(self, rng):
        M = random_pd(rng, 4)
        np.testing.assert_array_equal(symmetrize_min_magnitude(M), M)

    def test_tie_keeps_upper(self):
        out = symmetrize_min_magnitude(np.array([[1.0, -0.5], [0.5, 1.0]]))
        assert out[0, 1] == out[1, 0] == -0.5

    def test_scalar_oracle(self, rng):
        M = rng.standard_normal((6, 6))
        np.testing.assert_array_equal(symmetrize_min_magnitude(M), oracles.min_magnitude_scalar(M))


class TestClime:
    def test_identity_zero(self):
        np.testing.assert_allclose(clime(np.eye(3), 0.0).omega, np.eye(3), atol=1e-12)

    def test_identity_shrunk(self):
        np.testing.assert_allclose(clime(np.eye(3), 0.4).omega, 0.6 * np.eye(3), atol=1e-12)

    def test_vertex_oracle(self, rng):
        S = random_cov(rng, 4, 40)
        raw = clime_raw(S, 0.1)
        for j in range(4):
            ref, _ = oracles.clime_column_vertices(S, j, 0.1)
            assert np.sum(np.abs(raw[:, j])) == pytest.approx(ref, abs=1e-6)

    def test_feasible_and_symmetric(self, rng):
        S = random_cov(rng, 8, 30)
        raw = clime_raw(S, 0.15)
        assert np.max(np.abs(S @ raw - np.eye(8))) <= 0.15 + 1e-6
        est = clime(S, 0.15)
        assert np.array_equal(est.omega, est.omega.T)

    def test_singular_lambda_zero(self):
        with pytest.raises(InputValidationError):
            clime(np.ones((3, 3)), 0.0)


class TestTiger:
    def test_default_lambda(self):
        assert default_lambda(180, 100) == pytest.approx(0.1599, abs=1e-4)

    def test_orthogonal_column(self):
        n = 8
        X = np.zeros((n, 3))
        X[:, 0] = [1, -1, 1, -1, 1, -1, 1, -1]
        X[:, 1] = [1, 1, -1, -1, 1, 1, -1, -1]
        X[:, 2] = [1, 1, 1, 1, -1, -1, -1, -1]
        beta, s2 = sqrt_lasso_column(X, 0, 0.2)
        np.testing.assert_array_equal(beta, 0.0)
        assert s2 == pytest.approx(np.sum(X[:, 0] ** 2) / n)

    def test_duplicated_predictor(self, rng):
        n = 200
        x1 = rng.standard_normal(n)
        x3 = x1 + 0.5 * rng.standard_normal(n)
        both = np.column_stack([x1, x1, x3])
        single = np.column_stack([x1, x3])
        b2, _ = sqrt_lasso_column(both, 2, 0.1)
        b1, _ = sqrt_lasso_column(single, 1, 0.1)
        assert b2[0] + b2[1] == pytest.approx(b1[0], abs=1e-4)
        np.testing.assert_allclose(both[:, :2] @ b2[:2], single[:, :1] @ b1[:1], atol=1e-4)

    def test_grid_oracle(self, rng):
        X = rng.standard_normal((50, 3))
        X[:, 2] += 0.7 * X[:, 0]
        Z, _, _ = standardize(X)
        from precis.estimators.tiger import sqrt_lasso_objective
        for j in range(3):
            beta, _ = sqrt_lasso_column(Z, j, 0.2)
            ref = oracles.sqrt_lasso_grid(Z, j, 0.2)[0]
            assert abs(sqrt_lasso_objective(Z, j, beta, 0.2) - ref) <= 1e-5

    def test_large_sample_independent(self):
        rng = np.random.default_rng(3)
        scales = np.array([1.0, 2.0, 0.5, 3.0])
        X = rng.standard_normal((5000, 4)) * scales
        omega = tiger(X).omega
        assert np.max(np.abs(omega - np.diag(1 / np.var(X, axis=0)))) <= 0.1

    def test_positive_pair_negative_precision(self, rng):
        x = rng.standard_normal(300)
        X = np.column_stack([x, x + 0.05 * rng.standard_normal(300)])
        omega = tiger(X).omega
        assert omega[0, 1] < 0 and omega[1, 0] < 0

    def test_constant_column(self, rng):
        X = rng.standard_normal((20, 3))
        X[:, 1] = 4.0
        with pytest.raises(DegenerateColumn):
            tiger(X)


class TestDispatch:
    @pytest.mark.parametrize("method", ["glasso", "ridge", "adapt", "scad", "mcp", "clime", "tiger"])
    def test_all_methods_symmetric(self, rng, method):
        X = _data(rng)
        est = fit(method, X, 0.1)
        assert est.method == method
        assert np.array_equal(est.omega, est.omega.T)
        if method in PD_METHODS:
            assert is_pd(est.omega)

    def test_elnet_needs_gamma(self, rng):
        X = _data(rng)
        assert fit("elnet", X, 0.1, 0.5).gamma_used == 0.5
        with pytest.raises(InputValidationError):
            fit("elnet", X, 0.1)

    def test_unknown(self, rng):
        with pytest.raises(InputValidationError):
            fit("lasso", _data(rng), 0.1)

    def test_inputs_not_mutated(self, rng):
        X = _data(rng)
        S = sample_covariance(X)
        X0, S0 = X.copy(), S.copy()
        for m in ("glasso", "ridge", "elnet", "adapt", "scad", "mcp", "clime", "tiger"):
            fit(m, X, 0.1, 0.5 if m == "elnet" else None, S=S)
        np.testing.assert_array_equal(X, X0)
        np.testing.assert_array_equal(S, S0)


@settings(max_examples=25, deadline=None)
@given(p=st.integers(2, 12), seed=st.integers(0, 2**32 - 1), lam=st.floats(0.01, 0.5))
def test_likelihood_estimators_pd_symmetric(p, seed, lam):
    S = random_cov(np.random.default_rng(seed), p, 3 * p)
    for est in (glasso(S, lam), ridge(S, lam), elastic_net(S, lam, 0.5), scad(S, lam), mcp(S, lam)):
        assert np.array_equal(est.omega, est.omega.T)
        assert is_pd(est.omega)
