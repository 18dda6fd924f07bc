import math
from dataclasses import replace

import numpy as np
import pytest
from numpy.testing import assert_allclose

from src.dataset.count_table import Dataset, load_count_table
from src.distribution.params import UGATParams
from src.distribution.sampling import sample
from src.errors import DegenerateData, DidNotConverge, DimensionMismatch, DomainError
from src.fit import (
    FitConfig,
    ParameterLayout,
    fit_mle,
    information_criteria,
    neg_log_likelihood,
    observed_information,
    score,
)
from src.fit.mle import DEFAULT_S_GRID, initial_points, layout_for
from tests.oracles import TABLE1

# 4 weight sets x 5 (beta, s) pairs
SCORE_BANK = [
    (alphas, beta, s)
    for alphas in [(0.8, 0.85, 0.85), (0.5, 0.6, 0.7), (0.9, 0.8, 0.6), (0.6, 0.6, 0.6)]
    for beta, s in [(3.0, 0.5), (50.0, 4.0), (1.0, 1.0), (10.0, 0.0), (0.5, 2.5)]
]


@pytest.fixture(scope="module")
def table1():
    return load_count_table(str(TABLE1))


@pytest.fixture(scope="module")
def small_data():
    p = UGATParams.build([0.4, 0.6], beta=2.0, s=1.0)
    return Dataset(sample(p, 80, seed=11))


class TestLikelihood:
    def test_single_observation(self):
        p = UGATParams.build([0.3, 0.5], beta=1.5, s=2.0)
        d = Dataset.from_rows([[2, 1]])
        expected = 2 * math.log(0.3) + math.log(0.5) - 2 * math.log(4.5) - p.log_normalizer
        assert_allclose(neg_log_likelihood(p, d), -expected, rtol=1e-13)

    def test_dimension_mismatch(self, table1):
        with pytest.raises(DimensionMismatch):
            neg_log_likelihood(UGATParams.build([0.5], 1.0, 1.0), table1)

    @pytest.mark.parametrize("alphas,beta,s", SCORE_BANK)
    def test_score_matches_finite_differences(self, table1, alphas, beta, s):
        p = UGATParams.build(alphas, beta, s)
        theta = np.array([*alphas, beta, s], dtype=float)

        def loglik(v):
            return -neg_log_likelihood(UGATParams.build(v[:3], v[3], v[4]), table1)

        numeric = np.empty(5)
        for k in range(5):
            h = 1e-6 * max(1.0, abs(theta[k]))
            up, down = theta.copy(), theta.copy()
            up[k] += h
            down[k] -= h
            numeric[k] = (loglik(up) - loglik(down)) / (2 * h)
        assert_allclose(score(p, table1), numeric, rtol=1e-5, atol=1e-4)

    def test_layout_round_trip(self):
        layout = ParameterLayout(2, estimate_beta=True, estimate_s=True)
        p = UGATParams.build([0.2, 0.7], beta=5.0, s=1.5)
        u = layout.to_unconstrained(p)
        assert_allclose(u[-2:], [math.log(5.0), math.log(1.5)], rtol=1e-14)
        back = layout.to_params(u)
        assert_allclose(back.alphas.as_array(), [0.2, 0.7], rtol=1e-12)
        assert_allclose([back.beta, back.s], [5.0, 1.5], rtol=1e-12)
        assert layout.names == ["alpha1", "alpha2", "beta", "s"]
        assert_allclose(layout.jacobian(p)[-2:], [5.0, 1.5], rtol=1e-14)

    def test_s_is_positive_on_every_layout_point(self):
        layout = ParameterLayout(1, estimate_beta=True, estimate_s=True)
        for log_s in (-12.0, -3.0, 0.0, 4.0):
            assert layout.to_params([0.0, 0.0, log_s]).s > 0
        lo, hi = layout.from_unconstrained_interval(
            np.array([0.0, 0.0, -1.0]), np.array([0.0, 0.0, 1.0])
        )
        assert_allclose([lo[-1], hi[-1]], [math.exp(-1.0), math.exp(1.0)], rtol=1e-14)

    def test_s_at_boundary_cannot_be_estimated(self):
        layout = ParameterLayout(2, estimate_beta=True, estimate_s=True)
        with pytest.raises(DomainError):
            layout.to_unconstrained(UGATParams.build([0.2, 0.7], beta=5.0, s=0.0))

    def test_beta_dropped_at_zero_s(self):
        assert layout_for(3, 0.0).names == ["alpha1", "alpha2", "alpha3"]
        assert layout_for(3, 0.0, estimate_s=True).n_free == 5
        assert layout_for(3, 2.0).n_free == 4


class TestInformationCriteria:
    def test_identities(self):
        aic, bic = information_criteria(401.797, 4, 50)
        assert_allclose(aic, 811.594, rtol=1e-12)
        assert_allclose(bic, 4 * math.log(50) + 803.594, rtol=1e-12)

    def test_no_free_parameters(self):
        assert information_criteria(10.0, 0, 7) == (20.0, 20.0)

    def test_invalid(self):
        with pytest.raises(DomainError):
            information_criteria(1.0, 1, 0)


class TestGeometricFit:
    """At s = 0 the likelihood factorizes and alpha_i = xbar_i / (1 + xbar_i)"""

    def test_closed_form(self, table1):
        result = fit_mle(table1, FitConfig(s_fixed=0.0, multistart=2))
        means = table1.means
        estimated = [result.estimates[f"alpha{i}"] for i in (1, 2, 3)]
        assert_allclose(estimated, means / (1 + means), rtol=1e-6)
        assert result.free_names == ["alpha1", "alpha2", "alpha3"]
        assert result.converged

    def test_standard_errors(self, table1):
        result = fit_mle(table1, FitConfig(s_fixed=0.0, multistart=1))
        for i in (1, 2, 3):
            a = result.estimates[f"alpha{i}"]
            expected = math.sqrt(a * (1 - a) ** 2 / table1.n)
            assert_allclose(result.std_errors[f"alpha{i}"], expected, rtol=1e-4)
            lo, hi = result.intervals[f"alpha{i}"]
            assert 0 < lo < a < hi < 1

    def test_criteria(self, table1):
        result = fit_mle(table1, FitConfig(s_fixed=0.0, multistart=1))
        assert result.n_params == 3
        assert_allclose(result.aic, 6 + 2 * result.neg_loglik, rtol=1e-13)
        assert_allclose(result.bic, 3 * math.log(50) + 2 * result.neg_loglik, rtol=1e-13)
        assert result.log_likelihood == -result.neg_loglik


class TestFitting:
    def test_deterministic(self, small_data):
        cfg = FitConfig(s_grid=(0.5, 1.0, 2.0), multistart=3, strict=False)
        first, second = fit_mle(small_data, cfg), fit_mle(small_data, cfg)
        assert first.estimates == second.estimates
        assert first.neg_loglik == second.neg_loglik

    def test_threads_do_not_change_the_answer(self, small_data):
        cfg = FitConfig(s_grid=(0.5, 1.0), multistart=3, strict=False)
        serial = fit_mle(small_data, cfg)
        threaded = fit_mle(small_data, replace(cfg, n_jobs=3))
        assert serial.estimates == threaded.estimates

    def test_profile_covers_grid(self, small_data):
        cfg = FitConfig(s_grid=(0.5, 1.0, 2.0), multistart=2, strict=False)
        result = fit_mle(small_data, cfg)
        assert [s for s, _ in result.s_profile] == [0.5, 1.0, 2.0]
        assert result.neg_loglik == pytest.approx(min(v for _, v in result.s_profile))

    def test_boundary_joins_the_profile_on_request(self, small_data):
        cfg = FitConfig(s_grid=(1.0, 2.0), multistart=2, include_boundary=True, strict=False)
        result = fit_mle(small_data, cfg)
        assert [s for s, _ in result.s_profile] == [0.0, 1.0, 2.0]

    def test_estimate_s_improves_on_grid(self, small_data):
        grid_only = fit_mle(small_data, FitConfig(s_grid=(0.5, 2.0), multistart=2, strict=False))
        cfg = FitConfig(s_grid=(0.5, 2.0), multistart=2, estimate_s=True, strict=False)
        free = fit_mle(small_data, cfg)
        assert free.neg_loglik <= grid_only.neg_loglik + 1e-9
        assert "s" in free.free_names
        assert free.params.s > 0

    def test_estimate_s_keeps_the_boundary(self, table1):
        result = fit_mle(table1, FitConfig(s_fixed=0.0, estimate_s=True, multistart=1))
        assert result.free_names == ["alpha1", "alpha2", "alpha3"]
        assert result.params.s == 0.0

    def test_optimum_beats_starting_points(self, small_data):
        cfg = FitConfig(s_fixed=1.0, multistart=4, strict=False)
        result = fit_mle(small_data, cfg)
        layout = layout_for(2, 1.0)
        for logits, beta0 in initial_points(small_data, cfg):
            start = layout.to_params(np.append(logits, math.log(beta0)))
            assert result.neg_loglik <= neg_log_likelihood(start, small_data) + 1e-9

    def test_information_is_symmetric(self, small_data):
        result = fit_mle(small_data, FitConfig(s_fixed=1.0, multistart=2, strict=False))
        info = observed_information(result.params, small_data, layout_for(2, 1.0))
        assert info.asymmetry < 1e-3 * np.max(np.abs(info.matrix))

    def test_result_document(self, small_data):
        cfg = FitConfig(s_fixed=1.0, multistart=1, strict=False)
        document = fit_mle(small_data, cfg).to_dict()
        assert document["free_parameters"] == ["alpha1", "alpha2", "beta"]
        assert document["s_profile"][0]["s"] == 1.0
        assert set(document["information"]) == {"singular", "condition_number", "asymmetry"}


class TestConvergence:
    def test_flag_follows_gradient_norm(self, small_data):
        cfg = FitConfig(s_fixed=1.0, multistart=2, strict=False)
        result = fit_mle(small_data, cfg)
        assert result.converged == (result.grad_norm < cfg.tol)

    def test_stalled_fit_is_not_converged(self, small_data):
        cfg = FitConfig(s_fixed=1.0, multistart=1, max_iter=1, tol=1e-12, strict=False)
        result = fit_mle(small_data, cfg)
        assert not result.converged
        assert result.grad_norm >= cfg.tol
        assert any("convergence criterion" in w for w in result.warnings)

    def test_strict_mode_raises_with_result(self, small_data):
        cfg = FitConfig(s_fixed=1.0, multistart=1, max_iter=1, tol=1e-12)
        with pytest.raises(DidNotConverge) as info:
            fit_mle(small_data, cfg)
        assert info.value.result is not None
        assert not info.value.result.converged


class TestConfig:
    def test_default_grid_is_positive(self):
        assert FitConfig().grid() == DEFAULT_S_GRID == (0.5, 1.0, 2.0, 3.0, 5.0, 8.0)

    def test_boundary_is_opt_in(self):
        assert FitConfig(include_boundary=True).grid() == (0.0,) + DEFAULT_S_GRID
        assert FitConfig(s_grid=(0.0, 1.0), include_boundary=True).grid() == (0.0, 1.0)

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"multistart": 0},
            {"tol": 0.0},
            {"max_iter": 0},
            {"s_grid": ()},
            {"s_fixed": -1.0},
            {"s_grid": (-1.0, 1.0)},
        ],
    )
    def test_validation(self, kwargs):
        with pytest.raises(DomainError):
            FitConfig(**kwargs)


class TestDegenerate:
    def test_zero_column(self):
        d = Dataset.from_rows([[1, 0], [2, 0], [0, 0]])
        with pytest.raises(DegenerateData):
            fit_mle(d)

    def test_too_few_observations(self):
        with pytest.raises(DegenerateData):
            fit_mle(Dataset.from_rows([[1, 2]]), FitConfig(s_fixed=1.0))


@pytest.mark.slow
def test_bundled_table_fit(table1):
    result = fit_mle(table1, FitConfig(strict=False))
    assert result.n_params == 4
    assert result.params.s in DEFAULT_S_GRID
    assert_allclose(result.aic, 8 + 2 * result.neg_loglik, rtol=1e-13)
    assert_allclose(result.bic, 4 * math.log(50) + 2 * result.neg_loglik, rtol=1e-13)
    # with s > 0 the optimum runs to large beta, where the model tends to
    # independent geometric margins; the reference row's -L = 401.797 is out of reach
    geometric = fit_mle(table1, FitConfig(s_fixed=0.0, multistart=1))
    assert_allclose(geometric.neg_loglik, 427.9934, atol=1e-3)
    assert result.neg_loglik <= geometric.neg_loglik + 0.05
    assert result.neg_loglik > 401.797


@pytest.mark.slow
def test_sampled_parameters_within_three_standard_errors():
    truth = UGATParams.build([0.3, 0.5], beta=2.0, s=1.0)
    hits = 0
    for seed in range(40):
        d = Dataset(sample(truth, 5000, seed=seed))
        result = fit_mle(d, FitConfig(s_fixed=1.0, multistart=2, strict=False))
        if result.std_errors is None:
            continue
        hits += all(
            abs(result.estimates[name] - value) <= 3 * result.std_errors[name]
            for name, value in (("alpha1", 0.3), ("alpha2", 0.5))
        )
    assert hits >= 38
