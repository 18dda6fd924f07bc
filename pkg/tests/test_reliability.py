import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.special import zeta

from src.distribution.params import UGATParams
from src.errors import DivergentParameters, DomainError, GridTooLarge
from src.reliability import (
    AgingKind,
    Verdict,
    aging_class_check,
    box_grid,
    build_reliability_report,
    hazard_component,
    hazard_consistency,
    hazard_vector,
    joint_survival,
    mmrl_component,
    mmrl_vector,
    residual_survival,
    total_residual_survival,
)
from tests.oracles import box_points


class TestSurvival:
    def test_matches_box_oracle(self, oracle_case):
        p, oracle = oracle_case
        for x in box_points(p.r, 3):
            assert_allclose(joint_survival(p, x), oracle.survival(x), rtol=1e-9, atol=1e-13)

    def test_origin_is_one(self, bivariate):
        assert_allclose(joint_survival(bivariate, [0, 0]), 1.0, rtol=1e-14)

    def test_nonincreasing_in_each_coordinate(self, bivariate):
        for x in box_points(2, 6):
            bumped = (x[0] + 1, x[1])
            assert joint_survival(bivariate, bumped) <= joint_survival(bivariate, x)

    def test_memoryless_at_s_zero(self):
        p = UGATParams.build([0.3, 0.7], beta=2.0, s=0.0)
        for x in box_points(2, 4):
            for t in box_points(2, 3):
                xt = [a + b for a, b in zip(x, t)]
                assert_allclose(
                    joint_survival(p, xt),
                    joint_survival(p, x) * joint_survival(p, t),
                    rtol=1e-12,
                )

    def test_residual_survival(self, bivariate):
        x, t = (2, 1), 3
        expected = joint_survival(bivariate, (x[0] + t, x[1])) / joint_survival(bivariate, x)
        assert_allclose(residual_survival(bivariate, 1, t, x), expected, rtol=1e-12)
        assert residual_survival(bivariate, 2, 0, x) == 1.0

    def test_residual_survival_rejects_negative_shift(self, bivariate):
        with pytest.raises(DomainError):
            residual_survival(bivariate, 1, -1, (0, 0))


class TestHazard:
    def test_matches_box_oracle(self, oracle_case):
        p, oracle = oracle_case
        for x in box_points(p.r, 2):
            for i in range(1, p.r + 1):
                assert_allclose(hazard_component(p, i, x), oracle.hazard(i, x), rtol=1e-8)

    @pytest.mark.parametrize("x", [(0, 0), (3, 1), (10, 25)])
    def test_constant_at_s_zero(self, x):
        p = UGATParams.build([0.3, 0.7], beta=2.0, s=0.0)
        assert_allclose(hazard_vector(p, x), [0.7, 0.3], rtol=1e-12)

    def test_bounded_in_unit_interval(self, bivariate):
        for x in box_points(2, 5):
            h = hazard_vector(bivariate, x)
            assert np.all((h > 0) & (h < 1))


class TestMeanResidualLife:
    def test_matches_box_oracle(self, oracle_case):
        p, oracle = oracle_case
        for x in box_points(p.r, 2):
            for i in range(1, p.r + 1):
                assert_allclose(mmrl_component(p, i, x), oracle.mmrl(i, x), rtol=1e-8)

    def test_geometric_at_s_zero(self):
        p = UGATParams.build([0.25, 0.6], beta=1.0, s=0.0)
        assert_allclose(mmrl_vector(p, (4, 2)), [1 / 0.75, 1 / 0.4], rtol=1e-11)

    def test_unit_weight(self):
        # sum_t zeta(8, t + 1) = zeta(7)
        p = UGATParams.build([1.0], beta=1.0, s=8.0)
        assert_allclose(mmrl_component(p, 1, [0]), zeta(7) / zeta(8), rtol=1e-9)

    def test_unit_weight_divergent(self):
        p = UGATParams.build([1.0], beta=1.0, s=1.8)
        with pytest.raises(DivergentParameters):
            mmrl_component(p, 1, [0])

    def test_total_residual_at_s_zero(self):
        p = UGATParams.build([0.25, 0.6], beta=3.0, s=0.0)
        assert_allclose(
            total_residual_survival(p, (2, 5)), 1 / (0.75 * 0.4), rtol=1e-11
        )

    def test_total_residual_matches_box_sum(self, bivariate):
        x = (1, 2)
        base = joint_survival(bivariate, x)
        direct = math.fsum(
            joint_survival(bivariate, (x[0] + a, x[1] + b)) / base
            for a, b in box_points(2, 80)
        )
        assert_allclose(total_residual_survival(bivariate, x), direct, rtol=1e-8)


class TestAging:
    @pytest.mark.parametrize("kind", list(AgingKind))
    def test_equality_at_s_zero(self, kind):
        p = UGATParams.build([0.4, 0.5], beta=1.5, s=0.0)
        grid = box_grid(2, 3)
        verdict = aging_class_check(p, kind, grid, box_grid(2, 2))
        assert verdict.verdict is Verdict.EQUALITY
        assert verdict.class_name == f"{kind.value[0]}+{kind.value[1]}"

    @pytest.mark.parametrize("kind", list(AgingKind))
    def test_worse_class_for_positive_s(self, kind):
        p = UGATParams.build([0.4, 0.5], beta=1.0, s=2.0)
        verdict = aging_class_check(p, kind, box_grid(2, 3), box_grid(2, 2))
        assert verdict.verdict is Verdict.HOLDS_GE
        assert verdict.class_name == kind.value[1]
        assert verdict.min_diff >= -1e-10

    def test_parallel_matches_serial(self):
        p = UGATParams.build([0.4, 0.5], beta=1.0, s=2.0)
        serial = aging_class_check(p, AgingKind.MIFR, box_grid(2, 3), box_grid(2, 2))
        threaded = aging_class_check(p, AgingKind.MIFR, box_grid(2, 3), box_grid(2, 2), n_jobs=4)
        assert serial == threaded

    def test_empty_grid(self, bivariate):
        verdict = aging_class_check(bivariate, AgingKind.MNBU, [], box_grid(2, 1))
        assert verdict.n_checks == 0
        assert verdict.verdict is Verdict.EQUALITY

    @pytest.mark.parametrize("name", ["mnbu", "MNWUE", "mdfr"])
    def test_parse_either_name(self, name):
        assert name.upper() in AgingKind.parse(name).value

    def test_parse_unknown(self):
        with pytest.raises(ValueError):
            AgingKind.parse("IFRA")


class TestReport:
    def test_hazard_consistency(self, bivariate):
        report = build_reliability_report(bivariate, box_grid(2, 4), box_grid(2, 1))
        assert hazard_consistency(report) < 1e-12
        assert len(report.survival) == 25
        assert set(report.aging_verdicts) == {"MNBU", "MNBUE", "MIFR"}

    def test_grid_cap(self, bivariate):
        with pytest.raises(GridTooLarge):
            build_reliability_report(bivariate, box_grid(2, 9), box_grid(2, 9), grid_cap=1000)

    def test_without_mmrl(self, bivariate):
        report = build_reliability_report(
            bivariate, box_grid(2, 1), [], kinds=[], with_mmrl=False
        )
        assert all(math.isnan(v) for row in report.mmrl for v in row)
        assert report.aging_verdicts == {}

    def test_rows_and_dict(self, bivariate):
        report = build_reliability_report(bivariate, box_grid(2, 1), box_grid(2, 1))
        rows = report.rows()
        assert rows[0]["x"] == "0,0"
        assert set(rows[0]) == {"x", "R(x)", "h1", "m1", "h2", "m2"}
        document = report.to_dict()
        assert document["grid"][-1] == [1, 1]
        assert document["aging"]["MNBU"]["class"] == "MNWU"

    def test_unit_weight_with_infinite_residual_life(self):
        # zeta law with s = 2: R and h are finite, the residual life is not
        p = UGATParams.build([1.0], beta=1.0, s=2.0)
        report = build_reliability_report(p, box_grid(1, 5), box_grid(1, 5))
        for x, surv in zip(report.grid, report.survival):
            assert_allclose(surv, zeta(2, x[0] + 1) / zeta(2), rtol=1e-10)
        assert hazard_consistency(report) < 1e-12
        assert all(math.isinf(m) for row in report.mmrl for m in row)
        mnbue = report.aging_verdicts["MNBUE"]
        assert mnbue.verdict is Verdict.UNDEFINED
        assert mnbue.class_name == "undefined"
        assert report.aging_verdicts["MNBU"].verdict is not Verdict.UNDEFINED
        document = report.to_dict()
        assert document["mmrl"][0] == [None]
        assert document["aging"]["MNBUE"]["max_diff"] is None

    def test_only_unit_coordinates_lose_their_residual_life(self):
        p = UGATParams.build([1.0, 0.5], beta=1.0, s=3.0)
        report = build_reliability_report(p, box_grid(2, 2), box_grid(2, 1))
        for m1, m2 in report.mmrl:
            assert math.isinf(m1)
            assert math.isfinite(m2) and m2 >= 1.0
        assert report.aging_verdicts["MNBUE"].verdict is Verdict.UNDEFINED
