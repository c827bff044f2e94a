import numpy as np
import pytest

from cusum_hd import (
    ChangePlan,
    InvalidPlan,
    UnstableModel,
    arma_panel,
    evaluate_detection,
    factor_panel,
    garch_panel,
    inject_changes,
    linear_matrix_panel,
    quintile_plan,
    spatial_ma_panel,
)
from cusum_hd.simulate import EvalMetrics, _spatial_weights


class TestSpatialMaPanel:
    def test_variance_matches_closed_form(self):
        coeffs = 0.1 * np.maximum(np.arange(100), 1) ** -3.0
        target = 0.01 * float(coeffs @ coeffs)
        panel = spatial_ma_panel(10**5, 1, seed=2, coeffs=coeffs, innovation_sd=0.1)
        sample = panel.values[:, 0].var()
        se = target * np.sqrt(2.0 / panel.n)  # approximate, weak dependence
        assert abs(sample - target) < 5 * se

    def test_distant_coordinates_independent(self):
        panel = spatial_ma_panel(4000, 101, seed=3)
        x, y = panel.values[:, 0], panel.values[:, 100]
        corr = np.corrcoef(x, y)[0, 1]
        assert abs(corr) < 0.05

    def test_seed_determinism(self):
        a = spatial_ma_panel(50, 5, seed=11)
        b = spatial_ma_panel(50, 5, seed=11)
        np.testing.assert_array_equal(a.values, b.values)

    def test_default_weights_shape(self):
        w = _spatial_weights()
        assert w[0] == 1.0
        assert w[1] == pytest.approx(0.1)
        assert w[2] == pytest.approx(0.1 / 8)


class TestArmaPanel:
    def test_bounded_in_probability(self):
        panel = arma_panel(10**4, 1, seed=7)
        x = panel.values[:, 0]
        assert np.abs(x).max() < 100 * x.std()

    def test_determinism_and_factor_reduction(self):
        a = arma_panel(60, 8, seed=13)
        b = factor_panel(60, 8, seed=13, factor_loading=0.0)
        np.testing.assert_array_equal(a.values, b.values)

    def test_factor_inflates_leading_eigenvalue(self):
        n, d = 250, 100

        def lead(loading, seed):
            panel = factor_panel(n, d, seed, factor_loading=loading)
            corr = np.corrcoef(panel.values.T)
            return np.linalg.eigvalsh(corr)[-1] / d

        with_factor = np.mean([lead(0.3, s) for s in range(3)])
        without = np.mean([lead(0.0, s) for s in range(3)])
        assert with_factor > 5 * without

    def test_negative_loading_rejected(self):
        with pytest.raises(UnstableModel):
            factor_panel(50, 4, seed=1, factor_loading=-0.1)


class TestGarchPanel:
    def test_degenerate_is_gaussian(self):
        panel = garch_panel(
            2 * 10**4, 1, seed=5, eta=0.25, alpha_coeffs=(), beta_coeffs=()
        )
        x = panel.values[:, 0]
        assert x.var() == pytest.approx(0.25, rel=0.1)

    def test_unconditional_variance(self):
        panel = garch_panel(
            10**5, 1, seed=9, eta=0.1, alpha_coeffs=(0.2,), beta_coeffs=(0.3,)
        )
        x = panel.values[:, 0]
        target = 0.1 / (1 - 0.5)
        assert abs(x.var() - target) < 3 * target * np.sqrt(20.0 / panel.n)

    def test_stationarity_guard(self):
        with pytest.raises(UnstableModel):
            garch_panel(100, 2, seed=1, eta=0.1, alpha_coeffs=(0.6,), beta_coeffs=(0.5,))

    def test_determinism(self):
        a = garch_panel(50, 3, seed=21)
        b = garch_panel(50, 3, seed=21)
        np.testing.assert_array_equal(a.values, b.values)


class TestLinearMatrixPanel:
    def test_identity_weights(self):
        d = 4
        panel = linear_matrix_panel(200, d, seed=3, weights=[np.eye(d)])
        rng = np.random.default_rng(np.random.SeedSequence(3))
        Z = rng.standard_normal((200, d))
        np.testing.assert_allclose(panel.values, Z)

    def test_diagonal_geometric_acf(self):
        d = 1
        lmax = 20
        weights = [np.eye(d) * 2.0**-l for l in range(lmax + 1)]
        panel = linear_matrix_panel(10**5, d, seed=8, weights=weights)
        x = panel.values[:, 0]
        num = sum(2.0**-l * 2.0 ** -(l + 1) for l in range(lmax))
        den = sum(4.0**-l for l in range(lmax + 1))
        target = num / den
        xc = x - x.mean()
        acf1 = (xc[1:] @ xc[:-1]) / (xc @ xc)
        assert acf1 == pytest.approx(target, abs=0.02)

    def test_banded_independence(self):
        d = 6
        band = np.eye(d)
        for i in range(d - 1):
            band[i, i + 1] = band[i + 1, i] = 0.5
        panel = linear_matrix_panel(10**5, d, seed=4, weights=[band])
        corr = np.corrcoef(panel.values[:, 0], panel.values[:, 4])[0, 1]
        assert abs(corr) < 0.02

    def test_zero_mass_rejected(self):
        from cusum_hd.errors import DegenerateModel

        with pytest.raises(DegenerateModel):
            linear_matrix_panel(100, 2, seed=1, weights=[np.zeros((2, 2))])


class TestChangePlans:
    def test_quintile_plan_counts(self):
        plan = quintile_plan(100, 0.1)
        assert len(plan.affected) == 50
        plan = quintile_plan(250, 0.1)
        assert len(plan.affected) == 75

    def test_duplicate_coordinate(self):
        with pytest.raises(InvalidPlan):
            ChangePlan.from_triples([(1, 0.5, 1.0), (1, 0.3, 1.0)])

    def test_inject_positions(self):
        plan = ChangePlan.from_triples([(1, 0.5, 1.0)])
        base = np.zeros((10, 3))
        shifted, truth = inject_changes(base, plan)
        np.testing.assert_array_equal(shifted.values[:5, 1], 0)
        np.testing.assert_array_equal(shifted.values[5:, 1], 1.0)
        assert truth == {1: 0.5}

    def test_empty_plan(self):
        shifted, truth = inject_changes(np.zeros((8, 2)), ChangePlan())
        assert truth == {}
        np.testing.assert_array_equal(shifted.values, 0)

    def test_out_of_range_coordinate(self):
        with pytest.raises(InvalidPlan):
            inject_changes(np.zeros((8, 2)), ChangePlan.from_triples([(5, 0.5, 1.0)]))


class TestEvaluateDetection:
    def truth(self):
        return {0: 0.1, 1: 0.3, 2: 0.5, 3: 0.7, 4: 0.9}

    def test_perfect_detection(self):
        taus = np.array([0.1, 0.3, 0.5, 0.7, 0.9, 0.0, 0.0, 0.0])
        m = evaluate_detection([0, 1, 2, 3, 4], taus, self.truth(), 8)
        assert m.r == (100.0, 100.0, 100.0, 100.0, 100.0)
        assert m.ti_star == 0.0

    def test_empty_detection(self):
        m = evaluate_detection([], np.zeros(8), self.truth(), 8)
        assert m.r == (0.0,) * 5
        assert m.ti_star == 0.0

    def test_wrong_quintile_does_not_count(self):
        taus = np.array([0.35, 0.3, 0.5, 0.7, 0.9, 0.0, 0.0, 0.0])
        m = evaluate_detection([0], taus, self.truth(), 8)
        assert m.r == (0.0,) * 5

    def test_false_alarm_rate(self):
        taus = np.zeros(8)
        m = evaluate_detection([5, 6], taus, self.truth(), 8)
        assert m.ti_star == pytest.approx(100.0 * 2 / 3)

    def test_quintile_membership(self):
        assert EvalMetrics.quintile(0.19) == 0
        assert EvalMetrics.quintile(0.2) == 1
        assert EvalMetrics.quintile(0.999) == 4

    def test_oracle_detector_on_noiseless_panel(self):
        plan = quintile_plan(10, 1.0, per_quintile=1)
        base = np.zeros((100, 10))
        shifted, truth = inject_changes(base, plan)
        from cusum_hd import estimate_change_times

        taus, max_dev = estimate_change_times(shifted, trim=0.05)
        unstable = np.where(max_dev > 0.5)[0]
        m = evaluate_detection(unstable, taus, truth, 10)
        assert m.r == (100.0,) * 5
        assert m.ti_star == 0.0
