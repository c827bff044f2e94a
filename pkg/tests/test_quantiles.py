import numpy as np
import pytest

from cusum_hd import (
    InsufficientReplicates,
    InvalidLevel,
    Threshold,
    asymptotic_threshold,
    conservative_level,
    gumbel_quantile,
    limit_quantile,
    parametric_quantile,
    parametric_quantiles,
    per_coordinate_level,
)
from cusum_hd.quantiles import empirical_quantile


class TestGumbelQuantile:
    def test_closed_form_value(self):
        e_d = 2 * np.sqrt(2 * np.log(200))
        x = -np.log(-np.log(0.95))
        assert e_d == pytest.approx(6.51049, abs=1e-4)
        assert x == pytest.approx(2.9702, abs=1e-4)
        assert gumbel_quantile(100, 0.05) == pytest.approx(x / e_d + e_d / 4)
        assert gumbel_quantile(100, 0.05) == pytest.approx(2.0839, abs=1e-3)

    def test_d_one(self):
        assert gumbel_quantile(1, 0.05) > 2 * np.sqrt(2 * np.log(2)) / 4

    def test_monotone_in_d(self):
        assert gumbel_quantile(500, 0.05) > gumbel_quantile(100, 0.05)

    def test_monotone_in_alpha(self):
        assert gumbel_quantile(100, 0.01) > gumbel_quantile(100, 0.05)

    @pytest.mark.parametrize("alpha", [0.0, 1.0, -0.1, 1.5])
    def test_invalid_level(self, alpha):
        with pytest.raises(InvalidLevel):
            gumbel_quantile(100, alpha)


class TestConservativeLevel:
    def test_value(self):
        assert conservative_level(0.05) == pytest.approx(0.048771, abs=1e-6)

    def test_always_below(self):
        for alpha in np.linspace(0.01, 0.99, 25):
            assert conservative_level(alpha) < alpha

    def test_first_order(self):
        assert conservative_level(1e-6) / 1e-6 == pytest.approx(1.0, abs=1e-5)


class TestPerCoordinateLevel:
    def test_identity_at_d_one(self):
        assert per_coordinate_level(1, 0.05) == pytest.approx(0.05)

    def test_d_100(self):
        assert per_coordinate_level(100, 0.05) == pytest.approx(0.051280, abs=1e-5)

    def test_bounds_over_grid(self):
        alpha = 0.05
        cap = -np.log(1 - alpha)
        prev = per_coordinate_level(2, alpha)
        for d in (2, 5, 10, 50, 100, 1000):
            z = per_coordinate_level(d, alpha)
            assert alpha < z <= cap
            assert z >= prev - 1e-15
            prev = z


class TestEmpiricalQuantile:
    def test_exact_order_statistic(self):
        draws = np.arange(1, 101) / 100.0
        assert empirical_quantile(draws, 0.95) == pytest.approx(0.95)

    def test_permutation_invariance(self):
        rng = np.random.default_rng(2)
        draws = rng.standard_normal(500)
        a = empirical_quantile(np.sort(draws), 0.9)
        b = empirical_quantile(np.sort(rng.permutation(draws)), 0.9)
        assert a == b


class TestParametricQuantile:
    def test_determinism(self):
        a = parametric_quantile(100, 50, 0.05, M=2000, seed=5)
        b = parametric_quantile(100, 50, 0.05, M=2000, seed=5)
        assert a.value == b.value
        assert a.method == "parametric-b"

    def test_methods_agree(self):
        a = parametric_quantile(100, 50, 0.05, M=20000, method="a", seed=3)
        b = parametric_quantile(100, 50, 0.05, M=20000, method="b", seed=3)
        assert a.value == pytest.approx(b.value, abs=0.05)

    def test_monotone_in_d(self):
        q = parametric_quantiles(100, [100, 250, 500], [0.05], M=20000, seed=1)
        assert q[0, 0] < q[1, 0] < q[2, 0]

    def test_insufficient_replicates(self):
        with pytest.raises(InsufficientReplicates):
            parametric_quantile(100, 10, 0.05, M=50)

    def test_threshold_provenance(self):
        thr = parametric_quantile(100, 10, 0.05, M=1000, seed=9)
        assert (thr.n, thr.d, thr.M, thr.seed) == (100, 10, 1000, 9)
        assert "parametric-b" in thr.to_json()


class TestLimitQuantile:
    def test_close_to_large_n_surrogate(self):
        # the continuous-limit value is approached by the finite-n
        # studentized surrogate from above slowly; loose agreement only
        q = parametric_quantiles(2000, [100], [0.05], M=40000, seed=4)[0, 0]
        assert limit_quantile(100, 0.05) == pytest.approx(q, abs=0.05)

    def test_threshold_validation(self):
        with pytest.raises(InvalidLevel):
            Threshold(value=-1.0, method="asymptotic", alpha=0.05, d=10)


class TestAsymptoticThreshold:
    def test_conservative_flag_raises_value(self):
        plain = asymptotic_threshold(100, 0.05)
        cons = asymptotic_threshold(100, 0.05, conservative=True)
        assert cons.value > plain.value
        assert cons.conservative
