import numpy as np
import pytest

from cusum_hd import (
    DegenerateFiltering,
    InsufficientReplicates,
    InvalidLayout,
    block_bounds,
    block_partials,
    bootstrap_quantile,
    build_centered_blocks,
    build_filtered_blocks,
    partition_blocks,
    run_bootstrap,
)
from cusum_hd.bootstrap import BootstrapDraws
from cusum_hd.panel import Panel


class TestBlockBounds:
    def test_mid_sample(self):
        assert block_bounds(0.5, 100, 4, 25) == (12, 13)

    def test_no_change_clamps(self):
        assert block_bounds(1.0, 100, 4, 25) == (24, 25)

    def test_early_change_empty_sup(self):
        assert block_bounds(0.01, 100, 4, 25)[0] == 0

    def test_exhaustive_against_definition(self):
        n, K, L = 60, 5, 12
        for k_star in range(1, n + 1):
            tau = k_star / n
            lower, upper = block_bounds(tau, n, K, L)
            sup_set = [l for l in range(0, L + 1) if l * K + K / 2 <= tau * n]
            inf_set = [l for l in range(0, L + 1) if l * K - K / 2 >= tau * n]
            assert lower == (max(sup_set) if sup_set else 0)
            assert upper == (min(inf_set) if inf_set else L)


class TestBlocks:
    def test_centered_blocks_sum_to_zero(self):
        rng = np.random.default_rng(1)
        panel = Panel(values=rng.standard_normal((100, 3)))
        blocks = build_centered_blocks(panel, partition_blocks(100, 25))
        np.testing.assert_allclose(blocks.values.sum(axis=0), 0, atol=1e-9)
        np.testing.assert_allclose(
            blocks.block_sums.sum(axis=0), 0, atol=1e-9
        )

    def test_filtered_matches_centered_without_change(self):
        rng = np.random.default_rng(2)
        panel = Panel(values=rng.standard_normal((100, 2)))
        layout = partition_blocks(100, 25)
        centered = build_centered_blocks(panel, layout)
        filtered = build_filtered_blocks(panel, np.full(2, 0.99), layout)
        # nearly all blocks kept, values agree up to mean-estimation error
        keep = 4 * filtered.lower[0]
        assert keep >= 92
        diff = filtered.values[:keep] - centered.values[:keep]
        assert np.abs(diff).max() < 0.2

    def test_step_at_block_boundary_is_filtered_out(self):
        n, L = 100, 25
        x = np.zeros(n)
        x[48:] = 10.0
        panel = Panel(values=x[:, None])
        layout = partition_blocks(n, L)
        filtered = build_filtered_blocks(panel, np.array([0.48]), layout)
        np.testing.assert_allclose(filtered.block_sums.sum(axis=0), 0, atol=1e-9)
        np.testing.assert_allclose(filtered.values[:44, 0], 0, atol=1e-9)
        np.testing.assert_allclose(filtered.values[52:, 0], 0, atol=1e-9)

    def test_constant_series_filters_to_zero(self):
        panel = Panel(values=np.ones((20, 1)))
        layout = partition_blocks(20, 5)
        filtered = build_filtered_blocks(panel, np.array([0.5]), layout)
        np.testing.assert_allclose(filtered.values, 0, atol=1e-12)

    def test_all_blocks_contaminated(self):
        panel = Panel(values=np.ones((8, 1)))
        layout = partition_blocks(8, 2)
        with pytest.raises(DegenerateFiltering):
            build_filtered_blocks(panel, np.array([0.5]), layout)


class TestBlockPartials:
    def brute(self, values, layout, k):
        out = np.zeros((layout.L, values.shape[1]))
        for l in range(layout.L):
            for h in range(values.shape[1]):
                for j in range(l * layout.K, (l + 1) * layout.K):
                    if j < k:
                        out[l, h] += values[j, h]
        return out

    def test_matches_triple_loop(self):
        rng = np.random.default_rng(3)
        for n in range(4, 13):
            for L in (1, 2, 3):
                if L > n:
                    continue
                layout = partition_blocks(n, L)
                values = rng.integers(-1, 2, size=(n, 2)).astype(float)
                for k in range(0, n + 1):
                    np.testing.assert_array_equal(
                        block_partials(values, layout, k),
                        self.brute(values, layout, k),
                    )

    def test_saturation(self):
        rng = np.random.default_rng(4)
        layout = partition_blocks(12, 3)
        values = rng.standard_normal((12, 2))
        full = block_partials(values, layout, 12)
        np.testing.assert_array_equal(block_partials(values, layout, 40), full)
        np.testing.assert_array_equal(
            block_partials(values, layout, 0), np.zeros_like(full)
        )


class TestRunBootstrap:
    def panel(self, seed=0, n=100, d=5):
        rng = np.random.default_rng(seed)
        return Panel(values=rng.standard_normal((n, d)))

    def test_seed_determinism(self):
        p = self.panel()
        a = run_bootstrap(p, algorithm=2, L=25, M=100, seed=7)
        b = run_bootstrap(p, algorithm=2, L=25, M=100, seed=7)
        np.testing.assert_array_equal(a.T, b.T)

    def test_draw_count_and_finiteness(self):
        draws = run_bootstrap(self.panel(), algorithm=3, L=25, M=150, seed=1)
        assert draws.T.shape == (150,)
        assert np.isfinite(draws.T).all()
        assert (draws.T >= 0).all()

    def test_modes_match_in_distribution(self):
        p = self.panel(seed=5, n=80, d=3)
        qm = np.quantile(
            run_bootstrap(p, algorithm=1, mode="M", L=20, M=800, seed=3).T, 0.9
        )
        qsnr = np.quantile(
            run_bootstrap(p, algorithm=1, mode="SNR", L=20, M=800, seed=3).T, 0.9
        )
        assert qm == pytest.approx(qsnr, abs=0.25)

    def test_variant_2_and_3_agree_on_null(self):
        p = self.panel(seed=9, n=100, d=4)
        q2 = np.quantile(run_bootstrap(p, algorithm=2, L=25, M=600, seed=2).T, 0.95)
        q3 = np.quantile(run_bootstrap(p, algorithm=3, L=25, M=600, seed=2).T, 0.95)
        assert q2 == pytest.approx(q3, abs=0.2)

    def test_single_block_rejected(self):
        with pytest.raises(InvalidLayout):
            run_bootstrap(self.panel(), algorithm=3, L=1, M=100)

    def test_too_few_replicates(self):
        with pytest.raises(InsufficientReplicates):
            run_bootstrap(self.panel(), algorithm=2, L=25, M=10)

    def test_csv_export(self, tmp_path):
        draws = run_bootstrap(self.panel(), algorithm=3, L=25, M=100, seed=1)
        path = tmp_path / "draws.csv"
        draws.to_csv(path)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "replicate,value"
        assert len(lines) == 101


class TestBootstrapQuantile:
    def test_exact_order_statistic(self):
        draws = BootstrapDraws(
            T=np.arange(1, 101) / 100.0,
            algorithm=2,
            mode="M",
            K=4,
            L=25,
            trim=0.0,
            seed=0,
            n=100,
            d=1,
        )
        thr = bootstrap_quantile(draws, 0.05)
        assert thr.value == pytest.approx(0.95)
        assert thr.method == "block-bootstrap"

    def test_tail_warning(self):
        draws = BootstrapDraws(
            T=np.linspace(0.1, 1, 100),
            algorithm=2,
            mode="M",
            K=4,
            L=25,
            trim=0.0,
            seed=0,
            n=100,
            d=1,
        )
        with pytest.warns(UserWarning):
            bootstrap_quantile(draws, 0.01)
