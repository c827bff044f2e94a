"""Block multiplier bootstrap for the panel maximum statistic.

The sample is cut into L contiguous blocks of K time points. Three
resampling schemes are provided:

* variant 1: block partial sums of change-filtered data, multiplied by
  i.i.d. Gaussian weights, self-normalized by the conditional variance of
  the same filtered block sums; optional block permutation or resampling.
* variant 2: the same filtered numerator, but normalized by the
  conditional variance of globally centered block sums.
* variant 3: both numerator and normalization from globally centered
  block sums; no change-time estimation anywhere.

Filtering zeroes every block that straddles an estimated change time and
demeans the two remaining stretches separately, so mean shifts do not
leak into the bootstrap law.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .cusum import estimate_change_times
from .errors import (
    DegenerateFiltering,
    DegenerateReplicate,
    InsufficientReplicates,
    InvalidLayout,
    UnderResolvedTail,
)
from .panel import BlockLayout, Panel, as_panel
from .quantiles import Threshold, empirical_quantile

ALGORITHMS = (1, 2, 3)
MODES = ("M", "SR", "SNR")
_MAX_REDRAWS = 10


@dataclass(frozen=True)
class CenteredBlocks:
    """Globally centered data restricted to the first K*L rows, plus the
    per-block sums V[l, h]."""

    values: np.ndarray  # (K*L, d)
    block_sums: np.ndarray  # (L, d)
    layout: BlockLayout


@dataclass(frozen=True)
class FilteredBlocks:
    """Change-filtered data and block sums.

    For each coordinate the blocks bracketing the estimated change are
    zeroed; the stretch before (after) them is demeaned by its own mean.
    """

    values: np.ndarray  # (K*L, d)
    block_sums: np.ndarray  # (L, d)
    lower: np.ndarray  # (d,) block index bracketing the change from below
    upper: np.ndarray  # (d,)
    tau_hats: np.ndarray
    layout: BlockLayout


@dataclass(frozen=True)
class BootstrapDraws:
    T: np.ndarray
    algorithm: int
    mode: str
    K: int
    L: int
    trim: float
    seed: int
    n: int
    d: int
    warnings: int = 0

    def to_csv(self, path):
        rows = "\n".join(
            "%d,%.17g" % (m, v) for m, v in enumerate(self.T, start=1)
        )
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("replicate,value\n" + rows + "\n")


def block_bounds(tau_hat: float, n: int, K: int, L: int) -> tuple[int, int]:
    """Indices of the blocks bracketing a change at time tau_hat * n.

    lower = sup{l : l*K + K/2 <= tau_hat*n} (0 when empty) and
    upper = inf{l : l*K - K/2 >= tau_hat*n} (L when empty): blocks
    lower+1 .. upper are treated as contaminated.
    """
    t = tau_hat * n
    lower = int(np.floor((t - K / 2.0) / K))
    lower = max(lower, 0)
    upper = int(np.ceil((t + K / 2.0) / K))
    upper = min(upper, L)
    return lower, upper


def build_centered_blocks(panel: Panel, layout: BlockLayout) -> CenteredBlocks:
    N = layout.used_n
    values = panel.values[:N] - panel.values.mean(axis=0)
    sums = values.reshape(layout.L, layout.K, panel.d).sum(axis=1)
    return CenteredBlocks(values=values, block_sums=sums, layout=layout)


def build_filtered_blocks(
    panel: Panel, tau_hats, layout: BlockLayout
) -> FilteredBlocks:
    """Zero contaminated blocks and demean the two clean stretches."""
    N = layout.used_n
    K, L = layout.K, layout.L
    d = panel.d
    tau_hats = np.asarray(tau_hats, dtype=float)
    values = np.zeros((N, d))
    lower = np.empty(d, dtype=int)
    upper = np.empty(d, dtype=int)
    for h in range(d):
        lo, up = block_bounds(tau_hats[h], panel.n, K, L)
        lower[h], upper[h] = lo, up
        a, b = K * lo, K * up
        if a == 0 and b == N:
            raise DegenerateFiltering(
                "every block of coordinate %d is contaminated" % h, coordinate=h
            )
        if a > 0:
            pre = panel.values[:a, h]
            values[:a, h] = pre - pre.mean()
        if b < N:
            post = panel.values[b:N, h]
            values[b:, h] = post - post.mean()
    sums = values.reshape(L, K, d).sum(axis=1)
    return FilteredBlocks(
        values=values,
        block_sums=sums,
        lower=lower,
        upper=upper,
        tau_hats=tau_hats,
        layout=layout,
    )


def block_partials(values: np.ndarray, layout: BlockLayout, k: int) -> np.ndarray:
    """V[l, h](k): sum of rows of block l with time index <= k.

    Computed from one prefix-sum pass; V(k) = V(used_n) for k beyond the
    last retained time point and 0 for k before the block starts.
    """
    N = layout.used_n
    cum = np.cumsum(values[:N], axis=0)
    top = np.minimum(np.arange(1, layout.L + 1) * layout.K, max(min(k, N), 0))
    bottom = np.arange(layout.L) * layout.K
    zero = np.zeros((1, values.shape[1]))
    padded = np.vstack([zero, cum])
    return padded[np.maximum(top, bottom)] - padded[bottom]


def _stat_k_range(n: int, trim: float) -> tuple[int, int]:
    lo = max(int(np.floor(trim * n)), 1)
    hi = n - int(np.floor(trim * n))
    if lo > hi:
        raise InvalidLayout("trim %r leaves no index for n=%d" % (trim, n))
    return lo, hi


def _weighted_stat(
    rows: np.ndarray,
    row_weights: np.ndarray,
    sigma2: np.ndarray,
    n: int,
    trim: float,
) -> float:
    """max over coordinates and trimmed k of the weighted block CUSUM."""
    N = rows.shape[0]
    cum = np.cumsum(row_weights[:, None] * rows, axis=0)
    if N < n:
        cum = np.vstack([cum, np.tile(cum[-1], (n - N, 1))])
    k = np.arange(1, n + 1)[:, None]
    dev = np.abs(cum - (k / n) * cum[-1])
    lo, hi = _stat_k_range(n, trim)
    dev = dev[lo - 1 : hi]
    return float((dev.max(axis=0) / np.sqrt(n * sigma2)).max())


def boot_stat_1(
    blocks: FilteredBlocks,
    xi: np.ndarray,
    pi: np.ndarray,
    n: int,
    trim: float = 0.0,
    unit_multiplier_variance: bool = False,
) -> float:
    """One draw of variant 1 for given multipliers xi and block order pi."""
    layout = blocks.layout
    order = (pi[:, None] * layout.K + np.arange(layout.K)[None, :]).ravel()
    rows = blocks.values[order]
    vn = blocks.block_sums[pi]
    w = np.ones_like(xi) if unit_multiplier_variance else xi
    sigma2 = (w[:, None] ** 2 * vn**2).sum(axis=0) / layout.used_n
    row_weights = np.repeat(xi, layout.K)
    return _weighted_stat(rows, row_weights, sigma2, n, trim)


def boot_stat_2(
    filtered: FilteredBlocks,
    centered: CenteredBlocks,
    xi: np.ndarray,
    n: int,
    trim: float = 0.0,
    unit_multiplier_variance: bool = False,
) -> float:
    """Variant 2: filtered numerator, centered-block normalization."""
    layout = filtered.layout
    w = np.ones_like(xi) if unit_multiplier_variance else xi
    sigma2 = (w[:, None] ** 2 * centered.block_sums**2).sum(axis=0) / layout.used_n
    row_weights = np.repeat(xi, layout.K)
    return _weighted_stat(filtered.values, row_weights, sigma2, n, trim)


def boot_stat_3(
    centered: CenteredBlocks,
    xi: np.ndarray,
    n: int,
    trim: float = 0.0,
    unit_multiplier_variance: bool = False,
) -> float:
    """Variant 3: centered numerator and normalization, no filtering."""
    layout = centered.layout
    w = np.ones_like(xi) if unit_multiplier_variance else xi
    sigma2 = (w[:, None] ** 2 * centered.block_sums**2).sum(axis=0) / layout.used_n
    row_weights = np.repeat(xi, layout.K)
    return _weighted_stat(centered.values, row_weights, sigma2, n, trim)


def run_bootstrap(
    X,
    algorithm: int = 2,
    L: int = 25,
    mode: str = "M",
    trim: float = 0.0,
    M: int = 1000,
    seed: int = 0,
    tau_hats=None,
    unit_multiplier_variance: bool = False,
) -> BootstrapDraws:
    """Draw M bootstrap replicates of the panel maximum statistic.

    Blocks are precomputed once; each replicate m uses a generator seeded
    by (seed, m), so draws do not depend on execution order. Variant 1
    redraws the block order pi each replicate per its mode: 'M' keeps the
    identity, 'SR' samples blocks with replacement, 'SNR' permutes them.
    """
    panel = as_panel(X)
    if algorithm not in ALGORITHMS:
        raise InvalidLayout("algorithm must be one of %s" % (ALGORITHMS,))
    if mode not in MODES:
        raise InvalidLayout("mode must be one of %s" % (MODES,))
    if M < 100:
        raise InsufficientReplicates("need at least 100 replicates, got %d" % M)
    if L < 2:
        raise InvalidLayout("need at least 2 blocks")
    from .panel import partition_blocks

    layout = partition_blocks(panel.n, L)
    centered = build_centered_blocks(panel, layout)
    filtered = None
    if algorithm in (1, 2):
        if tau_hats is None:
            tau_hats, _ = estimate_change_times(panel, trim=trim)
        filtered = build_filtered_blocks(panel, tau_hats, layout)
    T = np.empty(M)
    n_warn = 0
    identity = np.arange(layout.L)
    for m in range(M):
        rng = np.random.default_rng(np.random.SeedSequence((seed, m)))
        value = np.inf
        for _attempt in range(_MAX_REDRAWS + 1):
            xi = rng.standard_normal(layout.L)
            if algorithm == 1:
                if mode == "SR":
                    pi = rng.integers(0, layout.L, layout.L)
                elif mode == "SNR":
                    pi = rng.permutation(layout.L)
                else:
                    pi = identity
                vn = filtered.block_sums[pi]
                w = np.ones_like(xi) if unit_multiplier_variance else xi
                sigma2 = (w[:, None] ** 2 * vn**2).sum(axis=0) / layout.used_n
                if np.any(sigma2 <= 0):
                    continue
                value = boot_stat_1(
                    filtered, xi, pi, panel.n, trim, unit_multiplier_variance
                )
            else:
                w = np.ones_like(xi) if unit_multiplier_variance else xi
                sigma2 = (w[:, None] ** 2 * centered.block_sums**2).sum(
                    axis=0
                ) / layout.used_n
                if np.any(sigma2 <= 0):
                    continue
                if algorithm == 2:
                    value = boot_stat_2(
                        filtered, centered, xi, panel.n, trim, unit_multiplier_variance
                    )
                else:
                    value = boot_stat_3(
                        centered, xi, panel.n, trim, unit_multiplier_variance
                    )
            break
        else:
            n_warn += 1
            warnings.warn(
                "replicate %d kept zero conditional variance after %d redraws"
                % (m, _MAX_REDRAWS),
                DegenerateReplicate,
            )
        T[m] = value
    return BootstrapDraws(
        T=T,
        algorithm=algorithm,
        mode=mode if algorithm == 1 else "M",
        K=layout.K,
        L=layout.L,
        trim=trim,
        seed=seed,
        n=panel.n,
        d=panel.d,
        warnings=n_warn,
    )


def bootstrap_quantile(draws: BootstrapDraws, alpha: float) -> Threshold:
    """Order statistic at ceil((1 - alpha) * M) of the draws."""
    M = draws.T.shape[0]
    if M * alpha < 10:
        warnings.warn(
            "only %.1f replicates beyond the requested quantile" % (M * alpha),
            UnderResolvedTail,
        )
    value = empirical_quantile(np.sort(draws.T), 1.0 - alpha)
    return Threshold(
        value=value,
        method="block-bootstrap",
        alpha=alpha,
        d=draws.d,
        n=draws.n,
        M=M,
        seed=draws.seed,
    )
