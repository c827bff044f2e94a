"""Simultaneous critical values for the panel maximum statistic.

Three routes: a closed-form extreme-value quantile, a Monte Carlo
quantile simulated from independent Gaussian series, and the continuous
limit of a single coordinate composed across d coordinates.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np
from scipy.stats import kstwobign

from .errors import InsufficientReplicates, InvalidLevel

_CHUNK = 4096  # replicates simulated per batch; fixed so results are seed-deterministic


@dataclass(frozen=True)
class Threshold:
    """A calibrated simultaneous critical value with its provenance."""

    value: float
    method: str  # 'asymptotic' | 'parametric-a' | 'parametric-b' | 'block-bootstrap'
    alpha: float
    d: int
    n: int = 0
    M: int = 0
    seed: int | None = None
    conservative: bool = False

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise InvalidLevel("alpha must lie in (0, 1), got %r" % self.alpha)
        if self.value <= 0:
            raise InvalidLevel("threshold value must be positive")

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


def _check_level(alpha: float):
    if not 0 < alpha < 1:
        raise InvalidLevel("level must lie in (0, 1), got %r" % alpha)


def gumbel_quantile(d: int, alpha: float) -> float:
    """Closed-form extreme-value critical value for d coordinates.

    Returns x_alpha / e_d + f_d with e_d = 2 sqrt(2 log(2 d)), f_d = e_d / 4
    and x_alpha = -log(-log(1 - alpha)). Strictly increasing in d and
    decreasing in alpha.
    """
    _check_level(alpha)
    if d < 1:
        raise InvalidLevel("d must be >= 1")
    e_d = 2.0 * np.sqrt(2.0 * np.log(2.0 * d))
    x_alpha = -np.log(-np.log(1.0 - alpha))
    return float(x_alpha / e_d + e_d / 4.0)


def conservative_level(alpha: float) -> float:
    """Substitute level a = 1 - exp(-alpha) < alpha.

    Using a in place of alpha turns the extreme-value calibration into an
    upper bound that controls the family-wise error under much weaker
    spatial-dependence conditions.
    """
    _check_level(alpha)
    return float(1.0 - np.exp(-alpha))


def per_coordinate_level(d: int, alpha: float) -> float:
    """Marginal level z = d * (1 - (1 - alpha)^{1/d}) implied by a joint
    level alpha across d independent coordinates."""
    _check_level(alpha)
    if d < 1:
        raise InvalidLevel("d must be >= 1")
    return float(d * (1.0 - (1.0 - alpha) ** (1.0 / d)))


def limit_quantile(d: int, alpha: float) -> float:
    """Quantile of the maximum of d independent copies of the continuous
    limit sup_t |W(t) - t W(1)|, via the Kolmogorov distribution."""
    _check_level(alpha)
    return float(kstwobign.ppf((1.0 - alpha) ** (1.0 / d)))


def _chunk_rng(seed: int, start: int) -> np.random.Generator:
    # derived seed per chunk: identical draws regardless of execution order
    return np.random.default_rng(np.random.SeedSequence((seed, start)))


def _simulate_scalar_stats(n: int, M: int, seed: int) -> np.ndarray:
    """M draws of the studentized maximum deviation of one Gaussian series.

    Each draw is max_k |S_k - (k/n) S_n| / (sqrt(n) * sd(x)) for an i.i.d.
    standard Gaussian series x of length n, with the maximum-likelihood
    (1/n) standard deviation.
    """
    out = np.empty(M)
    k = np.arange(1, n + 1)[None, :]
    for start in range(0, M, _CHUNK):
        m = min(_CHUNK, M - start)
        rng = _chunk_rng(seed, start)
        x = rng.standard_normal((m, n))
        S = np.cumsum(x, axis=1)
        dev = np.abs(S - (k / n) * S[:, -1:]).max(axis=1)
        sd = x.std(axis=1)
        out[start : start + m] = dev / (np.sqrt(n) * sd)
    return out


def empirical_quantile(sorted_draws: np.ndarray, p: float) -> float:
    """Order statistic at index ceil(p * M), 1-based (lower exceedance)."""
    M = sorted_draws.shape[0]
    idx = min(int(np.ceil(p * M)), M)
    return float(sorted_draws[max(idx, 1) - 1])


def parametric_quantiles(
    n: int, ds, alphas, M: int = 10**5, seed: int = 0
) -> np.ndarray:
    """Method-B quantiles for a grid of dimensions and levels at once.

    Simulates the scalar statistic once, then for each (d, alpha) returns
    the smallest draw z whose empirical CDF satisfies F(z)^d >= 1 - alpha.
    Output has shape (len(ds), len(alphas)).
    """
    if M < 100:
        raise InsufficientReplicates("need at least 100 replicates, got %d" % M)
    for a in np.atleast_1d(alphas):
        _check_level(float(a))
    draws = np.sort(_simulate_scalar_stats(n, M, seed))
    ds = np.atleast_1d(ds)
    alphas = np.atleast_1d(alphas)
    out = np.empty((ds.shape[0], alphas.shape[0]))
    for i, d in enumerate(ds):
        for j, a in enumerate(alphas):
            out[i, j] = empirical_quantile(draws, (1.0 - float(a)) ** (1.0 / int(d)))
    return out


def parametric_quantile(
    n: int,
    d: int,
    alpha: float,
    M: int = 10**5,
    method: str = "b",
    seed: int = 0,
    conservative: bool = False,
) -> Threshold:
    """Monte Carlo critical value from independent Gaussian surrogate series.

    Method 'b' simulates the scalar statistic and composes its empirical
    CDF to the d-th power; method 'a' simulates the d-coordinate maximum
    directly. Both studentize each series by its sample standard
    deviation. Deterministic given (n, d, alpha, M, method, seed).
    """
    _check_level(alpha)
    if M < 100:
        raise InsufficientReplicates("need at least 100 replicates, got %d" % M)
    level = conservative_level(alpha) if conservative else alpha
    method = method.lower()
    if method in ("b", "parametric-b"):
        value = float(parametric_quantiles(n, [d], [level], M=M, seed=seed)[0, 0])
        name = "parametric-b"
    elif method in ("a", "parametric-a"):
        out = np.empty(M)
        k = np.arange(1, n + 1)[None, :]
        chunk = max(1, _CHUNK // max(1, d // 8))
        pos = 0
        start = 0
        while pos < M:
            m = min(chunk, M - pos)
            rng = _chunk_rng(seed, start)
            x = rng.standard_normal((m, d, n))
            S = np.cumsum(x, axis=2)
            dev = np.abs(S - (k / n) * S[:, :, -1:]).max(axis=2)
            sd = x.std(axis=2)
            out[pos : pos + m] = (dev / (np.sqrt(n) * sd)).max(axis=1)
            pos += m
            start += 1
        value = empirical_quantile(np.sort(out), 1.0 - level)
        name = "parametric-a"
    else:
        raise InvalidLevel("unknown parametric method %r" % method)
    return Threshold(
        value=value,
        method=name,
        alpha=alpha,
        d=d,
        n=n,
        M=M,
        seed=seed,
        conservative=conservative,
    )


def asymptotic_threshold(
    d: int, alpha: float, conservative: bool = False
) -> Threshold:
    """Closed-form threshold packaged with its provenance."""
    level = conservative_level(alpha) if conservative else alpha
    return Threshold(
        value=gumbel_quantile(d, level),
        method="asymptotic",
        alpha=alpha,
        d=d,
        conservative=conservative,
    )
