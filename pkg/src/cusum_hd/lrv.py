"""Long-run variance estimation.

Implements the windowed autocovariance-sum estimator

    sigma2 = phi_0 + 2 * sum_{j=1..b} w(j/b) * phi_j,
    phi_j  = (m - j)^{-1} * sum_{k=j+1..m} (X_k - Xbar)(X_{k-j} - Xbar),

with plain (w = 1) or Bartlett (w(x) = 1 - |x|) weights, and the
change-robust split-sample family built from the two ends of the series
around an estimated change time.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidBandwidth, InvalidLag, SplitTooShort
from .panel import as_panel

WEIGHTS = ("plain", "bartlett")


@dataclass(frozen=True)
class LrvConfig:
    """Bandwidth, weight kind and the degeneracy floor epsilon.

    Estimates below epsilon**2 are clamped to epsilon**2 and flagged.
    bandwidth = 0 reduces the estimator to the lag-0 sample variance.
    """

    bandwidth: int
    weight: str = "plain"
    eps: float = 1e-6

    def __post_init__(self):
        if self.bandwidth < 0:
            raise InvalidBandwidth("bandwidth must be >= 0")
        if self.weight not in WEIGHTS:
            raise InvalidBandwidth("weight must be one of %s" % (WEIGHTS,))
        if self.eps <= 0:
            raise InvalidBandwidth("eps must be positive")


@dataclass(frozen=True)
class LrvEstimate:
    value: float
    clamped: bool


@dataclass(frozen=True)
class SplitEstimates:
    """The seven scale estimates (standard-deviation scale) of one series.

    star satisfies star**2 = tau * minus**2 + (1 - tau) * plus**2 exactly,
    and sd_min <= each of the others <= sd_max.
    """

    minus: float
    plus: float
    star: float
    sd_min: float
    sd_max: float
    sd_mean: float
    diamond: float
    tau_hat: float
    b_tau: float
    clamped: bool = False

    def by_kind(self, kind: str) -> float:
        table = {
            "minus": self.minus,
            "plus": self.plus,
            "star": self.star,
            "min": self.sd_min,
            "max": self.sd_max,
            "mean": self.sd_mean,
            "diamond": self.diamond,
        }
        if kind not in table:
            raise KeyError("unknown variance kind %r" % kind)
        return table[kind]


def autocovariance(x, j: int) -> float:
    """Lag-j sample autocovariance with (m - j)^{-1} normalization."""
    x = np.asarray(x, dtype=float)
    m = x.shape[0]
    if not 0 <= j < m:
        raise InvalidLag("lag %d out of range for series of length %d" % (j, m))
    xc = x - x.mean()
    return float(xc[: m - j] @ xc[j:]) / (m - j)


def default_bandwidth(n: int) -> int:
    """floor(n^{1/3}), the standard cube-root rate."""
    return max(1, int(np.floor(round(n ** (1.0 / 3.0), 9))))


def _lag_weights(bandwidth: int, weight: str) -> np.ndarray:
    j = np.arange(1, bandwidth + 1, dtype=float)
    if weight == "bartlett":
        return 1.0 - j / bandwidth
    return np.ones_like(j)


def plain_lrv_raw(x, config: LrvConfig) -> float:
    """Windowed estimate without the degeneracy clamp; may be negative."""
    x = np.asarray(x, dtype=float)
    m = x.shape[0]
    if config.bandwidth >= m:
        raise InvalidBandwidth(
            "bandwidth %d too large for series of length %d" % (config.bandwidth, m)
        )
    xc = x - x.mean()
    est = float(xc @ xc) / m
    if config.bandwidth:
        w = _lag_weights(config.bandwidth, config.weight)
        for j in range(1, config.bandwidth + 1):
            est += 2.0 * w[j - 1] * float(xc[: m - j] @ xc[j:]) / (m - j)
    return est


def plain_lrv(x, config: LrvConfig) -> LrvEstimate:
    """Windowed long-run variance estimate, clamped below at eps**2."""
    est = plain_lrv_raw(x, config)
    floor = config.eps**2
    if est < floor:
        return LrvEstimate(value=floor, clamped=True)
    return LrvEstimate(value=est, clamped=False)


def split_sample_sizes(n: int, tau_hat: float, b_tau: float) -> tuple[int, int]:
    """Lengths of the front and back subsamples used by the split family.

    The front sample covers times k <= b_tau * tau_hat * n, the back one
    times k > n - b_tau * (1 - tau_hat) * n.
    """
    m_minus = int(np.floor(b_tau * tau_hat * n))
    start = int(np.floor(n - b_tau * (1.0 - tau_hat) * n))
    return m_minus, n - start


def combine_split(
    var_minus: float,
    var_plus: float,
    tau_hat: float,
    m_minus: int,
    m_plus: int,
    b_tau: float,
    clamped: bool = False,
) -> SplitEstimates:
    """Assemble the seven estimates from the two subsample variances."""
    star = tau_hat * var_minus + (1.0 - tau_hat) * var_plus
    lo, hi = min(var_minus, var_plus), max(var_minus, var_plus)
    diamond = var_minus if m_minus >= m_plus else var_plus
    return SplitEstimates(
        minus=float(np.sqrt(var_minus)),
        plus=float(np.sqrt(var_plus)),
        star=float(np.sqrt(star)),
        sd_min=float(np.sqrt(lo)),
        sd_max=float(np.sqrt(hi)),
        sd_mean=float(np.sqrt(0.5 * (var_minus + var_plus))),
        diamond=float(np.sqrt(diamond)),
        tau_hat=tau_hat,
        b_tau=b_tau,
        clamped=clamped,
    )


def split_lrv(
    X, h: int = 0, tau_hat: float = 0.5, b_tau: float = 0.8, config: LrvConfig = None
) -> SplitEstimates:
    """Change-robust split-sample scale estimates for coordinate h.

    Both subsamples must contain more than bandwidth + 1 points, otherwise
    SplitTooShort is raised and the caller is expected to fall back to a
    full-sample estimate.
    """
    panel = as_panel(X)
    if config is None:
        config = LrvConfig(bandwidth=default_bandwidth(panel.n))
    x = panel.column(h)
    n = panel.n
    m_minus, m_plus = split_sample_sizes(n, tau_hat, b_tau)
    if m_minus <= config.bandwidth + 1 or m_plus <= config.bandwidth + 1:
        raise SplitTooShort(
            "split at tau=%.3f leaves subsamples of %d and %d points"
            % (tau_hat, m_minus, m_plus),
            coordinate=h,
        )
    est_minus = plain_lrv(x[:m_minus], config)
    est_plus = plain_lrv(x[n - m_plus :], config)
    return combine_split(
        est_minus.value,
        est_plus.value,
        tau_hat,
        m_minus,
        m_plus,
        b_tau,
        clamped=est_minus.clamped or est_plus.clamped,
    )
