"""Panel-level change detection with a scikit-learn style estimator."""

from __future__ import annotations

import io
import json
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator

from .bootstrap import bootstrap_quantile, run_bootstrap
from .cusum import estimate_change_times
from .errors import ConfigError, DegenerateVariance
from .lrv import LrvConfig, combine_split, plain_lrv_raw, split_sample_sizes
from .panel import as_panel
from .quantiles import Threshold, asymptotic_threshold, parametric_quantile

VARIANCE_KINDS = ("plain", "star", "min", "max", "mean", "diamond", "minus", "plus")
THRESHOLD_METHODS = (
    "asymptotic",
    "parametric-a",
    "parametric-b",
    "block-i",
    "block-ii",
    "block-iii",
)


def detection_bandwidth(n: int) -> int:
    """ceil(n^{1/3}); one lag wider than the cube-root floor.

    The extra lag stabilizes the split-sample estimates on the short
    subsamples produced by early or late change times.
    """
    return max(1, int(np.ceil(round(n ** (1.0 / 3.0), 9))))


def panel_scales(
    X,
    tau_hats,
    kind: str = "star",
    bandwidth: int | None = None,
    weight: str = "plain",
    b_tau: float = 0.8,
    floor_frac: float = 0.5,
) -> tuple[np.ndarray, list]:
    """Per-coordinate standard-deviation estimates for detection.

    kind 'plain' uses the full-series windowed estimate; the split kinds
    estimate the two ends around tau_hats[h] separately. A subsample that
    is too short for the bandwidth, or whose windowed estimate is not
    positive, falls back to the lag-0 variance of the full series; the
    selected variance is floored at floor_frac times that lag-0 variance.
    Returns (sigmas, warnings).
    """
    panel = as_panel(X)
    if kind not in VARIANCE_KINDS:
        raise ConfigError("unknown variance kind %r" % kind)
    n, d = panel.n, panel.d
    if bandwidth is None:
        bandwidth = detection_bandwidth(n)
    config = LrvConfig(bandwidth=bandwidth, weight=weight)
    lag0 = panel.values.var(axis=0)
    sigmas = np.empty(d)
    notes = []
    for h in range(d):
        x = panel.column(h)
        if lag0[h] <= 0:
            raise DegenerateVariance(
                "coordinate %d is constant" % h, coordinate=h
            )
        if kind == "plain":
            var = plain_lrv_raw(x, config)
            if var <= 0:
                var = lag0[h]
                notes.append("coordinate %d: nonpositive estimate, lag-0 fallback" % h)
        else:
            tau = float(tau_hats[h])
            m_minus, m_plus = split_sample_sizes(n, tau, b_tau)
            var_minus, var_plus = None, None
            if m_minus > bandwidth + 1:
                var_minus = plain_lrv_raw(x[:m_minus], config)
            if m_plus > bandwidth + 1:
                var_plus = plain_lrv_raw(x[n - m_plus :], config)
            if var_minus is None or var_minus <= 0:
                var_minus = lag0[h]
                notes.append("coordinate %d: front subsample fallback" % h)
            if var_plus is None or var_plus <= 0:
                var_plus = lag0[h]
                notes.append("coordinate %d: back subsample fallback" % h)
            bundle = combine_split(var_minus, var_plus, tau, m_minus, m_plus, b_tau)
            var = bundle.by_kind(kind) ** 2
        sigmas[h] = np.sqrt(max(var, floor_frac * lag0[h]))
    return sigmas, notes


@dataclass(frozen=True)
class DetectionReport:
    """Per-coordinate statistics and verdicts plus the run provenance."""

    statistics: np.ndarray
    unstable: np.ndarray  # boolean mask
    tau_hats: np.ndarray
    sigmas: np.ndarray
    threshold: Threshold
    variance: str
    trim: float
    warnings: tuple = ()
    config: dict = field(default_factory=dict)
    labels: tuple | None = None

    @property
    def unstable_set(self) -> np.ndarray:
        return np.where(self.unstable)[0]

    def to_dict(self) -> dict:
        coords = []
        for h in range(self.statistics.shape[0]):
            entry = {
                "coordinate": int(h),
                "statistic": float(self.statistics[h]),
                "verdict": "unstable" if self.unstable[h] else "stable",
                "sigma_hat": float(self.sigmas[h]),
            }
            if self.unstable[h]:
                entry["tau_hat"] = float(self.tau_hats[h])
            if self.labels is not None:
                entry["label"] = self.labels[h]
            coords.append(entry)
        return {
            "schema": 1,
            "threshold": json.loads(self.threshold.to_json()),
            "variance": self.variance,
            "trim": self.trim,
            "n_unstable": int(self.unstable.sum()),
            "warnings": list(self.warnings),
            "config": self.config,
            "coordinates": coords,
        }

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent, sort_keys=True)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("coordinate,statistic,verdict,tau_hat,sigma_hat\n")
        for h in range(self.statistics.shape[0]):
            tau = "%.10g" % self.tau_hats[h] if self.unstable[h] else ""
            buf.write(
                "%d,%.10g,%s,%s,%.10g\n"
                % (
                    h,
                    self.statistics[h],
                    "unstable" if self.unstable[h] else "stable",
                    tau,
                    self.sigmas[h],
                )
            )
        return buf.getvalue()


class UniformChangeDetector(BaseEstimator):
    """Detects level shifts simultaneously across panel coordinates.

    Each coordinate is screened by a self-normalized CUSUM statistic; a
    simultaneous critical value partitions the coordinates into stable
    and unstable sets, and every unstable coordinate carries an estimated
    change time.

    Parameters
    ----------
    alpha : joint significance level.
    method : how the critical value is calibrated; one of 'asymptotic',
        'parametric-a', 'parametric-b', 'block-i', 'block-ii',
        'block-iii'.
    variance : which scale estimate normalizes the statistic; 'plain' or
        one of the change-robust split kinds.
    mc_replicates : Monte Carlo size for simulated critical values.
    bandwidth : variance bandwidth; None selects ceil(n^{1/3}).
    b_tau : fraction of each split subsample retained.
    trim : trimmed fraction for change-time estimation.
    boot_trim : trimmed fraction inside bootstrap replicates.
    blocks_L : block count for the block-bootstrap methods.
    weight : 'plain' or 'bartlett' variance weights.
    floor_frac : lower floor for the variance, as a fraction of the lag-0
        variance.
    conservative : apply the level substitution 1 - exp(-alpha).
    seed : seed for simulated critical values.
    """

    def __init__(
        self,
        alpha: float = 0.05,
        method: str = "parametric-b",
        variance: str = "star",
        mc_replicates: int = 10**5,
        bandwidth: int | None = None,
        b_tau: float = 0.8,
        trim: float = 0.05,
        boot_trim: float = 0.0,
        blocks_L: int = 25,
        weight: str = "plain",
        floor_frac: float = 0.5,
        conservative: bool = False,
        seed: int = 0,
    ):
        self.alpha = alpha
        self.method = method
        self.variance = variance
        self.mc_replicates = mc_replicates
        self.bandwidth = bandwidth
        self.b_tau = b_tau
        self.trim = trim
        self.boot_trim = boot_trim
        self.blocks_L = blocks_L
        self.weight = weight
        self.floor_frac = floor_frac
        self.conservative = conservative
        self.seed = seed

    def _validate(self):
        if self.method not in THRESHOLD_METHODS:
            raise ConfigError("unknown threshold method %r" % self.method)
        if self.variance not in VARIANCE_KINDS:
            raise ConfigError("unknown variance kind %r" % self.variance)
        if not 0 < self.alpha < 1:
            raise ConfigError("alpha must lie in (0, 1)")

    def _threshold(self, panel) -> Threshold:
        if self.method == "asymptotic":
            return asymptotic_threshold(panel.d, self.alpha, self.conservative)
        if self.method in ("parametric-a", "parametric-b"):
            return parametric_quantile(
                panel.n,
                panel.d,
                self.alpha,
                M=self.mc_replicates,
                method=self.method[-1],
                seed=self.seed,
                conservative=self.conservative,
            )
        algorithm = {"block-i": 1, "block-ii": 2, "block-iii": 3}[self.method]
        draws = run_bootstrap(
            panel,
            algorithm=algorithm,
            L=self.blocks_L,
            trim=self.boot_trim,
            M=self.mc_replicates,
            seed=self.seed,
        )
        alpha = (
            1.0 - np.exp(-self.alpha) if self.conservative else self.alpha
        )
        return bootstrap_quantile(draws, alpha)

    def fit(self, X, y=None):
        """Compute statistics, calibrate the threshold and partition the
        coordinates. Returns self; results live in report_."""
        self._validate()
        panel = as_panel(X)
        tau_hats, max_dev = estimate_change_times(panel, trim=self.trim)
        sigmas, notes = panel_scales(
            panel,
            tau_hats,
            kind=self.variance,
            bandwidth=self.bandwidth,
            weight=self.weight,
            b_tau=self.b_tau,
            floor_frac=self.floor_frac,
        )
        stats = max_dev / sigmas
        threshold = self._threshold(panel)
        self.report_ = DetectionReport(
            statistics=stats,
            unstable=stats > threshold.value,
            tau_hats=tau_hats,
            sigmas=sigmas,
            threshold=threshold,
            variance=self.variance,
            trim=self.trim,
            warnings=tuple(notes),
            config=self.get_params(),
            labels=panel.labels,
        )
        self.statistics_ = stats
        self.threshold_ = threshold
        self.tau_hats_ = tau_hats
        self.n_features_in_ = panel.d
        return self

    def predict(self, X=None) -> np.ndarray:
        """Boolean unstable mask; refits when a new panel is given."""
        if X is not None:
            self.fit(X)
        if not hasattr(self, "report_"):
            raise ConfigError("call fit before predict")
        return self.report_.unstable.copy()
