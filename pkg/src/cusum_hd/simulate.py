"""Synthetic panel generators, change injection and evaluation metrics.

The workhorse model is a spatially dependent ARMA panel: each coordinate
is an ARMA(2, 2) filter driven by a moving average across neighbouring
innovation columns, optionally plus a common Gaussian factor. Changes are
injected as level shifts on a fixed grid of change times, and detection
output is scored by time-quintile classification accuracy and the
coordinatewise false-alarm rate.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateModel, InvalidPlan, UnstableModel
from .panel import Panel, as_panel

# Spatial moving-average weights: a unit own-column weight with cubically
# decaying neighbour weights. The idiosyncratic innovation scale below is
# calibrated so that level shifts on the standard delta grid give the
# documented detection-power profiles.
SPATIAL_MA_ORDER = 100
IDIO_SCALE = 0.37
AR_COEFFS = (0.2, -0.3)
MA_COEFFS = (0.1, 0.2)
DEFAULT_BURN_IN = 500

CHANGE_TIME_GRID = (0.1, 0.3, 0.5, 0.7, 0.9)
PER_QUINTILE = {100: 10, 250: 15}


def _spatial_weights() -> np.ndarray:
    w = np.empty(SPATIAL_MA_ORDER)
    w[0] = 1.0
    i = np.arange(1, SPATIAL_MA_ORDER, dtype=float)
    w[1:] = 0.1 * i**-3.0
    return w


def spatial_ma_panel(
    n: int, d: int, seed: int, coeffs=None, innovation_sd: float = 1.0
) -> Panel:
    """Panel whose row k, column h is sum_i coeffs[i] * eps[k, h - i].

    Innovation columns are extended on the left so no wraparound occurs;
    coordinates at least len(coeffs) apart are exactly independent.
    """
    coeffs = _spatial_weights() if coeffs is None else np.asarray(coeffs, dtype=float)
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    q = coeffs.shape[0]
    eps = innovation_sd * rng.standard_normal((n, d + q - 1))
    windows = np.lib.stride_tricks.sliding_window_view(eps, q, axis=1)
    return Panel(values=windows @ coeffs[::-1].copy())


def _recursive_panel(
    n: int, d: int, seed: int, factor_loading: float, idio_scale: float, burn_in: int
) -> np.ndarray:
    weights = _spatial_weights()
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    total = n + burn_in
    eps = rng.standard_normal((total, d + SPATIAL_MA_ORDER - 1))
    windows = np.lib.stride_tricks.sliding_window_view(eps, SPATIAL_MA_ORDER, axis=1)
    Y = windows @ weights[::-1].copy()
    F = rng.standard_normal(total)
    a1, a2 = AR_COEFFS
    t0, t1 = MA_COEFFS
    X = np.zeros((total, d))
    for k in range(total):
        x1 = X[k - 1] if k >= 1 else 0.0
        x2 = X[k - 2] if k >= 2 else 0.0
        y1 = Y[k - 1] if k >= 1 else 0.0
        X[k] = factor_loading * F[k] + a1 * x1 + a2 * x2 + idio_scale * (
            t0 * Y[k] + t1 * y1
        )
    return X[burn_in:]


def arma_panel(
    n: int,
    d: int,
    seed: int,
    idio_scale: float = IDIO_SCALE,
    burn_in: int = DEFAULT_BURN_IN,
) -> Panel:
    """Spatially dependent ARMA(2, 2) panel, the null model of the
    simulation study."""
    return Panel(values=_recursive_panel(n, d, seed, 0.0, idio_scale, burn_in))


def factor_panel(
    n: int,
    d: int,
    seed: int,
    factor_loading: float,
    idio_scale: float = IDIO_SCALE,
    burn_in: int = DEFAULT_BURN_IN,
) -> Panel:
    """ARMA panel plus a common factor shared by all coordinates.

    With factor_loading = 0 this reproduces arma_panel bit for bit.
    """
    if factor_loading < 0:
        raise UnstableModel("factor loading must be nonnegative")
    return Panel(
        values=_recursive_panel(n, d, seed, factor_loading, idio_scale, burn_in)
    )


def garch_panel(
    n: int,
    d: int,
    seed: int,
    eta: float = 0.1,
    alpha_coeffs=(0.2,),
    beta_coeffs=(0.3,),
    burn_in: int = DEFAULT_BURN_IN,
) -> Panel:
    """Panel of independent GARCH coordinates with Gaussian innovations.

    X[k] = eps[k] * s[k], s2[k] = eta + sum_i alpha_i s2[k-i]
    + sum_i beta_i X[k-i]^2; requires sum(alpha) + sum(beta) < 1.
    """
    alpha = np.asarray(alpha_coeffs, dtype=float)
    beta = np.asarray(beta_coeffs, dtype=float)
    persistence = alpha.sum() + beta.sum()
    if persistence >= 1.0:
        raise UnstableModel(
            "alpha and beta coefficients sum to %.3f >= 1" % persistence
        )
    if eta <= 0:
        raise UnstableModel("eta must be positive")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    total = n + burn_in
    p, q = alpha.shape[0], beta.shape[0]
    lag = max(p, q, 1)
    s2 = np.full((total + lag, d), eta / (1.0 - persistence))
    X = np.zeros((total + lag, d))
    eps = rng.standard_normal((total, d))
    for k in range(lag, total + lag):
        s2[k] = eta
        for i in range(p):
            s2[k] += alpha[i] * s2[k - 1 - i]
        for i in range(q):
            s2[k] += beta[i] * X[k - 1 - i] ** 2
        X[k] = eps[k - lag] * np.sqrt(s2[k])
    return Panel(values=X[lag + burn_in :])


def linear_matrix_panel(n: int, d: int, seed: int, weights) -> Panel:
    """Vector linear process X_k = sum_l R_l Z_{k-l} with i.i.d. standard
    Gaussian innovation vectors Z and given d x d weight matrices R_l."""
    mats = [np.asarray(R, dtype=float) for R in weights]
    if not mats or all(np.all(R == 0) for R in mats):
        raise DegenerateModel("weight matrices carry no mass")
    for R in mats:
        if R.shape != (d, d):
            raise DegenerateModel("weight matrices must be d x d")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    lmax = len(mats) - 1
    Z = rng.standard_normal((n + lmax, d))
    X = np.zeros((n, d))
    for l, R in enumerate(mats):
        X += Z[lmax - l : lmax - l + n] @ R.T
    return Panel(values=X)


@dataclass(frozen=True)
class ChangePlan:
    """Map from affected coordinate to (change time, shift size)."""

    affected: dict = field(default_factory=dict)

    def __post_init__(self):
        for h, (tau, _delta) in self.affected.items():
            if h < 0:
                raise InvalidPlan("negative coordinate %d" % h)
            if not 0 < tau < 1:
                raise InvalidPlan("change time %r outside (0, 1)" % tau)

    @classmethod
    def from_triples(cls, triples) -> "ChangePlan":
        affected = {}
        for h, tau, delta in triples:
            if h in affected:
                raise InvalidPlan("duplicate coordinate %d" % h)
            affected[h] = (tau, delta)
        return cls(affected=affected)


def quintile_plan(d: int, delta: float, per_quintile: int | None = None) -> ChangePlan:
    """Standard evaluation plan: one group of coordinates per change time.

    The coordinate range splits into five consecutive groups; the first
    per_quintile coordinates of group i change at time (2 i + 1) / 10 by
    delta. Defaults: 10 coordinates per group at d = 100, 15 at d = 250,
    otherwise d // 10.
    """
    if per_quintile is None:
        per_quintile = PER_QUINTILE.get(d, max(1, d // 10))
    group = d // 5
    if per_quintile > group:
        raise InvalidPlan("per_quintile %d exceeds group size %d" % (per_quintile, group))
    affected = {}
    for i, tau in enumerate(CHANGE_TIME_GRID):
        for j in range(per_quintile):
            affected[i * group + j] = (tau, delta)
    return ChangePlan(affected=affected)


def inject_changes(X, plan: ChangePlan) -> tuple[Panel, dict]:
    """Add each planned level shift to X for times k > floor(tau * n).

    Returns the shifted panel and the ground truth {coordinate: tau}.
    """
    panel = as_panel(X)
    values = panel.values.copy()
    truth = {}
    for h, (tau, delta) in plan.affected.items():
        if h >= panel.d:
            raise InvalidPlan("coordinate %d outside panel with d=%d" % (h, panel.d))
        values[int(np.floor(tau * panel.n)) :, h] += delta
        truth[h] = tau
    return Panel(values=values, labels=panel.labels), truth


@dataclass(frozen=True)
class EvalMetrics:
    """Quintile detection rates (percent) and false-alarm rate (percent)."""

    r: tuple  # five reals, detection with correct time quintile
    ti_star: float
    n_affected: tuple  # denominator per quintile
    n_stable: int

    @staticmethod
    def quintile(tau: float) -> int:
        """0-based quintile index of a change time, membership
        [(i - 1) / 5, i / 5)."""
        return min(int(tau * 5.0), 4)


def evaluate_detection(unstable, tau_hats, truth: dict, d: int) -> EvalMetrics:
    """Score detected coordinates against planted changes.

    unstable is an iterable of detected coordinates, tau_hats the
    estimated change times (indexable by coordinate). A planted change
    counts for its quintile rate only when detected with the estimated
    time in the true quintile; a detection on a stable coordinate counts
    toward the false-alarm rate.
    """
    hits = np.zeros(5)
    denom = np.zeros(5)
    for tau in truth.values():
        denom[EvalMetrics.quintile(tau)] += 1
    false_alarms = 0
    for h in unstable:
        if h in truth:
            true_q = EvalMetrics.quintile(truth[h])
            if EvalMetrics.quintile(float(tau_hats[h])) == true_q:
                hits[true_q] += 1
        else:
            false_alarms += 1
    n_stable = d - len(truth)
    r = tuple(
        100.0 * hits[i] / denom[i] if denom[i] else 0.0 for i in range(5)
    )
    ti = 100.0 * false_alarms / n_stable if n_stable else 0.0
    return EvalMetrics(
        r=r,
        ti_star=ti,
        n_affected=tuple(int(x) for x in denom),
        n_stable=n_stable,
    )
