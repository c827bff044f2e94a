"""Partial-sum profiles, self-normalized CUSUM statistics and change-time
estimation.

For a series X_1..X_n with prefix sums S_k, the profile is

    D_k = n^{-1/2} * |S_k - (k/n) * S_n|,

the coordinate statistic is max_k D_k / sigma for a scale estimate sigma,
and the change time is the smallest maximizer of |S_k - (k/n) S_n| over a
trimmed index range.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateVariance, InvalidTrim
from .panel import as_panel


@dataclass(frozen=True)
class CusumProfile:
    coordinate: int
    D: np.ndarray
    argmax_k: int  # 1-based time index, smallest maximizer
    max_value: float


@dataclass(frozen=True)
class ChangeTimeEstimate:
    tau_hat: float
    trim: float
    k_star: int  # 1-based time index


def _deviations(values: np.ndarray) -> np.ndarray:
    """|S_k - (k/n) S_n| for every k and coordinate, shape (n, d)."""
    n = values.shape[0]
    S = np.cumsum(values, axis=0)
    k = np.arange(1, n + 1)[:, None]
    return np.abs(S - (k / n) * S[-1])


def cusum_profile(X, h: int = 0) -> CusumProfile:
    """Profile D_1..D_n of coordinate h with its smallest maximizer."""
    panel = as_panel(X)
    x = panel.column(h)
    n = panel.n
    dev = _deviations(x[:, None])[:, 0]
    D = dev / np.sqrt(n)
    k0 = int(np.argmax(D))  # argmax takes the first maximum
    return CusumProfile(coordinate=h, D=D, argmax_k=k0 + 1, max_value=float(D[k0]))


def cusum_stat(profile: CusumProfile, sigma: float) -> float:
    """Self-normalized statistic max_k D_k / sigma."""
    if sigma <= 0:
        raise DegenerateVariance("sigma must be positive, got %r" % sigma)
    return profile.max_value / sigma


def panel_max_stat(X, sigmas) -> dict:
    """Maximum of the self-normalized statistics across coordinates.

    Returns {'T', 'argmax_h', 'per_coordinate'}; ties break toward the
    smallest coordinate index.
    """
    panel = as_panel(X)
    sigmas = np.asarray(sigmas, dtype=float)
    if sigmas.shape != (panel.d,):
        raise DegenerateVariance("need one positive sigma per coordinate")
    bad = np.where(sigmas <= 0)[0]
    if bad.size:
        raise DegenerateVariance(
            "nonpositive sigma for coordinate %d" % bad[0], coordinate=int(bad[0])
        )
    dev = _deviations(panel.values)
    per = dev.max(axis=0) / (np.sqrt(panel.n) * sigmas)
    h0 = int(np.argmax(per))
    return {"T": float(per[h0]), "argmax_h": h0, "per_coordinate": per}


def _trimmed_k_range(n: int, trim: float) -> tuple[int, int]:
    """Smallest and largest admissible 1-based k with trim < k/n < 1 - trim.

    Exact endpoints are excluded. With trim = 0 the range is 1..n-1; the
    final index is never informative because D_n = 0.
    """
    if not 0 <= trim <= 0.5:
        raise InvalidTrim("trim must lie in [0, 1/2], got %r" % trim)
    lo = int(np.floor(trim * n)) + 1
    hi = int(np.ceil((1 - trim) * n)) - 1
    if trim == 0:
        lo, hi = 1, n - 1
    if lo > hi:
        raise InvalidTrim("trim %r leaves no admissible index for n=%d" % (trim, n))
    return lo, hi


def estimate_change_time(X, h: int = 0, trim: float = 0.05) -> ChangeTimeEstimate:
    """Change-time estimate for coordinate h.

    k_star is the smallest k in the trimmed range maximizing
    |S_k - (k/n) S_n|; tau_hat = k_star / n. No scale normalization is
    applied, so the estimate is invariant under affine maps of the series.
    """
    panel = as_panel(X)
    n = panel.n
    lo, hi = _trimmed_k_range(n, trim)
    dev = _deviations(panel.column(h)[:, None])[:, 0]
    sub = dev[lo - 1 : hi]
    k_star = lo + int(np.argmax(sub))
    return ChangeTimeEstimate(tau_hat=k_star / n, trim=trim, k_star=k_star)


def estimate_change_times(X, trim: float = 0.05) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized change times and unnormalized maxima for every coordinate.

    Returns (tau_hat, M) where M[h] = max_k D_{k,h} over all k (untrimmed),
    the numerator of the coordinate statistic.
    """
    panel = as_panel(X)
    n = panel.n
    lo, hi = _trimmed_k_range(n, trim)
    dev = _deviations(panel.values)
    sub = dev[lo - 1 : hi]
    tau = (lo + np.argmax(sub, axis=0)) / n
    return tau, dev.max(axis=0) / np.sqrt(n)
