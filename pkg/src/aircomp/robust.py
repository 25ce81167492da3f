"""Robust type correction: noise threshold, percentile truncation and local
outlier compensation, plus the median read off a type.

All steps act on the last axis, so a stack of types (one per model parameter,
say) is corrected in one call.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np

from .tbma import NoisyType, type_noise_std


@dataclass(frozen=True)
class RobustParams:
    """Thresholds for :func:`robust_correct`.

    ``theta1=None`` means "derive from the noise level": three type-noise
    standard deviations by default, or ``3 * sigma2`` literally when
    ``theta1_rule="sigma2"``. ``theta2`` is in devices (count scale).
    """

    theta1: float | None = None
    theta2: float = 5.0
    p_lo: float = 0.01
    p_hi: float = 0.99
    theta1_rule: str = "type_std"

    def __post_init__(self):
        if self.theta1 is not None and self.theta1 < 0:
            raise ValueError("theta1 must be >= 0")
        if self.theta2 < 0:
            raise ValueError("theta2 must be >= 0")
        if not 0 <= self.p_lo < self.p_hi <= 1:
            raise ValueError("need 0 <= p_lo < p_hi <= 1")
        if self.theta1_rule not in ("type_std", "sigma2"):
            raise ValueError(f"unknown theta1 rule {self.theta1_rule!r}")

    def resolve(self, sigma2: float, K: int) -> "RobustParams":
        if self.theta1 is not None:
            return self
        if self.theta1_rule == "sigma2":
            return replace(self, theta1=3.0 * sigma2)
        return replace(self, theta1=3.0 * type_noise_std(sigma2, K))


@dataclass(frozen=True)
class CorrectedType:
    r_hat: np.ndarray
    K: int


def threshold_noise(r, theta1: float) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    if theta1 < 0:
        raise ValueError("theta1 must be >= 0")
    return np.where(np.abs(r) >= theta1, r, 0.0)


def percentile_truncate(r, p_lo: float, p_hi: float) -> np.ndarray:
    """Zero the nonzero entries lying outside the [p_lo, p_hi] quantile band.

    Quantiles are taken over the nonzero entries only (linear interpolation);
    zeros pass through untouched.
    """
    if not 0 <= p_lo < p_hi <= 1:
        raise ValueError("need 0 <= p_lo < p_hi <= 1")
    r = np.asarray(r, dtype=float)
    nz = r != 0
    if not nz.any():
        return r.copy()
    vals = np.where(nz, r, np.nan)
    with warnings.catch_warnings():
        # rows with no nonzero entry give nan bounds and are left alone below
        warnings.simplefilter("ignore", RuntimeWarning)
        q_lo, q_hi = np.nanquantile(vals, [p_lo, p_hi], axis=-1, keepdims=True)
    outside = nz & ((r < q_lo) | (r > q_hi))
    return np.where(outside, 0.0, r)


def local_outlier_compensate(r, theta2: float, K: int) -> np.ndarray:
    """Replace entries that stand apart from all their neighbours.

    In count scale ``K * r``, entry l is replaced by the mean of its
    neighbours when it differs by more than ``theta2`` from each of them.
    Edge entries have a single neighbour, which serves as both test and
    replacement. Tests read the input only, so replacements do not cascade.
    """
    if theta2 < 0 or K < 1:
        raise ValueError("need theta2 >= 0 and K >= 1")
    r = np.asarray(r, dtype=float)
    if r.shape[-1] < 2:
        return r.copy()
    left = np.concatenate([r[..., 1:2], r[..., :-1]], axis=-1)
    right = np.concatenate([r[..., 1:], r[..., -2:-1]], axis=-1)
    c = K * r
    # slack keeps integer count gaps equal to theta2 from tripping on rounding
    tol = theta2 + 1e-9 * max(1.0, theta2)
    outlier = (np.abs(c - K * left) > tol) & (np.abs(c - K * right) > tol)
    return np.where(outlier, 0.5 * (left + right), r)


def robust_correct(t, params: RobustParams, sigma2: float | None = None,
                   K: int | None = None) -> CorrectedType:
    """Threshold, truncate, then compensate; no renormalisation.

    ``t`` is a :class:`NoisyType` or a raw array (then ``K`` is required).
    ``sigma2`` is only needed when ``params.theta1`` is left to be derived.
    """
    if isinstance(t, NoisyType):
        r, K = t.r, t.K
    else:
        if K is None:
            raise ValueError("K is required for a raw type vector")
        r = np.asarray(t, dtype=float)
    if params.theta1 is None:
        if sigma2 is None:
            raise ValueError("theta1 unset: pass sigma2 so it can be derived")
        params = params.resolve(sigma2, K)
    out = threshold_noise(r, params.theta1)
    out = percentile_truncate(out, params.p_lo, params.p_hi)
    out = local_outlier_compensate(out, params.theta2, K)
    return CorrectedType(r_hat=out, K=K)


def median_from_type(r):
    """Lower median of the distribution described by ``r`` (1-based bin).

    Negative entries are clamped to zero first. Works row-wise on stacks.
    """
    p = np.clip(np.asarray(r, dtype=float), 0.0, None)
    total = p.sum(axis=-1, keepdims=True)
    if np.any(total <= 0):
        raise ValueError("type has no positive mass")
    cum = np.cumsum(p, axis=-1)
    # relative slack absorbs rounding when the cumulative mass hits 1/2 exactly
    idx = np.argmax(cum >= 0.5 * total * (1 - 1e-12), axis=-1) + 1
    return int(idx) if idx.ndim == 0 else idx
