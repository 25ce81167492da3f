"""Function estimates from a type, exact oracles over raw data, and NMSE."""
from __future__ import annotations

import enum

import numpy as np

from .robust import median_from_type


class AggregationFn(str, enum.Enum):
    ARITHMETIC_MEAN = "arithmetic_mean"
    GEOMETRIC_MEAN = "geometric_mean"
    MIN = "min"
    MAX = "max"
    MEDIAN = "median"


def _positive_mass(r):
    p = np.clip(np.asarray(r, dtype=float), 0.0, None)
    total = p.sum(axis=-1)
    if np.any(total <= 0):
        raise ValueError("type has no retained positive mass")
    return p, total


def psi(r, fn, noise_floor: float = 0.0):
    """Estimate ``fn`` of the data from a (possibly unnormalised) type.

    Mean-type estimators divide by the retained positive mass, so the result
    does not depend on the overall scale of ``r``. Min/Max return the
    extreme bin whose entry exceeds ``noise_floor``. Mean estimators and the
    median accept a stack of types along leading axes.
    """
    fn = AggregationFn(fn)
    r = np.asarray(r, dtype=float)
    ell = np.arange(1, r.shape[-1] + 1)
    if fn is AggregationFn.ARITHMETIC_MEAN:
        p, total = _positive_mass(r)
        out = (p @ ell) / total
    elif fn is AggregationFn.GEOMETRIC_MEAN:
        p, total = _positive_mass(r)
        out = np.exp((p @ np.log(ell)) / total)
    elif fn is AggregationFn.MEDIAN:
        return median_from_type(r)
    else:
        if r.ndim != 1:
            raise ValueError("min/max detection works on a single type")
        hits = np.flatnonzero(r > noise_floor)
        if hits.size == 0:
            raise ValueError("no resource above the noise floor")
        return int(hits[0] + 1) if fn is AggregationFn.MIN else int(hits[-1] + 1)
    return float(out) if np.ndim(out) == 0 else out


def oracle(s, fn) -> float:
    """Exact ``fn`` over the legitimate measurements (attackers excluded)."""
    fn = AggregationFn(fn)
    s = np.asarray(s)
    if s.size == 0:
        raise ValueError("empty measurement vector")
    if fn is AggregationFn.ARITHMETIC_MEAN:
        return float(np.mean(s))
    if fn is AggregationFn.GEOMETRIC_MEAN:
        return float(np.exp(np.mean(np.log(s))))
    if fn is AggregationFn.MIN:
        return float(np.min(s))
    if fn is AggregationFn.MAX:
        return float(np.max(s))
    return float(np.sort(s)[(s.size - 1) // 2])


def nmse(truth: float, estimate: float) -> float:
    if truth == 0:
        raise ValueError("NMSE undefined for a zero ground truth")
    return float((truth - estimate) ** 2 / truth**2)
