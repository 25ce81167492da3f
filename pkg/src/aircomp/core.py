"""Shared domain types and the value <-> bin quantizer."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np


class Scheme(str, enum.Enum):
    FSK = "fsk"
    PPM = "ppm"


@dataclass(frozen=True)
class SystemConfig:
    """Network size and air-interface parameters.

    K legitimate devices share L orthogonal resources; each waveform is N
    samples long.
    """

    K: int
    L: int
    snr_db: float = 30.0
    scheme: Scheme = Scheme.PPM
    N: int | None = None

    def __post_init__(self):
        if self.K < 1:
            raise ValueError(f"K must be >= 1, got {self.K}")
        if self.L < 2:
            raise ValueError(f"L must be >= 2, got {self.L}")
        object.__setattr__(self, "scheme", Scheme(self.scheme))
        if self.N is None:
            object.__setattr__(self, "N", self.L)
        if self.N < self.L:
            raise ValueError(f"N={self.N} must be >= L={self.L}")


def check_measurements(s, L: int) -> np.ndarray:
    """Validate a measurement vector and return it as an int array."""
    s = np.asarray(s)
    if s.ndim != 1 or s.size == 0:
        raise ValueError("measurement vector must be a non-empty 1-d sequence")
    if not np.issubdtype(s.dtype, np.integer):
        if not np.all(np.equal(np.mod(s, 1), 0)):
            raise ValueError("measurements must be integer bin indices")
        s = s.astype(np.int64)
    if s.min() < 1 or s.max() > L:
        raise ValueError(f"measurements must lie in [1, {L}]")
    return s


def _check_range(lo, hi, L):
    if not (math.isfinite(lo) and math.isfinite(hi)) or lo >= hi:
        raise ValueError(f"need finite lo < hi, got lo={lo}, hi={hi}")
    if L < 2:
        raise ValueError(f"L must be >= 2, got {L}")


def quantize(value, lo: float, hi: float, L: int):
    """Map ``value`` to a bin index in ``1..L`` by uniform binning of [lo, hi].

    Bins are ``[edge_i, edge_{i+1})`` with the last bin closed on the right,
    so a value on an internal edge goes to the upper bin. Out-of-range values
    are clipped. Accepts scalars or arrays.
    """
    _check_range(lo, hi, L)
    x = np.asarray(value, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("cannot quantize non-finite values")
    x = np.clip(x, lo, hi)
    idx = np.floor((x - lo) * (L / (hi - lo))).astype(np.int64) + 1
    idx = np.minimum(idx, L)
    if idx.ndim == 0:
        return int(idx)
    return idx


def bin_center(m, lo: float, hi: float, L: int):
    """Center of (possibly fractional) bin index ``m``; linear in ``m``."""
    width = (hi - lo) / L
    return lo + (np.asarray(m, dtype=float) - 0.5) * width


def dequantize(m, lo: float, hi: float, L: int):
    """Return the center of bin ``m`` (scalar or integer array)."""
    _check_range(lo, hi, L)
    arr = np.asarray(m)
    if np.any(np.mod(arr, 1) != 0) or np.any(arr < 1) or np.any(arr > L):
        raise ValueError(f"bin index must be an integer in [1, {L}]")
    c = bin_center(arr, lo, hi, L)
    return float(c) if c.ndim == 0 else c
