"""Channel gains, perfect-CSI inversion and AWGN.

SNR convention: every device transmits unit-amplitude symbols and the SNR is
the single-link ratio at the matched-filter input, so ``sigma2 = 10**(-snr/10)``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

SINGULAR_GAIN = 1e-12


class ChannelModel(str, enum.Enum):
    IDENTITY = "identity"
    RAYLEIGH_FLAT = "rayleigh_flat"


@dataclass(frozen=True)
class ChannelGains:
    h: np.ndarray  # (K, L) complex
    model: ChannelModel

    def __post_init__(self):
        if not np.all(np.isfinite(self.h)):
            raise ValueError("channel gains must be finite")


@dataclass(frozen=True)
class NoiseSpec:
    sigma2: float

    def __post_init__(self):
        if self.sigma2 < 0:
            raise ValueError("sigma2 must be non-negative")


def draw_gains(K: int, L: int, model=ChannelModel.IDENTITY, rng=None) -> ChannelGains:
    """Draw a K x L gain matrix.

    ``RAYLEIGH_FLAT`` draws one CN(0, 1) gain per device and repeats it over
    all resources.
    """
    if K < 1 or L < 1:
        raise ValueError("K and L must be >= 1")
    model = ChannelModel(model)
    if model is ChannelModel.IDENTITY:
        h = np.ones((K, L), dtype=complex)
    else:
        rng = np.random.default_rng(rng)
        hk = (rng.standard_normal(K) + 1j * rng.standard_normal(K)) / np.sqrt(2)
        h = np.repeat(hk[:, None], L, axis=1)
    return ChannelGains(h=h, model=model)


def csi_invert(h):
    """Pre-equalizer ``conj(h) / |h|**2`` so that ``a * h == 1``."""
    h = np.asarray(h, dtype=complex)
    mag2 = np.abs(h) ** 2
    if np.any(np.abs(h) < SINGULAR_GAIN):
        raise ValueError("singular channel: |h| below 1e-12")
    a = np.conj(h) / mag2
    return complex(a) if a.ndim == 0 else a


def snr_to_sigma2(snr_db: float) -> float:
    return float(10.0 ** (-snr_db / 10.0))


def complex_noise(shape, sigma2: float, rng) -> np.ndarray:
    # Real parts are drawn first so that, for identity-like filter banks, the
    # real part matches a real draw of the same shape from the same stream.
    scale = np.sqrt(sigma2 / 2.0)
    re = rng.standard_normal(shape)
    im = rng.standard_normal(shape)
    return scale * (re + 1j * im)


def add_awgn(x, sigma2: float, rng=None) -> np.ndarray:
    """Add circularly-symmetric complex Gaussian noise of power ``sigma2``."""
    if sigma2 < 0:
        raise ValueError("sigma2 must be non-negative")
    x = np.asarray(x, dtype=complex)
    if sigma2 == 0:
        return x.copy()
    rng = np.random.default_rng(rng)
    return x + complex_noise(x.shape, sigma2, rng)
