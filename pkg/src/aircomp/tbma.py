"""Type formation for TBMA at symbol level and at waveform level.

The receiver normalises by the number of legitimate devices K; attackers add
mass on top of that, so a corrupted noiseless type sums to (K + M) / K.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .attack import AttackSpec, Strategy, resolve_target
from .channel import ChannelGains, complex_noise, csi_invert
from .core import Scheme, check_measurements
from .waveform import matched_filter_bank, template_bank


@dataclass(frozen=True)
class NoisyType:
    r: np.ndarray
    K: int

    @property
    def L(self) -> int:
        return self.r.shape[-1]

    @property
    def mass(self) -> float:
        return float(np.sum(self.r))


def type_noise_std(sigma2: float, K: int) -> float:
    """Std of the real noise on each type entry, ``sqrt(sigma2 / 2) / K``."""
    return float(np.sqrt(sigma2 / 2.0) / K)


def bin_counts(s, L: int) -> np.ndarray:
    s = check_measurements(s, L)
    return np.bincount(s - 1, minlength=L).astype(float)


def noisy_type_from_counts(counts, K: int, sigma2: float, rng=None) -> np.ndarray:
    """``counts / K`` plus real type noise, for one type or a stack of them."""
    r = np.asarray(counts, dtype=float) / K
    if sigma2 > 0:
        rng = np.random.default_rng(rng)
        r = r + type_noise_std(sigma2, K) * rng.standard_normal(r.shape)
    return r


def form_type_symbol(s, L: int, sigma2: float, rng=None) -> NoisyType:
    s = check_measurements(s, L)
    return NoisyType(r=noisy_type_from_counts(bin_counts(s, L), s.size, sigma2, rng), K=s.size)


def form_type_waveform(s, gains: ChannelGains | None, L: int, N: int, sigma2: float,
                       scheme=Scheme.PPM, rng=None, attack: AttackSpec | None = None) -> NoisyType:
    """Full chain: CSI-inverted synthesis, superposition, AWGN, matched filter.

    Attackers (if any) transmit the template of their target resource with
    unit effective gain, like legitimate devices.
    """
    s = check_measurements(s, L)
    K = s.size
    bank = template_bank(scheme, L, N)
    if gains is None:
        eff = np.ones(K, dtype=complex)
    else:
        h = gains.h[np.arange(K), s - 1]
        eff = h * csi_invert(h)
    y = eff @ bank[s - 1]
    if attack is not None and attack.M > 0:
        y = y + attack.M * bank[resolve_target(attack, s, L) - 1]
    if sigma2 > 0:
        rng = np.random.default_rng(rng)
        y = y + complex_noise(N, sigma2, rng)
    r = matched_filter_bank(y, scheme, L).real / K
    return NoisyType(r=r, K=K)


def corrupt_type(t: NoisyType, attack: AttackSpec, s=None) -> NoisyType:
    """Add ``M / K`` to the attacked entry.

    ``s`` (the legitimate data) is only needed for MaxDisplace targeting.
    """
    if attack.M == 0:
        return t
    if attack.strategy is not Strategy.FIXED and s is None:
        raise ValueError("MaxDisplace targeting needs the legitimate data")
    target = resolve_target(attack, s, t.L)
    r = t.r.copy()
    r[target - 1] += attack.M / t.K
    return NoisyType(r=r, K=t.K)
