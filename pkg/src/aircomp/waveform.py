"""Discrete-time TBMA waveforms and the matched-filter bank.

FSK puts resource ``l`` on frequency index ``l`` of an N-point DFT grid; PPM
puts it in the l-th of L disjoint slots of width N/L. Both banks are
orthonormal.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .core import Scheme


@dataclass(frozen=True)
class Waveform:
    samples: np.ndarray
    scheme: Scheme

    @property
    def energy(self) -> float:
        return float(np.sum(np.abs(self.samples) ** 2))


@lru_cache(maxsize=64)
def _bank(scheme: Scheme, L: int, N: int) -> np.ndarray:
    if L < 1 or N < L:
        raise ValueError(f"need 1 <= L <= N, got L={L}, N={N}")
    if scheme is Scheme.FSK:
        n = np.arange(N)
        ell = np.arange(1, L + 1)
        bank = np.exp(2j * np.pi * np.outer(ell, n) / N) / np.sqrt(N)
    else:
        if N % L:
            raise ValueError(f"PPM needs N divisible by L, got N={N}, L={L}")
        width = N // L
        bank = np.zeros((L, N), dtype=complex)
        for i in range(L):
            bank[i, i * width:(i + 1) * width] = 1.0 / np.sqrt(width)
    bank.setflags(write=False)
    return bank


def template_bank(scheme, L: int, N: int) -> np.ndarray:
    """Read-only (L, N) array of unit-energy reference waveforms."""
    return _bank(Scheme(scheme), int(L), int(N))


def synthesize(s: int, scheme, N: int, a: complex = 1.0, L: int | None = None) -> Waveform:
    """Waveform for measurement ``s`` with complex amplitude ``a``.

    ``L`` defaults to ``N``; it only changes the PPM slot width.
    """
    L = N if L is None else L
    if not 1 <= s <= L:
        raise ValueError(f"measurement {s} outside [1, {L}]")
    scheme = Scheme(scheme)
    return Waveform(samples=a * template_bank(scheme, L, N)[s - 1], scheme=scheme)


def matched_filter_bank(y, scheme, L: int) -> np.ndarray:
    """Correlate ``y`` (length N, or (..., N)) against all L templates."""
    y = np.asarray(y, dtype=complex)
    N = y.shape[-1]
    if N < L:
        raise ValueError(f"received length {N} shorter than L={L}")
    bank = template_bank(scheme, L, N)
    return y @ bank.conj().T
