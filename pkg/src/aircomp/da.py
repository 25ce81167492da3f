"""Direct aggregation (amplitude-domain AirComp) baseline.

Each device sends g(s_k) as the amplitude of a single shared resource; the
receiver divides the sum by K and applies the post-map. Simulated at symbol
level with the same per-resource noise convention as TBMA (real noise of
variance sigma2 / 2 after the matched filter).
"""
from __future__ import annotations

from typing import Callable, NamedTuple

import numpy as np

from .aggregate import AggregationFn
from .attack import AttackSpec, Strategy, resolve_target


class NomographicPair(NamedTuple):
    pre: Callable
    post: Callable


NOMOGRAPHIC = {
    AggregationFn.ARITHMETIC_MEAN: NomographicPair(lambda x: np.asarray(x, dtype=float),
                                                   lambda y: y),
    AggregationFn.GEOMETRIC_MEAN: NomographicPair(np.log, np.exp),
}


def _pair(fn) -> NomographicPair:
    fn = AggregationFn(fn)
    if fn not in NOMOGRAPHIC:
        raise ValueError(f"DA supports only {[f.value for f in NOMOGRAPHIC]}, got {fn.value}")
    return NOMOGRAPHIC[fn]


def da_aggregate(s, fn, attack: AttackSpec | None = None, sigma2: float = 0.0,
                 rng=None, L: int | None = None) -> float:
    """Noisy, possibly attacked DA estimate of ``fn`` over ``s``.

    ``L`` is needed only to resolve a MaxDisplace target.
    """
    pair = _pair(fn)
    s = np.asarray(s)
    if s.size == 0:
        raise ValueError("empty measurement vector")
    K = s.size
    obs = float(np.sum(pair.pre(s)))
    if attack is not None and attack.M > 0:
        if L is None and attack.strategy is not Strategy.FIXED:
            raise ValueError("MaxDisplace targeting needs the number of bins L")
        L = attack.target if L is None else L
        obs += attack.M * float(pair.pre(resolve_target(attack, s, L)))
    if sigma2 > 0:
        rng = np.random.default_rng(rng)
        obs += np.sqrt(sigma2 / 2.0) * rng.standard_normal()
    return float(pair.post(obs / K))


def da_aggregate_many(S, M: int, targets, sigma2: float, rng=None, fn=AggregationFn.ARITHMETIC_MEAN):
    """Row-wise DA over a (D, K) array: one independent DA channel per row."""
    pair = _pair(fn)
    S = np.asarray(S)
    K = S.shape[-1]
    obs = pair.pre(S).sum(axis=-1) + M * pair.pre(np.asarray(targets))
    if sigma2 > 0:
        rng = np.random.default_rng(rng)
        obs = obs + np.sqrt(sigma2 / 2.0) * rng.standard_normal(obs.shape)
    return pair.post(obs / K)


def transmit_energy(s, fn, method: str = "da") -> float:
    """Total transmit energy of one aggregation round.

    DA devices send amplitude g(s_k), so energy depends on the function;
    TBMA devices each send one unit-energy waveform whatever the function.
    """
    s = np.asarray(s)
    if method == "tbma":
        return float(s.size)
    return float(np.sum(np.abs(_pair(fn).pre(s)) ** 2))
