import numpy as np
import pytest

from aircomp.attack import AttackSpec
from aircomp.da import NOMOGRAPHIC, da_aggregate, da_aggregate_many, transmit_energy


def test_clean_functions():
    assert da_aggregate([1, 2, 3], "arithmetic_mean") == pytest.approx(2.0, abs=1e-12)
    assert da_aggregate([2, 8], "geometric_mean") == pytest.approx(4.0, abs=1e-12)


def test_attack_normalised_by_K():
    est = da_aggregate([1, 2, 3], "arithmetic_mean", AttackSpec.fixed(2, 10))
    assert est == pytest.approx(26 / 3)


def test_linear_displacement(rng):
    L = 64
    s = rng.integers(10, 30, 200)
    for M in (0, 10, 40, 90):
        attack = AttackSpec(M=M)
        est = da_aggregate(s, "arithmetic_mean", attack, 0.0, L=L)
        assert est - s.mean() == pytest.approx(M / s.size * L, abs=1e-9)


def test_nomographic_identity(rng):
    s = rng.integers(1, 50, 30)
    for fn, pair in NOMOGRAPHIC.items():
        est = pair.post(np.mean(pair.pre(s)))
        assert est == pytest.approx(da_aggregate(s, fn), rel=1e-12)


def test_noise_variance(rng):
    s = np.full(10, 5)
    est = np.array([da_aggregate(s, "arithmetic_mean", None, 2.0, rng) for _ in range(20_000)])
    # observation noise of variance sigma2 / 2, divided by K
    assert np.var(est) == pytest.approx(1.0 / 100, rel=0.05)


def test_unsupported():
    with pytest.raises(ValueError):
        da_aggregate([1, 2], "median")
    with pytest.raises(ValueError):
        da_aggregate([1, 2], "arithmetic_mean", AttackSpec(M=1))  # needs L


def test_many_rows_match_scalar(rng):
    S = rng.integers(1, 9, (5, 20))
    targets = np.array([1, 8, 8, 1, 8])
    many = da_aggregate_many(S, 3, targets, 0.0)
    single = [da_aggregate(row, "arithmetic_mean", AttackSpec.fixed(3, t)) for row, t in zip(S, targets)]
    assert np.allclose(many, single)


def test_transmit_energy():
    s = np.array([1, 10, 100])
    assert transmit_energy(s, "geometric_mean", "tbma") == 3
    assert transmit_energy(s, "geometric_mean") == pytest.approx(np.sum(np.log(s) ** 2))
    assert transmit_energy(s, "arithmetic_mean") > transmit_energy(s, "arithmetic_mean", "tbma")
