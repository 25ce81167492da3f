"""Byzantine attack specification and target-resource selection."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np


class Strategy(str, enum.Enum):
    FIXED = "fixed"
    MAX_DISPLACE = "max_displace"


class DataStats(NamedTuple):
    min: float
    max: float
    mean: float


@dataclass(frozen=True)
class AttackSpec:
    """``M`` coordinated attackers all transmitting on one resource.

    With ``Strategy.FIXED`` the resource is ``target``; with
    ``Strategy.MAX_DISPLACE`` it is picked from the legitimate data.
    """

    M: int = 0
    strategy: Strategy = Strategy.MAX_DISPLACE
    target: int | None = None

    def __post_init__(self):
        if self.M < 0:
            raise ValueError("attacker count must be >= 0")
        object.__setattr__(self, "strategy", Strategy(self.strategy))
        if self.strategy is Strategy.FIXED and self.target is None:
            raise ValueError("FIXED strategy needs a target resource")

    @classmethod
    def fixed(cls, M: int, target: int) -> "AttackSpec":
        return cls(M=M, strategy=Strategy.FIXED, target=target)


NO_ATTACK = AttackSpec(M=0)


def data_stats(s) -> DataStats:
    s = np.asarray(s, dtype=float)
    return DataStats(float(s.min()), float(s.max()), float(s.mean()))


def choose_target(stats, L: int, attack: AttackSpec | None = None) -> int:
    """Resource the attackers pile onto.

    MaxDisplace returns whichever extreme bin (1 or L) is farther from the
    legitimate mean, with ties going to L.
    """
    if attack is not None and attack.strategy is Strategy.FIXED:
        if not 1 <= attack.target <= L:
            raise ValueError(f"target {attack.target} outside [1, {L}]")
        return int(attack.target)
    mean = stats.mean if isinstance(stats, DataStats) else float(stats)
    return L if (L - mean) >= (mean - 1) else 1


def max_displace_targets(means, L: int) -> np.ndarray:
    """Vectorised MaxDisplace over many independent means."""
    means = np.asarray(means, dtype=float)
    return np.where(L - means >= means - 1, L, 1)


def resolve_target(attack: AttackSpec, s, L: int) -> int:
    if attack.strategy is Strategy.FIXED:
        return choose_target(None, L, attack)
    return choose_target(data_stats(s), L, attack)
