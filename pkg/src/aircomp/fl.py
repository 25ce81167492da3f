"""Federated learning over TBMA with Byzantine devices, at toy scale.

A multinomial logistic regression is trained on a synthetic C-class task.
Every round each device runs a few epochs of full-batch gradient descent from
the global weights, quantizes each parameter to one of L bins and transmits
it; one type (or one DA channel) per parameter reaches the server.
"""
from __future__ import annotations

import csv
import enum
import hashlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .aggregate import AggregationFn, psi
from .attack import max_displace_targets
from .channel import snr_to_sigma2
from .core import bin_center, quantize
from .da import da_aggregate_many
from .robust import RobustParams, robust_correct

FL_COLUMNS = ["round", "method", "accuracy"]


class FlMethod(str, enum.Enum):
    DA = "da"
    TBMA_PLAIN = "tbma-plain"
    TBMA_ROBUST = "tbma-robust"


class Dataset(NamedTuple):
    X: np.ndarray
    y: np.ndarray
    n_classes: int


@dataclass(frozen=True)
class FlConfig:
    K: int = 50
    M: int = 3
    rounds: int = 30
    local_epochs: int = 5
    learning_rate: float = 0.5
    c: float = 5.0
    L: int = 40960
    snr_db: float | None = 30.0
    method: FlMethod = FlMethod.TBMA_ROBUST
    robust: RobustParams = field(default_factory=RobustParams)
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "method", FlMethod(self.method))
        if not 0 <= self.M < self.K:
            raise ValueError(f"need 0 <= M < K, got M={self.M}, K={self.K}")
        if self.c <= 0:
            raise ValueError("quantization range c must be > 0")
        if self.L < 2 or self.rounds < 0 or self.local_epochs < 0:
            raise ValueError("need L >= 2 and non-negative rounds/epochs")

    @property
    def sigma2(self) -> float:
        return 0.0 if self.snr_db is None else snr_to_sigma2(self.snr_db)


def make_task(n_classes: int = 4, n_features: int = 8, n_train: int = 2000,
              n_test: int = 1000, seed: int = 7) -> tuple[Dataset, Dataset]:
    """Balanced Gaussian-blob classification task, fixed by ``seed``."""
    rng = np.random.default_rng(seed)
    centers = rng.normal(0.0, 1.0, (n_classes, n_features))

    def draw(n):
        y = np.arange(n) % n_classes
        X = centers[y] + rng.normal(0.0, 1.0, (n, n_features))
        perm = rng.permutation(n)
        return Dataset(X[perm], y[perm], n_classes)

    return draw(n_train), draw(n_test)


def split_iid(data: Dataset, K: int, seed: int = 0) -> list[Dataset]:
    idx = np.random.default_rng(seed).permutation(len(data.y))
    return [Dataset(data.X[part], data.y[part], data.n_classes)
            for part in np.array_split(idx, K)]


def n_params(n_features: int, n_classes: int) -> int:
    return (n_features + 1) * n_classes


def _unpack(w, n_features, n_classes):
    W = w.reshape(n_classes, n_features + 1)
    return W[:, :-1], W[:, -1]


def logits(w, X, n_classes):
    A, b = _unpack(np.asarray(w, dtype=float), X.shape[1], n_classes)
    return X @ A.T + b


def loss_and_grad(w, data: Dataset):
    z = logits(w, data.X, data.n_classes)
    z = z - z.max(axis=1, keepdims=True)
    logp = z - np.log(np.exp(z).sum(axis=1, keepdims=True))
    n = len(data.y)
    loss = -logp[np.arange(n), data.y].mean()
    g = np.exp(logp)
    g[np.arange(n), data.y] -= 1.0
    g /= n
    grad = np.concatenate([g.T @ data.X, g.sum(axis=0)[:, None]], axis=1)
    return float(loss), grad.ravel()


def local_train(w, shard: Dataset, epochs: int, lr: float, history: list | None = None):
    """Full-batch gradient descent on the cross-entropy loss.

    If ``history`` is given, the loss before each epoch is appended to it.
    """
    if len(shard.y) == 0:
        raise ValueError("empty shard")
    w = np.array(w, dtype=float)
    for _ in range(epochs):
        loss, grad = loss_and_grad(w, shard)
        if not np.isfinite(loss):
            raise FloatingPointError("non-finite training loss")
        if history is not None:
            history.append(loss)
        w -= lr * grad
    return w


def evaluate(w, test: Dataset) -> float:
    if len(test.y) == 0:
        raise ValueError("empty test set")
    pred = np.argmax(logits(w, test.X, test.n_classes), axis=1)
    return float(np.mean(pred == test.y))


def type_counts(S, L: int) -> np.ndarray:
    """Per-parameter histograms: (K, D) bin indices -> (D, L) counts."""
    S = np.asarray(S)
    D = S.shape[1]
    flat = (S - 1) + L * np.arange(D)[None, :]
    return np.bincount(flat.ravel(), minlength=D * L).reshape(D, L).astype(float)


class RoundResult(NamedTuple):
    weights: np.ndarray
    resources: int  # orthogonal resources used by the round
    local: np.ndarray  # (K, D) unquantized local weights


def _robust_rows(r, cfg: FlConfig, sigma2: float):
    r_hat = robust_correct(r, cfg.robust, sigma2=sigma2, K=cfg.K).r_hat
    # a parameter whose whole type was removed keeps its received type
    empty = np.clip(r_hat, 0, None).sum(axis=1) <= 0
    r_hat[empty] = r[empty]
    return r_hat


def aggregate_round(local, cfg: FlConfig, rng=None, method=None) -> tuple[np.ndarray, int]:
    """Server-side estimate of the average of the (K, D) local weights."""
    method = FlMethod(method or cfg.method)
    rng = np.random.default_rng(rng)
    K, D = local.shape
    S = quantize(local, -cfg.c, cfg.c, cfg.L)
    targets = max_displace_targets(S.mean(axis=0), cfg.L)
    sigma2 = cfg.sigma2
    if method is FlMethod.DA:
        # DA carries the quantized value itself as the amplitude
        centers = bin_center(S, -cfg.c, cfg.c, cfg.L)
        w = da_aggregate_many(centers.T, cfg.M, bin_center(targets, -cfg.c, cfg.c, cfg.L),
                              sigma2, rng)
        return w, D
    else:
        r = type_counts(S, cfg.L) / K
        if sigma2 > 0:
            r = r + np.sqrt(sigma2 / 2.0) / K * rng.standard_normal(r.shape)
        r[np.arange(D), targets - 1] += cfg.M / K
        if method is FlMethod.TBMA_ROBUST:
            r = _robust_rows(r, cfg, sigma2)
        est = psi(r, AggregationFn.ARITHMETIC_MEAN)
        resources = D * cfg.L
    return bin_center(est, -cfg.c, cfg.c, cfg.L), resources


def fl_round(global_w, shards, cfg: FlConfig, rng=None, workers: int = 1) -> RoundResult:
    train = lambda sh: local_train(global_w, sh, cfg.local_epochs, cfg.learning_rate)  # noqa: E731
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            local = np.stack(list(pool.map(train, shards)))
    else:
        local = np.stack([train(sh) for sh in shards])
    w, resources = aggregate_round(local, cfg, rng)
    return RoundResult(w, resources, local)


def _round_rng(cfg: FlConfig, rnd: int):
    key = f"{cfg.seed}|{cfg.method.value}|{cfg.M}|{cfg.snr_db!r}|{rnd}"
    digest = hashlib.sha256(key.encode()).digest()
    return np.random.default_rng(int.from_bytes(digest[:16], "little"))


def run_fl(cfg: FlConfig, task=None, workers: int = 1) -> list[float]:
    """Train for ``cfg.rounds`` rounds; return test accuracy after each."""
    train, test = task if task is not None else make_task()
    shards = split_iid(train, cfg.K, seed=cfg.seed)
    w = np.zeros(n_params(train.X.shape[1], train.n_classes))
    acc = []
    for rnd in range(1, cfg.rounds + 1):
        w = fl_round(w, shards, cfg, _round_rng(cfg, rnd), workers).weights
        acc.append(evaluate(w, test))
    return acc


def write_fl_csv(path, rows, meta: dict | None = None):
    """``rows`` are ``(round, method, accuracy)`` tuples."""
    path = Path(path)
    with open(path, "w", newline="") as fh:
        for k, v in (meta or {}).items():
            fh.write(f"# {k}={v}\n")
        w = csv.writer(fh)
        w.writerow(FL_COLUMNS)
        for rnd, method, acc in rows:
            w.writerow([rnd, method, repr(float(acc))])
