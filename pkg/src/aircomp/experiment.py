"""Monte Carlo NMSE sweeps comparing DA against plain, median and robust TBMA.

Every trial draws its own generator from a hash of
``(master_seed, method, fn, snr_db, attacker_ratio, trial_index)``, so a sweep
is reproducible bit for bit whatever the number of worker threads.
"""
from __future__ import annotations

import csv
import dataclasses
import enum
import hashlib
import itertools
import math
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .aggregate import AggregationFn, nmse, oracle, psi
from .attack import AttackSpec
from .channel import ChannelModel, draw_gains, snr_to_sigma2
from .core import Scheme, quantize
from .da import da_aggregate
from .robust import (RobustParams, local_outlier_compensate, median_from_type,
                     percentile_truncate, threshold_noise)
from .tbma import NoisyType, corrupt_type, form_type_symbol, form_type_waveform

CSV_COLUMNS = ["method", "fn", "snr_db", "attacker_ratio", "trials", "mean_nmse", "stderr_nmse"]


class ConfigError(ValueError):
    pass


class Method(str, enum.Enum):
    DA = "da"
    TBMA_PLAIN = "tbma-plain"
    TBMA_MEDIAN = "tbma-median"
    TBMA_ROBUST = "tbma-robust"


_LAW_RE = re.compile(r"^\s*(\w+)\s*\(([^)]*)\)\s*$")


@dataclass(frozen=True)
class DataLaw:
    """Distribution of the legitimate data over bins ``1..L``.

    ``gaussian(mean, std)`` rounds a normal draw to the nearest bin,
    ``uniform(a, b)`` draws integers in ``[a, b]`` and ``dirac(c)`` puts every
    device on bin ``c``. Out-of-range draws are clipped to ``[1, L]``.
    """

    kind: str = "gaussian"
    params: tuple = ()

    def __post_init__(self):
        n = {"gaussian": 2, "uniform": 2, "dirac": 1}.get(self.kind)
        if n is None:
            raise ConfigError(f"unknown data law {self.kind!r}")
        if len(self.params) != n:
            raise ConfigError(f"{self.kind} needs {n} parameters, got {self.params}")

    @classmethod
    def parse(cls, text: str) -> "DataLaw":
        m = _LAW_RE.match(text)
        if not m:
            raise ConfigError(f"cannot parse data law {text!r}; expected e.g. gaussian(32, 8)")
        params = tuple(float(p) for p in m.group(2).split(",") if p.strip())
        return cls(m.group(1).lower(), params)

    def __str__(self):
        return f"{self.kind}({', '.join(f'{p:g}' for p in self.params)})"

    def sample(self, K: int, L: int, rng) -> np.ndarray:
        if self.kind == "gaussian":
            mean, std = self.params
            return quantize(rng.normal(mean, std, K), 0.5, L + 0.5, L)
        if self.kind == "uniform":
            a, b = (int(round(p)) for p in self.params)
            return np.clip(rng.integers(a, b + 1, K), 1, L)
        c = int(round(self.params[0]))
        if not 1 <= c <= L:
            raise ConfigError(f"dirac point {c} outside [1, {L}]")
        return np.full(K, c, dtype=np.int64)


@dataclass(frozen=True)
class ExperimentConfig:
    K: int = 1000
    L: int = 64
    N: int | None = None
    scheme: Scheme = Scheme.PPM
    fidelity: str = "symbol"
    channel: ChannelModel = ChannelModel.IDENTITY
    fns: tuple = (AggregationFn.ARITHMETIC_MEAN, AggregationFn.GEOMETRIC_MEAN)
    methods: tuple = tuple(Method)
    snr_db_list: tuple = (30.0, 5.0)
    attacker_ratio_list: tuple = (0.0, 0.1, 0.2, 0.3, 0.4, 0.5)
    trials: int = 200
    data_law: DataLaw | None = None
    robust: RobustParams = field(default_factory=RobustParams)
    master_seed: int = 0

    def __post_init__(self):
        set_ = lambda k, v: object.__setattr__(self, k, v)  # noqa: E731
        try:
            set_("scheme", Scheme(self.scheme))
            set_("channel", ChannelModel(self.channel))
            set_("fns", tuple(AggregationFn(f) for f in self.fns))
            set_("methods", tuple(Method(m) for m in self.methods))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        set_("snr_db_list", tuple(float(x) for x in self.snr_db_list))
        set_("attacker_ratio_list", tuple(float(x) for x in self.attacker_ratio_list))
        if self.N is None:
            set_("N", self.L)
        if self.data_law is None:
            set_("data_law", DataLaw("gaussian", (self.L / 2, self.L / 8)))
        elif isinstance(self.data_law, str):
            set_("data_law", DataLaw.parse(self.data_law))
        if self.K < 1 or self.L < 2 or self.N < self.L:
            raise ConfigError("need K >= 1, L >= 2 and N >= L")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.fidelity not in ("symbol", "waveform"):
            raise ConfigError(f"fidelity must be 'symbol' or 'waveform', got {self.fidelity!r}")
        if not all(math.isfinite(x) for x in self.snr_db_list + self.attacker_ratio_list):
            raise ConfigError("SNR and ratio lists must be finite")
        if not all(0 <= x <= 1 for x in self.attacker_ratio_list):
            raise ConfigError("attacker ratios must lie in [0, 1]")
        if not self.fns or not self.methods or not self.snr_db_list or not self.attacker_ratio_list:
            raise ConfigError("fns, methods, snr_db_list and attacker_ratio_list must be non-empty")


@dataclass(frozen=True)
class ResultRecord:
    method: str
    fn: str
    snr_db: float
    attacker_ratio: float
    trial_count: int
    mean_nmse: float
    nmse_std_error: float

    def row(self):
        return [self.method, self.fn, repr(self.snr_db), repr(self.attacker_ratio),
                self.trial_count, repr(self.mean_nmse), repr(self.nmse_std_error)]


_ROBUST_KEYS = {"theta1": "theta1", "theta2": "theta2", "p_lo": "p_lo", "p_hi": "p_hi",
                "theta1_rule": "theta1_rule"}


def config_from_mapping(d: dict) -> ExperimentConfig:
    """Build a config from a flat mapping; ``robust_*`` keys set RobustParams."""
    d = dict(d)
    names = {f.name for f in dataclasses.fields(ExperimentConfig)} - {"robust"}
    robust = {}
    for key in list(d):
        if key.startswith("robust_") and key[7:] in _ROBUST_KEYS:
            robust[key[7:]] = d.pop(key)
    unknown = set(d) - names
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    for key in ("fns", "methods", "snr_db_list", "attacker_ratio_list"):
        if key in d and not isinstance(d[key], (list, tuple)):
            d[key] = [d[key]]
    try:
        return ExperimentConfig(robust=RobustParams(**robust), **d)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def load_config(path) -> ExperimentConfig:
    """Read a flat YAML ``key: value`` file (see README for the keys)."""
    try:
        with open(path) as fh:
            d = yaml.safe_load(fh) or {}
    except (OSError, yaml.YAMLError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    if not isinstance(d, dict):
        raise ConfigError("config file must be a flat key: value mapping")
    return config_from_mapping(d)


def trial_seed(master_seed: int, method, fn, snr_db: float, ratio: float, trial_index: int):
    key = f"{master_seed}|{Method(method).value}|{AggregationFn(fn).value}|{float(snr_db)!r}|{float(ratio)!r}|{trial_index}"
    digest = hashlib.sha256(key.encode()).digest()
    return np.random.SeedSequence(int.from_bytes(digest[:16], "little"))


def _robust_estimate(t: NoisyType, fn, params: RobustParams) -> float:
    r = threshold_noise(t.r, params.theta1)
    r = percentile_truncate(r, params.p_lo, params.p_hi)
    r_hat = local_outlier_compensate(r, params.theta2, t.K)
    # A lone spike (e.g. point-mass data) is wiped out by the neighbour test;
    # fall back to the truncated type rather than fail.
    for cand in (r_hat, r, t.r):
        if np.clip(cand, 0, None).sum() > 0:
            return _estimate(cand, fn, params.theta1)
    raise ValueError("type has no positive mass")


def _estimate(r, fn, noise_floor):
    return float(psi(r, fn, noise_floor=noise_floor))


def run_trial(cfg: ExperimentConfig, method, snr_db: float, ratio: float, trial_index: int,
              fn=None) -> float:
    """One NMSE sample; fully determined by the config and the arguments."""
    method = Method(method)
    fn = AggregationFn(fn if fn is not None else cfg.fns[0])
    rng = np.random.default_rng(trial_seed(cfg.master_seed, method, fn, snr_db, ratio, trial_index))
    s = cfg.data_law.sample(cfg.K, cfg.L, rng)
    attack = AttackSpec(M=int(round(ratio * cfg.K)))
    sigma2 = snr_to_sigma2(snr_db)
    truth = oracle(s, fn)

    if method is Method.DA:
        return nmse(truth, da_aggregate(s, fn, attack, sigma2, rng, L=cfg.L))

    if cfg.fidelity == "waveform":
        gains = draw_gains(cfg.K, cfg.L, cfg.channel, rng)
        t = form_type_waveform(s, gains, cfg.L, cfg.N, sigma2, cfg.scheme, rng, attack)
    else:
        t = corrupt_type(form_type_symbol(s, cfg.L, sigma2, rng), attack, s)
    params = cfg.robust.resolve(sigma2, cfg.K)
    if method is Method.TBMA_PLAIN:
        est = _estimate(t.r, fn, params.theta1)
    elif method is Method.TBMA_MEDIAN:
        est = float(median_from_type(t.r))
    else:
        est = _robust_estimate(t, fn, params)
    return nmse(truth, est)


def _run_cell(args):
    cfg, fn, method, snr, ratio = args
    samples = np.array([run_trial(cfg, method, snr, ratio, i, fn) for i in range(cfg.trials)])
    stderr = samples.std(ddof=1) / np.sqrt(samples.size) if samples.size > 1 else 0.0
    return ResultRecord(method.value, fn.value, snr, ratio, samples.size,
                        float(samples.mean()), float(stderr))


def run_sweep(cfg: ExperimentConfig, out=None, workers: int = 1) -> list[ResultRecord]:
    """Evaluate every (fn, method, snr, ratio) cell; optionally write a CSV.

    Cells may run on ``workers`` threads; records come back in config order.
    """
    cells = [(cfg, fn, m, snr, ratio) for fn, m, snr, ratio in itertools.product(
        cfg.fns, cfg.methods, cfg.snr_db_list, cfg.attacker_ratio_list)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_run_cell, cells))
    else:
        records = [_run_cell(c) for c in cells]
    if out is not None:
        write_csv(out, records, metadata(cfg))
    return records


def metadata(cfg: ExperimentConfig) -> dict:
    meta = {}
    for f in dataclasses.fields(cfg):
        v = getattr(cfg, f.name)
        if f.name == "robust":
            for k in _ROBUST_KEYS:
                meta[f"robust_{k}"] = getattr(v, k)
        elif isinstance(v, tuple):
            meta[f.name] = ",".join(x.value if isinstance(x, enum.Enum) else repr(x) for x in v)
        elif isinstance(v, enum.Enum):
            meta[f.name] = v.value
        else:
            meta[f.name] = v
    meta.update({
        "snr_convention": "unit-amplitude devices; sigma2=10^(-snr_db/10) per resource at matched-filter input",
        "attacker_ratio": "M/K with M=round(ratio*K) attackers added to K legitimate devices",
        "normalization": "receiver divides by K (attackers unobserved)",
        "attack_target": "max_displace (extreme bin farthest from legitimate mean, ties to L)",
        "theta2_units": "devices (count scale)",
        "ground_truth": "legitimate devices only",
    })
    return meta


def write_csv(path, records, meta: dict | None = None):
    path = Path(path)
    try:
        fh = open(path, "w", newline="")
    except OSError as exc:
        raise OSError(f"cannot write results to {path}: {exc}") from exc
    with fh:
        for k, v in (meta or {}).items():
            fh.write(f"# {k}={v}\n")
        w = csv.writer(fh)
        w.writerow(CSV_COLUMNS)
        for rec in records:
            w.writerow(rec.row())


def read_csv(path):
    """Parse a results CSV back into ``(metadata, records)``."""
    meta, rows = {}, []
    with open(path, newline="") as fh:
        lines = fh.read().splitlines()
    body = []
    for line in lines:
        if line.startswith("# "):
            k, _, v = line[2:].partition("=")
            meta[k] = v
        else:
            body.append(line)
    reader = csv.DictReader(body)
    for row in reader:
        rows.append(ResultRecord(row["method"], row["fn"], float(row["snr_db"]),
                                 float(row["attacker_ratio"]), int(row["trials"]),
                                 float(row["mean_nmse"]), float(row["stderr_nmse"])))
    return meta, rows
