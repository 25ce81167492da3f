"""Command line entry point: ``aircomp {nmse-sweep,type-demo,fl-demo}``.

Exit status is 0 on success, 1 for configuration or usage errors and 2 for
failures while running.
"""
from __future__ import annotations

import argparse
import sys

import numpy as np

from .attack import AttackSpec
from .channel import snr_to_sigma2
from .experiment import ConfigError, DataLaw, ExperimentConfig, config_from_mapping, load_config, run_sweep
from .fl import FlConfig, FlMethod, run_fl, write_fl_csv
from .robust import RobustParams, robust_correct
from .tbma import corrupt_type, form_type_symbol


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _nmse_sweep(args):
    if args.config:
        cfg = load_config(args.config)
    else:
        cfg = ExperimentConfig()
    overrides = {k: v for k, v in (("trials", args.trials), ("master_seed", args.seed)) if v is not None}
    if overrides:
        base = {k: getattr(cfg, k) for k in ("K", "L", "N", "scheme", "fidelity", "channel", "fns",
                                             "methods", "snr_db_list", "attacker_ratio_list",
                                             "trials", "data_law", "master_seed")}
        base["data_law"] = str(base["data_law"])
        base.update(overrides)
        for k, v in vars(cfg.robust).items():
            base[f"robust_{k}"] = v
        cfg = config_from_mapping(base)
    records = run_sweep(cfg, out=args.out, workers=args.workers)
    if args.out is None:
        print("method,fn,snr_db,attacker_ratio,trials,mean_nmse,stderr_nmse")
        for rec in records:
            print(",".join(str(x) for x in rec.row()))
    return 0


def _type_demo(args):
    if args.k < 1 or args.l < 2 or args.attackers < 0:
        raise ConfigError("need --k >= 1, --l >= 2 and --attackers >= 0")
    rng = np.random.default_rng(args.seed)
    law = DataLaw("gaussian", (args.l / 2, args.l / 8))
    s = law.sample(args.k, args.l, rng)
    sigma2 = snr_to_sigma2(args.snr_db)
    clean = form_type_symbol(s, args.l, sigma2, rng)
    corrupted = corrupt_type(clean, AttackSpec(M=args.attackers), s)
    corrected = robust_correct(corrupted, RobustParams(), sigma2=sigma2)
    print(f"{'bin':>5} {'count':>6} {'clean':>10} {'corrupted':>10} {'corrected':>10}")
    counts = np.bincount(s - 1, minlength=args.l)
    for i in range(args.l):
        print(f"{i + 1:>5} {counts[i]:>6} {clean.r[i]:>10.5f} {corrupted.r[i]:>10.5f} "
              f"{corrected.r_hat[i]:>10.5f}")
    return 0


def _fl_demo(args):
    methods = [m.strip() for m in args.method.split(",") if m.strip()]
    try:
        methods = [FlMethod(m) for m in methods]
        base = FlConfig(rounds=args.rounds, M=args.attackers, snr_db=args.snr_db, seed=args.seed,
                        c=args.range, L=args.bins)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    rows = []
    for m in methods:
        cfg = FlConfig(**{**vars(base), "method": m})
        for rnd, acc in enumerate(run_fl(cfg), start=1):
            rows.append((rnd, m.value, acc))
    if args.out:
        meta = {k: getattr(v, "value", v) for k, v in vars(base).items() if k not in ("method", "robust")}
        meta.update({f"robust_{k}": v for k, v in vars(base.robust).items()})
        meta["methods"] = ",".join(m.value for m in methods)
        write_fl_csv(args.out, rows, meta)
    else:
        print("round,method,accuracy")
        for rnd, m, acc in rows:
            print(f"{rnd},{m},{acc}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="aircomp", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sw = sub.add_parser("nmse-sweep", help="Monte Carlo NMSE sweep over SNR and attacker ratio")
    sw.add_argument("--config", help="flat YAML config file")
    sw.add_argument("--out", help="CSV output path (stdout if omitted)")
    sw.add_argument("--trials", type=int)
    sw.add_argument("--seed", type=int, help="master seed")
    sw.add_argument("--workers", type=int, default=1)
    sw.set_defaults(func=_nmse_sweep)

    td = sub.add_parser("type-demo", help="print clean, corrupted and corrected types")
    td.add_argument("--k", type=int, default=1000)
    td.add_argument("--l", type=int, default=64)
    td.add_argument("--attackers", type=int, default=300)
    td.add_argument("--snr-db", type=float, default=30.0)
    td.add_argument("--seed", type=int, default=0)
    td.set_defaults(func=_type_demo)

    fl = sub.add_parser("fl-demo", help="federated learning over TBMA under attack")
    fl.add_argument("--rounds", type=int, default=30)
    fl.add_argument("--attackers", type=int, default=3)
    fl.add_argument("--snr-db", type=float, default=30.0)
    fl.add_argument("--method", default="tbma-robust,da",
                    help="comma-separated subset of da, tbma-plain, tbma-robust")
    fl.add_argument("--range", type=float, default=5.0, help="quantization range [-c, c]")
    fl.add_argument("--bins", type=int, default=40960, help="bins per parameter")
    fl.add_argument("--seed", type=int, default=0)
    fl.add_argument("--out")
    fl.set_defaults(func=_fl_demo)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
