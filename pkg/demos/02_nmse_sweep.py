"""NMSE of DA, median-from-type and robust TBMA versus the attacker ratio,
at desk scale (K=1000, L=64, 200 trials per point).

Run: python demos/02_nmse_sweep.py [out.csv]
Equivalent CLI: aircomp nmse-sweep --config demos/fig1_desk.yaml --out out.csv
"""
import sys
from collections import defaultdict

from aircomp.experiment import ExperimentConfig, run_sweep

cfg = ExperimentConfig(methods=("da", "tbma-plain", "tbma-median", "tbma-robust"))
records = run_sweep(cfg, out=sys.argv[1] if len(sys.argv) > 1 else None)

curves = defaultdict(list)
for r in records:
    curves[(r.fn, r.method, r.snr_db)].append((r.attacker_ratio, r.mean_nmse))

for (fn, method, snr), pts in curves.items():
    row = "  ".join(f"{v:9.2e}" for _, v in pts)
    print(f"{fn:16s} {method:12s} {snr:5.1f} dB  {row}")

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    sys.exit(0)

fig, axes = plt.subplots(1, 2, figsize=(10, 4), sharey=True)
for ax, fn in zip(axes, cfg.fns):
    for (f, method, snr), pts in curves.items():
        if f != fn.value:
            continue
        x, y = zip(*pts)
        ax.semilogy(x, y, "-" if snr == 30 else "o", label=f"{method} {snr:g} dB")
    ax.set_title(fn.value)
    ax.set_xlabel("attacker ratio M/K")
axes[0].set_ylabel("NMSE")
axes[0].legend(fontsize=7)
fig.tight_layout()
fig.savefig("nmse_sweep.png", dpi=120)
print("wrote nmse_sweep.png")
