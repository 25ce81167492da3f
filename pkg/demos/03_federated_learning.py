"""Federated learning with 50 devices, 3 of them Byzantine.

Each model parameter is quantized and sent over its own set of TBMA
resources. Compare the attack-free baseline, robust TBMA and DA.

Run: python demos/03_federated_learning.py
"""
from aircomp.fl import FlConfig, run_fl

runs = {
    "no attack, noiseless": FlConfig(M=0, snr_db=None, method="tbma-plain"),
    "robust TBMA, 30 dB": FlConfig(M=3, snr_db=30, method="tbma-robust"),
    "plain TBMA, 30 dB": FlConfig(M=3, snr_db=30, method="tbma-plain"),
    "DA, 30 dB": FlConfig(M=3, snr_db=30, method="da"),
}
curves = {name: run_fl(cfg) for name, cfg in runs.items()}

print("round  " + "  ".join(f"{n:>22s}" for n in curves))
for rnd in range(0, 30, 3):
    print(f"{rnd + 1:5d}  " + "  ".join(f"{c[rnd]:22.3f}" for c in curves.values()))
