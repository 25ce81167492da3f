"""Walk through one TBMA aggregation: waveforms, matched filter, the type,
a Byzantine attack on one resource, and the robust correction.

Run: python demos/01_types_and_attacks.py
"""
import numpy as np

from aircomp import (AttackSpec, DataLaw, RobustParams, corrupt_type, form_type_symbol,
                     form_type_waveform, psi, oracle, robust_correct, snr_to_sigma2, synthesize,
                     matched_filter_bank)
from aircomp.channel import draw_gains

rng = np.random.default_rng(0)

# %% Orthogonal resources: each value gets its own FSK tone or PPM slot
L = N = 8
for scheme in ("fsk", "ppm"):
    w = synthesize(3, scheme, N)
    print(scheme, "energy", round(w.energy, 12), "filter output",
          np.round(np.abs(matched_filter_bank(w.samples, scheme, L)), 3))

# %% K devices with Gaussian-shaped data over L = 32 bins
K, L = 400, 32
s = DataLaw("gaussian", (16, 4)).sample(K, L, rng)
sigma2 = snr_to_sigma2(20)

# full waveform chain through a Rayleigh channel with inversion ...
gains = draw_gains(K, L, "rayleigh_flat", rng)
t_wave = form_type_waveform(s, gains, L, 2 * L, sigma2, "fsk", rng)
# ... and the equivalent symbol-level shortcut
t_sym = form_type_symbol(s, L, sigma2, rng)
print("mass of the received type:", round(t_wave.mass, 4), round(t_sym.mass, 4))

# %% 30% attackers pile onto the far edge bin
attack = AttackSpec(M=int(0.3 * K))
t_att = corrupt_type(t_sym, attack, s)
fixed = robust_correct(t_att, RobustParams(), sigma2=sigma2)

truth = oracle(s, "arithmetic_mean")
print(f"true mean      {truth:.3f}")
print(f"plain TBMA     {psi(t_att.r, 'arithmetic_mean'):.3f}")
print(f"robust TBMA    {psi(fixed.r_hat, 'arithmetic_mean'):.3f}")
print(f"geometric mean {oracle(s, 'geometric_mean'):.3f} -> robust {psi(fixed.r_hat, 'geometric_mean'):.3f}")

print("\nbin  received  corrected")
for ell in range(L):
    bar = "#" * int(round(t_att.r[ell] * 100))
    print(f"{ell + 1:>3}  {t_att.r[ell]:8.4f}  {fixed.r_hat[ell]:8.4f}  {bar}")
