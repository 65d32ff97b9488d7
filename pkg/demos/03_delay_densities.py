"""
Arrival-time densities for a delayed channel
============================================

Lengthening the up path by c * dt changes the distribution of the arrival-time
difference x = t1 - t2.  Split pairs (f-) vanish at x = 0 for any delay and
develop two peaks near +-dt once dt exceeds a few tau_L.
"""
import math

import numpy as np

from homsim.spectral import Sign, density_f, SpectralParams, TimeGrid, find_peaks, isolated_peak_fwhm, total_probability

tau_L = 100e-15
base = SpectralParams(tau_p=10e-12, tau_L=tau_L)

for eta in (0.3, 1.0, 1.3, 3.0):
    p = base.with_delay(eta * math.sqrt(8) * tau_L)
    grid = TimeGrid.symmetric(abs(p.delta_t) + 8 * tau_L, 4001)
    peaks = find_peaks(Sign.MINUS, p, grid)
    where = ", ".join(f"{pk.position / tau_L:+.3f}" for pk in peaks)
    print(f"eta={eta:.1f} dt={p.delta_t / tau_L:5.2f} tau_L  w-={total_probability(Sign.MINUS, p):.4f}"
          f"  f- peaks at [{where}] tau_L")

# far from overlap each peak is a Gaussian of fixed width
print(f"isolated FWHM = {isolated_peak_fwhm(tau_L) / tau_L:.4f} tau_L")

# a coarse look at both densities for the last delay
x = np.linspace(-12, 12, 9) * tau_L
for xi, fp, fm in zip(x / tau_L, density_f(x, Sign.PLUS, p) * tau_L, density_f(x, Sign.MINUS, p) * tau_L):
    print(f"x={xi:+6.1f} tau_L   tau_L*f+={fp:.4f}   tau_L*f-={fm:.4f}")
