"""
Mismatched polarizations
========================

Rotating one photon's polarization makes the pair partly distinguishable and
brings back split events.  A coherent sum of the pair and its swapped copy
removes them again.
"""
import math

import numpy as np

from homsim.fock import apply_beamsplitter, split_probability_of
from homsim.polarization import PolarizationAngles, split_probability, split_probability_pipeline, superposed_input

print(" alpha-beta   closed form   Fock pipeline   superposed")
# the swapped copy equals the original at delta = 0 and pi, so those rows are skipped
for delta in np.linspace(0, math.pi, 7)[1:-1]:
    ang = PolarizationAngles(0.0, -delta)
    restored = split_probability_of(apply_beamsplitter(superposed_input(ang).state))
    print(f"{delta:10.4f}   {split_probability(ang):11.6f}   {split_probability_pipeline(ang):13.6f}"
          f"   {restored:10.2e}")

# at a quarter turn the photons are fully distinguishable: split and unsplit are equally likely
print(split_probability(PolarizationAngles(0.0, math.pi / 2)))
