"""
Two identical photons at a 50-50 beamsplitter
=============================================

One photon enters each input port with the same polarization.  After the
splitter both photons leave together, so coincidence counts vanish.
"""

from homsim.fock import DH, UH, apply_beamsplitter, create_photon, format_ket, split_probability_of, vacuum

# a_uH^+ a_dH^+ |0>
pair = create_photon(create_photon(vacuum(), UH), DH)
print("input: ", {format_ket(k): a for k, a in pair.amplitudes.items()})

out = apply_beamsplitter(pair)
for ket, amp in out.amplitudes.items():
    print(f"{format_ket(ket):>14}  {amp.real:+.6f}")

# the |1_u 1_d> amplitude cancels exactly
print("split probability:", split_probability_of(out))
