"""Hong-Ou-Mandel interference of photon pairs at a 50-50 beamsplitter.

Submodules:

- `homsim.fock`: Fock-space algebra, beamsplitter transform, Bell decomposition
- `homsim.polarization`: split/unsplit probabilities for mismatched polarizations
- `homsim.spectral`: spectral and arrival-time amplitudes, densities, totals
- `homsim.montecarlo`: seeded detection simulation and density reconstruction
- `homsim.config`, `homsim.cli`: the ``hom-sim`` scenario runner
"""

__version__ = "0.1.0"
