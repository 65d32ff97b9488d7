"""Split/unsplit statistics for photons with mismatched linear polarizations."""
from __future__ import annotations

import math
import warnings
from typing import NamedTuple

from .fock import (DH, DV, UH, UV, PhotonState, apply_beamsplitter, basis_state, create_photon,
                   split_probability_of, vacuum)

__all__ = [
    "PolarizationAngles", "Superposition", "DegenerateSuperpositionWarning",
    "input_state", "split_probability", "unsplit_probability", "split_component",
    "split_probability_pipeline", "superposed_input",
]

DEGENERACY_TOL = 1e-12


class DegenerateSuperpositionWarning(UserWarning):
    pass


class PolarizationAngles(NamedTuple):
    """Linear-polarization angles from horizontal, in radians (up, down photon)."""

    alpha: float
    beta: float

    def validated(self) -> PolarizationAngles:
        if not (math.isfinite(self.alpha) and math.isfinite(self.beta)):
            raise ValueError(f"polarization angles must be finite, got {tuple(self)}")
        return self

    def swapped(self) -> PolarizationAngles:
        return PolarizationAngles(self.beta, self.alpha)


def _linear_photon(state: PhotonState, h_mode, v_mode, angle: float) -> PhotonState:
    return (math.cos(angle) * create_photon(state, h_mode)
            + math.sin(angle) * create_photon(state, v_mode))


def input_state(angles: PolarizationAngles) -> PhotonState:
    """a_{u,alpha}^+ a_{d,beta}^+ |0>, one photon per input channel."""
    alpha, beta = PolarizationAngles(*angles).validated()
    one = _linear_photon(vacuum(), UH, UV, alpha)
    return _linear_photon(one, DH, DV, beta)


def split_probability(angles: PolarizationAngles) -> float:
    alpha, beta = PolarizationAngles(*angles).validated()
    return 0.5 * math.sin(alpha - beta) ** 2


def unsplit_probability(angles: PolarizationAngles) -> float:
    return 1.0 - split_probability(angles)


def split_probability_pipeline(angles: PolarizationAngles, U=None) -> float:
    """Same quantity as `split_probability`, computed through the Fock algebra."""
    return split_probability_of(apply_beamsplitter(input_state(angles), U))


def split_component(angles: PolarizationAngles) -> PhotonState:
    """Part of the beamsplitter output with one photon per channel (unnormalized).

    Odd in alpha - beta: swapping the two angles flips its sign.
    """
    alpha, beta = PolarizationAngles(*angles).validated()
    c = -0.5 * math.sin(alpha - beta)
    return (basis_state({UH: 1, DV: 1}, c) + basis_state({UV: 1, DH: 1}, -c))


class Superposition(NamedTuple):
    state: PhotonState
    raw_norm: float  # norm of Psi^{a,b} + Psi^{b,a} before renormalization
    degenerate: bool


def superposed_input(angles: PolarizationAngles) -> Superposition:
    """Normalized coherent sum of the input state and its polarization-swapped twin.

    The two product states overlap by cos^2(alpha - beta), so the sum is
    renormalized by its actual norm.  When alpha = beta (mod pi) both terms are
    the same state; the plain product state is returned and a
    `DegenerateSuperpositionWarning` is emitted.
    """
    angles = PolarizationAngles(*angles).validated()
    first = input_state(angles)
    total = first + input_state(angles.swapped())
    raw = total.norm()
    if abs(math.sin(angles.alpha - angles.beta)) < DEGENERACY_TOL:
        warnings.warn(f"alpha = beta (mod pi) for {tuple(angles)}; superposition degenerates "
                      "to the product state", DegenerateSuperpositionWarning, stacklevel=2)
        return Superposition(first, raw, True)
    return Superposition(total * (1.0 / raw), raw, False)
