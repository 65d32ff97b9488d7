"""Two-photon Fock-space algebra on four labelled modes.

Modes are the product of a spatial channel (up/down) and a linear polarization
(H/V).  States are stored as maps from occupation vectors to complex amplitudes,
which is all that is needed for at most two photons.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Iterable, Mapping, NamedTuple

import numpy as np

__all__ = [
    "Spatial", "Polarization", "ModeLabel", "MODES", "UH", "UV", "DH", "DV",
    "PhotonState", "BeamsplitterUnitary", "SectorError", "BellCoefficients",
    "vacuum", "basis_state", "two_photon_basis", "create_photon",
    "apply_beamsplitter", "split_probability_of", "unsplit_probability_of",
    "inner", "format_ket", "bell_sector", "bell_decompose", "bell_compose",
    "slot_wavefunction", "slot_state", "bell_coefficients", "transform_slots",
    "BELL_STATES",
]

AMPLITUDE_TOL = 1e-12


class Spatial(IntEnum):
    UP = 0
    DOWN = 1


class Polarization(IntEnum):
    H = 0
    V = 1


class ModeLabel(NamedTuple):
    spatial: Spatial
    polarization: Polarization

    @property
    def index(self) -> int:
        return 2 * int(self.spatial) + int(self.polarization)

    def __str__(self):
        return ("u" if self.spatial == Spatial.UP else "d") + self.polarization.name


# Canonical order: Up < Down, then H < V.
MODES = tuple(ModeLabel(s, p) for s in Spatial for p in Polarization)
UH, UV, DH, DV = MODES

Occupation = tuple  # (n_uH, n_uV, n_dH, n_dV)


class SectorError(ValueError):
    """State does not live in a sector where Bell coefficients are defined."""


@dataclass(frozen=True, eq=False)
class PhotonState:
    """Superposition of Fock kets with a definite total photon number.

    ``amplitudes`` maps occupation 4-tuples (ordered as `MODES`) to complex
    amplitudes.  Zero amplitudes are kept so that the photon number of a
    cancelled state stays defined.
    """

    amplitudes: Mapping[Occupation, complex] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        totals = set()
        for occ, amp in self.amplitudes.items():
            occ = tuple(int(n) for n in occ)
            if len(occ) != len(MODES) or min(occ) < 0:
                raise ValueError(f"invalid occupation vector {occ!r}")
            totals.add(sum(occ))
            clean[occ] = clean.get(occ, 0j) + complex(amp)
        if len(totals) > 1:
            raise ValueError(f"mixed photon numbers {sorted(totals)} in one state")
        object.__setattr__(self, "amplitudes", dict(sorted(clean.items(), reverse=True)))

    @property
    def n_photons(self) -> int | None:
        for occ in self.amplitudes:
            return sum(occ)
        return None

    def amplitude(self, occ) -> complex:
        return self.amplitudes.get(tuple(occ), 0j)

    def norm(self) -> float:
        return math.sqrt(sum(abs(a) ** 2 for a in self.amplitudes.values()))

    def normalize(self) -> PhotonState:
        nrm = self.norm()
        if nrm == 0.0:
            raise ValueError("cannot normalize the zero state")
        return self * (1.0 / nrm)

    def probabilities(self) -> dict:
        return {occ: abs(a) ** 2 for occ, a in self.amplitudes.items()}

    def __add__(self, other: PhotonState) -> PhotonState:
        amps = dict(self.amplitudes)
        for occ, a in other.amplitudes.items():
            amps[occ] = amps.get(occ, 0j) + a
        return PhotonState(amps)

    def __sub__(self, other: PhotonState) -> PhotonState:
        return self + (-1.0) * other

    def __mul__(self, scalar) -> PhotonState:
        return PhotonState({occ: scalar * a for occ, a in self.amplitudes.items()})

    __rmul__ = __mul__

    def __neg__(self) -> PhotonState:
        return (-1.0) * self

    def allclose(self, other: PhotonState, atol: float = AMPLITUDE_TOL) -> bool:
        keys = set(self.amplitudes) | set(other.amplitudes)
        return all(abs(self.amplitude(k) - other.amplitude(k)) <= atol for k in keys)

    def __repr__(self):
        terms = [f"({a.real:+.6g}{a.imag:+.6g}j){format_ket(occ)}"
                 for occ, a in self.amplitudes.items() if a != 0]
        return "PhotonState(" + (" ".join(terms) or "0") + ")"


def format_ket(occ: Occupation) -> str:
    """Render an occupation vector as e.g. ``|1_uH,1_dV>``; vacuum is ``|0>``."""
    parts = [f"{n}_{mode}" for mode, n in zip(MODES, occ) if n]
    return "|" + (",".join(parts) or "0") + ">"


def vacuum() -> PhotonState:
    return PhotonState({(0, 0, 0, 0): 1.0})


def basis_state(counts: Mapping[ModeLabel, int], amplitude: complex = 1.0) -> PhotonState:
    occ = [0] * len(MODES)
    for mode, n in counts.items():
        occ[ModeLabel(*mode).index] += n
    return PhotonState({tuple(occ): amplitude})


def two_photon_basis() -> list:
    """All ten two-photon occupation vectors over the four modes."""
    return [occ for occ in itertools.product(range(3), repeat=4) if sum(occ) == 2]


def create_photon(state: PhotonState, mode: ModeLabel) -> PhotonState:
    """Apply a creation operator; the result is not renormalized."""
    k = ModeLabel(*mode).index
    out = {}
    for occ, amp in state.amplitudes.items():
        new = list(occ)
        new[k] += 1
        out[tuple(new)] = amp * math.sqrt(occ[k] + 1)
    if not out:
        return PhotonState()
    return PhotonState(out)


def inner(bra: PhotonState, ket: PhotonState) -> complex:
    """<bra|ket>."""
    return sum((bra.amplitude(occ).conjugate() * a for occ, a in ket.amplitudes.items()), 0j)


@dataclass(frozen=True, eq=False)
class BeamsplitterUnitary:
    """2x2 unitary on the (up, down) channels, identical for both polarizations.

    Column j holds the images of the input creation operator of channel j, so the
    default sends a_u^+ -> (a_u^+ - a_d^+)/sqrt2 and a_d^+ -> (a_u^+ + a_d^+)/sqrt2.
    """

    matrix: np.ndarray = field(
        default_factory=lambda: np.array([[1.0, 1.0], [-1.0, 1.0]], dtype=complex) / math.sqrt(2.0))

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (2, 2):
            raise ValueError(f"beamsplitter matrix must be 2x2, got shape {m.shape}")
        err = np.max(np.abs(m.conj().T @ m - np.eye(2)))
        if not err <= AMPLITUDE_TOL:
            raise ValueError(f"beamsplitter matrix is not unitary (max |U^+U - 1| = {err:.3g})")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_angles(cls, theta: float, phi: float = 0.0, global_phase: float = 0.0):
        """General lossless splitter with transmission cos(theta)."""
        c, s = math.cos(theta), math.sin(theta)
        m = np.array([[c, s * np.exp(1j * phi)], [-s * np.exp(-1j * phi), c]])
        return cls(np.exp(1j * global_phase) * m)


def apply_beamsplitter(state: PhotonState, U: BeamsplitterUnitary | None = None) -> PhotonState:
    """Substitute every creation operator of ``state`` through the beamsplitter."""
    if U is None:
        U = BeamsplitterUnitary()
    elif not isinstance(U, BeamsplitterUnitary):
        U = BeamsplitterUnitary(U)
    m = U.matrix
    out = {}
    for occ, amp in state.amplitudes.items():
        # |n> = prod (a_k^+)^{n_k} / sqrt(n_k!) |0>, expanded as a polynomial in output operators.
        poly = {(0, 0, 0, 0): amp / math.sqrt(math.prod(math.factorial(n) for n in occ))}
        for mode in MODES:
            for _ in range(occ[mode.index]):
                nxt = {}
                for mono, c in poly.items():
                    for s_out in Spatial:
                        coeff = m[s_out, mode.spatial]
                        if coeff == 0:
                            continue
                        k = ModeLabel(s_out, mode.polarization).index
                        new = list(mono)
                        new[k] += 1
                        new = tuple(new)
                        nxt[new] = nxt.get(new, 0j) + c * coeff
                poly = nxt
        for mono, c in poly.items():
            scale = math.sqrt(math.prod(math.factorial(n) for n in mono))
            out[mono] = out.get(mono, 0j) + c * scale
    return PhotonState(out)


def _require_two_photons(state: PhotonState):
    if state.n_photons != 2:
        raise ValueError(f"expected a two-photon state, got n = {state.n_photons}")


def _is_split(occ: Occupation) -> bool:
    return occ[0] + occ[1] == 1 and occ[2] + occ[3] == 1


def split_probability_of(state: PhotonState) -> float:
    """Weight of kets with one photon in each spatial channel (coincidences)."""
    _require_two_photons(state)
    return sum(abs(a) ** 2 for occ, a in state.amplitudes.items() if _is_split(occ))


def unsplit_probability_of(state: PhotonState) -> float:
    """Weight of kets with both photons in the same spatial channel."""
    _require_two_photons(state)
    return sum(abs(a) ** 2 for occ, a in state.amplitudes.items() if not _is_split(occ))


# --- first-quantized ("slot") picture -------------------------------------

_SQ2 = math.sqrt(2.0)
_U = np.array([1.0, 0.0])
_D = np.array([0.0, 1.0])

# psi[xi1, xi2] for the four directional Bell states, xi = 0 (up) or 1 (down).
BELL_STATES = {
    "psi_plus": (np.outer(_U, _D) + np.outer(_D, _U)) / _SQ2,
    "psi_minus": (np.outer(_U, _D) - np.outer(_D, _U)) / _SQ2,
    "phi_plus": (np.outer(_U, _U) + np.outer(_D, _D)) / _SQ2,
    "phi_minus": (np.outer(_U, _U) - np.outer(_D, _D)) / _SQ2,
}


class BellCoefficients(NamedTuple):
    psi_plus: complex
    psi_minus: complex
    phi_plus: complex
    phi_minus: complex


def bell_coefficients(psi) -> BellCoefficients:
    """Project a 2x2 slot wave function onto the directional Bell basis."""
    psi = np.asarray(psi, dtype=complex)
    return BellCoefficients(*(complex(np.vdot(BELL_STATES[k], psi)) for k in BellCoefficients._fields))


def transform_slots(psi, U: BeamsplitterUnitary | None = None) -> np.ndarray:
    """(U x U) acting on a slot wave function psi[xi1, xi2]."""
    m = (U or BeamsplitterUnitary()).matrix
    return m @ np.asarray(psi, dtype=complex) @ m.T


def bell_sector(state: PhotonState):
    """Identify the decomposable sector of a two-photon state.

    Returns ``"HV"`` when every ket holds one H and one V photon, or the shared
    `Polarization` when both photons always carry the same polarization.
    """
    _require_two_photons(state)
    kinds = set()
    for occ, a in state.amplitudes.items():
        if a == 0:
            continue
        n_h, n_v = occ[0] + occ[2], occ[1] + occ[3]
        kinds.add("HV" if n_h == n_v == 1 else (Polarization.H if n_h == 2 else Polarization.V))
    if not kinds:
        raise SectorError("zero state has no Bell sector")
    if len(kinds) > 1:
        names = sorted("HV" if k == "HV" else f"{k.name}{k.name}" for k in kinds)
        raise SectorError(f"state mixes polarization sectors {names}; decompose each separately")
    return kinds.pop()


def slot_wavefunction(state: PhotonState, sector=None) -> np.ndarray:
    """Map a two-photon state to its directional wave function psi[xi1, xi2].

    In the HV sector slot 1 is the H photon and slot 2 the V photon.  In a
    single-polarization sector the photons are identical and psi is symmetric.
    """
    if sector is None:
        sector = bell_sector(state)
    psi = np.zeros((2, 2), dtype=complex)
    if sector == "HV":
        for s1, s2 in itertools.product(Spatial, Spatial):
            occ = [0] * 4
            occ[ModeLabel(s1, Polarization.H).index] += 1
            occ[ModeLabel(s2, Polarization.V).index] += 1
            psi[s1, s2] = state.amplitude(occ)
    else:
        p = Polarization(sector)
        iu, id_ = ModeLabel(Spatial.UP, p).index, ModeLabel(Spatial.DOWN, p).index
        uu, dd, ud = [0] * 4, [0] * 4, [0] * 4
        uu[iu], dd[id_] = 2, 2
        ud[iu] = ud[id_] = 1
        psi[0, 0] = state.amplitude(uu)
        psi[1, 1] = state.amplitude(dd)
        psi[0, 1] = psi[1, 0] = state.amplitude(ud) / _SQ2
    return psi


def slot_state(psi, sector) -> PhotonState:
    """Inverse of `slot_wavefunction`."""
    psi = np.asarray(psi, dtype=complex)
    amps = {}
    if sector == "HV":
        for s1, s2 in itertools.product(Spatial, Spatial):
            occ = [0] * 4
            occ[ModeLabel(s1, Polarization.H).index] += 1
            occ[ModeLabel(s2, Polarization.V).index] += 1
            amps[tuple(occ)] = psi[s1, s2]
    else:
        if abs(psi[0, 1] - psi[1, 0]) > AMPLITUDE_TOL:
            raise SectorError("antisymmetric directional part cannot exist for two identically polarized photons")
        p = Polarization(sector)
        iu, id_ = ModeLabel(Spatial.UP, p).index, ModeLabel(Spatial.DOWN, p).index
        uu, dd, ud = [0] * 4, [0] * 4, [0] * 4
        uu[iu], dd[id_] = 2, 2
        ud[iu] = ud[id_] = 1
        amps[tuple(uu)] = psi[0, 0]
        amps[tuple(dd)] = psi[1, 1]
        amps[tuple(ud)] = (psi[0, 1] + psi[1, 0]) / _SQ2
    return PhotonState(amps)


def bell_decompose(state: PhotonState) -> BellCoefficients:
    """Coefficients of a two-photon state on (Psi+, Psi-, Phi+, Phi-)."""
    return bell_coefficients(slot_wavefunction(state))


def bell_compose(coeffs: Iterable[complex], sector) -> PhotonState:
    """Rebuild the state from Bell coefficients within ``sector``."""
    psi = sum(c * BELL_STATES[k] for c, k in zip(coeffs, BellCoefficients._fields))
    return slot_state(psi, sector)
