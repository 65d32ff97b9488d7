"""Spectral and temporal biphoton amplitudes for a delayed HOM measurement.

Degenerate type-I SPDC with a long pump pulse.  The frequency amplitude is a
function of the detunings nu_{1,2} = omega_{1,2} - omega_0/2; its Fourier
transform gives a wave function of the two arrival times t1, t2.  After the
beamsplitter only the arrival-time difference x = t1 - t2 matters for the
split/unsplit densities.

All times are in seconds and all frequencies in rad/s.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from enum import Enum, IntEnum
from typing import NamedTuple

import numpy as np

__all__ = [
    "C_LIGHT", "LONG_PULSE_FLOOR", "ShortPulseWarning", "SpectralParams", "SpectralModel",
    "Sign", "TimeGrid", "FrequencyGrid", "TemporalAmplitudes", "Peak",
    "tau_L_from_crystal", "delay_from_path", "frequency_amplitude", "fourier_prefactor",
    "temporal_amplitude_analytic", "temporal_amplitude_numeric", "amplitudes_A",
    "temporal_amplitudes", "output_wavefunction", "density_normalization", "density_f",
    "total_probability", "isolated_peak_fwhm", "locate_peaks", "find_peaks",
]

C_LIGHT = 299_792_458.0  # m/s
LONG_PULSE_FLOOR = 10e-12  # s; below this the long-pump-pulse form is not trusted

_SQ2 = math.sqrt(2.0)
_SQ8 = math.sqrt(8.0)


class ShortPulseWarning(UserWarning):
    pass


def tau_L_from_crystal(L: float, k1_second_deriv: float) -> float:
    """Dispersion time sqrt(L k1'')/2 from crystal length (m) and k1'' (s^2/m)."""
    if not (L > 0 and k1_second_deriv > 0):
        raise ValueError(f"crystal length and k1'' must be positive, got L={L!r}, k1''={k1_second_deriv!r}")
    return math.sqrt(L * k1_second_deriv) / 2.0


def delay_from_path(delta_l: float, c: float = C_LIGHT) -> float:
    """Arrival delay of the up channel produced by an extra path length (m)."""
    if not delta_l >= 0:
        raise ValueError(f"path lengthening must be non-negative, got {delta_l!r}")
    return delta_l / c


@dataclass(frozen=True)
class SpectralParams:
    """Source and delay parameters.

    ``tau_L`` may be given directly or derived from crystal data with
    `SpectralParams.from_crystal`; if both are present they must agree.
    """

    tau_p: float
    tau_L: float
    delta_t: float = 0.0
    omega_0: float | None = None
    crystal_length_L: float | None = None
    k1_second_deriv: float | None = None
    c: float = C_LIGHT

    def __post_init__(self):
        for name in ("tau_p", "tau_L"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be positive and finite, got {v!r}")
        if not math.isfinite(self.delta_t):
            raise ValueError(f"delta_t must be finite, got {self.delta_t!r}")
        if (self.crystal_length_L is None) != (self.k1_second_deriv is None):
            raise ValueError("crystal_length_L and k1_second_deriv must be given together")
        if self.crystal_length_L is not None:
            expected = tau_L_from_crystal(self.crystal_length_L, self.k1_second_deriv)
            if abs(self.tau_L - expected) > 1e-12 * expected:
                raise ValueError(f"tau_L={self.tau_L!r} inconsistent with crystal data (expected {expected!r})")
        if self.tau_p < LONG_PULSE_FLOOR:
            warnings.warn(f"tau_p = {self.tau_p:.3g} s is below the {LONG_PULSE_FLOOR:.0e} s long-pulse floor",
                          ShortPulseWarning, stacklevel=3)

    @classmethod
    def from_crystal(cls, crystal_length_L, k1_second_deriv, tau_p, delta_t=0.0, omega_0=None, c=C_LIGHT):
        return cls(tau_p=tau_p, tau_L=tau_L_from_crystal(crystal_length_L, k1_second_deriv),
                   delta_t=delta_t, omega_0=omega_0, crystal_length_L=crystal_length_L,
                   k1_second_deriv=k1_second_deriv, c=c)

    @property
    def dispersion_constant(self) -> float:
        """B = c (omega_0 / 4) k1''."""
        if self.omega_0 is None or self.k1_second_deriv is None:
            raise ValueError("dispersion constant needs omega_0 and k1_second_deriv")
        return self.c * (self.omega_0 / 4.0) * self.k1_second_deriv

    @property
    def eta(self) -> float:
        """Dimensionless delay Delta t / (sqrt(8) tau_L)."""
        return self.delta_t / (_SQ8 * self.tau_L)

    def with_delay(self, delta_t: float) -> SpectralParams:
        return replace(self, delta_t=delta_t)


class SpectralModel(Enum):
    SINC_EXACT = "sinc"
    GAUSSIAN_MODEL = "gaussian"


class Sign(IntEnum):
    """+ selects unsplit (bunched) pairs, - selects split pairs."""

    PLUS = 1
    MINUS = -1


@dataclass(frozen=True)
class TimeGrid:
    t_min: float
    t_max: float
    n_points: int

    def __post_init__(self):
        if not self.t_min < self.t_max:
            raise ValueError(f"need t_min < t_max, got {self.t_min!r}, {self.t_max!r}")
        if int(self.n_points) != self.n_points or self.n_points < 2:
            raise ValueError(f"n_points must be an integer >= 2, got {self.n_points!r}")

    @classmethod
    def symmetric(cls, half_width: float, n_points: int) -> TimeGrid:
        return cls(-half_width, half_width, n_points)

    @property
    def spacing(self) -> float:
        return (self.t_max - self.t_min) / (self.n_points - 1)

    def points(self) -> np.ndarray:
        if self.t_min == -self.t_max:
            # mirrored construction keeps the grid exactly symmetric (and hits 0 for odd n)
            if self.n_points % 2:
                half = np.linspace(0.0, self.t_max, (self.n_points + 1) // 2)
                return np.concatenate([-half[:0:-1], half])
            half = self.spacing * (0.5 + np.arange(self.n_points // 2))
            return np.concatenate([-half[::-1], half])
        return np.linspace(self.t_min, self.t_max, self.n_points)


def frequency_amplitude(nu1, nu2, params: SpectralParams, model: SpectralModel):
    """Unnormalized spectral amplitude at detunings nu1, nu2 (rad/s).

    Both models share the pump envelope exp(-(nu1+nu2)^2 tau_p^2 / 2).  The
    Gaussian model uses exp(-(nu1-nu2)^2 tau_L^2 / 2) for the phase-matching
    factor; the exact model uses sinc(tau_L^2 (nu1-nu2)^2 / 2), whose argument
    equals L B (omega_1 - omega_2)^2 / (2 c omega_0).  The directional phases
    e^{i nu Delta t} are applied by the caller.
    """
    model = SpectralModel(model)
    nu1 = np.asarray(nu1, dtype=float)
    nu2 = np.asarray(nu2, dtype=float)
    pump = np.exp(-((nu1 + nu2) * params.tau_p) ** 2 / 2.0)
    d2 = (nu1 - nu2) ** 2 * params.tau_L ** 2 / 2.0
    if model is SpectralModel.GAUSSIAN_MODEL:
        match = np.exp(-d2)
    else:
        match = np.sinc(d2 / np.pi)
    return pump * match


def fourier_prefactor(params: SpectralParams) -> float:
    """Constant linking the unit-peak analytic temporal amplitude to the raw transform.

    Integrating the Gaussian-model amplitude over nu1, nu2 with kernel
    e^{i(nu1 t1 + nu2 t2)} yields pi / (tau_p tau_L) times the analytic form.
    """
    return math.pi / (params.tau_p * params.tau_L)


def _gauss_diff(y, tau_L):
    return np.exp(-np.asarray(y, dtype=float) ** 2 / (8.0 * tau_L ** 2))


def temporal_amplitude_analytic(t1, t2, params: SpectralParams, include_pump_envelope: bool = False):
    """Closed-form temporal amplitudes ``(up_first, down_first)``.

    ``up_first`` multiplies the directional term with photon 1 up and photon 2
    down; ``down_first`` the reverse ordering.  Both peak at 1.  The common
    sum-time factor exp(-(t1+t2+dt)^2 / 8 tau_p^2) is included only on request.
    """
    t1 = np.asarray(t1, dtype=float)
    t2 = np.asarray(t2, dtype=float)
    dt = params.delta_t
    up_first = _gauss_diff(t1 - t2 + dt, params.tau_L)
    down_first = _gauss_diff(t1 - t2 - dt, params.tau_L)
    if include_pump_envelope:
        env = np.exp(-(t1 + t2 + dt) ** 2 / (8.0 * params.tau_p ** 2))
        up_first, down_first = up_first * env, down_first * env
    return up_first.astype(complex), down_first.astype(complex)


@dataclass(frozen=True)
class FrequencyGrid:
    """Symmetric trapezoid grid over nu1+nu2 (sum) and nu1-nu2 (difference), rad/s."""

    sum_max: float
    diff_max: float
    n_sum: int
    n_diff: int

    @classmethod
    def for_params(cls, params: SpectralParams, span: float = 8.0, points_per_sigma: float = 10.0):
        n_sum = 2 * int(math.ceil(span * points_per_sigma)) + 1
        return cls(span / params.tau_p, span / params.tau_L, n_sum, n_sum)

    @property
    def sum_spacing(self) -> float:
        return 2 * self.sum_max / (self.n_sum - 1)

    @property
    def diff_spacing(self) -> float:
        return 2 * self.diff_max / (self.n_diff - 1)

    def check(self, params: SpectralParams, min_span: float = 6.0, min_points_per_sigma: float = 8.0):
        """Reject grids that truncate or under-resolve the spectral envelope."""
        sig_sum, sig_diff = 1.0 / params.tau_p, 1.0 / params.tau_L
        if self.sum_max < min_span * sig_sum or self.diff_max < min_span * sig_diff:
            raise ValueError(f"frequency grid spans fewer than {min_span} envelope widths")
        if (self.sum_spacing > sig_sum / min_points_per_sigma
                or self.diff_spacing > sig_diff / min_points_per_sigma):
            raise ValueError(f"frequency grid has fewer than {min_points_per_sigma} points per envelope width")


def _trapezoid_weights(n: int, h: float) -> np.ndarray:
    w = np.full(n, h)
    w[0] = w[-1] = h / 2
    return w


def _quadrature(t1, t2, params, grid, model):
    sig = np.linspace(-grid.sum_max, grid.sum_max, grid.n_sum)
    dif = np.linspace(-grid.diff_max, grid.diff_max, grid.n_diff)
    w_sig = _trapezoid_weights(grid.n_sum, grid.sum_spacing)
    w_dif = _trapezoid_weights(grid.n_diff, grid.diff_spacing)
    S, D = np.meshgrid(sig, dif, indexing="ij")
    envelope = frequency_amplitude((S + D) / 2, (S - D) / 2, params, model)

    dt = params.delta_t
    a = (t1 + t2 + dt) / 2  # conjugate to the sum frequency
    sum_part = (w_sig * np.exp(1j * np.outer(a, sig))) @ envelope
    out = []
    for b in ((t1 - t2 + dt) / 2, (t1 - t2 - dt) / 2):
        diff_part = w_dif * np.exp(1j * np.outer(b, dif))
        # d(nu1) d(nu2) = d(sum) d(diff) / 2
        out.append(0.5 * np.sum(sum_part * diff_part, axis=1))
    return out


def temporal_amplitude_numeric(t1, t2, params: SpectralParams, nu_grid: FrequencyGrid | None = None,
                               model: SpectralModel = SpectralModel.GAUSSIAN_MODEL, rtol: float = 1e-8,
                               max_refinements: int = 6):
    """Fourier transform of the spectral amplitude by 2-D trapezoid quadrature.

    Returns the raw ``(up_first, down_first)`` integrals, each including its
    directional delay phase e^{i nu_1 dt} or e^{i nu_2 dt}.  With an explicit
    ``nu_grid`` the quadrature is done once on that grid; otherwise the grid is
    refined until the result changes by less than ``rtol``.
    """
    t1, t2 = np.broadcast_arrays(np.asarray(t1, dtype=float), np.asarray(t2, dtype=float))
    shape = t1.shape
    t1, t2 = t1.ravel(), t2.ravel()
    if nu_grid is not None:
        nu_grid.check(params)
        res = _quadrature(t1, t2, params, nu_grid, model)
    else:
        span, density = 8.0, 8.0
        res = _quadrature(t1, t2, params, FrequencyGrid.for_params(params, span, density), model)
        for _ in range(max_refinements):
            span, density = span + 2.0, density * 1.5
            new = _quadrature(t1, t2, params, FrequencyGrid.for_params(params, span, density), model)
            ref = np.linalg.norm(np.concatenate(new))
            change = np.linalg.norm(np.concatenate(new) - np.concatenate(res))
            res = new
            if ref == 0 or change <= rtol * ref:
                break
    return res[0].reshape(shape), res[1].reshape(shape)


def amplitudes_A(x, params: SpectralParams):
    """(A_plus, A_minus) at arrival-time difference x = t1 - t2.

    A_plus multiplies the bunched Bell state Phi-, A_minus the split one Psi-.
    """
    g1 = _gauss_diff(np.asarray(x, dtype=float) + params.delta_t, params.tau_L)
    g2 = _gauss_diff(np.asarray(x, dtype=float) - params.delta_t, params.tau_L)
    return g1 + g2, g1 - g2


@dataclass(frozen=True)
class TemporalAmplitudes:
    grid: TimeGrid
    a_plus: np.ndarray
    a_minus: np.ndarray


def temporal_amplitudes(params: SpectralParams, grid: TimeGrid) -> TemporalAmplitudes:
    a_plus, a_minus = amplitudes_A(grid.points(), params)
    return TemporalAmplitudes(grid, a_plus, a_minus)


def output_wavefunction(t1, t2, params: SpectralParams) -> np.ndarray:
    """Post-beamsplitter wave function psi[..., xi1, xi2] with the sum-time factor dropped.

    Equal to (A_plus Phi- + A_minus Psi-)/sqrt(2), directions indexed 0 = up, 1 = down.
    """
    a_plus, a_minus = amplitudes_A(np.asarray(t1, dtype=float) - np.asarray(t2, dtype=float), params)
    phi_minus = np.array([[1.0, 0.0], [0.0, -1.0]]) / _SQ2
    psi_minus = np.array([[0.0, 1.0], [-1.0, 0.0]]) / _SQ2
    return (a_plus[..., None, None] * phi_minus + a_minus[..., None, None] * psi_minus) / _SQ2


def density_normalization(params: SpectralParams) -> float:
    """Constant N with integral of N(|A+|^2 + |A-|^2) over x equal to one."""
    return 1.0 / (8.0 * math.sqrt(math.pi) * params.tau_L)


def density_f(x, sign: Sign, params: SpectralParams):
    """Probability density in x = t1 - t2 of unsplit (PLUS) or split (MINUS) pairs."""
    a_plus, a_minus = amplitudes_A(x, params)
    a = a_plus if Sign(sign) is Sign.PLUS else a_minus
    return density_normalization(params) * a * a


def total_probability(sign: Sign, params: SpectralParams) -> float:
    """w_pm = (1 pm exp(-(dt / 2 tau_L)^2)) / 2."""
    visibility = math.exp(-(params.delta_t / (2.0 * params.tau_L)) ** 2)
    return 0.5 * (1.0 + int(Sign(sign)) * visibility)


def isolated_peak_fwhm(tau_L: float) -> float:
    """FWHM of one isolated lobe exp(-y^2 / 4 tau_L^2) of the densities: 4 sqrt(ln 2) tau_L."""
    return 4.0 * math.sqrt(math.log(2.0)) * tau_L


class Peak(NamedTuple):
    position: float
    width_fwhm: float


def _half_crossing(x, y, i, half, step):
    j = i
    while 0 <= j + step < len(y) and y[j + step] > half:
        j += step
    k = j + step
    if not 0 <= k < len(y):
        return math.nan
    # linear interpolation between the last point above and the first point at/below half
    return x[j] + (half - y[j]) * (x[k] - x[j]) / (y[k] - y[j])


def locate_peaks(x, y, threshold: float = 0.0) -> list:
    """Local maxima of sampled data, refined by a parabola through three points."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    peaks = []
    for i in range(1, len(y) - 1):
        if not (y[i] > y[i - 1] and y[i] >= y[i + 1] and y[i] > threshold):
            continue
        denom = y[i - 1] - 2 * y[i] + y[i + 1]
        offset = 0.5 * (y[i - 1] - y[i + 1]) / denom if denom != 0 else 0.0
        h = 0.5 * (x[i + 1] - x[i - 1])
        top = y[i] - 0.25 * (y[i - 1] - y[i + 1]) * offset
        half = top / 2
        left = _half_crossing(x, y, i, half, -1)
        right = _half_crossing(x, y, i, half, +1)
        peaks.append(Peak(float(x[i] + offset * h), float(right - left)))
    return peaks


def find_peaks(sign: Sign, params: SpectralParams, grid: TimeGrid, rel_threshold: float = 1e-12) -> list:
    """Peaks of the split or unsplit density sampled on ``grid``.

    The grid must cover +-(|dt| + 6 tau_L) with at least 16 points per tau_L.
    Maxima below ``rel_threshold`` times the largest attainable density are ignored.
    """
    reach = abs(params.delta_t) + 6.0 * params.tau_L
    if grid.t_min > -reach or grid.t_max < reach:
        raise ValueError(f"grid must span +-{reach:.6g} s")
    if grid.spacing > params.tau_L / 16:
        raise ValueError("grid under-resolves the density (need >= 16 points per tau_L)")
    x = grid.points()
    y = density_f(x, sign, params)
    return locate_peaks(x, y, rel_threshold * 4.0 * density_normalization(params))
