import math
import warnings

import mpmath
import numpy as np
import pytest
from scipy import integrate, optimize

from homsim.fock import transform_slots
from homsim.spectral import (C_LIGHT, FrequencyGrid, ShortPulseWarning, Sign, SpectralModel, SpectralParams,
                             TimeGrid, amplitudes_A, delay_from_path, density_f, density_normalization,
                             find_peaks, fourier_prefactor, frequency_amplitude, isolated_peak_fwhm,
                             locate_peaks, tau_L_from_crystal, temporal_amplitude_analytic,
                             temporal_amplitude_numeric, temporal_amplitudes, total_probability,
                             output_wavefunction)

TAU_L = 100e-15
TAU_P = 10e-12


def params(delta_t=0.0, tau_L=TAU_L, tau_p=TAU_P):
    return SpectralParams(tau_p=tau_p, tau_L=tau_L, delta_t=delta_t)


def _quad_density(sign, p):
    reach = abs(p.delta_t) + 10 * p.tau_L
    pts = sorted({-p.delta_t, 0.0, p.delta_t})
    val, _ = integrate.quad(lambda x: density_f(x, sign, p), -reach, reach, points=pts,
                            epsabs=1e-14, epsrel=1e-13, limit=200)
    return val


# --- parameters ---

def test_tau_L_from_crystal():
    mpmath.mp.dps = 40
    oracle = float(mpmath.sqrt(mpmath.mpf("0.004") * mpmath.mpf("2.5e-25")) / 2)
    assert tau_L_from_crystal(0.004, 2.5e-25) == pytest.approx(oracle, rel=1e-15)
    assert oracle == pytest.approx(1.5811e-14, rel=1e-4)
    assert tau_L_from_crystal(0.016, 2.5e-25) == pytest.approx(2 * oracle, rel=1e-15)


@pytest.mark.parametrize("L,k", [(0.0, 1e-25), (0.01, 0.0), (-1.0, 1e-25)])
def test_tau_L_from_crystal_rejects_degenerate(L, k):
    with pytest.raises(ValueError):
        tau_L_from_crystal(L, k)


def test_delay_from_path():
    assert delay_from_path(0.0) == 0.0
    assert delay_from_path(3.0e-4) == pytest.approx(3.0e-4 / 299792458.0, rel=1e-15)
    assert delay_from_path(3.0e-4) == pytest.approx(1.0007e-12, rel=1e-4)
    assert delay_from_path(C_LIGHT) == 1.0
    with pytest.raises(ValueError):
        delay_from_path(-1e-6)


def test_params_from_crystal_and_dispersion_constant():
    p = SpectralParams.from_crystal(0.004, 2.5e-25, tau_p=TAU_P, omega_0=4.7e15)
    assert p.tau_L == pytest.approx(math.sqrt(0.004 * 2.5e-25) / 2, rel=1e-12)
    assert p.dispersion_constant == pytest.approx(C_LIGHT * 4.7e15 / 4 * 2.5e-25, rel=1e-15)
    with pytest.raises(ValueError, match="inconsistent"):
        SpectralParams(tau_p=TAU_P, tau_L=p.tau_L * 1.001, crystal_length_L=0.004, k1_second_deriv=2.5e-25)


@pytest.mark.parametrize("kw", [dict(tau_p=0.0), dict(tau_L=0.0), dict(tau_L=-1e-13), dict(delta_t=math.inf)])
def test_params_validation(kw):
    base = dict(tau_p=TAU_P, tau_L=TAU_L, delta_t=0.0)
    base.update(kw)
    with pytest.raises(ValueError):
        SpectralParams(**base)


def test_short_pulse_warns():
    with pytest.warns(ShortPulseWarning):
        SpectralParams(tau_p=1e-12, tau_L=TAU_L)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        SpectralParams(tau_p=10e-12, tau_L=TAU_L)


def test_time_grid_symmetric_points_are_mirrored():
    for n in (7, 8, 1601):
        x = TimeGrid.symmetric(3.7e-13, n).points()
        assert len(x) == n
        assert np.array_equal(x, -x[::-1])
        np.testing.assert_allclose(np.diff(x), (x[-1] - x[0]) / (n - 1), rtol=1e-9)
    assert 0.0 in TimeGrid.symmetric(1.0, 5).points()
    with pytest.raises(ValueError):
        TimeGrid(1.0, 0.0, 10)
    with pytest.raises(ValueError):
        TimeGrid(0.0, 1.0, 1)


# --- spectral amplitude ---

@pytest.mark.parametrize("model", list(SpectralModel))
def test_frequency_amplitude_peak(model):
    assert frequency_amplitude(0.0, 0.0, params(), model) == 1.0


def test_frequency_amplitude_antidiagonal():
    p = params()
    nu = np.linspace(-3e13, 3e13, 11)
    np.testing.assert_allclose(frequency_amplitude(nu, -nu, p, SpectralModel.GAUSSIAN_MODEL),
                               np.exp(-2 * nu ** 2 * p.tau_L ** 2), rtol=1e-14)


def test_sinc_has_zero_where_gaussian_does_not():
    p = params()
    # first zero: tau_L^2 (nu1 - nu2)^2 / 2 = pi
    d = math.sqrt(2 * math.pi) / p.tau_L
    sinc = frequency_amplitude(d / 2, -d / 2, p, SpectralModel.SINC_EXACT)
    gauss = frequency_amplitude(d / 2, -d / 2, p, SpectralModel.GAUSSIAN_MODEL)
    assert abs(sinc) < 1e-15
    assert gauss == pytest.approx(math.exp(-math.pi), rel=1e-14)


def test_sinc_argument_matches_crystal_form():
    p = SpectralParams.from_crystal(0.004, 2.5e-25, tau_p=TAU_P, omega_0=4.7e15)
    d = 3e13
    arg = p.crystal_length_L * p.dispersion_constant / (2 * p.c * p.omega_0) * d ** 2
    assert frequency_amplitude(d / 2, -d / 2, p, SpectralModel.SINC_EXACT) == pytest.approx(
        math.sin(arg) / arg, rel=1e-12)


# --- temporal amplitudes ---

def test_analytic_coincident_times():
    up, down = temporal_amplitude_analytic(1e-13, 1e-13, params())
    assert up == 1.0 and down == 1.0


def test_analytic_at_delay_offset():
    dt = 150e-15
    p = params(dt)
    up, down = temporal_amplitude_analytic(dt, 0.0, p)
    assert down == 1.0
    assert up == pytest.approx(math.exp(-(2 * dt) ** 2 / (8 * TAU_L ** 2)), rel=1e-14)


def test_analytic_far_tail():
    up, down = temporal_amplitude_analytic(3e-12, 0.0, params(100e-15))
    assert abs(up) < 1e-8 and abs(down) < 1e-8


def test_analytic_pump_envelope():
    p = params(50e-15)
    t1, t2 = 4e-12, 1e-12
    bare = temporal_amplitude_analytic(t1, t2, p)
    full = temporal_amplitude_analytic(t1, t2, p, include_pump_envelope=True)
    env = math.exp(-(t1 + t2 + p.delta_t) ** 2 / (8 * p.tau_p ** 2))
    assert full[0] == pytest.approx(bare[0] * env) and full[1] == pytest.approx(bare[1] * env)


def _lattice(p, n=5):
    s = -p.delta_t + np.linspace(-6, 6, n) * p.tau_p
    x = np.linspace(-1, 1, n) * (abs(p.delta_t) + 6 * p.tau_L)
    S, X = np.meshgrid(s, x, indexing="ij")
    return (S + X).ravel() / 2, (S - X).ravel() / 2


@pytest.mark.parametrize("seed", range(5))
def test_numeric_matches_analytic(seed):
    rng = np.random.default_rng(seed)
    p = params(delta_t=rng.uniform(0, 5) * 80e-15, tau_L=rng.uniform(20e-15, 400e-15),
               tau_p=rng.uniform(10e-12, 40e-12))
    t1, t2 = _lattice(p)
    ana = np.concatenate(temporal_amplitude_analytic(t1, t2, p, include_pump_envelope=True))
    num = np.concatenate(temporal_amplitude_numeric(t1, t2, p, FrequencyGrid.for_params(p)))
    err = np.linalg.norm(num - fourier_prefactor(p) * ana) / np.linalg.norm(num)
    assert err < 1e-6


def test_numeric_peak_is_real_positive():
    p = params()
    up, down = temporal_amplitude_numeric(0.0, 0.0, p)
    for v in (up, down):
        assert v.real > 0 and abs(v.imag) < 1e-12 * v.real
        assert v.real == pytest.approx(fourier_prefactor(p), rel=1e-10)


def test_numeric_rejects_bad_grid():
    p = params()
    with pytest.raises(ValueError, match="points per"):
        temporal_amplitude_numeric(0.0, 0.0, p, FrequencyGrid(8 / p.tau_p, 8 / p.tau_L, 33, 33))
    with pytest.raises(ValueError, match="spans"):
        temporal_amplitude_numeric(0.0, 0.0, p, FrequencyGrid(4 / p.tau_p, 8 / p.tau_L, 201, 201))


def test_sinc_model_discrepancy_is_finite():
    p = params(100e-15)
    t1, t2 = _lattice(p)
    grid = FrequencyGrid.for_params(p, span=16.0)
    sinc = np.concatenate(temporal_amplitude_numeric(t1, t2, p, grid, SpectralModel.SINC_EXACT))
    gauss = np.concatenate(temporal_amplitude_analytic(t1, t2, p, include_pump_envelope=True))
    disc = np.linalg.norm(sinc / np.abs(sinc).max() - gauss) / np.linalg.norm(gauss)
    # reported only: the two models share peak and symmetry but not shape
    assert np.isfinite(disc) and disc > 0


# --- A+-, densities, totals ---

def test_amplitudes_A_examples():
    p = params(120e-15)
    a_plus, a_minus = amplitudes_A(0.0, p)
    assert a_minus == 0.0
    assert amplitudes_A(0.0, params())[0] == 2.0
    _, a_minus = amplitudes_A(p.delta_t, p)
    assert a_minus == pytest.approx(math.exp(-p.delta_t ** 2 / (2 * TAU_L ** 2)) - 1, rel=1e-14)
    assert a_minus < 0


def test_temporal_amplitudes_parity():
    p = params(170e-15)
    ta = temporal_amplitudes(p, TimeGrid.symmetric(2e-12, 801))
    assert ta.a_minus[400] == 0.0
    np.testing.assert_allclose(ta.a_plus, ta.a_plus[::-1], atol=1e-12 * 2)
    np.testing.assert_allclose(ta.a_minus, -ta.a_minus[::-1], atol=1e-12 * 2)


def test_output_wavefunction_is_transformed_input():
    p = params(130e-15)
    for t1, t2 in [(0.0, 0.0), (1e-13, -5e-14), (-3e-13, 2e-13)]:
        up, down = temporal_amplitude_analytic(t1, t2, p)
        psi_in = np.array([[0, up], [down, 0]])
        np.testing.assert_allclose(output_wavefunction(t1, t2, p), transform_slots(psi_in), atol=1e-15)


def test_output_wavefunction_exchange_symmetry():
    p = params(210e-15)
    rng = np.random.default_rng(5)
    t1, t2 = rng.normal(size=(2, 200)) * 3e-13
    w = output_wavefunction(t1, t2, p)
    swapped = np.swapaxes(output_wavefunction(t2, t1, p), -1, -2)
    np.testing.assert_allclose(w, swapped, atol=1e-14)


def test_f_minus_vanishes_at_zero():
    for dt in (0.0, 50e-15, 3e-13):
        assert density_f(0.0, Sign.MINUS, params(dt)) == 0.0


@pytest.mark.parametrize("ratio", [0, 0.5, 1, 2, 4, 8])
def test_normalization_and_closed_form_totals(ratio):
    p = params(ratio * TAU_L)
    w_minus = _quad_density(Sign.MINUS, p)
    w_plus = _quad_density(Sign.PLUS, p)
    assert abs(w_plus + w_minus - 1) < 1e-9
    assert abs(w_minus - total_probability(Sign.MINUS, p)) < 1e-9
    assert abs(w_plus - total_probability(Sign.PLUS, p)) < 1e-9


def test_total_probability_examples():
    assert total_probability(Sign.MINUS, params()) == 0.0
    assert total_probability(Sign.PLUS, params()) == 1.0
    far = params(1e-9)
    assert total_probability(Sign.MINUS, far) == 0.5 == total_probability(Sign.PLUS, far)
    assert total_probability(Sign.MINUS, params(2 * TAU_L)) == pytest.approx(0.5 * (1 - math.exp(-1)), rel=1e-15)
    assert total_probability(Sign.MINUS, params(2 * TAU_L)) == pytest.approx(0.31606, abs=5e-6)


def test_w_minus_monotone_and_bounded():
    w = [total_probability(Sign.MINUS, params(d)) for d in np.linspace(0, 2e-12, 400)]
    assert all(b >= a for a, b in zip(w, w[1:]))
    assert min(w) >= 0 and max(w) <= 0.5


def test_density_parity():
    p = params(230e-15)
    x = np.linspace(0, 2e-12, 999)
    for s in Sign:
        f = density_f(x, s, p)
        assert np.max(np.abs(f - density_f(-x, s, p))) <= 1e-12 * f.max()


@pytest.mark.parametrize("eta", [0.3, 1.0, 1.3])
def test_eta_collapse(eta):
    u = np.linspace(-4, 4, 401)
    curves = []
    for tau_L in (37e-15, 100e-15, 480e-15):
        p = params(eta * math.sqrt(8) * tau_L, tau_L=tau_L)
        scale = math.sqrt(8) * tau_L
        curves.append([scale * density_f(u * scale, s, p) for s in Sign])
    for c in curves[1:]:
        for a, b in zip(curves[0], c):
            assert np.max(np.abs(a - b)) <= 1e-9 * np.max(np.abs(a))


def test_fig3_qualitative_ordering():
    u = np.linspace(-4, 4, 801)
    small = params(0.3 * math.sqrt(8) * TAU_L)
    x = u * math.sqrt(8) * TAU_L
    assert np.all(density_f(x, Sign.MINUS, small) <= density_f(x, Sign.PLUS, small))
    assert total_probability(Sign.MINUS, small) / total_probability(Sign.PLUS, small) < 0.1
    mid = params(math.sqrt(8) * TAU_L)
    ratio = total_probability(Sign.MINUS, mid) / total_probability(Sign.PLUS, mid)
    assert 0.5 < ratio < 1


def test_large_delay_densities_agree_outside_centre():
    dt = 20 * TAU_L
    p = params(dt)
    x = np.linspace(-dt - 6 * TAU_L, dt + 6 * TAU_L, 4001)
    fp, fm = density_f(x, Sign.PLUS, p), density_f(x, Sign.MINUS, p)
    keep = (np.abs(x) > 2 * TAU_L) & (fp > 1e-300)
    assert np.all(np.abs(fp[keep] - fm[keep]) <= 1e-6 * fp[keep])


def test_evaluation_independent_of_partitioning():
    p = params(90e-15)
    x = np.random.default_rng(0).normal(size=1000) * 3e-13
    whole = density_f(x, Sign.MINUS, p)
    parts = np.concatenate([density_f(c, Sign.MINUS, p) for c in np.array_split(x[::-1], 7)])[::-1]
    assert np.array_equal(whole, parts)


# --- peaks ---

def _grid_for(p, per_tau=32):
    reach = abs(p.delta_t) + 7 * p.tau_L
    n = 2 * int(math.ceil(reach / (p.tau_L / per_tau))) + 1
    return TimeGrid.symmetric(reach, n)


def _oracle_peak(sign, p, guess):
    res = optimize.minimize_scalar(lambda x: -density_f(x, sign, p), bounds=(guess - 2 * p.tau_L, guess + 2 * p.tau_L),
                                   method="bounded", options={"xatol": 1e-8 * p.tau_L})
    return res.x


@pytest.mark.parametrize("ratio", [0.85, 2, 2.83, 3.68, 4, 8])
def test_peaks_match_continuous_maximum(ratio):
    p = params(ratio * TAU_L)
    peaks = find_peaks(Sign.MINUS, p, _grid_for(p))
    assert len(peaks) == 2
    right = max(peaks).position
    assert right == pytest.approx(_oracle_peak(Sign.MINUS, p, p.delta_t), abs=2e-3 * TAU_L)
    assert min(peaks).position == pytest.approx(-right, abs=1e-9 * TAU_L)


def test_peaks_at_delay_for_large_delay():
    p = params(4 * TAU_L)
    peaks = find_peaks(Sign.MINUS, p, _grid_for(p, per_tau=16))
    assert [pk.position for pk in peaks] == pytest.approx([-4 * TAU_L, 4 * TAU_L], abs=0.05 * TAU_L)
    for pk in peaks:
        assert pk.width_fwhm == pytest.approx(isolated_peak_fwhm(TAU_L), rel=0.25)


def test_isolated_peak_fwhm_constant():
    # half maximum of exp(-y^2 / 4 tau^2) solved numerically
    y = optimize.brentq(lambda y: math.exp(-y * y / 4) - 0.5, 0, 10)
    assert isolated_peak_fwhm(1.0) == pytest.approx(2 * y, rel=1e-12)


def test_f_plus_single_peak_at_zero_delay():
    p = params()
    peaks = find_peaks(Sign.PLUS, p, _grid_for(p, 16))
    assert len(peaks) == 1
    assert peaks[0].position == pytest.approx(0.0, abs=1e-6 * TAU_L)


def test_f_minus_no_peaks_at_zero_delay():
    p = params()
    assert find_peaks(Sign.MINUS, p, _grid_for(p, 16)) == []


def test_find_peaks_rejects_bad_grid():
    p = params(2 * TAU_L)
    with pytest.raises(ValueError, match="span"):
        find_peaks(Sign.MINUS, p, TimeGrid.symmetric(5 * TAU_L, 4001))
    with pytest.raises(ValueError, match="under-resolves"):
        find_peaks(Sign.MINUS, p, TimeGrid.symmetric(9 * TAU_L, 101))


def test_locate_peaks_on_parabola():
    x = np.linspace(-1, 1, 21)
    peaks = locate_peaks(x, 1 - (x - 0.033) ** 2)
    assert len(peaks) == 1 and peaks[0].position == pytest.approx(0.033, abs=1e-12)
