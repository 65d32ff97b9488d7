"""``hom-sim`` command: run one scenario from a config file and write data tables."""
from __future__ import annotations

import argparse
import json
import math
import sys
import warnings
from pathlib import Path
from typing import NamedTuple

import numpy as np

from . import __version__
from .config import (ConfigError, Scenario, ScenarioConfig, config_items, parse_config)
from .fock import DH, UH, apply_beamsplitter, create_photon, format_ket, split_probability_of, vacuum
from .montecarlo import JITTER_MODEL, DetectionRun, dip_scan, simulate_run
from .polarization import (PolarizationAngles, split_probability, split_probability_pipeline,
                           superposed_input, unsplit_probability)
from .spectral import (FrequencyGrid, Sign, SpectralModel, TimeGrid, density_f, fourier_prefactor,
                       temporal_amplitude_analytic, temporal_amplitude_numeric, total_probability)

__all__ = ["run_scenario", "main", "ScenarioResult", "EXIT_OK", "EXIT_IO", "ORACLE_LATTICE"]

EXIT_OK = 0
EXIT_IO = 6
ORACLE_LATTICE = 5


class ScenarioResult(NamedTuple):
    status: int
    files: list


def _header(cfg: ScenarioConfig, extra=()) -> list:
    lines = [f"# homsim {__version__}"]
    lines += [f"# {k} = {text}" for k, text in config_items(cfg)]
    lines += [f"# {line}" for line in extra]
    return lines


def _cell(v, precision):
    if v is None:
        return ""
    if isinstance(v, str):
        return f'"{v}"' if "," in v else v
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(v)
    v = float(v)
    if math.isnan(v):
        return ""
    return f"{v:.{precision}e}"


def write_csv(path: Path, cfg: ScenarioConfig, columns, rows, extra_meta=()) -> Path:
    p = cfg.float_precision
    out = _header(cfg, extra_meta) + [",".join(columns)]
    out += [",".join(_cell(v, p) for v in row) for row in rows]
    path.write_text("\n".join(out) + "\n", encoding="utf-8")
    return path


def _write_json(path: Path, payload: dict) -> Path:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def _ideal(cfg, out: Path, echo):
    state = apply_beamsplitter(create_photon(create_photon(vacuum(), UH), DH))
    w = split_probability_of(state)
    rows = [(format_ket(occ), a.real, a.imag, abs(a) ** 2) for occ, a in state.amplitudes.items()]
    for ket, re, im, _ in rows:
        echo(f"{ket}: {_cell(re, cfg.float_precision)} {_cell(im, cfg.float_precision)}j")
    echo(f"split probability = {_cell(w, cfg.float_precision)}")
    return [write_csv(out / "ideal.csv", cfg, ["ket", "amplitude_re", "amplitude_im", "probability"], rows,
                      [f"split_probability = {_cell(w, cfg.float_precision)}"])]


def _polarization(cfg, out: Path, echo):
    alpha, beta_end = cfg.angles
    rows = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for beta in np.linspace(alpha, beta_end, cfg.n_points):
            ang = PolarizationAngles(alpha, float(beta))
            restored = split_probability_of(apply_beamsplitter(superposed_input(ang).state))
            rows.append((alpha, beta, alpha - beta, split_probability(ang), split_probability_pipeline(ang),
                         unsplit_probability(ang), restored))
    cols = ["alpha", "beta", "alpha_minus_beta", "w_split", "w_split_fock", "w_unsplit", "w_split_superposed"]
    return [write_csv(out / "polarization.csv", cfg, cols, rows)]


def _delay_density(cfg, out: Path, echo):
    p = cfg.params
    scale = math.sqrt(8.0) * p.tau_L
    xs = TimeGrid.symmetric(cfg.x_scaled_max, cfg.n_points).points()
    x = xs * scale
    fp, fm = density_f(x, Sign.PLUS, p), density_f(x, Sign.MINUS, p)
    rows = zip(x, xs, fp, fm, fp * scale, fm * scale)
    cols = ["x", "x_scaled", "f_plus", "f_minus", "f_plus_scaled", "f_minus_scaled"]
    meta = [f"eta_effective = {p.eta!r}", f"delta_t_effective = {p.delta_t!r} s"]
    echo(f"eta = {p.eta:.6g}, w_minus = {total_probability(Sign.MINUS, p):.9g}")
    return [write_csv(out / "delay_density.csv", cfg, cols, rows, meta)]


def _delay_scan(cfg, out: Path, echo):
    p = cfg.params
    dts = np.linspace(0.0, cfg.delta_t_max, cfg.n_points)
    w_plus = [total_probability(Sign.PLUS, p.with_delay(d)) for d in dts]
    w_minus = [total_probability(Sign.MINUS, p.with_delay(d)) for d in dts]
    cols = ["delta_t", "delta_t_over_tau_L", "w_plus", "w_minus"]
    columns = [dts, dts / p.tau_L, w_plus, w_minus]
    meta = []
    if cfg.run is not None:
        scan = dip_scan(dts, cfg.run)
        cols += ["w_minus_mc", "w_minus_mc_stderr"]
        columns += [scan.w_minus, scan.stderr]
        meta = [f"jitter_model = {JITTER_MODEL}", "per-point seed = splitmix64(seed + index)"]
    return [write_csv(out / "delay_scan.csv", cfg, cols, zip(*columns), meta)]


def _monte_carlo(cfg, out: Path, echo):
    result = simulate_run(cfg.run)
    ev = result.events
    prec = cfg.float_precision
    rows = [(int(i), _OUTCOME_LABELS[int(o)], tu, td)
            for i, o, tu, td in zip(ev.pair_index, ev.outcome, ev.t_up, ev.t_down)]
    events = write_csv(out / "monte_carlo_events.csv", cfg, ["pair_index", "outcome", "t_up", "t_down"], rows,
                       [f"jitter_model = {JITTER_MODEL}"])
    s = result.summary
    payload = {
        "homsim_version": __version__,
        "config": dict(config_items(cfg)),
        "jitter_model": JITTER_MODEL,
        "summary": {k: getattr(s, k) for k in s.__dataclass_fields__},
    }
    echo(f"w_minus = {_cell(s.w_minus, prec)} +- {_cell(s.w_minus_stderr, prec)} "
         f"(analytic {_cell(s.w_minus_analytic, prec)})")
    return [events, _write_json(out / "monte_carlo_summary.json", payload)]


_OUTCOME_LABELS = ["split", "bunched_up", "bunched_down"]


def oracle_lattice(params, n=ORACLE_LATTICE):
    """(t1, t2) points on an n x n lattice in sum and difference time.

    The sum t1 + t2 spans +-6 tau_p about -dt (three widths of the pump factor),
    the difference spans +-(|dt| + 6 tau_L).
    """
    s = -params.delta_t + np.linspace(-6.0, 6.0, n) * params.tau_p
    x = np.linspace(-1.0, 1.0, n) * (abs(params.delta_t) + 6.0 * params.tau_L)
    S, X = np.meshgrid(s, x, indexing="ij")
    return (S + X).ravel() / 2, (S - X).ravel() / 2


def oracle_comparison(params):
    """Relative L2 error of the closed-form temporal amplitude against quadrature."""
    t1, t2 = oracle_lattice(params)
    ana = np.concatenate(temporal_amplitude_analytic(t1, t2, params, include_pump_envelope=True))
    ana = ana * fourier_prefactor(params)
    num = np.concatenate(temporal_amplitude_numeric(t1, t2, params))
    return float(np.linalg.norm(num - ana) / np.linalg.norm(num)), t1, t2, ana, num


def _oracle(cfg, out: Path, echo):
    p = cfg.params
    err, t1, t2, ana, num = oracle_comparison(p)
    sinc_grid = FrequencyGrid.for_params(p, span=16.0, points_per_sigma=10.0)
    sinc = np.concatenate(temporal_amplitude_numeric(t1, t2, p, sinc_grid, SpectralModel.SINC_EXACT))
    discrepancy = float(np.linalg.norm(sinc / np.max(np.abs(sinc)) - num / np.max(np.abs(num)))
                        / np.linalg.norm(num / np.max(np.abs(num))))
    n = len(t1)
    rows = [(t1[i], t2[i], ana[i].real, ana[i].imag, num[i].real, num[i].imag,
             ana[n + i].real, ana[n + i].imag, num[n + i].real, num[n + i].imag) for i in range(n)]
    cols = ["t1", "t2", "up_analytic_re", "up_analytic_im", "up_numeric_re", "up_numeric_im",
            "down_analytic_re", "down_analytic_im", "down_numeric_re", "down_numeric_im"]
    echo(f"relative L2 error (analytic vs quadrature) = {err:.3e}")
    echo(f"sinc vs Gaussian model discrepancy (peak-normalized, relative L2) = {discrepancy:.3e}")
    payload = {"homsim_version": __version__, "config": dict(config_items(cfg)),
               "relative_l2_error": err, "sinc_model_discrepancy": discrepancy,
               "fourier_prefactor": fourier_prefactor(p)}
    return [write_csv(out / "oracle.csv", cfg, cols, rows,
                      [f"relative_l2_error = {err!r}", f"sinc_model_discrepancy = {discrepancy!r}"]),
            _write_json(out / "oracle.json", payload)]


_RUNNERS = {
    Scenario.IDEAL: _ideal,
    Scenario.POLARIZATION: _polarization,
    Scenario.DELAY_DENSITY: _delay_density,
    Scenario.DELAY_SCAN: _delay_scan,
    Scenario.MONTE_CARLO: _monte_carlo,
    Scenario.ORACLE: _oracle,
}


def run_scenario(config: ScenarioConfig, echo=print) -> ScenarioResult:
    """Run ``config`` and write its tables into ``config.output_path``."""
    out = Path(config.output_path)
    try:
        out.mkdir(parents=True, exist_ok=True)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            files = _RUNNERS[config.scenario](config, out, echo)
    except OSError as exc:
        print(f"hom-sim: cannot write output in {str(out)!r}: {exc.strerror or exc}", file=sys.stderr)
        return ScenarioResult(EXIT_IO, [])
    return ScenarioResult(EXIT_OK, files)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="hom-sim", description="Hong-Ou-Mandel interference scenarios")
    ap.add_argument("config", help="scenario file of 'key = value' lines")
    ap.add_argument("--output", help="output directory (overrides output_path)")
    ap.add_argument("--seed", type=int, help="random seed (overrides seed)")
    ap.add_argument("--precision", type=int, help="significant decimals in tables (overrides float_precision)")
    args = ap.parse_args(argv)
    try:
        text = Path(args.config).read_text(encoding="utf-8")
    except OSError as exc:
        print(f"hom-sim: cannot read {args.config!r}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_IO
    try:
        cfg = parse_config(text).with_overrides(args.output, args.seed, args.precision)
    except ConfigError as exc:
        print(f"hom-sim: {args.config}: {exc}", file=sys.stderr)
        return exc.exit_code
    return run_scenario(cfg).status


if __name__ == "__main__":
    sys.exit(main())
