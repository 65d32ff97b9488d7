"""Scenario configuration files: ``key = value`` lines with unit suffixes.

Times take fs/ps/ns/s (bare numbers are seconds), angles deg/rad (bare numbers
are radians), lengths nm/um/mm/m.  ``#`` starts a comment.  Unknown or
duplicate keys are errors.
"""
from __future__ import annotations

import math
import re
import warnings
from dataclasses import dataclass, replace
from enum import Enum

from .montecarlo import DetectionRun, DetectorConfig
from .polarization import PolarizationAngles
from .spectral import SpectralParams

__all__ = [
    "Scenario", "ScenarioConfig", "ConfigError", "ConfigSyntaxError", "MissingKeyError",
    "UnitError", "ConfigValidationError", "parse_config", "format_config", "DEFAULT_TAU_P",
]

DEFAULT_TAU_P = 10e-12


class ConfigError(Exception):
    exit_code = 2


class ConfigSyntaxError(ConfigError):
    exit_code = 2


class MissingKeyError(ConfigError):
    exit_code = 3


class UnitError(ConfigError):
    exit_code = 4


class ConfigValidationError(ConfigError):
    exit_code = 5


class Scenario(Enum):
    IDEAL = "ideal"
    POLARIZATION = "polarization"
    DELAY_DENSITY = "delay_density"
    DELAY_SCAN = "delay_scan"
    MONTE_CARLO = "monte_carlo"
    ORACLE = "oracle"


_UNITS = {
    "time": ({"fs": 1e-15, "ps": 1e-12, "ns": 1e-9, "s": 1.0}, "s"),
    "angle": ({"deg": math.pi / 180, "rad": 1.0}, "rad"),
    "length": ({"nm": 1e-9, "um": 1e-6, "mm": 1e-3, "m": 1.0}, "m"),
    "float": ({}, None),
    "int": ({}, None),
    "str": ({}, None),
}

# key -> kind; dict order is the canonical output order
_KEYS = {
    "scenario": "str",
    "tau_L": "time",
    "crystal_length": "length",
    "k1_second_deriv": "float",
    "omega_0": "float",
    "tau_p": "time",
    "delta_t": "time",
    "eta": "float",
    "delta_t_max": "time",
    "alpha": "angle",
    "beta": "angle",
    "x_scaled_max": "float",
    "n_points": "int",
    "n_pairs": "int",
    "seed": "int",
    "temporal_resolution": "time",
    "coincidence_window": "time",
    "output_path": "str",
    "float_precision": "int",
}

_COMMON = {"scenario", "output_path", "float_precision"}
_SPECTRAL = {"tau_L", "crystal_length", "k1_second_deriv", "omega_0", "tau_p"}
_DETECTION = {"n_pairs", "seed", "temporal_resolution", "coincidence_window"}
_ALLOWED = {
    Scenario.IDEAL: _COMMON,
    Scenario.POLARIZATION: _COMMON | {"alpha", "beta", "n_points"},
    Scenario.DELAY_DENSITY: _COMMON | _SPECTRAL | {"delta_t", "eta", "x_scaled_max", "n_points"},
    Scenario.DELAY_SCAN: _COMMON | _SPECTRAL | _DETECTION | {"delta_t_max", "n_points"},
    Scenario.MONTE_CARLO: _COMMON | _SPECTRAL | _DETECTION | {"delta_t"},
    Scenario.ORACLE: _COMMON | _SPECTRAL | {"delta_t"},
}

_NUMBER = re.compile(r"^([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?|[-+]?inf)\s*([A-Za-z0-9/_]*)$")


@dataclass(frozen=True)
class ScenarioConfig:
    """Validated scenario description, all quantities in SI units and radians."""

    scenario: Scenario
    params: SpectralParams | None = None
    angles: PolarizationAngles | None = None  # polarization sweep runs beta from alpha to this beta
    run: DetectionRun | None = None
    output_path: str = "."
    float_precision: int = 9
    n_points: int | None = None
    eta: float | None = None
    delta_t_max: float | None = None
    x_scaled_max: float | None = None

    def with_overrides(self, output_path=None, seed=None, float_precision=None) -> ScenarioConfig:
        cfg = self
        if output_path is not None:
            cfg = replace(cfg, output_path=str(output_path))
        if float_precision is not None:
            if not 1 <= float_precision <= 17:
                raise ConfigValidationError(f"precision must be in 1..17, got {float_precision}")
            cfg = replace(cfg, float_precision=int(float_precision))
        if seed is not None and cfg.run is not None:
            try:
                cfg = replace(cfg, run=replace(cfg.run, seed=int(seed)))
            except ValueError as exc:
                raise ConfigValidationError(str(exc)) from None
        return cfg


def _convert(key: str, raw: str, lineno: int):
    kind = _KEYS[key]
    if kind == "str":
        return raw
    m = _NUMBER.match(raw)
    if not m:
        raise ConfigSyntaxError(f"line {lineno}: malformed value for {key!r}: {raw!r}")
    number, unit = m.groups()
    if kind == "int":
        if unit or not re.fullmatch(r"[-+]?\d+", number):
            raise ConfigSyntaxError(f"line {lineno}: {key!r} needs an integer, got {raw!r}")
        return int(number)
    value = float(number)
    units, _ = _UNITS[kind]
    if not unit:
        return value
    if unit not in units:
        expected = ", ".join(units) or "no unit"
        raise UnitError(f"line {lineno}: unknown unit {unit!r} for {key!r} (expected {expected})")
    return value * units[unit]


def _read_pairs(text: str) -> dict:
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigSyntaxError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, raw = (part.strip() for part in line.split("=", 1))
        if key not in _KEYS:
            raise ConfigSyntaxError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigSyntaxError(f"line {lineno}: duplicate key {key!r}")
        if not raw:
            raise ConfigSyntaxError(f"line {lineno}: empty value for {key!r}")
        values[key] = _convert(key, raw, lineno)
    return values


def _spectral_params(v: dict, delta_t: float) -> SpectralParams:
    tau_p = v.get("tau_p", DEFAULT_TAU_P)
    omega_0 = v.get("omega_0")
    crystal = "crystal_length" in v or "k1_second_deriv" in v
    if crystal:
        if "crystal_length" not in v or "k1_second_deriv" not in v:
            raise MissingKeyError("crystal_length and k1_second_deriv must be given together")
        p = SpectralParams.from_crystal(v["crystal_length"], v["k1_second_deriv"], tau_p, delta_t, omega_0)
        if "tau_L" in v and v["tau_L"] != p.tau_L:
            p = replace(p, tau_L=v["tau_L"])  # re-validated against the crystal data
        return p
    if "tau_L" not in v:
        raise MissingKeyError("missing required key 'tau_L' (or crystal_length + k1_second_deriv)")
    return SpectralParams(tau_p=tau_p, tau_L=v["tau_L"], delta_t=delta_t, omega_0=omega_0)


def _require(v: dict, *keys):
    for k in keys:
        if k not in v:
            raise MissingKeyError(f"missing required key {k!r} for scenario {v['scenario']!r}")


def _build(v: dict) -> ScenarioConfig:
    scenario = Scenario(v["scenario"])
    common = dict(scenario=scenario, output_path=v.get("output_path", "."),
                  float_precision=v.get("float_precision", 9))
    if not 1 <= common["float_precision"] <= 17:
        raise ValueError(f"float_precision must be in 1..17, got {common['float_precision']}")

    def detector():
        return DetectorConfig(v.get("temporal_resolution", 0.0), v.get("coincidence_window", 1e-9))

    if scenario is Scenario.IDEAL:
        return ScenarioConfig(**common)
    if scenario is Scenario.POLARIZATION:
        alpha = v.get("alpha", 0.0)
        angles = PolarizationAngles(alpha, v.get("beta", alpha - math.pi)).validated()
        return ScenarioConfig(**common, angles=angles, n_points=_n_points(v, 181))
    if scenario is Scenario.DELAY_DENSITY:
        if ("delta_t" in v) == ("eta" in v):
            raise MissingKeyError("delay_density needs exactly one of 'delta_t' or 'eta'")
        if "eta" in v:
            params = _spectral_params(v, 0.0)
            params = params.with_delay(v["eta"] * math.sqrt(8.0) * params.tau_L)
        else:
            params = _spectral_params(v, v["delta_t"])
        x_max = v.get("x_scaled_max", 4.0)
        if not x_max > 0:
            raise ValueError(f"x_scaled_max must be positive, got {x_max!r}")
        return ScenarioConfig(**common, params=params, eta=v.get("eta"), x_scaled_max=x_max,
                              n_points=_n_points(v, 1601))
    if scenario is Scenario.DELAY_SCAN:
        _require(v, "delta_t_max")
        if not v["delta_t_max"] >= 0:
            raise ValueError(f"delta_t_max must be non-negative, got {v['delta_t_max']!r}")
        params = _spectral_params(v, 0.0)
        n_pairs = v.get("n_pairs", 0)
        if n_pairs < 0:
            raise ValueError(f"n_pairs must be non-negative, got {n_pairs}")
        run = DetectionRun(n_pairs, v.get("seed", 0), params, detector()) if n_pairs else None
        return ScenarioConfig(**common, params=params, run=run, delta_t_max=v["delta_t_max"],
                              n_points=_n_points(v, 81))
    if scenario is Scenario.MONTE_CARLO:
        _require(v, "delta_t", "n_pairs")
        params = _spectral_params(v, v["delta_t"])
        run = DetectionRun(v["n_pairs"], v.get("seed", 0), params, detector())
        return ScenarioConfig(**common, params=params, run=run)
    # oracle
    return ScenarioConfig(**common, params=_spectral_params(v, v.get("delta_t", 0.0)))


def _n_points(v, default):
    n = v.get("n_points", default)
    if n < 2:
        raise ValueError(f"n_points must be >= 2, got {n}")
    return n


def parse_config(text: str) -> ScenarioConfig:
    """Parse and validate a configuration document."""
    v = _read_pairs(text)
    if "scenario" not in v:
        raise MissingKeyError("missing required key 'scenario'")
    try:
        scenario = Scenario(v["scenario"])
    except ValueError:
        names = ", ".join(s.value for s in Scenario)
        raise ConfigSyntaxError(f"unknown scenario {v['scenario']!r} (expected one of {names})") from None
    extra = sorted(set(v) - _ALLOWED[scenario])
    if extra:
        raise ConfigSyntaxError(f"keys {extra} do not apply to scenario {scenario.value!r}")
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            return _build(v)
    except (ValueError, TypeError) as exc:
        raise ConfigValidationError(str(exc)) from None


def _fmt(key: str, value) -> str:
    kind = _KEYS[key]
    if kind in ("str", "int"):
        return str(value)
    unit = _UNITS[kind][1]
    return repr(float(value)) + (f" {unit}" if unit else "")


def config_items(cfg: ScenarioConfig) -> list:
    """Normalized ``(key, text)`` pairs in canonical order."""
    v = {"scenario": cfg.scenario.value}
    p = cfg.params
    if p is not None:
        v["tau_L"] = p.tau_L
        if p.crystal_length_L is not None:
            v["crystal_length"] = p.crystal_length_L
            v["k1_second_deriv"] = p.k1_second_deriv
        if p.omega_0 is not None:
            v["omega_0"] = p.omega_0
        v["tau_p"] = p.tau_p
        if cfg.scenario is Scenario.DELAY_DENSITY and cfg.eta is not None:
            v["eta"] = cfg.eta
        elif cfg.scenario in (Scenario.DELAY_DENSITY, Scenario.MONTE_CARLO, Scenario.ORACLE):
            v["delta_t"] = p.delta_t
    if cfg.delta_t_max is not None:
        v["delta_t_max"] = cfg.delta_t_max
    if cfg.angles is not None:
        v["alpha"], v["beta"] = cfg.angles
    if cfg.x_scaled_max is not None:
        v["x_scaled_max"] = cfg.x_scaled_max
    if cfg.n_points is not None:
        v["n_points"] = cfg.n_points
    if cfg.scenario is Scenario.DELAY_SCAN:
        v["n_pairs"] = cfg.run.n_pairs if cfg.run else 0
    if cfg.run is not None:
        v["n_pairs"] = cfg.run.n_pairs
        v["seed"] = cfg.run.seed
        v["temporal_resolution"] = cfg.run.detector.temporal_resolution
        v["coincidence_window"] = cfg.run.detector.coincidence_window
    v["output_path"] = cfg.output_path
    v["float_precision"] = cfg.float_precision
    return [(k, _fmt(k, v[k])) for k in _KEYS if k in v]


def format_config(cfg: ScenarioConfig) -> str:
    """Render ``cfg`` in normalized units; `parse_config` reads it back unchanged."""
    return "".join(f"{k} = {text}\n" for k, text in config_items(cfg))
