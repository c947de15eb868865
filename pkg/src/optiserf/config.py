"""Run configuration: TOML loading, validation, and assembly of physics objects.

A config file is a single TOML document; every key has a compiled-in
default (printed by the ``defaults`` subcommand), so an empty file is a
valid configuration.  The absolute light-shift scale is fixed either by a
calibration pair (field, power) or by an explicit ``kappa`` -- exactly one
of the two.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

import numpy as np

from . import atoms
from .atoms import AlkaliSpecies, TWO_PI
from .bloch import RelaxationRates
from .errors import ConfigError, OptiserfError
from .lightshift import BeamParams, calibrate_scatter_scale, calibrate_shift_scale
from .sweep import SignalParams

DEFAULT_CONFIG_TOML = """\
# optiserf run configuration (all values shown are the compiled-in defaults)

[species]
name = "cesium"
nuclear_spin_2I = 7
electron_gyro_mhz_per_gauss = 2.8025
hyperfine_split_ghz = 9.1926
excited_split_ghz = 1.168
linewidth_mhz = 4.56
# lines = [{lower_F = 4, upper_F = 3, offset_ghz = 0.0, strength = 0.328125}, ...]
# shift_weights = [{lower_F = 4, upper_F = 3, weight = -0.0567}, ...]

[rates]
r_se = 170.0
r_sr = 85.0
r_u = 10.0

[beam]
detuning_ghz = 12.0          # blue of the reference (lowest) D1 line
handedness = 1
calibration_field_mg = 0.43  # resonance anchor: P*(this field) = this power
calibration_power_mw = 9.7
# kappa = ...                # alternative: explicit shift scale, rad/s/mW
scatter_rate_at_p_ref = 3.0  # photon-scattering rate at the calibration power
# scatter_scale = ...        # alternative explicit scale, 1/s/mW

[signal]
dt_s = 2e-4
duration_s = 0.35
noise_sigma = 0.0

[sweep]
b_min_mg = 0.0
b_max_mg = 1.5
b_points = 40
p_min_mw = 0.0
p_max_mw = 15.0
p_points = 40

# The default grid step is incommensurate with the line offsets, so no
# sample lands exactly on a line center (which would be an error).
[xsection]
nu_min_ghz = -4.0
nu_max_ghz = 16.0
points = 1000

[waterfall]
p_min_mw = 0.0
p_max_mw = 12.0
p_points = 25

[run]
seed_base = 1
out_dir = "out"
"""


@dataclass(frozen=True)
class RunConfig:
    species: AlkaliSpecies
    rates: RelaxationRates
    beam: BeamParams  # power 0; calibrated scales
    signal: SignalParams
    sweep_b_values: tuple[float, ...]
    sweep_p_values: tuple[float, ...]
    xsection_range: tuple[float, float, int]  # rad/s offsets + point count
    waterfall_p_values: tuple[float, ...]
    seed_base: int
    out_dir: str


def _defaults() -> dict:
    return tomllib.loads(DEFAULT_CONFIG_TOML)


def _merge(base: dict, override: dict) -> dict:
    out = dict(base)
    for k, v in override.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = v
    return out


def load_config(path: str | None = None) -> RunConfig:
    """Load a TOML config file (or the pure defaults when path is None)."""
    raw = _defaults()
    if path is not None:
        try:
            with open(path, "rb") as fh:
                user = tomllib.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from exc
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"invalid TOML: {exc}") from exc
        # An explicit kappa in the user file replaces the default
        # calibration pair rather than conflicting with it.
        if "kappa" in user.get("beam", {}):
            beam = dict(raw["beam"])
            beam.pop("calibration_field_mg", None)
            beam.pop("calibration_power_mw", None)
            raw = dict(raw, beam=beam)
        raw = _merge(raw, user)
    return build_run_config(raw)


def _species_from(raw: dict) -> AlkaliSpecies:
    s = raw["species"]
    weights = None
    if "shift_weights" in s:
        weights = {
            (int(w["lower_F"]), int(w["upper_F"])): float(w["weight"])
            for w in s["shift_weights"]
        }
    try:
        return atoms.build_species(
            name=str(s["name"]),
            nuclear_spin_2I=int(s["nuclear_spin_2I"]),
            electron_gyro_hz_per_gauss=1e6 * float(s["electron_gyro_mhz_per_gauss"]),
            hyperfine_split_hz=1e9 * float(s["hyperfine_split_ghz"]),
            excited_split_hz=1e9 * float(s["excited_split_ghz"]),
            linewidth_hz=1e6 * float(s["linewidth_mhz"]),
            lines=s.get("lines"),
            shift_weights=weights,
        )
    except OptiserfError as exc:
        raise ConfigError(f"invalid species block: {exc}") from exc


def build_run_config(raw: dict) -> RunConfig:
    """Validate a merged config dict and construct the physics objects."""
    species = _species_from(raw)

    r = raw["rates"]
    try:
        rates = RelaxationRates(float(r["r_se"]), float(r["r_sr"]), float(r["r_u"]))
    except OptiserfError as exc:
        raise ConfigError(f"invalid rates block: {exc}") from exc

    b = raw["beam"]
    detuning = TWO_PI * 1e9 * float(b["detuning_ghz"])
    handedness = int(b["handedness"])
    has_pair = "calibration_field_mg" in b and "calibration_power_mw" in b
    has_kappa = "kappa" in b
    if has_pair == has_kappa:
        raise ConfigError(
            "exactly one of (calibration_field_mg, calibration_power_mw) or kappa required"
        )
    try:
        if has_kappa:
            kappa = float(b["kappa"])
            p_ref = None
        else:
            p_ref = float(b["calibration_power_mw"])
            kappa = calibrate_shift_scale(
                species,
                detuning,
                1e-3 * float(b["calibration_field_mg"]),
                p_ref,
                handedness,
            )
        if "scatter_scale" in b:
            scatter_scale = float(b["scatter_scale"])
        elif p_ref is not None:
            scatter_scale = calibrate_scatter_scale(
                species, detuning, p_ref, float(b["scatter_rate_at_p_ref"])
            )
        else:
            scatter_scale = 0.0
        beam = BeamParams(
            power=0.0,
            detuning=detuning,
            handedness=handedness,
            shift_scale=kappa,
            scatter_scale=scatter_scale,
        )
    except OptiserfError as exc:
        raise ConfigError(f"invalid beam block: {exc}") from exc

    sg = raw["signal"]
    run = raw["run"]
    signal = SignalParams(
        dt=float(sg["dt_s"]),
        duration=float(sg["duration_s"]),
        noise_sigma=float(sg["noise_sigma"]),
        seed_base=int(run["seed_base"]),
    )
    if signal.dt <= 0 or signal.duration <= 0:
        raise ConfigError("signal dt_s and duration_s must be positive")

    sw = raw["sweep"]
    b_values = tuple(
        1e-3 * x
        for x in np.linspace(
            float(sw["b_min_mg"]), float(sw["b_max_mg"]), int(sw["b_points"])
        )
    )
    p_values = tuple(
        np.linspace(float(sw["p_min_mw"]), float(sw["p_max_mw"]), int(sw["p_points"]))
    )
    if len(b_values) < 1 or len(p_values) < 1:
        raise ConfigError("sweep grid must be non-empty")

    xs = raw["xsection"]
    xsection_range = (
        TWO_PI * 1e9 * float(xs["nu_min_ghz"]),
        TWO_PI * 1e9 * float(xs["nu_max_ghz"]),
        int(xs["points"]),
    )
    if xsection_range[2] < 2 or xsection_range[1] <= xsection_range[0]:
        raise ConfigError("invalid xsection range")

    wf = raw["waterfall"]
    waterfall_p = tuple(
        np.linspace(float(wf["p_min_mw"]), float(wf["p_max_mw"]), int(wf["p_points"]))
    )

    if not math.isfinite(detuning):
        raise ConfigError("beam detuning must be finite")

    return RunConfig(
        species=species,
        rates=rates,
        beam=beam,
        signal=signal,
        sweep_b_values=b_values,
        sweep_p_values=p_values,
        xsection_range=xsection_range,
        waterfall_p_values=waterfall_p,
        seed_base=int(run["seed_base"]),
        out_dir=str(run["out_dir"]),
    )
