"""Command-line front end.

Subcommands: xsection, resonance, simulate, fit, sweep, waterfall,
defaults.  Every run is deterministic given (config, seed): CSV output
uses '.' decimals, LF endings, and shortest round-trip float formatting,
so identical inputs give byte-identical files.  Exit codes: 0 success,
2 configuration error, 3 numeric error; error lines are prefixed
``error:`` on stderr.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .atoms import TWO_PI
from .bloch import RelaxationRates, build_relaxation_matrix, dynamics_matrix
from .config import DEFAULT_CONFIG_TOML, RunConfig, load_config
from .errors import ConfigError, NumericError, OptiserfError
from .lightshift import (
    absorption_cross_section,
    lightshift_cross_sections,
    resonance_field,
    resonance_power,
    with_power,
    zeeman_shifts,
)
from .signals import (
    Q_SENTINEL,
    TimeSeries,
    fit_decaying_sinusoids,
    padded_guess,
    quality_factor,
    synthesize_signal,
)
from .sweep import (
    SignalParams,
    SweepGrid,
    default_initial_state,
    effective_frequencies,
    run_sweep,
    spectrum_waterfall,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


def _fmt(x: float) -> str:
    """Shortest round-trip decimal; sentinel for non-finite values."""
    if isinstance(x, bool):
        return "1" if x else "0"
    if not math.isfinite(x):
        return repr(Q_SENTINEL)
    return repr(float(x))


def _write_csv(path: Path, header: str, rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _out_dir(cfg: RunConfig, args) -> Path:
    return Path(args.out if args.out else cfg.out_dir)


def cmd_defaults(cfg: RunConfig, args) -> int:
    sys.stdout.write(DEFAULT_CONFIG_TOML)
    return EXIT_OK


def cmd_xsection(cfg: RunConfig, args) -> int:
    lo, hi, n = cfg.xsection_range
    rows = []
    for nu in np.linspace(lo, hi, n):
        sa, sb = lightshift_cross_sections(cfg.species, float(nu))
        rows.append(
            (nu / (TWO_PI * 1e9), sa, sb, absorption_cross_section(cfg.species, float(nu)))
        )
    path = _out_dir(cfg, args) / "xsection.csv"
    _write_csv(path, "nu_ghz,sigma_a,sigma_b,sigma_abs", rows)
    print(f"wrote {path}")
    return EXIT_OK


def cmd_resonance(cfg: RunConfig, args) -> int:
    if (args.b_mg is None) == (args.p_mw is None):
        raise ConfigError("resonance needs exactly one of --b-mg or --p-mw")
    if args.b_mg is not None:
        p_star = resonance_power(cfg.species, cfg.beam, 1e-3 * args.b_mg)
        shifts = zeeman_shifts(cfg.species, with_power(cfg.beam, p_star))
        print(f"resonance_power_mw = {_fmt(p_star)}")
        print(f"field_mg = {_fmt(args.b_mg)}")
        print(f"delta_a_rad_s = {_fmt(shifts.delta_a)}")
        print(f"delta_b_rad_s = {_fmt(shifts.delta_b)}")
        print(f"delta_a_hz = {_fmt(shifts.delta_a / TWO_PI)}")
        print(f"delta_b_hz = {_fmt(shifts.delta_b / TWO_PI)}")
    else:
        b_star = resonance_field(cfg.species, with_power(cfg.beam, args.p_mw))
        wa, wb = effective_frequencies(
            cfg.species, with_power(cfg.beam, args.p_mw), b_star
        )
        print(f"resonance_field_mg = {_fmt(1e3 * b_star)}")
        print(f"power_mw = {_fmt(args.p_mw)}")
        print(f"omega_sync_rad_s = {_fmt(wa)}")
        print(f"omega_sync_hz = {_fmt(wa / TWO_PI)}")
    return EXIT_OK


def _fit_report_lines(fit, include_q: bool = True) -> list[str]:
    lines = []
    for i, c in enumerate(fit.components, start=1):
        lines.append(f"A{i} = {_fmt(c.amplitude)}")
        lines.append(f"gamma{i}_s = {_fmt(c.gamma)}")
        lines.append(f"omega{i}_rad_s = {_fmt(c.omega)}")
        lines.append(f"theta{i} = {_fmt(c.theta)}")
    lines.append(f"residual_rms = {_fmt(fit.residual_rms)}")
    lines.append(f"converged = {'true' if fit.converged else 'false'}")
    lines.append(f"gamma_s = {_fmt(fit.gamma)}")
    lines.append(f"omega_bar_rad_s = {_fmt(fit.omega_bar)}")
    if include_q:
        q = quality_factor(fit)
        lines.append(f"q_angular = {_fmt(q)}")
        lines.append(f"q_cycles = {_fmt(q / TWO_PI) if math.isfinite(q) else _fmt(q)}")
    return lines


def cmd_simulate(cfg: RunConfig, args) -> int:
    if args.b_mg is None or args.p_mw is None:
        raise ConfigError("simulate needs --b-mg and --p-mw")
    beam = with_power(cfg.beam, args.p_mw)
    wa, wb = effective_frequencies(cfg.species, beam, 1e-3 * args.b_mg)
    rates = cfg.rates
    scatter = zeeman_shifts(cfg.species, beam).scatter_rate
    cell_rates = RelaxationRates(rates.R_se, rates.R_sr, rates.R_u, rates.R_P + scatter)
    R = build_relaxation_matrix(cell_rates, cfg.species)
    A = dynamics_matrix(R, wa, wb)
    series = synthesize_signal(
        A,
        default_initial_state(cfg.species),
        cfg.species,
        cfg.signal.duration,
        cfg.signal.dt,
        noise_sigma=cfg.signal.noise_sigma,
        seed=args.seed if args.seed is not None else cfg.seed_base,
    )
    out = _out_dir(cfg, args)
    _write_csv(
        out / "trace.csv",
        "t_s,sx",
        zip(series.times, series.samples),
    )
    fit = fit_decaying_sinusoids(series, 2, padded_guess(series, 2))
    report = out / "fit_report.txt"
    report.write_text("\n".join(_fit_report_lines(fit)) + "\n")
    print(f"wrote {out / 'trace.csv'} and {report}")
    return EXIT_OK


def cmd_fit(cfg: RunConfig, args) -> int:
    data = np.loadtxt(args.trace, delimiter=",", skiprows=1)
    if data.ndim != 2 or data.shape[1] < 2 or data.shape[0] < 16:
        raise ConfigError("trace CSV must have columns t_s,sx and >= 16 rows")
    dt = float(data[1, 0] - data[0, 0])
    series = TimeSeries(dt=dt, samples=data[:, 1])
    n = args.components
    fit = fit_decaying_sinusoids(series, n, padded_guess(series, n))
    print("\n".join(_fit_report_lines(fit)))
    return EXIT_OK


def cmd_sweep(cfg: RunConfig, args) -> int:
    method = args.method
    grid = SweepGrid(
        b_values=cfg.sweep_b_values,
        p_values=cfg.sweep_p_values,
        beam_template=cfg.beam,
        rates=cfg.rates,
        method=method,
        signal=cfg.signal if method == "fit" else None,
    )
    result = run_sweep(grid, cfg.species)
    out = _out_dir(cfg, args)
    which = args.which
    _write_csv(
        out / f"{which}_map.csv",
        "b_gauss,p_mw,omega_a_rad_s,omega_b_rad_s,gamma_s,omega_bar_rad_s,q_angular,converged",
        (
            (c.B, c.P, c.omega_a, c.omega_b, c.gamma, c.omega_bar, c.q, c.converged)
            for c in result.cells
        ),
    )
    overlay_rows = [
        (b, p, "resonance") for b, p in result.resonance_overlay
    ] + [(b, p, "omega_b_zero") for b, p in result.omega_b_zero_overlay]
    path = out / "overlays.csv"
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        fh.write("b_gauss,p_mw,curve\n")
        for b, p, name in overlay_rows:
            fh.write(f"{_fmt(b)},{_fmt(p)},{name}\n")
    print(f"wrote {out / (which + '_map.csv')} and {path}")
    return EXIT_OK


def cmd_waterfall(cfg: RunConfig, args) -> int:
    b = 1e-3 * args.b_mg if args.b_mg is not None else None
    if b is None:
        raise ConfigError("waterfall needs --b-mg")
    p_values = (
        tuple(float(x) for x in args.p_mw_list.split(","))
        if args.p_mw_list
        else cfg.waterfall_p_values
    )
    if not p_values:
        raise ConfigError("waterfall needs a non-empty power list")
    sig = SignalParams(
        dt=cfg.signal.dt,
        duration=cfg.signal.duration,
        noise_sigma=cfg.signal.noise_sigma,
        seed_base=args.seed if args.seed is not None else cfg.signal.seed_base,
    )
    spectra = spectrum_waterfall(
        cfg.species, cfg.beam, b, p_values, cfg.rates, sig
    )
    rows = []
    for p, spec in zip(p_values, spectra):
        for f, m in zip(spec.frequencies, spec.magnitudes):
            rows.append((p, f, m))
    path = _out_dir(cfg, args) / "waterfall.csv"
    _write_csv(path, "p_mw,freq_hz,magnitude", rows)
    print(f"wrote {path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="optiserf",
        description="Optical protection of alkali spins: simulation and analysis",
    )
    parser.add_argument("--config", metavar="PATH", help="TOML configuration file")
    parser.add_argument("--out", metavar="DIR", help="output directory")
    parser.add_argument("--seed", type=int, help="seed override")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("defaults", help="print the default configuration")
    sub.add_parser("xsection", help="export light-shift/absorption cross-sections")

    p = sub.add_parser("resonance", help="solve the synchronization resonance")
    p.add_argument("--b-mg", type=float, help="field in mG (solve for power)")
    p.add_argument("--p-mw", type=float, help="power in mW (solve for field)")

    p = sub.add_parser("simulate", help="synthesize and fit one trace")
    p.add_argument("--b-mg", type=float, required=True)
    p.add_argument("--p-mw", type=float, required=True)

    p = sub.add_parser("fit", help="fit an external trace CSV (t_s,sx)")
    p.add_argument("trace", help="trace CSV path")
    p.add_argument("--components", type=int, choices=(1, 2), default=2)

    p = sub.add_parser("sweep", help="evaluate the (B, P) grid")
    p.add_argument("--method", choices=("eigen", "fit"), default="eigen")
    p.add_argument("--which", choices=("gamma", "q"), default="gamma")

    p = sub.add_parser("waterfall", help="spectrum vs power at fixed field")
    p.add_argument("--b-mg", type=float, required=True)
    p.add_argument("--p-mw-list", help="comma-separated powers in mW")

    return parser


_COMMANDS = {
    "defaults": cmd_defaults,
    "xsection": cmd_xsection,
    "resonance": cmd_resonance,
    "simulate": cmd_simulate,
    "fit": cmd_fit,
    "sweep": cmd_sweep,
    "waterfall": cmd_waterfall,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        return _COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericError, OptiserfError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
