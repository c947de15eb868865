"""(B, P) grid evaluation: relaxation maps, Q maps, overlays, waterfalls.

Cells are independent pure evaluations; per-cell seeds derive from
(seed_base XOR cell index) so the fit-method map is reproducible under any
evaluation order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .atoms import AlkaliSpecies, bare_splittings, larmor_frequency
from .bloch import (
    RelaxationRates,
    TransverseState,
    build_relaxation_matrix,
    dynamics_matrix,
    eigenmodes,
    spin_temperature_weights,
)
from .errors import InvalidInputError, NumericError
from .lightshift import (
    BeamParams,
    lightshift_cross_sections,
    resonance_power,
    with_power,
    zeeman_shifts,
)
from .signals import (
    Spectrum,
    fft_spectrum,
    fit_decaying_sinusoids,
    padded_guess,
    quality_factor,
    synthesize_signal,
)


@dataclass(frozen=True)
class SignalParams:
    """Synthesis settings for the fit-method pipeline."""

    dt: float = 2e-4
    duration: float = 0.35
    noise_sigma: float = 0.0
    seed_base: int = 0


@dataclass(frozen=True)
class SweepGrid:
    """Grid axes plus the physics needed to evaluate each cell."""

    b_values: tuple[float, ...]
    p_values: tuple[float, ...]
    beam_template: BeamParams
    rates: RelaxationRates
    method: str = "eigen"
    signal: SignalParams | None = None

    def __post_init__(self):
        object.__setattr__(self, "b_values", tuple(self.b_values))
        object.__setattr__(self, "p_values", tuple(self.p_values))
        if not self.b_values or not self.p_values:
            raise InvalidInputError("grid axes must be non-empty")
        for axis in (self.b_values, self.p_values):
            if any(b <= a for a, b in zip(axis, axis[1:])):
                raise InvalidInputError("grid axes must be strictly increasing")
        if self.method not in ("eigen", "fit"):
            raise InvalidInputError("method must be 'eigen' or 'fit'")
        if self.method == "fit" and self.signal is None:
            raise InvalidInputError("fit method requires signal parameters")
        if self.method == "eigen" and self.signal is not None:
            raise InvalidInputError("eigen method takes no signal parameters")


@dataclass(frozen=True)
class SweepCell:
    """One evaluated grid cell."""

    B: float
    P: float
    omega_a: float
    omega_b: float
    gamma: float
    omega_bar: float
    q: float
    converged: bool


@dataclass(frozen=True)
class SweepResult:
    """Per-cell records (row-major over b_values x p_values) plus overlays."""

    cells: tuple[SweepCell, ...]
    resonance_overlay: tuple[tuple[float, float], ...]
    omega_b_zero_overlay: tuple[tuple[float, float], ...]

    def cell(self, i_b: int, i_p: int, n_p: int) -> SweepCell:
        return self.cells[i_b * n_p + i_p]


def effective_frequencies(
    species: AlkaliSpecies, beam: BeamParams, B: float
) -> tuple[float, float]:
    """(omega_a, omega_b) = bare splittings plus the beam's vector shifts."""
    wa, wb = bare_splittings(species, B)
    shifts = zeeman_shifts(species, beam)
    return wa + shifts.delta_a, wb + shifts.delta_b


def default_initial_state(species: AlkaliSpecies) -> TransverseState:
    """Low-polarization transverse tip along the spin-temperature direction."""
    wa, wb = spin_temperature_weights(species.nuclear_spin_2I)
    s = wa + wb
    return TransverseState(wa / s, wb / s)


def _rates_with_scatter(rates: RelaxationRates, scatter: float) -> RelaxationRates:
    return RelaxationRates(rates.R_se, rates.R_sr, rates.R_u, rates.R_P + scatter)


def _eval_cell_eigen(species, beam, rates, B, P) -> SweepCell:
    beam_p = with_power(beam, P)
    wa, wb = effective_frequencies(species, beam_p, B)
    cell_rates = _rates_with_scatter(rates, zeeman_shifts(species, beam_p).scatter_rate)
    R = build_relaxation_matrix(cell_rates, species)
    modes = eigenmodes(dynamics_matrix(R, wa, wb))
    gamma = modes.fundamental_rate
    omega_bar = modes.fundamental_freq
    q = omega_bar / gamma if gamma > 0 else math.inf
    return SweepCell(B, P, wa, wb, gamma, omega_bar, q, True)


def _eval_cell_fit(species, beam, rates, B, P, sig: SignalParams, seed: int) -> SweepCell:
    beam_p = with_power(beam, P)
    wa, wb = effective_frequencies(species, beam_p, B)
    cell_rates = _rates_with_scatter(rates, zeeman_shifts(species, beam_p).scatter_rate)
    R = build_relaxation_matrix(cell_rates, species)
    A = dynamics_matrix(R, wa, wb)
    series = synthesize_signal(
        A,
        default_initial_state(species),
        species,
        sig.duration,
        sig.dt,
        noise_sigma=sig.noise_sigma,
        seed=seed,
    )
    try:
        fit = fit_decaying_sinusoids(series, 2, padded_guess(series, 2))
    except NumericError:
        return SweepCell(B, P, wa, wb, math.nan, math.nan, math.nan, False)
    return SweepCell(
        B, P, wa, wb, fit.gamma, fit.omega_bar, quality_factor(fit), fit.converged
    )


def run_sweep(grid: SweepGrid, species: AlkaliSpecies) -> SweepResult:
    """Evaluate every cell; per-cell failures are recorded, never raised."""
    cells = []
    n_p = len(grid.p_values)
    for i_b, B in enumerate(grid.b_values):
        for i_p, P in enumerate(grid.p_values):
            if grid.method == "eigen":
                cells.append(
                    _eval_cell_eigen(species, grid.beam_template, grid.rates, B, P)
                )
            else:
                seed = grid.signal.seed_base ^ (i_b * n_p + i_p)
                cells.append(
                    _eval_cell_fit(
                        species, grid.beam_template, grid.rates, B, P, grid.signal, seed
                    )
                )
    return SweepResult(
        cells=tuple(cells),
        resonance_overlay=resonance_curve(species, grid.beam_template, grid.b_values),
        omega_b_zero_overlay=omega_b_zero_curve(
            species, grid.beam_template, grid.b_values
        ),
    )


def resonance_curve(
    species: AlkaliSpecies, beam_template: BeamParams, b_values
) -> tuple[tuple[float, float], ...]:
    """Polyline {(B, P*)} of the synchronization resonance."""
    return tuple((B, resonance_power(species, beam_template, B)) for B in b_values)


def omega_b_zero_curve(
    species: AlkaliSpecies, beam_template: BeamParams, b_values
) -> tuple[tuple[float, float], ...]:
    """Polyline {(B, P)} along which the lower manifold stops precessing."""
    sigma_a, sigma_b = lightshift_cross_sections(species, beam_template.detuning)
    slope = beam_template.handedness * beam_template.shift_scale * sigma_b
    out = []
    for B in b_values:
        wb = larmor_frequency(species, B)
        p = wb / slope if slope != 0.0 else math.nan
        out.append((B, p if p >= 0 else math.nan))
    return tuple(out)


def spectrum_waterfall(
    species: AlkaliSpecies,
    beam_template: BeamParams,
    B: float,
    p_values,
    rates: RelaxationRates,
    sig: SignalParams,
    zero_pad_factor: int = 4,
) -> list[Spectrum]:
    """One spectrum per power, normalized by a single common factor.

    The batch maximum is scaled to 1, mirroring the no-relative-
    normalization convention of the measured spectra.
    """
    spectra = []
    for i, P in enumerate(p_values):
        beam_p = with_power(beam_template, P)
        wa, wb = effective_frequencies(species, beam_p, B)
        cell_rates = _rates_with_scatter(
            rates, zeeman_shifts(species, beam_p).scatter_rate
        )
        R = build_relaxation_matrix(cell_rates, species)
        A = dynamics_matrix(R, wa, wb)
        series = synthesize_signal(
            A,
            default_initial_state(species),
            species,
            sig.duration,
            sig.dt,
            noise_sigma=sig.noise_sigma,
            seed=(sig.seed_base ^ i) if sig.seed_base else 0,
        )
        spectra.append(fft_spectrum(series, zero_pad_factor=zero_pad_factor))
    peak = max(s.magnitudes.max() for s in spectra)
    if peak > 0:
        spectra = [
            Spectrum(s.frequencies, s.magnitudes / peak) for s in spectra
        ]
    return spectra
