"""Vector light shifts, absorption, and resonance-condition solvers.

Optical frequencies are angular offsets from the reference D1 line in
rad/s.  Cross-sections are dimensionless profiles; the absolute scale of
the induced shifts is carried by the calibrated ``shift_scale`` of the
beam (rad s^-1 mW^-1 at unit profile), fixed from a reported resonance
point rather than from beam geometry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .atoms import AlkaliSpecies, larmor_frequency
from .errors import (
    InvalidInputError,
    NoResonanceError,
    SingularDetuningError,
    UnreachableResonanceError,
)


@dataclass(frozen=True)
class BeamParams:
    """Protection-beam parameters.

    power in mW; detuning is the beam's angular-frequency offset from the
    reference line in rad/s (positive = blue); handedness is the circular
    polarization sign s = +/-1; shift_scale and scatter_scale convert
    power times profile into rad/s shifts and s^-1 scattering.
    """

    power: float
    detuning: float
    handedness: int
    shift_scale: float
    scatter_scale: float = 0.0

    def __post_init__(self):
        if self.power < 0:
            raise InvalidInputError("beam power must be non-negative")
        if self.handedness not in (-1, 1):
            raise InvalidInputError("handedness must be +1 or -1")
        if self.shift_scale <= 0:
            raise InvalidInputError("shift_scale must be positive")
        if self.scatter_scale < 0:
            raise InvalidInputError("scatter_scale must be non-negative")


@dataclass(frozen=True)
class LightShifts:
    """Per-manifold vector shifts (rad/s) and the photon-scattering rate R_P (s^-1)."""

    delta_a: float
    delta_b: float
    scatter_rate: float


def _dispersive(delta: float, gamma_e: float) -> float:
    """Dispersive profile Delta / (Delta^2 + (Gamma_e/2)^2); Gamma_e/2 is the HWHM."""
    return delta / (delta * delta + 0.25 * gamma_e * gamma_e)


def lightshift_cross_sections(
    species: AlkaliSpecies, nu: float
) -> tuple[float, float]:
    """Vector-shift cross-sections (sigma_a, sigma_b) at optical offset nu.

    sigma_F(nu) = sum over the two lines starting from F of
    W(F, F') * Delta / (Delta^2 + Gamma_e^2/4), with signed weights from the
    species table.  Evaluation exactly at a line center raises
    SingularDetuningError so sweeps never produce silent infinities.
    """
    if not math.isfinite(nu):
        raise InvalidInputError("optical frequency must be finite")
    sigma = {}
    for f in (species.upper_F, species.lower_F):
        total = 0.0
        for line in species.lines_from(f):
            delta = nu - line.center_frequency
            if delta == 0.0:
                raise SingularDetuningError(
                    f"optical frequency at the {f}->{line.upper_F} line center"
                )
            total += species.shift_weights[(f, line.upper_F)] * _dispersive(
                delta, species.linewidth
            )
        sigma[f] = total
    return sigma[species.upper_F], sigma[species.lower_F]


def absorption_cross_section(species: AlkaliSpecies, nu: float) -> float:
    """Strength-weighted Lorentzian absorption profile, peaked at the line centers."""
    if not math.isfinite(nu):
        raise InvalidInputError("optical frequency must be finite")
    hw_sq = 0.25 * species.linewidth**2
    return sum(
        line.strength * hw_sq / ((nu - line.center_frequency) ** 2 + hw_sq)
        for line in species.d1_lines
    )


def zeeman_shifts(species: AlkaliSpecies, beam: BeamParams) -> LightShifts:
    """Power- and handedness-scaled shifts plus the scattering rate for one beam."""
    sigma_a, sigma_b = lightshift_cross_sections(species, beam.detuning)
    scale = beam.handedness * beam.shift_scale * beam.power
    return LightShifts(
        delta_a=scale * sigma_a,
        delta_b=scale * sigma_b,
        scatter_rate=beam.scatter_scale
        * beam.power
        * absorption_cross_section(species, beam.detuning),
    )


def _differential_scale(species: AlkaliSpecies, beam: BeamParams) -> float:
    """handedness * shift_scale * (sigma_b - sigma_a) at the beam detuning."""
    sigma_a, sigma_b = lightshift_cross_sections(species, beam.detuning)
    diff = sigma_b - sigma_a
    if diff == 0.0:
        raise NoResonanceError("differential cross-section vanishes at this detuning")
    return beam.handedness * beam.shift_scale * diff


def resonance_power(species: AlkaliSpecies, beam_template: BeamParams, B: float) -> float:
    """Power P* (mW) satisfying omega_B + delta_a = -omega_B + delta_b at field B."""
    if not math.isfinite(B) or B < 0:
        raise InvalidInputError("field must be finite and non-negative")
    omega_b_field = larmor_frequency(species, B)
    scale = _differential_scale(species, beam_template)
    if omega_b_field == 0.0:
        return 0.0
    power = 2.0 * omega_b_field / scale
    if power < 0:
        raise UnreachableResonanceError(
            "light shift sign opposes the Zeeman splitting; flip handedness or detuning"
        )
    return power


def resonance_field(species: AlkaliSpecies, beam: BeamParams) -> float:
    """Field B* (G) at which the given beam satisfies the resonance condition."""
    scale = _differential_scale(species, beam)
    delta_diff = scale * beam.power
    field = delta_diff * (species.nuclear_spin_2I + 1) / (2.0 * species.electron_gyro)
    if field < 0:
        raise UnreachableResonanceError(
            "light shift sign opposes the Zeeman splitting; flip handedness or detuning"
        )
    return field


def calibrate_shift_scale(
    species: AlkaliSpecies, nu: float, B_ref: float, P_ref: float, handedness: int = 1
) -> float:
    """Shift scale kappa pinning resonance_power(B_ref) = P_ref at detuning nu."""
    if P_ref <= 0:
        raise InvalidInputError("reference power must be positive")
    if B_ref <= 0:
        raise InvalidInputError("reference field must be positive")
    sigma_a, sigma_b = lightshift_cross_sections(species, nu)
    diff = sigma_b - sigma_a
    if diff == 0.0:
        raise NoResonanceError("differential cross-section vanishes at this detuning")
    kappa = 2.0 * larmor_frequency(species, B_ref) / (handedness * diff * P_ref)
    if kappa <= 0:
        raise UnreachableResonanceError(
            "calibration point unreachable with this handedness"
        )
    return kappa


def calibrate_scatter_scale(
    species: AlkaliSpecies, nu: float, P_ref: float, rate_ref: float
) -> float:
    """Scatter scale making scatter_rate(P_ref) = rate_ref at detuning nu."""
    if P_ref <= 0 or rate_ref < 0:
        raise InvalidInputError("need P_ref > 0 and rate_ref >= 0")
    return rate_ref / (P_ref * absorption_cross_section(species, nu))


def with_power(beam: BeamParams, power: float) -> BeamParams:
    """Copy of the beam at a different power."""
    return replace(beam, power=power)
