"""Alkali species data and bare Zeeman frequencies.

Every angular frequency in this package is stored in rad/s; user-facing
I/O converts to Hz with explicit labels.  Optical line positions are
stored as offsets from the lowest-frequency D1 line (the reference line),
so the reference itself sits at offset zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .angular import line_strengths, manifold_F_values, vector_shift_weights
from .errors import InvalidInputError

TWO_PI = 2.0 * math.pi

# Cesium defaults.  g_e/2pi in Hz/G, splittings in Hz, linewidth in Hz.
_CS_ELECTRON_GYRO_HZ_PER_G = 2.8025e6
_CS_HYPERFINE_SPLIT_HZ = 9.1926e9
_CS_EXCITED_SPLIT_HZ = 1.168e9
_CS_LINEWIDTH_HZ = 4.56e6


@dataclass(frozen=True)
class TransitionLine:
    """One D1 hyperfine line F -> F'.

    ``center_frequency`` is the optical angular frequency offset of the
    line from the reference (lowest) line, in rad/s; ``strength`` is the
    relative oscillator strength (the four lines sum to 1).
    """

    lower_F: int
    upper_F: int
    center_frequency: float
    strength: float

    def __post_init__(self):
        if self.strength < 0:
            raise InvalidInputError("line strength must be non-negative")


@dataclass(frozen=True)
class AlkaliSpecies:
    """Ground-state structure of one alkali species.

    ``linewidth`` is the optical linewidth Gamma_e in rad/s; the
    Lorentzian/dispersive profiles in the lightshift module use the
    half-width Gamma_e/2 (HWHM) in their denominators.
    ``shift_weights`` maps (F, F') to the signed vector-shift weight
    W(F, F') computed from angular-momentum algebra (see
    :mod:`optiserf.angular`); it can be overridden through configuration.
    """

    name: str
    nuclear_spin_2I: int
    electron_gyro: float  # rad s^-1 G^-1
    hyperfine_split: float  # rad s^-1
    d1_lines: tuple[TransitionLine, ...]
    linewidth: float  # rad s^-1
    shift_weights: dict[tuple[int, int], float] = field(default_factory=dict)

    def __post_init__(self):
        if self.nuclear_spin_2I <= 0 or self.nuclear_spin_2I % 2 == 0:
            raise InvalidInputError("nuclear_spin_2I must be a positive odd integer")
        if self.electron_gyro <= 0 or self.linewidth <= 0:
            raise InvalidInputError("electron_gyro and linewidth must be positive")
        if len(self.d1_lines) != 4:
            raise InvalidInputError("exactly four D1 lines are required")
        centers = [ln.center_frequency for ln in self.d1_lines]
        if any(b <= a for a, b in zip(centers, centers[1:])):
            raise InvalidInputError("d1_lines must have strictly increasing centers")
        f_lo, f_hi = manifold_F_values(self.nuclear_spin_2I)
        for ln in self.d1_lines:
            if ln.lower_F not in (f_lo, f_hi) or ln.upper_F not in (f_lo, f_hi):
                raise InvalidInputError("line F quantum numbers outside I +/- 1/2")
        total = sum(ln.strength for ln in self.d1_lines)
        if abs(total - 1.0) > 1e-12:
            raise InvalidInputError("line strengths must sum to 1")
        # Lines sharing an upper level must be split by the ground hyperfine gap.
        for fp in (f_lo, f_hi):
            pair = [ln for ln in self.d1_lines if ln.upper_F == fp]
            if len(pair) == 2:
                gap = abs(pair[1].center_frequency - pair[0].center_frequency)
                if abs(gap - self.hyperfine_split) > 1e-6 * self.hyperfine_split:
                    raise InvalidInputError(
                        "line gap inconsistent with hyperfine_split"
                    )

    @property
    def upper_F(self) -> int:
        """F of the upper ground manifold (labelled 'a')."""
        return (self.nuclear_spin_2I + 1) // 2

    @property
    def lower_F(self) -> int:
        """F of the lower ground manifold (labelled 'b')."""
        return (self.nuclear_spin_2I - 1) // 2

    def lines_from(self, f: int) -> tuple[TransitionLine, ...]:
        return tuple(ln for ln in self.d1_lines if ln.lower_F == f)


def build_species(
    name: str,
    nuclear_spin_2I: int,
    electron_gyro_hz_per_gauss: float,
    hyperfine_split_hz: float,
    excited_split_hz: float,
    linewidth_hz: float,
    lines: list[dict] | None = None,
    shift_weights: dict[tuple[int, int], float] | None = None,
) -> AlkaliSpecies:
    """Assemble a species record from Hz-valued inputs.

    When ``lines`` is omitted the four D1 lines are constructed from the
    ground and excited hyperfine splittings, ordered (a->lo, a->hi,
    b->lo, b->hi), with strengths from the angular-momentum tables.  The
    upper ground manifold sits higher in energy, so its transitions are the
    two lowest optical frequencies.
    """
    f_lo, f_hi = manifold_F_values(nuclear_spin_2I)
    if lines is None:
        strengths = line_strengths(nuclear_spin_2I)
        offsets_hz = {
            (f_hi, f_lo): 0.0,
            (f_hi, f_hi): excited_split_hz,
            (f_lo, f_lo): hyperfine_split_hz,
            (f_lo, f_hi): hyperfine_split_hz + excited_split_hz,
        }
        d1_lines = tuple(
            TransitionLine(f, fp, TWO_PI * offsets_hz[(f, fp)], strengths[(f, fp)])
            for (f, fp) in sorted(offsets_hz, key=offsets_hz.get)
        )
    else:
        d1_lines = tuple(
            TransitionLine(
                int(ln["lower_F"]),
                int(ln["upper_F"]),
                TWO_PI * 1e9 * float(ln["offset_ghz"]),
                float(ln["strength"]),
            )
            for ln in sorted(lines, key=lambda ln: float(ln["offset_ghz"]))
        )
    weights = shift_weights if shift_weights is not None else vector_shift_weights(
        nuclear_spin_2I
    )
    return AlkaliSpecies(
        name=name,
        nuclear_spin_2I=nuclear_spin_2I,
        electron_gyro=TWO_PI * electron_gyro_hz_per_gauss,
        hyperfine_split=TWO_PI * hyperfine_split_hz,
        d1_lines=d1_lines,
        linewidth=TWO_PI * linewidth_hz,
        shift_weights=weights,
    )


def cesium_defaults() -> AlkaliSpecies:
    """The compiled-in cesium record (2I = 7, D1 lines from the hyperfine gaps)."""
    return build_species(
        name="cesium",
        nuclear_spin_2I=7,
        electron_gyro_hz_per_gauss=_CS_ELECTRON_GYRO_HZ_PER_G,
        hyperfine_split_hz=_CS_HYPERFINE_SPLIT_HZ,
        excited_split_hz=_CS_EXCITED_SPLIT_HZ,
        linewidth_hz=_CS_LINEWIDTH_HZ,
    )


def larmor_frequency(species: AlkaliSpecies, B: float) -> float:
    """Larmor rate g_e B / (2I + 1) in rad/s; B in gauss, sign preserved."""
    if not math.isfinite(B):
        raise InvalidInputError("magnetic field must be finite")
    return species.electron_gyro * B / (species.nuclear_spin_2I + 1)


def bare_splittings(
    species: AlkaliSpecies, B: float, second_order: bool = False
) -> tuple[float, float]:
    """Bare Zeeman splittings (omega_a, omega_b) = (+omega_B, -omega_B).

    With ``second_order=True`` the quadratic correction
    omega_B^2 (2I+1)/omega_hpf is added to the upper manifold and
    subtracted from the lower one.  The default is off: at the sub-mG
    fields this package targets the correction is ~1e-8 of omega_B.
    """
    omega_b_field = larmor_frequency(species, B)
    if not second_order:
        return omega_b_field, -omega_b_field
    corr = (
        omega_b_field**2 * (species.nuclear_spin_2I + 1) / species.hyperfine_split
    )
    return omega_b_field + corr, -omega_b_field - corr
