import math

import numpy as np
import pytest

from optiserf.angular import stark_shift_m_slopes
from optiserf.atoms import build_species
from optiserf.errors import (
    InvalidInputError,
    SingularDetuningError,
    UnreachableResonanceError,
)
from optiserf.lightshift import (
    BeamParams,
    absorption_cross_section,
    calibrate_shift_scale,
    lightshift_cross_sections,
    resonance_field,
    resonance_power,
    with_power,
    zeeman_shifts,
)

TWO_PI = 2 * math.pi
GHZ = TWO_PI * 1e9


def test_lower_manifold_dominates_at_12ghz(cesium):
    sa, sb = lightshift_cross_sections(cesium, 12 * GHZ)
    assert abs(sb) > abs(sa)
    assert sb > 0  # blue of both lower-manifold lines


def test_cross_sections_vanish_far_away(cesium):
    for nu in (1e9 * GHZ, -1e9 * GHZ):
        sa, sb = lightshift_cross_sections(cesium, nu)
        assert abs(sa) < 1e-18 and abs(sb) < 1e-18


def test_midpoint_antisymmetry_with_equal_weights(cesium):
    # With equal weights on the two lower-manifold lines, the dispersive
    # contributions cancel midway between them.
    weights = dict(cesium.shift_weights)
    weights[(3, 3)] = weights[(3, 4)] = 0.1
    species = build_species(
        "cs-flat", 7, 2.8025e6, 9.1926e9, 1.168e9, 4.56e6, shift_weights=weights
    )
    b_lines = species.lines_from(3)
    mid = 0.5 * (b_lines[0].center_frequency + b_lines[1].center_frequency)
    _, sb = lightshift_cross_sections(species, mid)
    assert sb == pytest.approx(0.0, abs=1e-24)


def test_line_center_is_an_error(cesium):
    with pytest.raises(SingularDetuningError):
        lightshift_cross_sections(cesium, cesium.d1_lines[2].center_frequency)
    with pytest.raises(InvalidInputError):
        lightshift_cross_sections(cesium, math.nan)


def test_absorption_profile(cesium):
    for line in cesium.d1_lines:
        c = line.center_frequency
        peak = absorption_cross_section(cesium, c)
        assert peak > absorption_cross_section(cesium, c + cesium.linewidth)
        assert peak > absorption_cross_section(cesium, c - cesium.linewidth)
    assert absorption_cross_section(cesium, 1e5 * GHZ) < 1e-12
    # Far-detuned tail: < 1e-3 of any line-center value at +12 GHz.
    tail = absorption_cross_section(cesium, 12 * GHZ)
    centers = [absorption_cross_section(cesium, l.center_frequency) for l in cesium.d1_lines]
    assert tail / min(centers) < 1e-3


def test_zeeman_shifts_linearity(cesium, calibrated_beam):
    beam0 = with_power(calibrated_beam, 0.0)
    z0 = zeeman_shifts(cesium, beam0)
    assert (z0.delta_a, z0.delta_b, z0.scatter_rate) == (0.0, 0.0, 0.0)
    z1 = zeeman_shifts(cesium, with_power(calibrated_beam, 4.0))
    z2 = zeeman_shifts(cesium, with_power(calibrated_beam, 8.0))
    assert z2.delta_a == pytest.approx(2 * z1.delta_a, rel=1e-14)
    assert z2.delta_b == pytest.approx(2 * z1.delta_b, rel=1e-14)
    assert z2.scatter_rate == pytest.approx(2 * z1.scatter_rate, rel=1e-14)


def test_zeeman_shifts_handedness(cesium, calibrated_beam):
    plus = zeeman_shifts(cesium, with_power(calibrated_beam, 5.0))
    flipped = BeamParams(
        power=5.0,
        detuning=calibrated_beam.detuning,
        handedness=-1,
        shift_scale=calibrated_beam.shift_scale,
        scatter_scale=calibrated_beam.scatter_scale,
    )
    minus = zeeman_shifts(cesium, flipped)
    assert minus.delta_a == -plus.delta_a
    assert minus.delta_b == -plus.delta_b
    assert minus.scatter_rate == plus.scatter_rate


def test_calibration_identity(cesium, calibrated_beam):
    # At the calibration point the differential shift is exactly 2 omega_B.
    z = zeeman_shifts(cesium, with_power(calibrated_beam, 9.7))
    assert z.delta_b - z.delta_a == pytest.approx(2 * TWO_PI * 150.634, rel=1e-4)


def test_resonance_power_anchors(cesium, calibrated_beam):
    assert resonance_power(cesium, calibrated_beam, 0.0) == 0.0
    assert resonance_power(cesium, calibrated_beam, 0.43e-3) == pytest.approx(9.7, rel=1e-12)
    assert resonance_power(cesium, calibrated_beam, 0.86e-3) == pytest.approx(19.4, rel=1e-12)


def test_resonance_wrong_handedness(cesium, calibrated_beam):
    flipped = BeamParams(
        power=0.0,
        detuning=calibrated_beam.detuning,
        handedness=-1,
        shift_scale=calibrated_beam.shift_scale,
        scatter_scale=calibrated_beam.scatter_scale,
    )
    with pytest.raises(UnreachableResonanceError):
        resonance_power(cesium, flipped, 0.43e-3)


def test_resonance_field_roundtrip(cesium, calibrated_beam):
    assert resonance_field(cesium, with_power(calibrated_beam, 0.0)) == 0.0
    assert resonance_field(cesium, with_power(calibrated_beam, 9.7)) == pytest.approx(
        0.43e-3, rel=1e-12
    )
    rng = np.random.default_rng(12)
    for p in rng.uniform(0.01, 40.0, size=100):
        b = resonance_field(cesium, with_power(calibrated_beam, p))
        assert resonance_power(cesium, calibrated_beam, b) == pytest.approx(p, rel=1e-12)


def test_calibrate_shift_scale(cesium):
    nu = 12 * GHZ
    kappa = calibrate_shift_scale(cesium, nu, 0.43e-3, 9.7)
    assert kappa > 0
    assert calibrate_shift_scale(cesium, nu, 0.43e-3, 19.4) == pytest.approx(
        kappa / 2, rel=1e-12
    )
    with pytest.raises(InvalidInputError):
        calibrate_shift_scale(cesium, nu, 0.0, 9.7)
    with pytest.raises(InvalidInputError):
        calibrate_shift_scale(cesium, nu, 0.43e-3, 0.0)


def test_beam_validation():
    with pytest.raises(InvalidInputError):
        BeamParams(power=-1.0, detuning=0.0, handedness=1, shift_scale=1.0)
    with pytest.raises(InvalidInputError):
        BeamParams(power=1.0, detuning=0.0, handedness=0, shift_scale=1.0)


def test_cross_sections_match_perturbation_oracle(cesium):
    # Dual route: dispersive sum with tabulated weights vs numerical
    # diagonalization of the AC-Stark-coupled levels, far detuned.
    rng = np.random.default_rng(42)
    gamma_e = cesium.linewidth
    lines = {(l.lower_F, l.upper_F): l.center_frequency for l in cesium.d1_lines}
    checked = 0
    while checked < 20:
        nu = rng.uniform(-80, 100) * GHZ
        det = {key: nu - c for key, c in lines.items()}
        if min(abs(d) for d in det.values()) < 100 * gamma_e:
            continue
        sa, sb = lightshift_cross_sections(cesium, nu)
        slopes = stark_shift_m_slopes(7, det, coupling_scale=1e-3 * min(abs(d) for d in det.values()))
        assert slopes[4] == pytest.approx(sa, rel=1e-2)
        assert slopes[3] == pytest.approx(sb, rel=1e-2)
        checked += 1
