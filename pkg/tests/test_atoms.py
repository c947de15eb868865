import math

import numpy as np
import pytest

from optiserf.atoms import (
    AlkaliSpecies,
    TransitionLine,
    bare_splittings,
    build_species,
    cesium_defaults,
    larmor_frequency,
)
from optiserf.errors import InvalidInputError

TWO_PI = 2 * math.pi


def test_cesium_record(cesium):
    assert cesium.nuclear_spin_2I == 7
    assert cesium.electron_gyro == pytest.approx(TWO_PI * 2.8025e6)
    assert cesium.hyperfine_split == pytest.approx(TWO_PI * 9.1926e9)
    assert len(cesium.d1_lines) == 4
    assert cesium.upper_F == 4 and cesium.lower_F == 3


def test_line_table_structure(cesium):
    centers = [ln.center_frequency for ln in cesium.d1_lines]
    assert all(b > a for a, b in zip(centers, centers[1:]))
    # Lines 1 and 3 share the upper level F'=3; their gap is the ground split.
    gap = centers[2] - centers[0]
    assert gap == pytest.approx(cesium.hyperfine_split, rel=1e-12)
    assert gap == pytest.approx(TWO_PI * 9.193e9, rel=1e-4)
    assert sum(ln.strength for ln in cesium.d1_lines) == pytest.approx(1.0, abs=1e-12)
    # Lowest-frequency line is F=4 -> F'=3.
    assert cesium.d1_lines[0].lower_F == 4 and cesium.d1_lines[0].upper_F == 3


def test_larmor_zero_field(cesium):
    assert larmor_frequency(cesium, 0.0) == 0.0


def test_larmor_reference_point(cesium):
    # 2.8025 MHz/G * 0.43 mG / 8 = 150.6 Hz
    assert larmor_frequency(cesium, 0.43e-3) == pytest.approx(TWO_PI * 150.6, rel=3e-4)


def test_larmor_odd_and_linear(cesium):
    rng = np.random.default_rng(7)
    for _ in range(50):
        b1, b2 = rng.uniform(-2e-3, 2e-3, size=2)
        assert larmor_frequency(cesium, -b1) == -larmor_frequency(cesium, b1)
        assert larmor_frequency(cesium, b1 + b2) == pytest.approx(
            larmor_frequency(cesium, b1) + larmor_frequency(cesium, b2), rel=1e-14
        )


def test_larmor_rejects_nonfinite(cesium):
    with pytest.raises(InvalidInputError):
        larmor_frequency(cesium, math.nan)
    with pytest.raises(InvalidInputError):
        larmor_frequency(cesium, math.inf)


def test_bare_splittings_signs(cesium):
    wa, wb = bare_splittings(cesium, 0.43e-3)
    assert wa == pytest.approx(TWO_PI * 150.6, rel=3e-4)
    assert wb == -wa
    assert bare_splittings(cesium, 0.0) == (0.0, 0.0)


def test_bare_splittings_second_order(cesium):
    wa1, wb1 = bare_splittings(cesium, 1e-3)
    wa2, wb2 = bare_splittings(cesium, 1e-3, second_order=True)
    corr = wa1**2 * 8 / cesium.hyperfine_split
    assert wa2 == pytest.approx(wa1 + corr)
    assert wb2 == pytest.approx(wb1 - corr)
    # At sub-mG fields the correction is parts in 1e8.
    assert abs(wa2 / wa1 - 1) < 1e-6


def test_species_validation_rejects_bad_records(cesium):
    with pytest.raises(InvalidInputError):
        build_species("x", 4, 2.8e6, 9.2e9, 1.2e9, 5e6)  # even 2I
    good = cesium.d1_lines
    with pytest.raises(InvalidInputError):
        AlkaliSpecies(
            name="bad",
            nuclear_spin_2I=7,
            electron_gyro=cesium.electron_gyro,
            hyperfine_split=cesium.hyperfine_split,
            d1_lines=tuple(reversed(good)),  # decreasing centers
            linewidth=cesium.linewidth,
            shift_weights=cesium.shift_weights,
        )
    scaled = tuple(
        TransitionLine(l.lower_F, l.upper_F, l.center_frequency, 2 * l.strength)
        for l in good
    )
    with pytest.raises(InvalidInputError):
        AlkaliSpecies(
            name="bad",
            nuclear_spin_2I=7,
            electron_gyro=cesium.electron_gyro,
            hyperfine_split=cesium.hyperfine_split,
            d1_lines=scaled,  # strengths sum to 2
            linewidth=cesium.linewidth,
            shift_weights=cesium.shift_weights,
        )


def test_species_override_lines_roundtrip(cesium):
    lines = [
        {
            "lower_F": ln.lower_F,
            "upper_F": ln.upper_F,
            "offset_ghz": ln.center_frequency / (TWO_PI * 1e9),
            "strength": ln.strength,
        }
        for ln in cesium.d1_lines
    ]
    rebuilt = build_species(
        "cesium", 7, 2.8025e6, 9.1926e9, 1.168e9, 4.56e6, lines=lines
    )
    for a, b in zip(rebuilt.d1_lines, cesium.d1_lines):
        assert a.center_frequency == pytest.approx(b.center_frequency)
        assert a.strength == pytest.approx(b.strength)
