import numpy as np
import pytest

from optiserf.atoms import cesium_defaults
from optiserf.bloch import RelaxationRates
from optiserf.lightshift import (
    BeamParams,
    calibrate_scatter_scale,
    calibrate_shift_scale,
)

# Reference calibration point: resonance at (0.43 mG, 9.7 mW), beam
# 12 GHz blue of the reference line, scattering rate 3 s^-1 at 9.7 mW.
B_REF = 0.43e-3
P_REF = 9.7
DETUNING_GHZ = 12.0


@pytest.fixture(scope="session")
def cesium():
    return cesium_defaults()


@pytest.fixture(scope="session")
def default_rates():
    return RelaxationRates(170.0, 85.0, 10.0, 0.0)


@pytest.fixture(scope="session")
def calibrated_beam(cesium):
    detuning = 2 * np.pi * 1e9 * DETUNING_GHZ
    kappa = calibrate_shift_scale(cesium, detuning, B_REF, P_REF, handedness=1)
    scatter = calibrate_scatter_scale(cesium, detuning, P_REF, 3.0)
    return BeamParams(
        power=0.0,
        detuning=detuning,
        handedness=1,
        shift_scale=kappa,
        scatter_scale=scatter,
    )
