"""Optical protection of alkali-metal spins from spin-exchange relaxation.

Simulator and analysis toolkit: hyperfine-Bloch dynamics of the two
manifolds' transverse moments, vector light shifts and resonance solvers,
synthetic probe signals with decaying-sinusoid fits, and (field, power)
sweeps producing relaxation and quality-factor maps.
"""

__version__ = "0.1.0"

from .atoms import AlkaliSpecies, TransitionLine, bare_splittings, cesium_defaults, larmor_frequency
from .bloch import (
    EigenModes,
    RelaxationMatrix,
    RelaxationRates,
    TransverseState,
    build_relaxation_matrix,
    dynamics_matrix,
    eigenmodes,
    evolve,
    observable_sx,
    protected_valley_width,
    serf_asymptotics,
)
from .lightshift import (
    BeamParams,
    LightShifts,
    absorption_cross_section,
    calibrate_shift_scale,
    lightshift_cross_sections,
    resonance_field,
    resonance_power,
    zeeman_shifts,
)
from .signals import (
    DecayFitResult,
    Spectrum,
    TimeSeries,
    fft_spectrum,
    fit_decaying_sinusoids,
    initial_guess,
    quality_factor,
    synthesize_signal,
)
from .sweep import (
    SignalParams,
    SweepGrid,
    SweepResult,
    effective_frequencies,
    resonance_curve,
    run_sweep,
    spectrum_waterfall,
)
