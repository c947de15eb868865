"""Coupled hyperfine-Bloch dynamics of the two transverse magnetic moments.

The state is the complex pair (<F+_a>, <F+_b>); its evolution is
d/dt v = A v with A = -(i diag(omega_a, omega_b) + R).  R decomposes into
a spin-exchange part (zero column sums, spin-temperature null direction),
an electron-spin-destruction part (nuclear coherence conserved), and a
uniform part.  For I = 7/2 the default tables are

    M_se = (1/22) [[ 7, -15], [-7, 15]]
    M_sr = (1/16) [[ 9,  -9], [-7,  7]]

normalized so the nonzero eigenvalue of M_se is exactly 1 (so that R_se is
the decay rate of the fast exchange mode).  Both tables are derived from
the construction rules below for any odd 2I, and may be overridden.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .atoms import AlkaliSpecies
from .errors import InvalidInputError

# Relative tolerance used to declare a repeated eigenvalue defective.
_DEGENERACY_RTOL = 1e-12


@dataclass(frozen=True)
class RelaxationRates:
    """Physical rate constants in s^-1.

    R_se: spin exchange; R_sr: electron-spin destruction; R_u: uniform
    total-spin destruction; R_P: photon scattering by the protection beam.
    """

    R_se: float
    R_sr: float
    R_u: float
    R_P: float = 0.0

    def __post_init__(self):
        for name in ("R_se", "R_sr", "R_u", "R_P"):
            if getattr(self, name) < 0:
                raise InvalidInputError(f"{name} must be non-negative")


@dataclass(frozen=True)
class RelaxationMatrix:
    """The 2x2 real relaxation-rate matrix (r11, r12; r21, r22), s^-1."""

    r11: float
    r12: float
    r21: float
    r22: float

    def as_array(self) -> np.ndarray:
        return np.array([[self.r11, self.r12], [self.r21, self.r22]])


@dataclass(frozen=True)
class TransverseState:
    """Ensemble-mean transverse moments (<F+_a>, <F+_b>), dimensionless."""

    f_plus_a: complex
    f_plus_b: complex

    def __post_init__(self):
        if not (cmath.isfinite(self.f_plus_a) and cmath.isfinite(self.f_plus_b)):
            raise InvalidInputError("state components must be finite")

    def as_array(self) -> np.ndarray:
        return np.array([self.f_plus_a, self.f_plus_b], dtype=complex)


@dataclass(frozen=True)
class EigenModes:
    """Eigen-decomposition of the dynamics, in the rates-positive convention.

    ``lambdas`` are the eigenvalues of (i Omega + R) = -A, so each mode
    evolves as exp(-lambda t): Re(lambda) is its decay rate, Im(lambda)
    its precession frequency.  Entries are sorted by real part ascending,
    so index 0 is the fundamental (least-decaying) mode.
    """

    lambdas: tuple[complex, complex]
    vectors: tuple[tuple[complex, complex], tuple[complex, complex]]
    degenerate: bool = False

    @property
    def fundamental_rate(self) -> float:
        return self.lambdas[0].real

    @property
    def fundamental_freq(self) -> float:
        return self.lambdas[0].imag


def spin_temperature_weights(nuclear_spin_2I: int) -> tuple[int, int]:
    """Transverse spin-temperature weights (sum of M^2 over each manifold).

    For I = 7/2 these are (60, 28), i.e. the 15:7 direction after removing
    the common factor.
    """
    f_hi = (nuclear_spin_2I + 1) // 2
    f_lo = (nuclear_spin_2I - 1) // 2
    w = lambda f: sum(m * m for m in range(-f, f + 1))
    return w(f_hi), w(f_lo)


def exchange_matrix(nuclear_spin_2I: int) -> np.ndarray:
    """Spin-exchange relaxation table M_se.

    Built from its defining constraints: zero column sums (exchange
    conserves the total transverse moment), null vector along the
    spin-temperature direction, and unit nonzero eigenvalue.
    """
    wa, wb = spin_temperature_weights(nuclear_spin_2I)
    s = wa + wb
    return np.array([[wb, -wa], [-wb, wa]], dtype=float) / s


def destruction_matrix(nuclear_spin_2I: int) -> np.ndarray:
    """Electron-spin destruction table M_sr.

    Built from exponential destruction of the electron coherence
    <S+> = (<F+_a> - <F+_b>)/n with n = 2I + 1, while the nuclear
    coherence <I+> = <F+_a> + <F+_b> - <S+> is conserved.  Those two
    conditions fix the manifold back-action uniquely:

        d<F+_a>/dt = -R_sr (n + 1)/2 <S+>,
        d<F+_b>/dt = +R_sr (n - 1)/2 <S+>,

    which indeed give d<S+>/dt = -R_sr <S+> and d<I+>/dt = 0.  In matrix
    form M_sr = [[n+1, -(n+1)], [-(n-1), n-1]] / (2n); for I = 7/2 this
    is (1/16) [[9, -9], [-7, 7]].
    """
    n = nuclear_spin_2I + 1  # 2I + 1
    return np.array(
        [[n + 1, -(n + 1)], [-(n - 1), n - 1]], dtype=float
    ) / (2.0 * n)


def build_relaxation_matrix(
    rates: RelaxationRates,
    species: AlkaliSpecies,
    m_se: np.ndarray | None = None,
    m_sr: np.ndarray | None = None,
) -> RelaxationMatrix:
    """R = R_se M_se + R_sr M_sr + (R_u + R_P) I for the species' nuclear spin."""
    two_i = species.nuclear_spin_2I
    mse = exchange_matrix(two_i) if m_se is None else np.asarray(m_se, dtype=float)
    msr = destruction_matrix(two_i) if m_sr is None else np.asarray(m_sr, dtype=float)
    r = (
        rates.R_se * mse
        + rates.R_sr * msr
        + (rates.R_u + rates.R_P) * np.eye(2)
    )
    return RelaxationMatrix(r[0, 0], r[0, 1], r[1, 0], r[1, 1])


def dynamics_matrix(R: RelaxationMatrix, omega_a: float, omega_b: float) -> np.ndarray:
    """A = -(i diag(omega_a, omega_b) + R), the generator of d/dt v = A v."""
    if not (math.isfinite(omega_a) and math.isfinite(omega_b)):
        raise InvalidInputError("precession frequencies must be finite")
    return -(1j * np.diag([omega_a, omega_b]) + R.as_array().astype(complex))


def eigenmodes(A: np.ndarray) -> EigenModes:
    """Closed-form eigen-decomposition of the 2x2 dynamics matrix.

    Eigenvalues are reported for G = -A (decay rates positive).  A
    defective (repeated-eigenvalue) input returns both entries equal with
    ``degenerate=True`` instead of failing, since parameter sweeps cross
    exact degeneracies along the resonance line.
    """
    A = np.asarray(A, dtype=complex)
    g11, g12, g21, g22 = -A[0, 0], -A[0, 1], -A[1, 0], -A[1, 1]
    tr = g11 + g22
    disc = cmath.sqrt((g11 - g22) ** 2 + 4.0 * g12 * g21)
    lam1 = 0.5 * (tr - disc)
    lam2 = 0.5 * (tr + disc)
    scale = max(abs(g11), abs(g12), abs(g21), abs(g22), 1e-300)
    if abs(lam1 - lam2) <= _DEGENERACY_RTOL * scale and abs(g12) < _DEGENERACY_RTOL * scale and abs(g21) < _DEGENERACY_RTOL * scale:
        # Proportional to identity: any basis diagonalizes.
        return EigenModes(
            lambdas=(lam1, lam2), vectors=((1.0, 0.0), (0.0, 1.0)), degenerate=False
        )
    if abs(lam1 - lam2) <= _DEGENERACY_RTOL * scale:
        lam = 0.5 * tr
        v = _eigvec(g11, g12, g21, g22, lam)
        return EigenModes(lambdas=(lam, lam), vectors=(v, v), degenerate=True)
    modes = sorted(
        ((lam, _eigvec(g11, g12, g21, g22, lam)) for lam in (lam1, lam2)),
        key=lambda m: m[0].real,
    )
    return EigenModes(
        lambdas=(modes[0][0], modes[1][0]),
        vectors=(modes[0][1], modes[1][1]),
        degenerate=False,
    )


def _eigvec(g11, g12, g21, g22, lam) -> tuple[complex, complex]:
    """Unit-norm eigenvector of [[g11,g12],[g21,g22]] for eigenvalue lam."""
    cand1 = (g12, lam - g11)
    cand2 = (lam - g22, g21)
    v = max((cand1, cand2), key=lambda c: abs(c[0]) ** 2 + abs(c[1]) ** 2)
    norm = math.hypot(abs(v[0]), abs(v[1]))
    return (v[0] / norm, v[1] / norm)


def evolve(state0: TransverseState, A: np.ndarray, t: float) -> TransverseState:
    """Closed-form propagation exp(A t) applied to the state.

    Uses the eigen-decomposition; a defective A falls back to the Jordan
    form exp(A t) = e^{lam t} (I + (A - lam I) t).
    """
    if t < 0:
        raise InvalidInputError("time must be non-negative")
    A = np.asarray(A, dtype=complex)
    v0 = state0.as_array()
    modes = eigenmodes(A)
    if modes.degenerate:
        lam_a = -modes.lambdas[0]  # eigenvalue of A itself
        n = A - lam_a * np.eye(2)
        out = cmath.exp(lam_a * t) * (v0 + t * (n @ v0))
    else:
        v_mat = np.array(modes.vectors, dtype=complex).T
        coeffs = np.linalg.solve(v_mat, v0)
        phases = np.exp(np.array([-m * t for m in modes.lambdas]))
        out = v_mat @ (coeffs * phases)
    return TransverseState(complex(out[0]), complex(out[1]))


def observable_sx(state: TransverseState, species: AlkaliSpecies) -> float:
    """Probe observable <S_x> = Re(<F+_a> - <F+_b>) / (2I + 1).

    The electron spin projects as +<F_a>/(2I+1) in the upper manifold and
    -<F_b>/(2I+1) in the lower one, hence the difference.
    """
    return (state.f_plus_a - state.f_plus_b).real / (species.nuclear_spin_2I + 1)


# Quadratic-broadening coefficient of the slow mode for I = 7/2 under this
# module's normalization of M_se (unit fast-exchange eigenvalue).  Coarse
# estimates put it near 0.3; the constrained 2x2 construction gives exactly
# 105/484 = wa*wb/(wa+wb)^2 with spin-temperature weights (wa, wb) = (15, 7).
QUADRATIC_BROADENING_COEFF = 105.0 / 484.0


def slow_mode_floor(rates: RelaxationRates, nuclear_spin_2I: int = 7) -> float:
    """Fundamental rate at synchrony, Gamma_0 = R_u + R_P + R_sr/22 for I = 7/2."""
    wa, wb = spin_temperature_weights(nuclear_spin_2I)
    n = nuclear_spin_2I + 1
    return rates.R_u + rates.R_P + rates.R_sr * (wa - wb) / (n * (wa + wb))


def serf_asymptotics(
    rates: RelaxationRates,
    omega_a: float,
    omega_b: float,
    nuclear_spin_2I: int = 7,
) -> tuple[float, float]:
    """Rapid-exchange asymptotics (Gamma_approx, omega_bar_approx).

    Gamma_0 = R_u + R_P + R_sr/22 (I = 7/2); Gamma grows quadratically in
    the frequency mismatch with coefficient 105/484 ~ 0.217; the fundamental
    frequency is the spin-temperature-weighted mean (15 omega_a +
    7 omega_b)/22, i.e. (4/11) omega_a when omega_b = -omega_a and
    omega_a at synchrony.  Valid for |omega_a - omega_b| << R_se.
    """
    if rates.R_se <= 0:
        raise InvalidInputError("asymptotics require R_se > 0")
    wa, wb = spin_temperature_weights(nuclear_spin_2I)
    s = wa + wb
    gamma0 = slow_mode_floor(rates, nuclear_spin_2I)
    dw = omega_a - omega_b
    gamma = gamma0 + (wa * wb / s**2) * dw * dw / rates.R_se
    omega_bar = (wa * omega_a + wb * omega_b) / s
    return gamma, omega_bar


def protected_valley_width(rates: RelaxationRates, nuclear_spin_2I: int = 7) -> float:
    """Half-width sqrt(R_se Gamma_0) of the protected valley, rad/s."""
    if rates.R_se <= 0:
        raise InvalidInputError("valley width requires R_se > 0")
    return math.sqrt(rates.R_se * slow_mode_floor(rates, nuclear_spin_2I))
