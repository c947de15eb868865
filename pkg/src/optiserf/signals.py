"""Synthetic probe signals, spectra, and decaying-sinusoid fits.

The forward model samples <S_x(t)> from the closed-form mode expansion of
the hyperfine-Bloch dynamics; optional white Gaussian noise comes from a
64-bit counter-based generator (numpy Philox4x64-10 keyed by the seed,
normal deviates via ``standard_normal``), so identical (seed, params)
reproduce traces bit-exactly, including across re-implementations that
use the same generator.  Fits follow the two-exponent procedure:
a sum of decaying cosines, with the reported rate the smaller of the
fitted decay rates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares

from .atoms import AlkaliSpecies
from .bloch import TransverseState, eigenmodes
from .errors import DegenerateInputError, InvalidInputError

_MIN_SAMPLES = 16
_FIT_FTOL = 1e-10
_FIT_MAX_ITER = 500


@dataclass(frozen=True)
class TimeSeries:
    """Uniformly sampled probe trace <S_x(t_k)>."""

    dt: float
    samples: np.ndarray
    seed: int = 0
    noise_sigma: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "samples", np.asarray(self.samples, dtype=float))
        if self.dt <= 0:
            raise InvalidInputError("dt must be positive")
        if self.samples.size < _MIN_SAMPLES:
            raise InvalidInputError(f"need at least {_MIN_SAMPLES} samples")
        if not np.all(np.isfinite(self.samples)):
            raise InvalidInputError("samples must be finite")

    @property
    def times(self) -> np.ndarray:
        return self.dt * np.arange(self.samples.size)


@dataclass(frozen=True)
class Spectrum:
    """Magnitude spectrum; frequencies in Hz from 0 to Nyquist."""

    frequencies: np.ndarray
    magnitudes: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "frequencies", np.asarray(self.frequencies, dtype=float))
        object.__setattr__(self, "magnitudes", np.asarray(self.magnitudes, dtype=float))
        if self.frequencies.shape != self.magnitudes.shape:
            raise InvalidInputError("frequency/magnitude length mismatch")
        if np.any(np.diff(self.frequencies) <= 0):
            raise InvalidInputError("frequencies must be strictly increasing")


@dataclass(frozen=True)
class DecayComponent:
    """One fitted term A e^{-gamma t} cos(omega t + theta)."""

    amplitude: float
    gamma: float
    omega: float
    theta: float


@dataclass(frozen=True)
class DecayFitResult:
    """Fit output; components sorted by decay rate ascending.

    ``gamma`` is the fundamental (minimal) decay rate and ``omega_bar``
    the precession frequency of the component attaining it.
    """

    components: tuple[DecayComponent, ...]
    residual_rms: float
    converged: bool
    offset: float = 0.0

    @property
    def gamma(self) -> float:
        return self.components[0].gamma

    @property
    def omega_bar(self) -> float:
        return self.components[0].omega


def synthesize_signal(
    A: np.ndarray,
    state0: TransverseState,
    species: AlkaliSpecies,
    duration: float,
    dt: float,
    noise_sigma: float = 0.0,
    seed: int = 0,
) -> TimeSeries:
    """Sample <S_x> under d/dt v = A v, plus optional seeded white noise.

    ``seed = 0`` means noiseless regardless of ``noise_sigma``.
    """
    if dt <= 0:
        raise InvalidInputError("dt must be positive")
    if duration < _MIN_SAMPLES * dt:
        raise InvalidInputError("duration must cover at least 16 samples")
    n = int(round(duration / dt))
    t = dt * np.arange(n)
    modes = eigenmodes(np.asarray(A, dtype=complex))
    v0 = state0.as_array()
    if modes.degenerate:
        lam_a = -modes.lambdas[0]
        nilp = np.asarray(A, dtype=complex) - lam_a * np.eye(2)
        base = np.exp(lam_a * t)
        va = base * (v0[0] + t * (nilp @ v0)[0])
        vb = base * (v0[1] + t * (nilp @ v0)[1])
    else:
        v_mat = np.array(modes.vectors, dtype=complex).T
        coeffs = np.linalg.solve(v_mat, v0)
        phases = np.exp(np.outer(t, [-m for m in modes.lambdas]))  # (n, 2)
        va = phases @ (coeffs * v_mat[0])
        vb = phases @ (coeffs * v_mat[1])
    sx = (va - vb).real / (species.nuclear_spin_2I + 1)
    if noise_sigma > 0.0 and seed != 0:
        rng = np.random.Generator(np.random.Philox(key=seed))
        sx = sx + noise_sigma * rng.standard_normal(n)
    return TimeSeries(dt=dt, samples=sx, seed=seed, noise_sigma=noise_sigma)


def fft_spectrum(
    series: TimeSeries, zero_pad_factor: int = 1, window: str = "hann"
) -> Spectrum:
    """Magnitude spectrum of the trace.

    A Hann window is applied by default (``window="none"`` gives the raw
    periodogram path used for Parseval checks); ``zero_pad_factor``
    multiplies the transform length.  Magnitudes are normalized by the
    window's coherent gain so a unit-amplitude tone at a bin center reads
    ~0.5 (the one-sided half-amplitude).
    """
    if zero_pad_factor < 1:
        raise InvalidInputError("zero_pad_factor must be >= 1")
    x = series.samples
    n = x.size
    if window == "hann":
        w = np.hanning(n)
    elif window == "none":
        w = np.ones(n)
    else:
        raise InvalidInputError(f"unknown window {window!r}")
    nfft = n * int(zero_pad_factor)
    mags = np.abs(np.fft.rfft(x * w, nfft)) / w.sum()
    freqs = np.fft.rfftfreq(nfft, series.dt)
    return Spectrum(frequencies=freqs, magnitudes=mags)


def _quadratic_peak(mags: np.ndarray, idx: int) -> tuple[float, float]:
    """Sub-bin peak (position, height) by parabolic interpolation at idx."""
    if idx <= 0 or idx >= mags.size - 1:
        return float(idx), float(mags[idx])
    ym, y0, yp = mags[idx - 1], mags[idx], mags[idx + 1]
    denom = ym - 2.0 * y0 + yp
    if denom == 0.0:
        return float(idx), float(y0)
    shift = 0.5 * (ym - yp) / denom
    height = y0 - 0.25 * (ym - yp) * shift
    return idx + shift, float(height)


def _local_maxima(mags: np.ndarray) -> list[int]:
    """Indices of interior local maxima, plus the edges when they dominate."""
    idx = [
        i
        for i in range(1, mags.size - 1)
        if mags[i] >= mags[i - 1] and mags[i] > mags[i + 1]
    ]
    if mags.size >= 2 and mags[0] > mags[1]:
        idx.append(0)
    if mags.size >= 2 and mags[-1] > mags[-2]:
        idx.append(mags.size - 1)
    return sorted(idx, key=lambda i: -mags[i])


def initial_guess(
    series: TimeSeries, max_components: int = 2
) -> list[tuple[float, float, float, float]]:
    """Spectral starting points (A, gamma, omega, theta) for the fit.

    Picks up to two interpolated spectral peaks, estimates the decay rate
    from the half-maximum width, and amplitude/phase from the raw complex
    bin of the unwindowed transform.  Raises DegenerateInputError on an
    all-zero trace.
    """
    if series.samples.size < 64:
        raise InvalidInputError("initial_guess needs at least 64 samples")
    if not np.any(series.samples):
        raise DegenerateInputError("all-zero trace carries no signal")
    pad = 4
    spec = fft_spectrum(series, zero_pad_factor=pad, window="hann")
    mags = spec.magnitudes
    raw = np.fft.rfft(series.samples, series.samples.size * pad)
    df = spec.frequencies[1] - spec.frequencies[0]
    n = series.samples.size
    duration = n * series.dt

    peaks = _local_maxima(mags)
    # Keep peaks separated by more than a resolution width of the window.
    min_sep = max(2, int(round(2.0 / (duration * df))))
    chosen: list[int] = []
    for i in peaks:
        if all(abs(i - j) >= min_sep for j in chosen):
            chosen.append(i)
        if len(chosen) == max_components:
            break

    out = []
    for i in chosen:
        pos, height = _quadratic_peak(mags, i)
        freq_hz = pos * df
        # Half-maximum half-width of the magnitude peak -> decay estimate.
        half = height / 2.0
        j = i
        while j + 1 < mags.size and mags[j + 1] > half:
            j += 1
        width_hz = max((j - pos) * df, df / 4.0)
        gamma = 2.0 * math.pi * width_hz / math.sqrt(3.0)
        bin_val = raw[i]
        scale = max(1.0 - math.exp(-gamma * duration), 1e-6)
        amp = 2.0 * abs(bin_val) * gamma * series.dt / scale
        theta = math.atan2(bin_val.imag, bin_val.real)
        out.append((amp, gamma, 2.0 * math.pi * freq_hz, theta))
    if not out:
        raise DegenerateInputError("no spectral peaks found")
    return out


def padded_guess(
    series: TimeSeries, n_components: int
) -> list[tuple[float, float, float, float]]:
    """Initial guess padded to exactly n_components entries.

    When the spectrum resolves fewer peaks than requested (e.g. both modes
    share the same |frequency| at zero power), the dominant peak is
    duplicated with split decay rates so the optimizer can separate the
    overlapping exponents.
    """
    guess = initial_guess(series, max_components=n_components)
    while len(guess) < n_components:
        amp, gamma, omega, theta = guess[0]
        guess = [(amp, 0.5 * gamma, omega, theta)] + guess[1:]
        guess.append((0.5 * amp, 2.5 * gamma, omega, theta))
    return guess[:n_components]


def _model(params: np.ndarray, t: np.ndarray, n_comp: int, offset: bool) -> np.ndarray:
    y = np.zeros_like(t)
    for k in range(n_comp):
        ac, as_, gamma, omega = params[4 * k : 4 * k + 4]
        decay = np.exp(-gamma * t)
        y += decay * (ac * np.cos(omega * t) + as_ * np.sin(omega * t))
    if offset:
        y = y + params[-1]
    return y


def fit_decaying_sinusoids(
    series: TimeSeries,
    n_components: int,
    guess: list[tuple[float, float, float, float]],
    fit_offset: bool = False,
) -> DecayFitResult:
    """Least-squares fit of 1 or 2 decaying cosines to the trace.

    Internally parameterized as (A cos theta, -A sin theta) per component
    to avoid phase wrap-around; decay rates are bounded below by zero.
    A Levenberg-Marquardt-style trust-region solver is used; on
    non-convergence the best-found parameters are returned with
    ``converged=False`` so sweeps can mask bad cells.
    """
    if n_components not in (1, 2):
        raise InvalidInputError("n_components must be 1 or 2")
    if len(guess) != n_components:
        raise InvalidInputError("guess length must equal n_components")
    t = series.times
    y = series.samples

    p0, lb, ub = [], [], []
    for amp, gamma, omega, theta in guess:
        p0 += [amp * math.cos(theta), -amp * math.sin(theta), max(gamma, 0.0), abs(omega)]
        lb += [-np.inf, -np.inf, 0.0, 0.0]
        ub += [np.inf, np.inf, np.inf, np.inf]
    if fit_offset:
        p0.append(0.0)
        lb.append(-np.inf)
        ub.append(np.inf)

    res = least_squares(
        lambda p: _model(np.asarray(p), t, n_components, fit_offset) - y,
        np.asarray(p0, dtype=float),
        bounds=(lb, ub),
        method="trf",
        ftol=_FIT_FTOL,
        xtol=1e-14,
        gtol=None,
        max_nfev=_FIT_MAX_ITER * (len(p0) + 1),
    )
    comps = []
    for k in range(n_components):
        ac, as_, gamma, omega = res.x[4 * k : 4 * k + 4]
        amp = math.hypot(ac, as_)
        theta = math.atan2(-as_, ac) if amp > 0 else 0.0
        if theta <= -math.pi:
            theta += 2.0 * math.pi
        comps.append(DecayComponent(amp, float(gamma), float(omega), theta))
    # Sort by decay rate; ties broken by smaller |omega| first.
    comps.sort(key=lambda c: (c.gamma, abs(c.omega)))
    rms = float(np.sqrt(np.mean(res.fun**2)))
    offset = float(res.x[-1]) if fit_offset else 0.0
    return DecayFitResult(
        components=tuple(comps),
        residual_rms=rms,
        converged=bool(res.success),
        offset=offset,
    )


# CSV/report sentinel for an infinite quality factor (gamma = 0).
Q_SENTINEL = -1.0


def quality_factor(fit: DecayFitResult) -> float:
    """Q = omega_bar / gamma (angular definition); inf when gamma = 0."""
    if fit.gamma == 0.0:
        return math.inf
    return fit.omega_bar / fit.gamma
