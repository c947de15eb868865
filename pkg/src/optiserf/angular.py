"""Angular-momentum algebra for D1 light shifts.

Provides exact Clebsch-Gordan and Wigner 6-j coefficients (Racah formulas,
evaluated in rational arithmetic) and the two derived tables the rest of the
package consumes:

* relative oscillator strengths of the four D1 hyperfine lines, and
* signed vector-shift weights ``W(F, F')`` -- the coefficient of the
  M-linear (Zeeman-like) part of the second-order AC-Stark shift a sigma+
  beam induces in ground manifold F through the line F -> F'.

All angular momenta are passed doubled (``two_j = 2j``) so half-integers
stay exact.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import factorial, sqrt

from .errors import InvalidInputError


def _triangle_ok(two_a: int, two_b: int, two_c: int) -> bool:
    return (
        abs(two_a - two_b) <= two_c <= two_a + two_b
        and (two_a + two_b + two_c) % 2 == 0
    )


def _fact2(two_n: int) -> int:
    """factorial(n) for doubled integer input; two_n must be even and >= 0."""
    if two_n < 0 or two_n % 2:
        raise ValueError(f"not a valid doubled integer: {two_n}")
    return factorial(two_n // 2)


def _delta_sq(two_a: int, two_b: int, two_c: int) -> Fraction:
    """Squared triangle coefficient Delta(abc)^2 as an exact rational."""
    return Fraction(
        _fact2(two_a + two_b - two_c)
        * _fact2(two_a - two_b + two_c)
        * _fact2(-two_a + two_b + two_c),
        _fact2(two_a + two_b + two_c + 2),
    )


@lru_cache(maxsize=None)
def clebsch_gordan_sq(
    two_j1: int, two_m1: int, two_j2: int, two_m2: int, two_j: int, two_m: int
) -> Fraction:
    """Signed square of <j1 m1; j2 m2 | j m>: |CG|^2 times the sign of CG."""
    if two_m1 + two_m2 != two_m or not _triangle_ok(two_j1, two_j2, two_j):
        return Fraction(0)
    if abs(two_m1) > two_j1 or abs(two_m2) > two_j2 or abs(two_m) > two_j:
        return Fraction(0)
    # Racah's sum formula for the CG coefficient.
    pref_sq = (
        Fraction(two_j + 1, 1)
        * _delta_sq(two_j1, two_j2, two_j)
        * Fraction(
            _fact2(two_j1 + two_m1) * _fact2(two_j1 - two_m1)
            * _fact2(two_j2 + two_m2) * _fact2(two_j2 - two_m2)
            * _fact2(two_j + two_m) * _fact2(two_j - two_m),
            1,
        )
    )
    total = Fraction(0)
    k_min = max(
        0, two_j2 - two_j - two_m1, two_j1 + two_m2 - two_j
    )
    k_max = min(
        two_j1 + two_j2 - two_j, two_j1 - two_m1, two_j2 + two_m2
    )
    for two_k in range(k_min, k_max + 1, 2):
        sign = -1 if (two_k // 2) % 2 else 1
        denom = (
            _fact2(two_k)
            * _fact2(two_j1 + two_j2 - two_j - two_k)
            * _fact2(two_j1 - two_m1 - two_k)
            * _fact2(two_j2 + two_m2 - two_k)
            * _fact2(two_j - two_j2 + two_m1 + two_k)
            * _fact2(two_j - two_j1 - two_m2 + two_k)
        )
        total += Fraction(sign, denom)
    value_sq = pref_sq * total * total
    return value_sq if total >= 0 else -value_sq


@lru_cache(maxsize=None)
def wigner_6j_sq(
    two_j1: int, two_j2: int, two_j3: int, two_j4: int, two_j5: int, two_j6: int
) -> Fraction:
    """Squared 6-j symbol {j1 j2 j3; j4 j5 j6} as an exact rational."""
    triads = (
        (two_j1, two_j2, two_j3),
        (two_j1, two_j5, two_j6),
        (two_j4, two_j2, two_j6),
        (two_j4, two_j5, two_j3),
    )
    for t in triads:
        if not _triangle_ok(*t):
            return Fraction(0)
    pref = Fraction(1)
    for t in triads:
        pref *= _delta_sq(*t)
    args = (
        two_j1 + two_j2 + two_j3,
        two_j1 + two_j5 + two_j6,
        two_j4 + two_j2 + two_j6,
        two_j4 + two_j5 + two_j3,
    )
    pairs = (
        two_j1 + two_j2 + two_j4 + two_j5,
        two_j2 + two_j3 + two_j5 + two_j6,
        two_j3 + two_j1 + two_j6 + two_j4,
    )
    total = Fraction(0)
    for two_t in range(max(args), min(pairs) + 1, 2):
        sign = -1 if (two_t // 2) % 2 else 1
        num = _fact2(two_t + 2)
        den = 1
        for a in args:
            den *= _fact2(two_t - a)
        for p in pairs:
            den *= _fact2(p - two_t)
        total += Fraction(sign * num, den)
    value_sq = pref * total * total
    return value_sq if total >= 0 else -value_sq


# D1: ground and excited electronic angular momenta are both 1/2.
_TWO_J = 1
_TWO_JP = 1


def _coupling_sq(two_i: int, f: int, m: int, fp: int) -> Fraction:
    """|<F', M+1| d_+1 |F, M>|^2 for sigma+ light, reduced element set to 1.

    Uses |<F' M'|d_q|F M>|^2 = (2F'+1)(2J+1) {J J' 1; F' F I}^2 |<F M;1 q|F' M'>|^2.
    """
    sj = wigner_6j_sq(_TWO_J, _TWO_JP, 2, 2 * fp, 2 * f, two_i)
    cg = clebsch_gordan_sq(2 * f, 2 * m, 2, 2, 2 * fp, 2 * m + 2)
    return (2 * fp + 1) * (_TWO_J + 1) * abs(sj) * abs(cg)


def manifold_F_values(nuclear_spin_2I: int) -> tuple[int, int]:
    """(F_lower, F_upper) = (I - 1/2, I + 1/2) for odd doubled nuclear spin."""
    if nuclear_spin_2I <= 0 or nuclear_spin_2I % 2 == 0:
        raise InvalidInputError("nuclear_spin_2I must be a positive odd integer")
    return (nuclear_spin_2I - 1) // 2, (nuclear_spin_2I + 1) // 2


def line_strengths(nuclear_spin_2I: int) -> dict[tuple[int, int], float]:
    """Relative oscillator strengths of the four D1 lines, normalized to 1.

    Strength(F -> F') ~ (2F+1)(2F'+1) {J J' 1; F' F I}^2; for cesium this
    gives 21:15:7:21 over the (4->3, 4->4, 3->3, 3->4) lines.
    """
    f_lo, f_hi = manifold_F_values(nuclear_spin_2I)
    raw = {}
    for f in (f_lo, f_hi):
        for fp in (f_lo, f_hi):
            sj = abs(wigner_6j_sq(_TWO_J, _TWO_JP, 2, 2 * fp, 2 * f, nuclear_spin_2I))
            raw[(f, fp)] = Fraction(2 * f + 1) * (2 * fp + 1) * sj
    norm = sum(raw.values())
    return {k: float(v / norm) for k, v in raw.items()}


def vector_shift_weights(nuclear_spin_2I: int) -> dict[tuple[int, int], float]:
    """Signed M-linear weights W(F, F') of the sigma+ vector light shift.

    The second-order shift of |F, M> through line F -> F' is
    W(F, F') * M * D(Delta_FF') plus M-even terms, with D the dispersive
    profile.  Since the coupling strength is exactly quadratic in M, the
    linear coefficient is (c(M=1) - c(M=-1))/2.  The opposite electron-spin
    projection of the two manifolds makes the two rows of W carry opposite
    net sign, exactly like a real magnetic field would.
    """
    f_lo, f_hi = manifold_F_values(nuclear_spin_2I)
    out = {}
    for f in (f_lo, f_hi):
        for fp in (f_lo, f_hi):
            c_plus = _coupling_sq(nuclear_spin_2I, f, 1, fp)
            c_minus = _coupling_sq(nuclear_spin_2I, f, -1, fp)
            out[(f, fp)] = float((c_plus - c_minus) / 2)
    return out


def stark_shift_m_slopes(
    nuclear_spin_2I: int,
    detunings: dict[tuple[int, int], float],
    coupling_scale: float,
) -> dict[int, float]:
    """Brute-force oracle: per-manifold M-slope of the full AC-Stark shift.

    For every ground state |F, M> the 3-level system (ground state plus the
    two sigma+-coupled excited states, placed at minus their detuning in the
    rotating frame) is diagonalized, the dressed ground energy is read off,
    and the shifts are least-squares fitted to a + b M + c M^2 per manifold.
    Returns {F: b_F / coupling_scale^2}, directly comparable to the
    dispersive-sum cross-sections with unit reduced dipole element.

    ``detunings`` maps (F, F') to the optical detuning from that line in
    rad/s; ``coupling_scale`` is the Rabi-like prefactor multiplying the
    unit-reduced dipole matrix elements (keep it small against the
    detunings so the extraction stays in the perturbative regime).
    """
    import numpy as np

    f_lo, f_hi = manifold_F_values(nuclear_spin_2I)
    slopes: dict[int, float] = {}
    for f in (f_lo, f_hi):
        ms = list(range(-f, f + 1))
        shifts = []
        for m in ms:
            dim = 3
            h = np.zeros((dim, dim))
            for k, fp in enumerate((f_lo, f_hi)):
                c_sq = _coupling_sq(nuclear_spin_2I, f, m, fp)
                v = coupling_scale * sqrt(float(c_sq))
                h[0, k + 1] = h[k + 1, 0] = v
                h[k + 1, k + 1] = -detunings[(f, fp)]
            evals, evecs = np.linalg.eigh(h)
            idx = int(np.argmax(np.abs(evecs[0, :])))
            shifts.append(evals[idx])
        coeffs = np.polynomial.polynomial.polyfit(ms, shifts, 2)
        slopes[f] = float(coeffs[1]) / coupling_scale**2
    return slopes
