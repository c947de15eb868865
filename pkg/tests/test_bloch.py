import cmath
import math

import numpy as np
import pytest

from optiserf.bloch import (
    QUADRATIC_BROADENING_COEFF,
    EigenModes,
    RelaxationRates,
    TransverseState,
    build_relaxation_matrix,
    destruction_matrix,
    dynamics_matrix,
    eigenmodes,
    evolve,
    exchange_matrix,
    observable_sx,
    protected_valley_width,
    serf_asymptotics,
    slow_mode_floor,
    spin_temperature_weights,
)
from optiserf.errors import InvalidInputError

TWO_PI = 2 * math.pi


def test_spin_temperature_weights():
    assert spin_temperature_weights(7) == (60, 28)
    assert spin_temperature_weights(3) == (10, 2)


def test_exchange_matrix_structure():
    for two_i in (3, 5, 7):
        m = exchange_matrix(two_i)
        # Exchange conserves the total transverse moment: zero column sums.
        assert np.allclose(m.sum(axis=0), 0.0, atol=1e-15)
        # Spin-temperature direction is untouched.
        wa, wb = spin_temperature_weights(two_i)
        assert np.allclose(m @ np.array([wa, wb], float), 0.0, atol=1e-12)
        # Unit fast eigenvalue: trace equals sum of eigenvalues {0, 1}.
        assert np.trace(m) == pytest.approx(1.0, abs=1e-15)


def test_exchange_matrix_cs_values():
    m = exchange_matrix(7)
    assert np.allclose(m * 22, [[7, -15], [-7, 15]], atol=1e-12)


def test_destruction_matrix_structure():
    for two_i in (3, 5, 7):
        n = two_i + 1
        m = destruction_matrix(two_i)
        # Electron coherence (F_a - F_b)/n decays at unit rate: (1, -1) is
        # a left eigenvector of M_sr with eigenvalue 1...
        s_dir = np.array([1.0, -1.0])
        assert np.allclose(s_dir @ m, s_dir, atol=1e-12)
        # ...while the nuclear coherence F_a + F_b - S is conserved:
        # left null vector (n-1, n+1).
        assert np.allclose(np.array([n - 1, n + 1], float) @ m, 0.0, atol=1e-12)


def test_destruction_matrix_cs_values():
    m = destruction_matrix(7)
    assert np.allclose(m * 16, [[9, -9], [-7, 7]], atol=1e-12)


def test_relaxation_matrix_entries(cesium, default_rates):
    r = build_relaxation_matrix(default_rates, cesium)
    assert r.r11 == pytest.approx(111.9034090909, rel=1e-10)
    assert r.r12 == pytest.approx(-163.7215909090, rel=1e-10)
    assert r.r21 == pytest.approx(-91.2784090909, rel=1e-10)
    assert r.r22 == pytest.approx(163.0965909090, rel=1e-10)


def test_relaxation_matrix_scattering_adds_uniformly(cesium, default_rates):
    r0 = build_relaxation_matrix(default_rates, cesium).as_array()
    rp = build_relaxation_matrix(RelaxationRates(170, 85, 10, 3), cesium).as_array()
    assert np.allclose(rp - r0, 3.0 * np.eye(2), atol=1e-12)


def test_eigenrates_at_synchrony(cesium, default_rates):
    # With omega_a == omega_b the frequencies factor out and the decay
    # rates are the eigenvalues of R alone.
    r = build_relaxation_matrix(default_rates, cesium)
    for w in (0.0, 500.0):
        modes = eigenmodes(dynamics_matrix(r, w, w))
        rates = sorted(l.real for l in modes.lambdas)
        assert rates[0] == pytest.approx(12.6023146004, rel=1e-9)
        assert rates[1] == pytest.approx(262.3976853996, rel=1e-9)
        assert modes.fundamental_freq == pytest.approx(w, rel=1e-12, abs=1e-9)


def test_fundamental_rate_unprotected(cesium, default_rates):
    # 0.43 mG, no light: counter-rotating manifolds, near-total loss of
    # exchange protection.
    w = TWO_PI * 2.8025e6 * 0.43e-3 / 8.0
    r = build_relaxation_matrix(default_rates, cesium)
    modes = eigenmodes(dynamics_matrix(r, w, -w))
    assert modes.fundamental_rate == pytest.approx(111.6869, rel=1e-5)


def test_fundamental_rate_sum_invariant(cesium, default_rates):
    # Trace is basis independent: rate sum equals tr(R) at any frequencies.
    r = build_relaxation_matrix(default_rates, cesium)
    rng = np.random.default_rng(3)
    for wa, wb in rng.uniform(-2000, 2000, size=(20, 2)):
        modes = eigenmodes(dynamics_matrix(r, wa, wb))
        total = sum(modes.lambdas)
        assert total.real == pytest.approx(r.r11 + r.r22, rel=1e-12)
        assert total.imag == pytest.approx(wa + wb, rel=1e-12, abs=1e-9)


def test_eigenmodes_match_numpy(cesium, default_rates):
    r = build_relaxation_matrix(default_rates, cesium)
    rng = np.random.default_rng(7)
    for wa, wb in rng.uniform(-3000, 3000, size=(25, 2)):
        a = dynamics_matrix(r, wa, wb)
        modes = eigenmodes(a)
        ref = sorted(np.linalg.eigvals(-a), key=lambda z: z.real)
        for got, want in zip(modes.lambdas, ref):
            assert got == pytest.approx(want, rel=1e-10)
        # Vectors really are eigenvectors of -A.
        g = -a
        for lam, vec in zip(modes.lambdas, modes.vectors):
            v = np.array(vec)
            assert np.allclose(g @ v, lam * v, atol=1e-8 * max(abs(lam), 1.0))


def test_eigenmodes_identity_not_degenerate():
    modes = eigenmodes(-5.0 * np.eye(2, dtype=complex))
    assert not modes.degenerate
    assert modes.lambdas == (5.0, 5.0)


def test_eigenmodes_defective_flagged():
    # Jordan block: repeated eigenvalue, single eigenvector.
    a = -np.array([[2.0, 1.0], [0.0, 2.0]], dtype=complex)
    modes = eigenmodes(a)
    assert modes.degenerate
    assert modes.lambdas[0] == pytest.approx(2.0)


def test_evolve_matches_expm(cesium, default_rates):
    from scipy.linalg import expm

    r = build_relaxation_matrix(default_rates, cesium)
    a = dynamics_matrix(r, 946.45, -946.45)
    v0 = TransverseState(15 / 22, 7 / 22)
    for t in (0.0, 1e-3, 0.02, 0.3):
        got = evolve(v0, a, t).as_array()
        want = expm(a * t) @ v0.as_array()
        assert np.allclose(got, want, atol=1e-12)


def test_evolve_defective_matches_expm():
    from scipy.linalg import expm

    a = -np.array([[20.0 + 5j, 1.0], [0.0, 20.0 + 5j]], dtype=complex)
    v0 = TransverseState(1.0, 0.5j)
    for t in (1e-3, 0.05):
        got = evolve(v0, a, t).as_array()
        want = expm(a * t) @ v0.as_array()
        assert np.allclose(got, want, atol=1e-12)


def test_evolve_rejects_negative_time(cesium, default_rates):
    r = build_relaxation_matrix(default_rates, cesium)
    a = dynamics_matrix(r, 0.0, 0.0)
    with pytest.raises(InvalidInputError):
        evolve(TransverseState(1.0, 0.0), a, -1.0)


def test_observable_sx(cesium):
    s = TransverseState(0.5 + 0.2j, 0.1 - 0.9j)
    assert observable_sx(s, cesium) == pytest.approx(0.4 / 8)


def test_slow_mode_floor(default_rates):
    assert slow_mode_floor(default_rates) == pytest.approx(10 + 85 / 22, rel=1e-14)
    assert slow_mode_floor(RelaxationRates(170, 85, 10, 3)) == pytest.approx(
        13 + 85 / 22, rel=1e-14
    )


def test_protected_valley_width(default_rates):
    assert protected_valley_width(default_rates) == pytest.approx(
        math.sqrt(170 * (10 + 85 / 22)), rel=1e-14
    )
    assert protected_valley_width(default_rates) == pytest.approx(48.55, rel=1e-3)


def test_quadratic_broadening_coefficient_value():
    assert QUADRATIC_BROADENING_COEFF == pytest.approx(105 / 484, rel=1e-15)
    # Falls inside the coarse estimate band quoted for this geometry.
    assert 0.15 < QUADRATIC_BROADENING_COEFF < 0.35


def test_asymptotics_match_exact_eigenvalue_in_rapid_exchange(cesium):
    # In the rapid-exchange regime the exact fundamental rate approaches
    # Gamma_0 + c (d omega)^2 / R_se with c = 105/484 and the frequency
    # approaches the weighted mean (15 w_a + 7 w_b)/22.
    rates = RelaxationRates(20000.0, 85.0, 10.0, 0.0)
    r = build_relaxation_matrix(rates, cesium)
    for dw in (50.0, 200.0, 400.0):
        wa, wb = 800.0 + dw / 2, 800.0 - dw / 2
        modes = eigenmodes(dynamics_matrix(r, wa, wb))
        gamma, omega_bar = serf_asymptotics(rates, wa, wb)
        assert modes.fundamental_rate == pytest.approx(gamma, rel=2e-3)
        assert modes.fundamental_freq == pytest.approx(omega_bar, rel=1e-3)


def test_quadratic_coefficient_from_exact_dynamics(cesium):
    # Independent extraction of the curvature: fit the exact fundamental
    # rate against (d omega)^2 at large R_se, intercept left free (the
    # R_sr^2 cross term contributes a constant offset).
    rates = RelaxationRates(40000.0, 85.0, 10.0, 0.0)
    r = build_relaxation_matrix(rates, cesium)
    dws = np.linspace(50.0, 600.0, 12)
    gammas = []
    for dw in dws:
        modes = eigenmodes(dynamics_matrix(r, dw / 2, -dw / 2))
        gammas.append(modes.fundamental_rate)
    slope, _ = np.polyfit(dws**2 / rates.R_se, gammas, 1)
    assert slope == pytest.approx(105 / 484, rel=5e-3)


def test_asymptotics_require_exchange():
    with pytest.raises(InvalidInputError):
        serf_asymptotics(RelaxationRates(0.0, 85.0, 10.0), 1.0, 1.0)
    with pytest.raises(InvalidInputError):
        protected_valley_width(RelaxationRates(0.0, 85.0, 10.0))


def test_rates_validation():
    with pytest.raises(InvalidInputError):
        RelaxationRates(-1.0, 0.0, 0.0)
    with pytest.raises(InvalidInputError):
        RelaxationRates(1.0, 1.0, 1.0, -0.1)
