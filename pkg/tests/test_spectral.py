import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bc_spectra.algebra import I2, SX, Unitary2, det2, random_unitary, to_params
from bc_spectra.errors import InvalidParameterError
from bc_spectra.presets import preset
from bc_spectra.spectral import (
    A0, B0, C0, b_matrix, boundary_matrices, coeffs, det_identity, secular, secular_neg_scaled,
    secular_pos, dsecular_pos, dsecular_neg_scaled, spectral_function, spectral_function_alt,
    wave_number, zero_mode_condition, zero_mode_residual,
)

energies = st.one_of(st.floats(1e-4, 1e4), st.floats(-1e4, -1e-4))


def test_wave_number_branches():
    assert wave_number(4.0) == 2.0
    assert wave_number(-9.0) == 3j
    with pytest.raises(InvalidParameterError):
        wave_number(math.inf)


@settings(max_examples=100, deadline=None)
@given(energies)
def test_b_is_a_minus_a_plus_inverse(eps):
    if eps < -2500:
        return  # exp(kappa/2) entries overflow the direct product long before B does
    bm = boundary_matrices(eps)
    assert np.allclose(b_matrix(eps), bm.a_minus @ np.linalg.inv(bm.a_plus), atol=1e-9)


def test_b_is_unitary_and_symmetric_under_sx():
    for e in (-50.0, -1.0, 0.0, 1.0, 123.0):
        b = b_matrix(e)
        assert np.allclose(b.conj().T @ b, I2, atol=1e-13)
        assert np.allclose(SX @ b @ SX, b)


def test_zero_energy_coefficients():
    cf = coeffs(0.0)
    assert (cf.a, cf.b, cf.c) == (A0, B0, C0)
    bm = boundary_matrices(0.0)
    assert bm.basis == "affine"
    assert np.allclose(b_matrix(0.0), bm.a_minus @ np.linalg.inv(bm.a_plus))


def test_spectral_function_is_det_b_minus_u(rng):
    for _ in range(20):
        u = random_unitary(rng)
        for e in (-30.0, -0.5, 0.0, 0.5, 40.0):
            assert spectral_function(u, e) == pytest.approx(det2(b_matrix(e) - u.m), abs=1e-12)


def test_det_identity(rng):
    m, n = rng.standard_normal((2, 2, 2)) + 1j * rng.standard_normal((2, 2, 2))
    assert det_identity(m, n) == pytest.approx(np.linalg.det(m - n))


def test_alt_function_refuses_zero():
    with pytest.raises(InvalidParameterError):
        spectral_function_alt(preset("dirichlet"), 0.0)


def test_alt_function_shares_zeros_away_from_zero():
    u = preset("dirichlet")
    assert abs(spectral_function_alt(u, math.pi**2)) < 1e-12
    assert abs(spectral_function(u, math.pi**2)) < 1e-14


def test_secular_is_rescaled_spectral_function(rng):
    for _ in range(10):
        u = random_unitary(rng)
        p = to_params(u)
        for e in (0.7, 5.0, 80.0):
            x = math.sqrt(e)
            cf = coeffs(e)
            z = np.exp(-1j * p.eta) * cf.D * spectral_function(u, e)
            assert abs(z.imag) < 1e-10
            assert secular(u, e) == pytest.approx(z.real, abs=1e-10)
            assert secular_pos(x, p.eta, p.m0, p.m1) == pytest.approx(z.real, abs=1e-10)


def test_secular_derivatives(rng):
    p = to_params(random_unitary(rng))
    h = 1e-6
    for x in (0.3, 2.0, 17.0):
        fd = (secular_pos(x + h, p.eta, p.m0, p.m1) - secular_pos(x - h, p.eta, p.m0, p.m1)) / (2 * h)
        assert dsecular_pos(x, p.eta, p.m0, p.m1) == pytest.approx(fd, rel=1e-6, abs=1e-6)
        fd = (secular_neg_scaled(x + h, p.eta, p.m0, p.m1)
              - secular_neg_scaled(x - h, p.eta, p.m0, p.m1)) / (2 * h)
        assert dsecular_neg_scaled(x, p.eta, p.m0, p.m1) == pytest.approx(fd, rel=1e-6, abs=1e-6)


def test_secular_survives_large_kappa():
    u = Unitary2(np.diag([1j, 1j]))
    assert math.isfinite(secular(u, -1e6))


def test_zero_mode_presets():
    assert zero_mode_condition(preset("neumann"))
    assert zero_mode_condition(preset("periodic"))
    assert not zero_mode_condition(preset("dirichlet"))
    assert not zero_mode_condition(preset("antiperiodic"))
    assert zero_mode_residual(preset("neumann")) == 0.0


def test_zero_mode_matches_determinant(rng):
    # F_U(0) vanishes exactly when the zero-mode residual does
    for _ in range(50):
        u = random_unitary(rng)
        assert abs(spectral_function(u, 0.0)) < 1e-12 or abs(zero_mode_residual(u)) > 1e-12
    u = Unitary2(I2)
    assert abs(spectral_function(u, 0.0)) < 1e-15


def test_boundary_matrices_at_zero():
    bm = boundary_matrices(0.0)
    assert np.allclose(bm.a_plus, [[1, 0.5 + 1j], [1, -0.5 - 1j]])
    assert np.allclose(bm.a_minus, [[1, 0.5 - 1j], [1, -0.5 + 1j]])


def test_boundary_matrices_at_pi_squared():
    # first row by hand at x = pi: (1 + x) exp(-i x/2) and (1 - x) exp(i x/2),
    # with the signs of x swapped in A_-; the ODE check confirms the layout
    x = math.pi
    bm = boundary_matrices(x * x)
    assert bm.a_plus[0, 0] == pytest.approx((1 + x) * np.exp(-0.5j * x))
    assert bm.a_plus[0, 1] == pytest.approx((1 - x) * np.exp(0.5j * x))
    assert bm.a_minus[0, 0] == pytest.approx((1 - x) * np.exp(-0.5j * x))
    assert abs(np.linalg.det(bm.a_plus) + 2j * coeffs(x * x).D) < 1e-12
