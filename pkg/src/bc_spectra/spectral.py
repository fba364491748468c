"""Spectral function of the ring with a junction, in dimensionless units.

Lengths are measured in units of the ring length (``ell = 1``) and energies
through ``eps_hat = eps * ell**2`` with ``eps = 2 m E / hbar**2``. The wave
number ``x = k * ell`` is real for ``eps_hat >= 0`` and ``i*kappa`` below zero.

For ``eps_hat != 0`` the solution basis is ``{exp(i k x), exp(-i k x)}``;
at ``eps_hat == 0`` it is the affine pair ``{1, -x}``. ``B = A_- A_+^{-1}``
does not depend on that choice and is continuous through zero, while
``A_+-`` themselves are not.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .algebra import I2, SX, BoundaryParams, Unitary2, det2, mat2, to_params, tr2
from .errors import InvalidParameterError

ZERO_MODE_TOL = 1e-10
HYPERBOLIC_RESCALE = 30.0

A0 = 1.0 / (1.0 + 2.0j)
B0 = 2.0j / (1.0 + 2.0j)
C0 = (1.0 - 2.0j) / (1.0 + 2.0j)


@dataclass(frozen=True)
class SpectralCoeffs:
    """``B(eps) = a*I + b*sx`` and ``c = det B``; ``D`` is the shared denominator."""

    a: complex
    b: complex
    c: complex
    D: complex


@dataclass(frozen=True, eq=False)
class BoundaryMatrices:
    a_plus: np.ndarray
    a_minus: np.ndarray
    basis: str  # "exponential" or "affine"


def _check_eps(eps_hat) -> float:
    e = float(eps_hat)
    if not math.isfinite(e):
        raise InvalidParameterError(f"non-finite energy {eps_hat!r}")
    return e


def wave_number(eps_hat: float) -> complex:
    e = _check_eps(eps_hat)
    if e >= 0.0:
        return complex(math.sqrt(e), 0.0)
    return complex(0.0, math.sqrt(-e))


def boundary_matrices(eps_hat: float) -> BoundaryMatrices:
    """``A_+`` and ``A_-`` mapping ``(c1, c2)`` to ``Psi +- i Psi'``."""
    e = _check_eps(eps_hat)
    if e == 0.0:
        ap = mat2([[1.0, 0.5 + 1j], [1.0, -0.5 - 1j]])
        am = mat2([[1.0, 0.5 - 1j], [1.0, -0.5 + 1j]])
        return BoundaryMatrices(ap, am, "affine")
    x = wave_number(e)
    em = cmath.exp(-0.5j * x)
    ep = cmath.exp(0.5j * x)
    ap = mat2([[(1 + x) * em, (1 - x) * ep], [(1 - x) * ep, (1 + x) * em]])
    am = mat2([[(1 - x) * em, (1 + x) * ep], [(1 + x) * ep, (1 - x) * em]])
    return BoundaryMatrices(ap, am, "exponential")


def coeffs(eps_hat: float) -> SpectralCoeffs:
    e = _check_eps(eps_hat)
    if e == 0.0:
        return SpectralCoeffs(A0, B0, C0, 0j)
    if e > 0.0:
        x = math.sqrt(e)
        s, co = math.sin(x), math.cos(x)
        d = complex((1 + x * x) * s, 2 * x * co)
        return SpectralCoeffs(
            (1 - x * x) * s / d,
            2j * x / d,
            complex((1 + x * x) * s, -2 * x * co) / d,
            d,
        )
    # x = i*kappa; numerators and denominator rescaled by 2*exp(-kappa)
    k = math.sqrt(-e)
    q = math.exp(-2.0 * k)
    sh, ch = 1.0 - q, 1.0 + q
    ds = complex(-2 * k * ch, (1 - k * k) * sh)
    a = complex(0.0, (1 + k * k) * sh) / ds
    b = -4.0 * k * math.exp(-k) / ds
    c = complex(2 * k * ch, (1 - k * k) * sh) / ds
    big = 0.5 * math.exp(k) if k < 709.0 else math.inf
    return SpectralCoeffs(a, b, c, ds * big)


def b_matrix(eps_hat: float) -> np.ndarray:
    cf = coeffs(eps_hat)
    return mat2(cf.a * I2 + cf.b * SX)


def spectral_function_params(eta: float, m0: float, m1: float, eps_hat: float) -> complex:
    """``exp(2i eta) - 2 exp(i eta) m0 a + 2i exp(i eta) m1 b + c``."""
    cf = coeffs(eps_hat)
    z = cmath.exp(1j * eta)
    return z * z - 2.0 * z * m0 * cf.a + 2.0j * z * m1 * cf.b + cf.c


def spectral_function(u: Unitary2, eps_hat: float) -> complex:
    """``F_U(eps) = det[B(eps) - U]``, evaluated through the three invariants of U."""
    p = u if isinstance(u, BoundaryParams) else to_params(u)
    return spectral_function_params(p.eta, p.m0, p.m1, eps_hat)


def spectral_function_alt(u: Unitary2, eps_hat: float) -> complex:
    """``det[A_-(eps) - U A_+(eps)]``; jumps at zero, so ``eps_hat = 0`` is refused."""
    e = _check_eps(eps_hat)
    if e == 0.0:
        raise InvalidParameterError(
            "spectral_function_alt is discontinuous at eps_hat = 0; use spectral_function"
        )
    bm = boundary_matrices(e)
    return det2(bm.a_minus - u.m @ bm.a_plus)


def det_identity(m, n) -> complex:
    """``det M + det N + tr(MN) - tr M tr N``, equal to ``det(M - N)`` for 2x2 matrices."""
    m = np.asarray(m, dtype=complex)
    n = np.asarray(n, dtype=complex)
    return det2(m) + det2(n) + tr2(m @ n) - tr2(m) * tr2(n)


# -- real secular function -------------------------------------------------
# s = Re/Im of exp(-i eta) * D * F_U; vanishes exactly where F_U does off zero.


def secular_pos(x, eta, m0, m1):
    x = np.asarray(x, dtype=float)
    s, c = np.sin(x), np.cos(x)
    ce, se = math.cos(eta), math.sin(eta)
    return 2 * (ce * (1 + x * x) * s - 2 * se * x * c) - 2 * m0 * (1 - x * x) * s - 4 * m1 * x


def dsecular_pos(x, eta, m0, m1):
    x = np.asarray(x, dtype=float)
    s, c = np.sin(x), np.cos(x)
    ce, se = math.cos(eta), math.sin(eta)
    return (
        2 * (ce * (2 * x * s + (1 + x * x) * c) - 2 * se * (c - x * s))
        - 2 * m0 * ((1 - x * x) * c - 2 * x * s)
        - 4 * m1
    )


def secular_neg_scaled(k, eta, m0, m1):
    """``exp(-kappa)`` times the hyperbolic-branch secular function."""
    k = np.asarray(k, dtype=float)
    q = np.exp(-2 * k)
    ce, se = math.cos(eta), math.sin(eta)
    return (
        ce * (1 - k * k) * (1 - q)
        - 2 * se * k * (1 + q)
        - m0 * (1 + k * k) * (1 - q)
        - 4 * m1 * k * np.exp(-k)
    )


def dsecular_neg_scaled(k, eta, m0, m1):
    k = np.asarray(k, dtype=float)
    q = np.exp(-2 * k)
    ce, se = math.cos(eta), math.sin(eta)
    return (
        ce * (-2 * k * (1 - q) + 2 * (1 - k * k) * q)
        - 2 * se * ((1 + q) - 2 * k * q)
        - m0 * (2 * k * (1 - q) + 2 * (1 + k * k) * q)
        - 4 * m1 * np.exp(-k) * (1 - k)
    )


def secular(u: Unitary2, eps_hat: float) -> float:
    """Real secular function; same zeros as ``F_U`` for ``eps_hat != 0``.

    On the hyperbolic branch the value is multiplied by ``exp(-kappa)`` once
    ``kappa > 30``; only its sign and zeros are meaningful there.
    """
    e = _check_eps(eps_hat)
    if e == 0.0:
        raise InvalidParameterError("secular is undefined at eps_hat = 0; use zero_mode_condition")
    p = u if isinstance(u, BoundaryParams) else to_params(u)
    if e > 0.0:
        return float(secular_pos(math.sqrt(e), p.eta, p.m0, p.m1))
    k = math.sqrt(-e)
    v = float(secular_neg_scaled(k, p.eta, p.m0, p.m1))
    return v if k > HYPERBOLIC_RESCALE else v * math.exp(k)


def zero_mode_residual(u: Unitary2) -> float:
    p = u if isinstance(u, BoundaryParams) else to_params(u)
    return math.cos(p.eta) - 2.0 * math.sin(p.eta) - (p.m0 + 2.0 * p.m1)


def zero_mode_condition(u: Unitary2, tol: float = ZERO_MODE_TOL) -> bool:
    """Whether ``H_U`` has an eigenvalue at exactly zero energy."""
    return abs(zero_mode_residual(u)) < tol
