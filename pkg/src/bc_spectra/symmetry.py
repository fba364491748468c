"""Parity orbits, time reversal and coordinates on the space of spectra.

The spectrum only sees ``(eta, m0, m1)``. Conjugating ``U`` by
``exp(i*delta*sx)`` rotates ``(m2, m3)`` and leaves those three numbers
alone, so every ``U`` off the parity-symmetric family sits on a circle of
isospectral boundary conditions. The space of spectra is the closed disk of
``(m0, m1)`` times ``eta`` in ``[0, pi)``, glued back with a half turn
``(eta, m0, m1) ~ (eta + pi, -m0, -m1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .algebra import SX, Unitary2, to_params
from .errors import InvalidParameterError

CLASS_TOL = 1e-12
SYMMETRY_TOL = 1e-10

ETA0 = math.atan(2.0)


@dataclass(frozen=True, eq=False)
class SpectralClass:
    """A point of the spectral space, compared up to ``CLASS_TOL``.

    Equality is tolerance based and aware of the half-turn gluing, so
    instances are deliberately unhashable.
    """

    eta: float
    m0: float
    m1: float

    def __post_init__(self):
        if not 0.0 <= self.eta < math.pi:
            raise InvalidParameterError(f"eta={self.eta!r} outside [0, pi)")
        if self.m0**2 + self.m1**2 > 1.0 + CLASS_TOL:
            raise InvalidParameterError("(m0, m1) outside the closed unit disk")

    __hash__ = None

    def distance(self, other: "SpectralClass") -> float:
        direct = max(abs(self.eta - other.eta), abs(self.m0 - other.m0), abs(self.m1 - other.m1))
        # eta near 0 and eta near pi are neighbours through the twist
        glued = max(
            math.pi - abs(self.eta - other.eta),
            abs(self.m0 + other.m0),
            abs(self.m1 + other.m1),
        )
        return min(direct, glued)

    def __eq__(self, other):
        if not isinstance(other, SpectralClass):
            return NotImplemented
        return self.distance(other) <= CLASS_TOL

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.eta, self.m0, self.m1)

    @property
    def on_boundary(self) -> bool:
        return abs(self.m0**2 + self.m1**2 - 1.0) < SYMMETRY_TOL


@dataclass(frozen=True)
class IsospectralFamily:
    base: Unitary2
    samples: tuple[tuple[float, Unitary2], ...]

    def matrices(self) -> list[Unitary2]:
        return [u for _, u in self.samples]

    def distinct(self, atol: float = 1e-10) -> list[tuple[float, Unitary2]]:
        out: list[tuple[float, Unitary2]] = []
        for d, u in self.samples:
            if not any(u.allclose(v, atol) for _, v in out):
                out.append((d, u))
        return out


@dataclass(frozen=True)
class ZeroModeCurves:
    eta0: float
    theta1: Callable[[float], float]
    theta2: Callable[[float], float]

    def intersection(self) -> dict:
        """Crossing of the two curves, as ``(eta, theta)`` in both charts."""
        raw = (-self.eta0, self.eta0)
        canon = (math.pi - self.eta0, (math.pi + self.eta0) % (2 * math.pi))
        return {"raw": raw, "canonical": canon}


def _parity_rotation(delta: float) -> np.ndarray:
    return math.cos(delta) * np.eye(2) + 1j * math.sin(delta) * SX


def parity_conjugate(u: Unitary2, delta: float) -> Unitary2:
    """``exp(i delta sx) U exp(-i delta sx)``; isospectral to ``u`` for every ``delta``."""
    r = _parity_rotation(delta)
    return Unitary2(r @ u.m @ r.conj().T)


def time_reverse(u: Unitary2) -> Unitary2:
    return u.T


def is_parity_symmetric(u: Unitary2, tol: float = SYMMETRY_TOL) -> bool:
    p = to_params(u)
    return abs(p.m2) < tol and abs(p.m3) < tol


def spectral_class(u: Unitary2) -> SpectralClass:
    p = to_params(u)
    return SpectralClass(p.eta, p.m0, p.m1)


def isospectral_family(u: Unitary2, n_samples: int) -> IsospectralFamily:
    """Sample the parity orbit of ``u`` at ``delta = j*pi/n`` for ``j < n``.

    The orbit has period ``pi`` in ``delta``; for a parity-symmetric ``u``
    every sample coincides with ``u``.
    """
    if n_samples < 1:
        raise InvalidParameterError("n_samples must be >= 1")
    samples = []
    for j in range(n_samples):
        d = math.pi * j / n_samples
        samples.append((d, u if j == 0 else parity_conjugate(u, d)))
    return IsospectralFamily(u, tuple(samples))


def zero_mode_curves() -> ZeroModeCurves:
    return ZeroModeCurves(ETA0, lambda eta: eta + 2.0 * ETA0, lambda eta: -eta)


def zero_mode_residual_family(eta: float, theta: float) -> float:
    """Zero-mode residual on ``U(eta, theta)``, without going through a matrix."""
    return math.cos(eta) - 2.0 * math.sin(eta) - (math.cos(theta) + 2.0 * math.sin(theta))


def hamiltonian_space_locus(u: Unitary2, tol: float = SYMMETRY_TOL) -> str:
    """``"boundary"`` for a parity-symmetric (uniquely heard) ``u``, else ``"interior"``."""
    return "boundary" if is_parity_symmetric(u, tol) else "interior"

