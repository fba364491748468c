"""U(2) boundary matrices and their parametrizations.

A unitary ``U`` is written as ``exp(i*eta) * (m0*I + i*(m1*sx + m2*sy + m3*sz))``
with ``eta`` in ``[0, pi)``, which makes the covering map
SU(2) x U(1) -> U(2) one-to-one. Layout of the SU(2) factor::

    [[m0 + i*m3,  m2 + i*m1],
     [-m2 + i*m1, m0 - i*m3]]

The module also exposes the two group-extension presentations of U(2):
the semidirect split ``U = M @ diag(exp(i*alpha), 1)`` and the double cover
``(M, exp(i*eta)) -> exp(i*eta) * M``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError

UNITARY_TOL = 1e-12
PARAM_TOL = 1e-12

TWO_PI = 2.0 * math.pi


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


I2 = _frozen(np.eye(2))
SX = _frozen([[0, 1], [1, 0]])
SY = _frozen([[0, -1j], [1j, 0]])
SZ = _frozen([[1, 0], [0, -1]])


def as_complex(z) -> complex:
    """Coerce to a finite Python complex; NaN/Inf are rejected."""
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise InvalidParameterError(f"non-finite complex value {z!r}")
    return z


def mat2(entries) -> np.ndarray:
    """Build a read-only finite 2x2 complex array."""
    a = np.array(entries, dtype=complex)
    if a.shape != (2, 2):
        raise InvalidParameterError(f"expected a 2x2 matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidParameterError("matrix has non-finite entries")
    a.setflags(write=False)
    return a


def det2(m) -> complex:
    return complex(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])


def tr2(m) -> complex:
    return complex(m[0, 0] + m[1, 1])


@dataclass(frozen=True, eq=False)
class Unitary2:
    """A 2x2 unitary matrix; the boundary condition of one self-adjoint realization."""

    m: np.ndarray

    def __post_init__(self):
        a = mat2(self.m)
        err = np.linalg.norm(a.conj().T @ a - np.eye(2))
        if err > UNITARY_TOL:
            raise InvalidParameterError(f"matrix is not unitary: |U^H U - I|_F = {err:.3e}")
        object.__setattr__(self, "m", a)

    def __matmul__(self, other: "Unitary2") -> "Unitary2":
        return Unitary2(self.m @ other.m)

    def __neg__(self) -> "Unitary2":
        return Unitary2(-self.m)

    def __array__(self, dtype=None, copy=None):
        return np.array(self.m, dtype=dtype)

    def __repr__(self):
        rows = ", ".join("[" + ", ".join(f"{z:.6g}" for z in row) + "]" for row in self.m)
        return f"Unitary2([{rows}])"

    @property
    def T(self) -> "Unitary2":
        return Unitary2(self.m.T)

    @property
    def H(self) -> "Unitary2":
        return Unitary2(self.m.conj().T)

    def det(self) -> complex:
        return det2(self.m)

    def allclose(self, other, atol: float = 1e-12) -> bool:
        return bool(np.allclose(self.m, np.asarray(other), rtol=0.0, atol=atol))

    @classmethod
    def nearest(cls, m) -> "Unitary2":
        """Polar projection of an almost-unitary matrix onto U(2)."""
        w, _, vh = np.linalg.svd(np.asarray(m, dtype=complex))
        return cls(w @ vh)


@dataclass(frozen=True)
class BoundaryParams:
    """Canonical coordinates ``(eta, m0, m1, m2, m3)`` of a unitary.

    ``eta`` lies in ``[0, pi)`` and ``(m0, m1, m2, m3)`` is a unit 4-vector.
    """

    eta: float
    m0: float
    m1: float
    m2: float
    m3: float

    def __post_init__(self):
        vals = (self.eta, self.m0, self.m1, self.m2, self.m3)
        if not all(math.isfinite(v) for v in vals):
            raise InvalidParameterError(f"non-finite parameters {vals}")
        if not 0.0 <= self.eta < math.pi:
            raise InvalidParameterError(f"eta={self.eta!r} outside [0, pi)")
        norm2 = self.m0**2 + self.m1**2 + self.m2**2 + self.m3**2
        if abs(norm2 - 1.0) > PARAM_TOL:
            raise InvalidParameterError(f"S^3 constraint violated: |m|^2 = {norm2!r}")

    @property
    def m(self) -> tuple[float, float, float, float]:
        return (self.m0, self.m1, self.m2, self.m3)


def su2(m0: float, m1: float, m2: float, m3: float) -> np.ndarray:
    """``m0*I + i*(m1*sx + m2*sy + m3*sz)`` as a plain array (no normalization)."""
    return mat2([[m0 + 1j * m3, m2 + 1j * m1], [-m2 + 1j * m1, m0 - 1j * m3]])


def from_params(p: BoundaryParams) -> Unitary2:
    return Unitary2(cmath.exp(1j * p.eta) * su2(p.m0, p.m1, p.m2, p.m3))


def _canonical_eta(det: complex) -> float:
    eta = 0.5 * cmath.phase(det)  # (-pi/2, pi/2]
    if eta < 0.0:
        eta += math.pi
    if eta >= math.pi:
        eta -= math.pi
    return eta


def to_params(u: Unitary2) -> BoundaryParams:
    """Invert :func:`from_params` with ``eta`` taken from ``det U = exp(2i*eta)``."""
    if not isinstance(u, Unitary2):
        u = Unitary2(u)
    eta = _canonical_eta(u.det())
    m = cmath.exp(-1j * eta) * u.m
    m0 = 0.5 * float((m[0, 0] + m[1, 1]).real)
    m3 = 0.5 * float((m[0, 0] - m[1, 1]).imag)
    m1 = 0.5 * float((m[0, 1] + m[1, 0]).imag)
    m2 = 0.5 * float((m[0, 1] - m[1, 0]).real)
    n = math.sqrt(m0 * m0 + m1 * m1 + m2 * m2 + m3 * m3)
    return BoundaryParams(eta, m0 / n, m1 / n, m2 / n, m3 / n)


def traces(u: Unitary2) -> tuple[complex, complex, complex]:
    """``(det U, tr U, tr(U sx))``, the only invariants the spectrum sees."""
    return u.det(), tr2(u.m), tr2(u.m @ SX)


# -- group extensions ------------------------------------------------------


def section(alpha: float) -> Unitary2:
    """Section U(1) -> U(2) of the determinant map: ``diag(exp(i*alpha), 1)``."""
    return Unitary2(np.diag([cmath.exp(1j * alpha), 1.0]))


def semidirect_split(u: Unitary2) -> tuple[Unitary2, float]:
    """Write ``u = M @ section(alpha)`` with ``det M = 1`` and ``alpha`` in ``[0, 2pi)``."""
    alpha = cmath.phase(u.det()) % TWO_PI
    if alpha >= TWO_PI:
        alpha = 0.0
    m = u.m @ np.diag([cmath.exp(-1j * alpha), 1.0])
    return Unitary2(m), alpha


def semidirect_compose(m: Unitary2, alpha: float) -> Unitary2:
    return m @ section(alpha)


def _require_special(n: Unitary2) -> None:
    d = n.det()
    if abs(d - 1.0) > 1e-10:
        raise InvalidParameterError(f"expected det = 1, got {d:.6g}")


def phi_action(alpha: float, n: Unitary2) -> Unitary2:
    """Conjugation ``section(alpha) @ n @ section(-alpha)`` acting on SU(2)."""
    _require_special(n)
    z = cmath.exp(1j * alpha)
    a = n.m
    return Unitary2([[a[0, 0], z * a[0, 1]], [a[1, 0] / z, a[1, 1]]])


def cover_project(m: Unitary2, phase: float) -> Unitary2:
    """Covering map ``(M, exp(i*phase)) -> exp(i*phase) * M``; two-to-one."""
    _require_special(m)
    return Unitary2(cmath.exp(1j * phase) * m.m)


def cover_lift(u: Unitary2) -> tuple[Unitary2, float]:
    """Section of the covering map using the principal square root of ``det U``.

    Returns ``(det(U)**-1/2 * U, arg det(U)**1/2)``.
    """
    half = 0.5 * cmath.phase(u.det())
    return Unitary2(cmath.exp(-1j * half) * u.m), half % TWO_PI


def random_unitary(rng: np.random.Generator) -> Unitary2:
    """Haar-distributed sample from U(2)."""
    z = (rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))) / math.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return Unitary2.nearest(q * (d / np.abs(d)))


def random_params(rng: np.random.Generator) -> BoundaryParams:
    v = rng.standard_normal(4)
    v /= np.linalg.norm(v)
    return BoundaryParams(float(rng.uniform(0.0, math.pi)), *map(float, v))


def parity_family(eta: float, theta: float) -> Unitary2:
    """``exp(i*(eta*I + theta*sx))``: the unitaries commuting with ``sx``."""
    c, s = math.cos(theta), math.sin(theta)
    return Unitary2(cmath.exp(1j * eta) * np.array([[c, 1j * s], [1j * s, c]]))
