"""Named boundary conditions.

``quasiperiodic(alpha)`` imposes ``psi(1/2) = exp(i alpha) psi(-1/2)`` and the
same twist on ``psi'``. With ``Psi' = (-psi'(-1/2), psi'(1/2))`` this is
``Psi_- = U Psi_+`` for ``U = [[0, exp(-i alpha)], [exp(i alpha), 0]]``; its
levels sit at ``x = |alpha + 2 pi n|``.
"""

from __future__ import annotations

import cmath

from .algebra import I2, SX, Unitary2
from .errors import InvalidParameterError


def quasiperiodic(alpha: float) -> Unitary2:
    return Unitary2([[0.0, cmath.exp(-1j * alpha)], [cmath.exp(1j * alpha), 0.0]])


PRESETS = {
    "dirichlet": lambda: Unitary2(-I2),
    "neumann": lambda: Unitary2(I2),
    "periodic": lambda: Unitary2(SX),
    "antiperiodic": lambda: Unitary2(-SX),
}


def preset(name: str, alpha: float | None = None) -> Unitary2:
    key = name.strip().lower()
    if key == "quasiperiodic":
        if alpha is None:
            raise InvalidParameterError("quasiperiodic preset needs an angle alpha")
        return quasiperiodic(alpha)
    if key not in PRESETS:
        raise InvalidParameterError(
            f"unknown preset {name!r}; choose from {sorted(PRESETS) + ['quasiperiodic']}"
        )
    return PRESETS[key]()
