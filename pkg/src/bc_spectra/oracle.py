"""Independent spectra from a finite-difference discretization.

The interval ``[-1/2, 1/2]`` is split into ``n`` cells of width ``h = 1/n``
with unknowns at the cell centres. One ghost cell on each side carries the
boundary condition: with ``Psi = (g + p)/2`` and ``Psi' = (g - p)/h`` (``p`` the
two outermost interior values, ``g`` the ghosts) the relation
``(I - U) Psi = i (I + U) Psi'`` is solved for ``g = R p``. ``R`` is Hermitian
for unitary ``U``, so the assembled operator is too. Both the boundary values
and the centred derivative are second order in ``h``.

An RK4 integration of ``psi'' = -eps psi`` checks the closed-form boundary
matrices independently of the root finder.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sps
import scipy.sparse.linalg as spla

from .algebra import I2, Unitary2
from .eigensolver import NEGATIVE, ScanWindow, solve_spectrum
from .errors import DiscretizationError, InvalidParameterError, SpectrumError
from .spectral import boundary_matrices, wave_number

DENSE_LIMIT = 2000


@dataclass(frozen=True, eq=False)
class FdProblem:
    n: int
    h: float
    u: Unitary2
    ghost: np.ndarray  # R with g = R p
    matrix: object  # dense ndarray or scipy.sparse matrix, already divided by h^2
    hermiticity_error: float  # max |A - A^H| * h^2

    @property
    def dense(self) -> bool:
        return isinstance(self.matrix, np.ndarray)


@dataclass
class OracleReport:
    u: list
    grids: tuple[int, int]
    k: int
    reference: list[float]
    eigenvalues: dict[int, list[float]]
    abs_dev: dict[int, list[float]]
    rel_dev: dict[int, list[float]]
    order: float
    negatives: dict[str, int]
    passed: bool
    failures: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["grids"] = list(self.grids)
        d["eigenvalues"] = {str(k): v for k, v in self.eigenvalues.items()}
        d["abs_dev"] = {str(k): v for k, v in self.abs_dev.items()}
        d["rel_dev"] = {str(k): v for k, v in self.rel_dev.items()}
        return d


def ghost_map(u: Unitary2, h: float) -> np.ndarray:
    p = (I2 - u.m) * (h / 2.0)
    q = 1j * (I2 + u.m)
    lhs = p - q
    sv = np.linalg.svd(lhs, compute_uv=False)
    if sv[-1] <= 1e-12 * sv[0]:
        raise DiscretizationError(
            f"ghost elimination is singular for this U at h={h!r} "
            f"(an eigenvalue exp(i a) of U has tan(a/2) = -2/h)"
        )
    return -np.linalg.solve(lhs, p + q)


def assemble(u: Unitary2, n: int) -> FdProblem:
    if n < 16:
        raise InvalidParameterError("need at least 16 grid points")
    h = 1.0 / n
    r = ghost_map(u, h)
    herm = float(np.abs(r - r.conj().T).max())
    inv_h2 = 1.0 / (h * h)
    main = np.full(n, 2.0 * inv_h2, dtype=complex)
    off = np.full(n - 1, -inv_h2, dtype=complex)
    main[0] -= r[0, 0] * inv_h2
    main[-1] -= r[1, 1] * inv_h2
    if n <= DENSE_LIMIT:
        a = np.diag(main) + np.diag(off, 1) + np.diag(off, -1)
        a[0, -1] -= r[0, 1] * inv_h2
        a[-1, 0] -= r[1, 0] * inv_h2
    else:
        a = sps.diags([off, main, off], [-1, 0, 1], format="lil", dtype=complex)
        a[0, n - 1] = a[0, n - 1] - r[0, 1] * inv_h2
        a[n - 1, 0] = a[n - 1, 0] - r[1, 0] * inv_h2
        a = a.tocsr()
    return FdProblem(n, h, u, r, a, herm)


def oracle_eigenvalues(prob: FdProblem, k: int) -> list[float]:
    """Lowest ``k`` eigenvalues of the discrete operator, in ``eps_hat`` units."""
    if not 1 <= k <= prob.n:
        raise InvalidParameterError("need 1 <= k <= n")
    a = prob.matrix
    if prob.dense:
        w, v = sla.eigh(a, subset_by_index=[0, k - 1], driver="evr")
        norm_a = np.linalg.norm(a, 2) if prob.n <= 256 else float(np.abs(a).sum(axis=1).max())
        res = np.linalg.norm(a @ v - v * w, axis=0)
    else:
        # shift just below the lowest level of a coarse dense discretization;
        # Gershgorin is far too pessimistic once the ghost rows are folded in
        coarse = oracle_eigenvalues(assemble(prob.u, 400), 1)[0]
        shift = coarse - 1.0 - 0.1 * abs(coarse)
        try:
            w, v = spla.eigsh(a, k=k, sigma=shift, which="LM")
        except spla.ArpackNoConvergence as exc:
            raise SpectrumError(f"sparse eigensolver did not converge: {exc}") from exc
        # Rayleigh quotients are accurate to the square of the eigenvector error
        av = a @ v
        w = np.real(np.einsum("ij,ij->j", v.conj(), av)) / np.real(np.einsum("ij,ij->j", v.conj(), v))
        order = np.argsort(w)
        w, v, av = w[order], v[:, order], av[:, order]
        norm_a = float(np.asarray(abs(a).sum(axis=1)).max())
        res = np.linalg.norm(av - v * w, axis=0)
    bad = res > 1e-8 * norm_a
    if np.any(bad):
        raise SpectrumError(f"eigenpair residual too large: {res[bad].max():.3e}")
    return [float(x) for x in w]


def _reference(u: Unitary2, k: int) -> tuple[list[float], int]:
    spec = solve_spectrum(u, ScanWindow())
    ev = [float(e) for e in spec.eigenvalues()[:k]]
    n_neg = sum(p.multiplicity for p in spec.points if p.branch == NEGATIVE)
    return ev, n_neg


def cross_validate(u: Unitary2, n_grids: tuple[int, int] = (500, 1000), k: int = 5,
                   rel_tol: float = 1e-3, order_range: tuple[float, float] = (1.7, 2.3)
                   ) -> OracleReport:
    """Compare the lowest ``k`` levels of the root finder against the discretization.

    Relative deviations are ``|dev| / max(1, |eps|)`` so zero modes are judged
    on an absolute scale. The convergence order is fitted from the summed
    deviations of the two grids.
    """
    n1, n2 = sorted(n_grids)
    if n2 < 2 * n1:
        raise InvalidParameterError("grid sizes must differ by a factor >= 2")
    ref, n_neg = _reference(u, k)
    failures: list[str] = []
    notes: list[str] = []
    if len(ref) < k:
        failures.append(f"solver returned {len(ref)} < {k} levels in its window")
    kk = len(ref)
    eig, absd, reld = {}, {}, {}
    for n in (n1, n2):
        ev = oracle_eigenvalues(assemble(u, n), kk)
        eig[n] = ev
        absd[n] = [abs(a - b) for a, b in zip(ev, ref)]
        reld[n] = [d / max(1.0, abs(e)) for d, e in zip(absd[n], ref)]
    worst = max(reld[n2]) if kk else math.inf
    if worst > rel_tol:
        failures.append(f"max relative deviation {worst:.3e} > {rel_tol:g} at n={n2}")
    floor = 1e-9
    use = [i for i in range(kk) if absd[n1][i] > floor * max(1.0, abs(ref[i]))]
    if use:
        e1 = sum(absd[n1][i] for i in use)
        e2 = sum(absd[n2][i] for i in use)
        order = math.log(e1 / e2) / math.log(n2 / n1) if e2 > 0 else math.inf
        if not order_range[0] <= order <= order_range[1]:
            failures.append(f"convergence order {order:.3f} outside {order_range}")
    else:
        order = math.nan
        notes.append("all deviations at round-off level; order not fitted")
    fd_neg = sum(1 for e in eig[n2] if e < -1e-6)
    if fd_neg != min(n_neg, kk):
        failures.append(f"negative levels: solver {n_neg}, finite differences {fd_neg}")
    mult_pairs = sum(1 for a, b in zip(ref, ref[1:]) if a == b)
    if mult_pairs:
        notes.append(f"{mult_pairs} doubly degenerate level(s) compared as pairs")
    return OracleReport(
        u=[[str(z) for z in row] for row in u.m],
        grids=(n1, n2),
        k=k,
        reference=ref,
        eigenvalues=eig,
        abs_dev=absd,
        rel_dev=reld,
        order=order,
        negatives={"solver": n_neg, "finite_difference": fd_neg},
        passed=not failures,
        failures=failures,
        notes=notes,
    )


def _rk4(y0: np.ndarray, eps: float, x0: float, x1: float, steps: int) -> np.ndarray:
    h = (x1 - x0) / steps

    def f(y):
        return np.stack([y[1], -eps * y[0]])

    y = y0.astype(complex)
    # compensated update: the decaying solution is swamped by amplified round-off otherwise
    comp = np.zeros_like(y)
    for _ in range(steps):
        k1 = f(y)
        k2 = f(y + 0.5 * h * k1)
        k3 = f(y + 0.5 * h * k2)
        k4 = f(y + h * k3)
        inc = (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4) - comp
        t = y + inc
        comp = (t - y) - inc
        y = t
    return y


def ode_check_boundary_matrices(eps_hat: float, steps: int = 10_000) -> float:
    """Max entry deviation between integrated and closed-form ``A_+`` / ``A_-``."""
    if eps_hat == 0.0:
        raise InvalidParameterError("the exponential basis does not exist at eps_hat = 0")
    if steps < 100:
        raise InvalidParameterError("steps must be >= 100")
    k = wave_number(eps_hat)
    # rows: (psi, psi'); columns: exp(ikx), exp(-ikx) at x = -1/2
    left = np.array(
        [
            [np.exp(-0.5j * k), np.exp(0.5j * k)],
            [1j * k * np.exp(-0.5j * k), -1j * k * np.exp(0.5j * k)],
        ]
    )
    right = _rk4(left, eps_hat, -0.5, 0.5, steps)
    ap = np.array([left[0] - 1j * left[1], right[0] + 1j * right[1]])
    am = np.array([left[0] + 1j * left[1], right[0] - 1j * right[1]])
    bm = boundary_matrices(eps_hat)
    return float(max(np.abs(ap - bm.a_plus).max(), np.abs(am - bm.a_minus).max()))
