"""Spectrum of ``H_U`` from the zeros of the real secular function.

The positive branch is scanned in ``x = k*ell`` and the negative branch in
``kappa`` on a uniform grid. Simple roots show up as sign changes; double
roots (which occur exactly when ``B(eps) == U``) are tangential and are caught
through the zeros of the analytic derivative. Zero energy is decided by the
closed-form zero-mode condition alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import brentq

from . import spectral as sp
from .algebra import BoundaryParams, Unitary2, to_params
from .errors import InconsistentRootError, InvalidParameterError, SpectrumError

POSITIVE, ZERO, NEGATIVE = "positive", "zero", "negative"

# Beyond this kappa an extended negative window is treated as pathological.
KAPPA_HARD_LIMIT = 2000.0


@dataclass(frozen=True)
class ScanWindow:
    x_max_pos: float = 50 * math.pi
    kappa_max: float = 60.0
    grid_step: float = math.pi / 100
    # Grow the negative window when an eigenvalue sits beyond kappa_max.
    extend_negative: bool = True

    def __post_init__(self):
        for name in ("x_max_pos", "kappa_max", "grid_step"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise InvalidParameterError(f"{name} must be positive, got {v!r}")


@dataclass(frozen=True)
class Tolerances:
    x_tol: float = 1e-13
    x_min: float = 1e-4
    zero_mode: float = sp.ZERO_MODE_TOL
    root: float = 1e-8
    tangent: float = 1e-11
    mult: float = 1e-7
    cluster: float = 1e-6


@dataclass(frozen=True)
class SpectralPoint:
    x: float
    branch: str
    eps_hat: float
    multiplicity: int = 1

    @classmethod
    def make(cls, x: float, branch: str, multiplicity: int = 1) -> "SpectralPoint":
        if branch == ZERO:
            return cls(0.0, ZERO, 0.0, multiplicity)
        eps = x * x if branch == POSITIVE else -x * x
        return cls(float(x), branch, eps, multiplicity)


@dataclass(frozen=True)
class Bracket:
    branch: str
    lo: float
    hi: float
    kind: str  # "sign", "tangent" or "exact"
    x_star: float | None = None


@dataclass(frozen=True)
class Spectrum:
    points: tuple[SpectralPoint, ...]
    zero_mode: bool
    window: ScanWindow
    tolerances: Tolerances
    diagnostics: tuple[str, ...] = field(default=())

    def eigenvalues(self) -> np.ndarray:
        """Dimensionless energies repeated according to multiplicity."""
        return np.array([p.eps_hat for p in self.points for _ in range(p.multiplicity)])

    def counting(self, lam: float) -> int:
        return sum(p.multiplicity for p in self.points if p.eps_hat <= lam)

    def positive_x(self) -> np.ndarray:
        return np.array([p.x for p in self.points if p.branch == POSITIVE])

    def __len__(self):
        return len(self.points)


# -- branch helpers ---------------------------------------------------------


def _funcs(branch: str):
    if branch == POSITIVE:
        return sp.secular_pos, sp.dsecular_pos
    return sp.secular_neg_scaled, sp.dsecular_neg_scaled


def _eps(branch: str, x: float) -> float:
    return x * x if branch == POSITIVE else -x * x


def _params(u) -> BoundaryParams:
    return u if isinstance(u, BoundaryParams) else to_params(u)


# A leading tail coefficient this small means U has an eigenvalue within
# round-off of -1; the bound state it implies sits near kappa ~ 1/coef and is
# an artefact of the last bits of U, so the coefficient is treated as zero.
TAIL_ROUNDOFF = 1e-12


def _tail_coeffs(p: BoundaryParams) -> list[float]:
    ce, se = math.cos(p.eta), math.sin(p.eta)
    coef = [-(ce + p.m0), -2 * se, ce - p.m0]
    while coef and abs(coef[0]) <= TAIL_ROUNDOFF:
        coef = coef[1:]
    return coef


def tail_truncated(p: BoundaryParams) -> bool:
    ce = math.cos(p.eta)
    return 0.0 < abs(ce + p.m0) <= TAIL_ROUNDOFF


def _tail_roots(p: BoundaryParams) -> list[float]:
    """Large-kappa asymptote of the scaled secular function is a quadratic.

    Its positive roots locate negative eigenvalues up to ``O(kappa*exp(-kappa))``.
    """
    coef = _tail_coeffs(p)
    roots = np.roots(coef) if len(coef) > 1 else []
    return sorted(float(r.real) for r in roots if abs(r.imag) < 1e-9 and r.real > 0)


def _tail_sign(p: BoundaryParams) -> float:
    coef = _tail_coeffs(p)
    return math.copysign(1.0, coef[0]) if coef else 0.0


def effective_kappa_max(u, window: ScanWindow) -> float:
    """Negative-branch cutoff, extended past any asymptotic root when allowed."""
    p = _params(u)
    roots = _tail_roots(p)
    kmax = window.kappa_max
    if roots and roots[-1] > kmax - 2.0:
        if not window.extend_negative:
            raise SpectrumError(
                f"negative eigenvalue near kappa={roots[-1]:.6g} lies beyond kappa_max={kmax}",
                bracket=(kmax, roots[-1] + 2.0),
            )
        kmax = roots[-1] + 2.0
        if kmax > KAPPA_HARD_LIMIT:
            raise SpectrumError(
                f"negative eigenvalue near kappa={roots[-1]:.6g} beyond the hard limit",
                bracket=(window.kappa_max, kmax),
            )
    return kmax


# -- scanning ---------------------------------------------------------------


def _grid(lo: float, hi: float, step: float) -> np.ndarray:
    n = max(int(math.ceil((hi - lo) / step)), 2)
    return np.linspace(lo, hi, n + 1)


def _scan_branch(p: BoundaryParams, branch: str, x_hi: float, step: float,
                 tol: Tolerances) -> list[Bracket]:
    f, df = _funcs(branch)
    xs = _grid(tol.x_min, x_hi, step)
    s = f(xs, p.eta, p.m0, p.m1)
    d = df(xs, p.eta, p.m0, p.m1)
    out: list[Bracket] = []
    for j in np.flatnonzero(s == 0.0):
        out.append(Bracket(branch, xs[j], xs[j], "exact", float(xs[j])))
    sign_cells = np.flatnonzero(s[:-1] * s[1:] < 0)
    for j in sign_cells:
        out.append(Bracket(branch, float(xs[j]), float(xs[j + 1]), "sign"))
    # |s| local minima without a sign change: sign(s)*s' goes from - to +
    same = s[:-1] * s[1:] > 0
    g = np.sign(s) * d
    cand = np.flatnonzero(same & (g[:-1] < 0) & (g[1:] >= 0))
    dfun = lambda t: float(df(t, p.eta, p.m0, p.m1))
    for j in cand:
        lo, hi = float(xs[j]), float(xs[j + 1])
        if g[j + 1] == 0.0:
            xstar = hi
        else:
            xstar = brentq(dfun, lo, hi, xtol=tol.x_tol, rtol=4 * np.finfo(float).eps)
        fstar = float(f(xstar, p.eta, p.m0, p.m1))
        if fstar != 0.0 and np.sign(fstar) != np.sign(s[j]):
            out.append(Bracket(branch, lo, xstar, "sign"))
            out.append(Bracket(branch, xstar, hi, "sign"))
        else:
            out.append(Bracket(branch, lo, hi, "tangent", xstar))
    return out


def scan_brackets(u, window: ScanWindow = ScanWindow(), grid_step: float | None = None,
                  tol: Tolerances = Tolerances()) -> list[Bracket]:
    """Candidate intervals for every root of the secular function in the window.

    The positive grid runs one step past ``x_max_pos`` so that a root sitting
    exactly on the edge is still bracketed.
    """
    step = window.grid_step if grid_step is None else grid_step
    if not step > 0:
        raise InvalidParameterError("grid_step must be positive")
    p = _params(u)
    kmax = effective_kappa_max(p, window)
    out = _scan_branch(p, POSITIVE, window.x_max_pos + step, step, tol)
    out += _scan_branch(p, NEGATIVE, kmax + step, step, tol)
    return out


# -- refinement ---------------------------------------------------------------


def multiplicity_of(u, point: SpectralPoint, tol: float = Tolerances.mult) -> int:
    """2 when ``B(eps) == U``, i.e. every solution obeys the boundary condition."""
    if isinstance(u, BoundaryParams):
        from .algebra import from_params

        u = from_params(u)
    diff = sp.b_matrix(point.eps_hat) - u.m
    return 2 if np.linalg.norm(diff) < tol else 1


def _residual_ok(p: BoundaryParams, eps: float, tol: Tolerances) -> bool:
    return abs(sp.spectral_function(p, eps)) < tol.root * (1.0 + abs(eps))


def refine_root(u, bracket: Bracket, tol: Tolerances = Tolerances(),
                diagnostics: list | None = None) -> SpectralPoint | None:
    """Turn a bracket into a spectral point, or ``None`` for a rejected candidate."""
    p = _params(u)
    f, _ = _funcs(bracket.branch)
    fun = lambda t: float(f(t, p.eta, p.m0, p.m1))
    if bracket.kind == "exact":
        return SpectralPoint.make(bracket.x_star, bracket.branch)
    if bracket.kind == "sign":
        try:
            x = brentq(fun, bracket.lo, bracket.hi, xtol=tol.x_tol,
                       rtol=4 * np.finfo(float).eps, maxiter=200)
        except (RuntimeError, ValueError) as exc:
            raise SpectrumError(
                f"root refinement failed on {bracket.branch} bracket "
                f"[{bracket.lo!r}, {bracket.hi!r}]: {exc}",
                bracket=(bracket.lo, bracket.hi),
            ) from exc
        return SpectralPoint.make(x, bracket.branch)
    x = bracket.x_star
    scale = 1.0 + x * x
    pt = SpectralPoint.make(x, bracket.branch, 2)
    if abs(fun(x)) > tol.tangent * scale:
        return None
    if not _residual_ok(p, pt.eps_hat, tol) or multiplicity_of(p, pt, tol.mult) != 2:
        if diagnostics is not None:
            diagnostics.append(
                f"dropped tangential candidate at {bracket.branch} x={x:.15g}: "
                "B(eps) != U within tolerance"
            )
        return None
    return pt


def _cluster(p: BoundaryParams, branch: str, xs: list[float], tangent: list[SpectralPoint],
             tol: Tolerances, diagnostics: list) -> list[SpectralPoint]:
    """Merge sign-change roots that are one noisy double root."""
    _, df = _funcs(branch)
    xs = sorted(xs)
    out = list(tangent)
    i = 0
    while i < len(xs):
        j = i
        while j + 1 < len(xs) and xs[j + 1] - xs[j] <= tol.cluster * (1.0 + xs[j]):
            j += 1
        group = xs[i:j + 1]
        i = j + 1
        if len(group) == 1:
            pt = SpectralPoint.make(group[0], branch)
            out.append(replace(pt, multiplicity=multiplicity_of(p, pt, tol.mult)))
            continue
        lo, hi = group[0], group[-1]
        mid = 0.5 * (lo + hi)
        dfun = lambda t: float(df(t, p.eta, p.m0, p.m1))
        if hi > lo and dfun(lo) * dfun(hi) < 0:
            mid = brentq(dfun, lo, hi, xtol=tol.x_tol, rtol=4 * np.finfo(float).eps)
        pt = SpectralPoint.make(mid, branch, 2)
        if multiplicity_of(p, pt, tol.mult) == 2:
            out.append(pt)
        else:
            uniq = sorted(set(group))
            if len(uniq) < len(group):
                diagnostics.append(f"coincident simple roots merged at {branch} x={lo:.15g}")
            out.extend(SpectralPoint.make(x, branch) for x in uniq)
    # tangential points may coincide with a merged cluster
    out.sort(key=lambda q: q.x)
    merged: list[SpectralPoint] = []
    for q in out:
        if merged and abs(q.x - merged[-1].x) <= tol.cluster * (1.0 + q.x):
            if q.multiplicity > merged[-1].multiplicity:
                merged[-1] = q
            continue
        merged.append(q)
    return merged


def dirichlet_counting(lam: float) -> int:
    if lam <= 0:
        return 0
    return int(math.floor(math.sqrt(lam) / math.pi + 1e-12))


def counting_deviation(spectrum: Spectrum) -> int:
    """``max |N_U - N_Dirichlet|`` over all energies covered by the window."""
    top = spectrum.window.x_max_pos ** 2
    ev = [e for e in spectrum.eigenvalues() if e <= top]
    breaks = sorted(set(ev) | {(n * math.pi) ** 2 for n in range(1, dirichlet_counting(top) + 1)})
    worst = 0
    ev = np.sort(np.array(ev))
    for b in breaks:
        nu = int(np.searchsorted(ev, b, side="right"))
        worst = max(worst, abs(nu - dirichlet_counting(b)))
    return worst


def _solve_once(p: BoundaryParams, window: ScanWindow, tol: Tolerances,
                step: float) -> Spectrum:
    diagnostics: list[str] = []
    kmax = effective_kappa_max(p, window)
    if kmax != window.kappa_max:
        diagnostics.append(f"negative window extended to kappa_max={kmax:.6g}")
    if tail_truncated(p):
        diagnostics.append("U has an eigenvalue within round-off of -1; "
                           "the implied bound state beyond kappa=1e12 is ignored")
    eff = replace(window, kappa_max=kmax, grid_step=step)
    brackets = scan_brackets(p, eff, step, tol)
    points: list[SpectralPoint] = []
    for branch, limit in ((POSITIVE, window.x_max_pos), (NEGATIVE, kmax)):
        raw, tang = [], []
        for br in (b for b in brackets if b.branch == branch):
            pt = refine_root(p, br, tol, diagnostics)
            if pt is None:
                continue
            if br.kind == "tangent":
                tang.append(pt)
            else:
                raw.append(pt)
        pts = _cluster(p, branch, [q.x for q in raw], tang, tol, diagnostics)
        points += [q for q in pts if q.x <= limit * (1 + 1e-12) + 1e-12]
    # a cutoff that is not sign-definite would hide eigenvalues
    sign_inf = _tail_sign(p)
    s_cut = float(sp.secular_neg_scaled(kmax + step, p.eta, p.m0, p.m1))
    if sign_inf != 0.0 and s_cut * sign_inf <= 0:
        raise SpectrumError(
            f"scaled secular function not sign-definite at kappa={kmax + step:.6g}",
            bracket=(kmax, kmax + step),
        )
    zero = sp.zero_mode_condition(p, tol.zero_mode)
    if zero:
        zp = SpectralPoint.make(0.0, ZERO)
        points.append(replace(zp, multiplicity=multiplicity_of(p, zp, tol.mult)))
    points.sort(key=lambda q: q.eps_hat)
    for q in points:
        if q.branch != ZERO and not _residual_ok(p, q.eps_hat, tol):
            diagnostics.append(f"residual above tolerance at eps_hat={q.eps_hat:.15g}")
    return Spectrum(tuple(points), zero, eff, tol, tuple(diagnostics))


def solve_spectrum(u, window: ScanWindow = ScanWindow(),
                   tol: Tolerances = Tolerances()) -> Spectrum:
    """All eigenvalues of ``H_U`` inside the scan window.

    Positive points cover ``x`` in ``(0, x_max_pos]``, negative ones
    ``kappa`` in ``(0, kappa_max]`` (widened if the asymptotics put a bound
    state further out). If the counting function strays more than two levels
    from the Dirichlet one the grid is halved once before giving up.
    """
    p = _params(u)
    step = window.grid_step
    for attempt in range(2):
        spec = _solve_once(p, window, tol, step)
        if counting_deviation(spec) <= 2:
            if attempt:
                spec = replace(spec, diagnostics=spec.diagnostics + ("grid refined once",))
            return spec
        step *= 0.5
    raise SpectrumError(
        f"counting function deviates by {counting_deviation(spec)} from Dirichlet "
        f"after grid refinement (step={step:.3g})",
        bracket=(window.grid_step, step),
    )


# -- eigenfunctions -------------------------------------------------------


@dataclass(frozen=True)
class Eigenfunction:
    """``psi = c1*psi1 + c2*psi2`` on ``[-1/2, 1/2]``, unit L2 norm.

    Basis is ``{exp(i k x), exp(-i k x)}`` off zero and ``{1, -x}`` at zero.
    """

    c1: complex
    c2: complex
    branch: str
    k: complex

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.branch == ZERO:
            return self.c1 - self.c2 * x
        return self.c1 * np.exp(1j * self.k * x) + self.c2 * np.exp(-1j * self.k * x)

    @property
    def coefficients(self) -> np.ndarray:
        return np.array([self.c1, self.c2])


def gram_matrix(branch: str, x: float) -> np.ndarray:
    """L2 Gram matrix of the solution basis over ``[-1/2, 1/2]`` (closed form)."""
    if branch == ZERO:
        return np.diag([1.0, 1.0 / 12.0]).astype(complex)
    if branch == POSITIVE:
        s = math.sin(x) / x
        return np.array([[1.0, s], [s, 1.0]], dtype=complex)
    s = math.sinh(x) / x
    return np.array([[s, 1.0], [1.0, s]], dtype=complex)


def eigenfunction_at(u: Unitary2, point: SpectralPoint) -> list[Eigenfunction]:
    """Orthonormal basis of eigenfunctions for a confirmed eigenvalue."""
    bm = sp.boundary_matrices(point.eps_hat)
    mat = bm.a_minus - u.m @ bm.a_plus
    scale = np.linalg.norm(bm.a_minus) + np.linalg.norm(bm.a_plus)
    _, sv, vh = np.linalg.svd(mat)
    mult = point.multiplicity
    if sv[-1] > 1e-6 * scale:
        raise InconsistentRootError(
            f"no null space at eps_hat={point.eps_hat!r} (sigma_min/scale={sv[-1] / scale:.3e})"
        )
    null = vh.conj()[2 - mult:][::-1]  # rows are null vectors, smallest sigma first
    gram = gram_matrix(point.branch, point.x)
    basis: list[np.ndarray] = []
    for v in null:
        for w in basis:
            v = v - (w.conj() @ gram @ v) * w
        v = v / math.sqrt((v.conj() @ gram @ v).real)
        basis.append(v)
    k = sp.wave_number(point.eps_hat)
    return [Eigenfunction(complex(v[0]), complex(v[1]), point.branch, k) for v in basis]
