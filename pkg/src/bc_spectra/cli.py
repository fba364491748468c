"""Command line interface: ``bc-spectra {spectrum,family,classify,sweep,verify}``.

Exit codes: 0 success, 2 bad input, 3 solver diagnostic, 4 failed validation.
JSON goes to stdout (or ``--output``); human-readable summaries go to stderr.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np
from scipy import constants

from . import __version__
from .algebra import BoundaryParams, Unitary2, from_params, parity_family, to_params
from .eigensolver import NEGATIVE, ZERO, ScanWindow, Spectrum, solve_spectrum
from .errors import DiscretizationError, InvalidParameterError, SpectrumError
from .oracle import cross_validate, ode_check_boundary_matrices
from .presets import preset
from .records import SCHEMA_VERSION, dumps, matrix_entries, to_csv
from .spectral import zero_mode_condition, zero_mode_residual
from .symmetry import (
    hamiltonian_space_locus,
    is_parity_symmetric,
    isospectral_family,
    spectral_class,
    zero_mode_residual_family,
)

EXIT_OK, EXIT_INPUT, EXIT_SOLVER, EXIT_VALIDATION = 0, 2, 3, 4

THREADS_ENV = "BC_SPECTRA_THREADS"
ODE_ENERGIES = (-100.0, -math.pi**2, -1.0, 1.0, math.pi**2, 100.0)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_INPUT)


@dataclass(frozen=True)
class PhysicalScale:
    length: float
    mass: float
    hbar: float = constants.hbar

    def __post_init__(self):
        for name in ("length", "mass", "hbar"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise InvalidParameterError(f"physical {name} must be positive, got {v!r}")

    @property
    def energy_unit(self) -> float:
        return self.hbar**2 / (2.0 * self.mass * self.length**2)

    def energy(self, eps_hat: float) -> float:
        return self.energy_unit * eps_hat


# -- input -----------------------------------------------------------------


def _floats(text: str, count: int, what: str) -> list[float]:
    parts = [s.strip() for s in text.split(",")]
    if len(parts) != count:
        raise InvalidParameterError(f"{what}: expected {count} comma-separated numbers, got {text!r}")
    try:
        return [float(s) for s in parts]
    except ValueError as exc:
        raise InvalidParameterError(f"{what}: {exc}") from None


def parse_matrix(text: str) -> Unitary2:
    parts = [s.strip().replace(" ", "") for s in text.split(",")]
    if len(parts) != 4:
        raise InvalidParameterError("--matrix needs 4 comma-separated complex entries, row-major")
    try:
        vals = [complex(s) for s in parts]
    except ValueError as exc:
        raise InvalidParameterError(f"--matrix: {exc}") from None
    return Unitary2(np.array(vals).reshape(2, 2))


def resolve_bc(args) -> tuple[Unitary2, dict]:
    """Turn the boundary-condition flags into a unitary plus an input echo."""
    given = [args.preset is not None, args.matrix is not None, args.eta is not None]
    if sum(given) != 1:
        raise InvalidParameterError("give exactly one of --preset, --matrix or --eta")
    if args.preset is not None:
        if args.alpha is not None and args.preset != "quasiperiodic":
            raise InvalidParameterError("--alpha only applies to the quasiperiodic preset")
        echo = {"kind": "preset", "name": args.preset}
        if args.alpha is not None:
            echo["alpha"] = args.alpha
        return preset(args.preset, args.alpha), echo
    if args.matrix is not None:
        u = parse_matrix(args.matrix)
        return u, {"kind": "matrix", "entries": matrix_entries(u.m)}
    ms = [args.m0, args.m1, args.m2, args.m3]
    if args.theta is not None:
        if any(m is not None for m in ms):
            raise InvalidParameterError("--theta cannot be combined with --m0..--m3")
        return parity_family(args.eta, args.theta), {
            "kind": "family", "eta": args.eta, "theta": args.theta}
    if any(m is None for m in ms):
        raise InvalidParameterError("--eta needs either --theta or all of --m0 --m1 --m2 --m3")
    p = BoundaryParams(args.eta, *ms)
    return from_params(p), {"kind": "params", **asdict(p)}


def _scale(args) -> PhysicalScale | None:
    if args.physical is None:
        return None
    length, mass = _floats(args.physical, 2, "--physical")
    return PhysicalScale(length, mass, args.hbar)


def _window(args) -> ScanWindow:
    kw = {}
    if getattr(args, "max_x", None) is not None:
        kw["x_max_pos"] = args.max_x
    if getattr(args, "kappa_max", None) is not None:
        kw["kappa_max"] = args.kappa_max
    return ScanWindow(**kw)


def _threads() -> int:
    raw = os.environ.get(THREADS_ENV, "1").strip() or "1"
    try:
        n = int(raw)
    except ValueError:
        raise InvalidParameterError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise InvalidParameterError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return n


# -- record builders -----------------------------------------------------------


def _params_dict(u: Unitary2) -> dict:
    return asdict(to_params(u))


def _class_dict(u: Unitary2) -> dict:
    c = spectral_class(u)
    return {"eta": c.eta, "m0": c.m0, "m1": c.m1}


def _solver_meta(spec: Spectrum) -> dict:
    return {
        "window": asdict(spec.window),
        "tolerances": asdict(spec.tolerances),
        "version": __version__,
        "diagnostics": list(spec.diagnostics),
    }


def spectrum_record(u: Unitary2, echo: dict, spec: Spectrum, scale: PhysicalScale | None) -> dict:
    points = []
    for p in spec.points:
        row = {"x": p.x, "eps_hat": p.eps_hat, "multiplicity": p.multiplicity, "branch": p.branch}
        if scale is not None:
            row["E_physical"] = scale.energy(p.eps_hat)
        points.append(row)
    rec = {
        "schema_version": SCHEMA_VERSION,
        "command": "spectrum",
        "input": echo,
        "params": _params_dict(u),
        "spectral_class": _class_dict(u),
        "zero_mode": spec.zero_mode,
    }
    if scale is not None:
        rec["physical_scale"] = {
            "length_m": scale.length,
            "mass_kg": scale.mass,
            "hbar_Js": scale.hbar,
            "energy_unit_J": scale.energy_unit,
        }
    rec["points"] = points
    rec["solver"] = _solver_meta(spec)
    return rec


def _emit(text: str, args) -> None:
    if args.output:
        with open(args.output, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
        sys.stdout.flush()


# -- subcommands -----------------------------------------------------------


def cmd_spectrum(args) -> int:
    u, echo = resolve_bc(args)
    scale = _scale(args)
    spec = solve_spectrum(u, _window(args))
    if args.format == "csv":
        header = ["index", "x", "eps_hat", "multiplicity", "branch"]
        if scale is not None:
            header.append("E_physical")
        rows = []
        for i, p in enumerate(spec.points):
            row = [i, p.x, p.eps_hat, p.multiplicity, p.branch]
            if scale is not None:
                row.append(scale.energy(p.eps_hat))
            rows.append(row)
        _emit(to_csv(header, rows), args)
    else:
        _emit(dumps(spectrum_record(u, echo, spec, scale)) + "\n", args)
    return EXIT_OK


def _same_spectrum(a: Spectrum, b: Spectrum) -> float:
    """Largest pointwise gap in ``x``; ``inf`` if the level lists do not line up."""
    if len(a.points) != len(b.points):
        return math.inf
    worst = 0.0
    for p, q in zip(a.points, b.points):
        if p.branch != q.branch or p.multiplicity != q.multiplicity:
            return math.inf
        worst = max(worst, abs(p.x - q.x))
    return worst


def cmd_family(args) -> int:
    if args.n < 1:
        raise InvalidParameterError("-n must be >= 1")
    u, echo = resolve_bc(args)
    window = _window(args)
    fam = isospectral_family(u, args.n)
    members = fam.distinct()
    notes = []
    if is_parity_symmetric(u):
        notes.append("parity-symmetric: the orbit is a single boundary point of the spectral space")
    base = solve_spectrum(u, window)
    dev = 0.0
    for _, v in members[1:]:
        dev = max(dev, _same_spectrum(base, solve_spectrum(v, window)))
    tol = 1e-9
    rec = {
        "schema_version": SCHEMA_VERSION,
        "command": "family",
        "input": echo,
        "n": args.n,
        "spectral_class": _class_dict(u),
        "members": [
            {"delta": d, "matrix": matrix_entries(v.m), "params": _params_dict(v)}
            for d, v in members
        ],
        "notes": notes,
        "verification": {
            "levels_compared": len(base.points),
            "max_abs_dev_x": dev,
            "tolerance": tol,
            "passed": dev <= tol,
        },
    }
    _emit(dumps(rec) + "\n", args)
    return EXIT_OK if dev <= tol else EXIT_VALIDATION


def cmd_classify(args) -> int:
    u, echo = resolve_bc(args)
    t_fixed = u.T.allclose(u, 1e-12)
    rec = {
        "schema_version": SCHEMA_VERSION,
        "command": "classify",
        "input": echo,
        "params": _params_dict(u),
        "parity_symmetric": is_parity_symmetric(u),
        "locus": hamiltonian_space_locus(u),
        "zero_mode": zero_mode_condition(u),
        "zero_mode_residual": zero_mode_residual(u),
        "time_reversal_fixed": t_fixed,
        "spectral_class": _class_dict(u),
    }
    _emit(dumps(rec) + "\n", args)
    return EXIT_OK


def _sweep_window(x_max: float, kappa_max: float) -> ScanWindow:
    return ScanWindow(x_max_pos=x_max, kappa_max=kappa_max)


def sweep_cell(observable: str, eta: float, theta: float, x_max: float, kappa_max: float) -> float:
    if observable == "zero_mode_residual":
        return zero_mode_residual_family(eta, theta)
    spec = solve_spectrum(parity_family(eta, theta), _sweep_window(x_max, kappa_max))
    levels = sorted({p.eps_hat for p in spec.points})
    if observable == "ground_state":
        return levels[0] if levels else math.nan
    if len(levels) < 2:
        return math.nan
    return levels[1] - levels[0]


def _sweep_task(job):
    return sweep_cell(*job)


def cmd_sweep(args) -> int:
    if args.n_eta < 2 or args.n_theta < 2:
        raise InvalidParameterError("sweep grid must be at least 2x2")
    eta_lo, eta_hi = _floats(args.eta_range, 2, "--eta-range")
    th_lo, th_hi = _floats(args.theta_range, 2, "--theta-range")
    etas = np.linspace(eta_lo, eta_hi, args.n_eta, endpoint=args.closed)
    thetas = np.linspace(th_lo, th_hi, args.n_theta, endpoint=args.closed)
    # at least two distinct levels lie below x = 5 pi for every boundary condition
    x_max = args.max_x if args.max_x is not None else 5.0 * math.pi
    kappa_max = args.kappa_max if args.kappa_max is not None else ScanWindow.kappa_max
    _sweep_window(x_max, kappa_max)  # validate before spawning workers
    jobs = [(args.observable, float(e), float(t), x_max, kappa_max) for e in etas for t in thetas]
    workers = min(_threads(), len(jobs))
    if workers > 1 and args.observable != "zero_mode_residual":
        with ProcessPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(_sweep_task, jobs, chunksize=max(1, len(jobs) // (8 * workers))))
    else:
        values = [_sweep_task(j) for j in jobs]
    if args.format == "csv":
        rows = [[j[1], j[2], v] for j, v in zip(jobs, values)]
        _emit(to_csv(["eta", "theta", args.observable], rows), args)
    else:
        rec = {
            "schema_version": SCHEMA_VERSION,
            "command": "sweep",
            "observable": args.observable,
            "eta": [float(e) for e in etas],
            "theta": [float(t) for t in thetas],
            "values": [values[i * len(thetas):(i + 1) * len(thetas)] for i in range(len(etas))],
        }
        _emit(dumps(rec) + "\n", args)
    return EXIT_OK


def cmd_verify(args) -> int:
    u, echo = resolve_bc(args)
    grids = tuple(int(g) for g in _floats(args.grids, 2, "--grids"))
    report = cross_validate(u, grids, args.k, rel_tol=args.rel_tol)
    ode = []
    for eps in ODE_ENERGIES:
        d = ode_check_boundary_matrices(eps, args.ode_steps)
        ode.append({"eps_hat": eps, "deviation": d, "passed": d < args.ode_tol})
    passed = report.passed and all(o["passed"] for o in ode)
    rec = {
        "schema_version": SCHEMA_VERSION,
        "command": "verify",
        "input": echo,
        "params": _params_dict(u),
        "cross_validation": report.to_dict(),
        "ode_checks": ode,
        "ode_tolerance": args.ode_tol,
        "passed": passed,
    }
    n1, n2 = report.grids
    lines = [
        f"finite differences n={n1},{n2}: order {report.order:.4f}, "
        f"max rel dev {max(report.rel_dev[n2], default=math.nan):.3e} (tol {args.rel_tol:g})",
        f"negative levels: {report.negatives}",
        f"ode boundary-matrix check: max dev {max(o['deviation'] for o in ode):.3e} "
        f"(tol {args.ode_tol:g}, {args.ode_steps} steps)",
    ]
    lines += [f"note: {s}" for s in report.notes]
    lines += [f"FAIL: {s}" for s in report.failures]
    lines += [f"FAIL: ode check at eps_hat={o['eps_hat']:g}" for o in ode if not o["passed"]]
    lines.append("PASS" if passed else "FAIL")
    print("\n".join(lines), file=sys.stderr)
    _emit(dumps(rec) + "\n", args)
    return EXIT_OK if passed else EXIT_VALIDATION


# -- parser ------------------------------------------------------------------


def _add_bc(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("boundary condition (pick one form)")
    g.add_argument("--preset", choices=["dirichlet", "neumann", "periodic", "antiperiodic", "quasiperiodic"])
    g.add_argument("--alpha", type=float, help="twist angle for the quasiperiodic preset")
    g.add_argument("--matrix", help="four complex entries of U, row-major, e.g. '0,1,1,0'")
    g.add_argument("--eta", type=float)
    g.add_argument("--theta", type=float, help="with --eta: U = exp(i(eta I + theta sx))")
    for name in ("m0", "m1", "m2", "m3"):
        g.add_argument(f"--{name}", type=float)


def _add_out(p: argparse.ArgumentParser, formats=("json",)) -> None:
    if len(formats) > 1:
        p.add_argument("--format", choices=formats, default=formats[0])
    p.add_argument("--output", "-o", help="write to this file instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="bc-spectra", description="Spectra of a free particle on a ring with a U(2) junction.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("spectrum", help="eigenvalues inside a scan window")
    _add_bc(p)
    p.add_argument("--max-x", type=float, help="largest positive-branch x (default 50 pi)")
    p.add_argument("--kappa-max", type=float, help="negative-branch window (default 60)")
    p.add_argument("--physical", metavar="LENGTH,MASS", help="ring length in m and mass in kg")
    p.add_argument("--hbar", type=float, default=constants.hbar)
    _add_out(p, ("json", "csv"))
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("family", help="isospectral parity orbit")
    _add_bc(p)
    p.add_argument("-n", type=int, default=8, help="number of orbit samples")
    p.add_argument("--max-x", type=float, default=10 * math.pi)
    p.add_argument("--kappa-max", type=float)
    _add_out(p)
    p.set_defaults(func=cmd_family)

    p = sub.add_parser("classify", help="symmetry and spectral-space coordinates")
    _add_bc(p)
    _add_out(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("sweep", help="observable over the grid U = exp(i(eta I + theta sx))")
    p.add_argument("--observable", choices=["ground_state", "zero_mode_residual", "gap"], required=True)
    p.add_argument("--n-eta", type=int, default=64)
    p.add_argument("--n-theta", type=int, default=64)
    p.add_argument("--eta-range", default=f"0,{math.pi!r}")
    p.add_argument("--theta-range", default=f"0,{2 * math.pi!r}")
    p.add_argument("--closed", action="store_true", help="include the upper end of each range")
    p.add_argument("--max-x", type=float)
    p.add_argument("--kappa-max", type=float)
    _add_out(p, ("csv", "json"))
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="cross-check against finite differences and ODE integration")
    _add_bc(p)
    p.add_argument("--grids", default="500,1000")
    p.add_argument("-k", type=int, default=5)
    p.add_argument("--rel-tol", type=float, default=1e-3)
    p.add_argument("--ode-tol", type=float, default=1e-8)
    p.add_argument("--ode-steps", type=int, default=10_000)
    _add_out(p)
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InvalidParameterError as exc:
        print(f"bc-spectra: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (SpectrumError, DiscretizationError) as exc:
        print(f"bc-spectra: solver diagnostic: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
