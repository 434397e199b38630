"""Command-line entry point: load groups, run checks, emit reports.

Exit status: 0 when every requested check passes its tolerance, 1 on a
check failure, 2 on usage or input errors. All numeric output is
deterministic: fixed row ordering, 17 significant digits, and a
--threads flag that never changes any emitted value.
"""

from __future__ import annotations

import argparse
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import report as rpt
from .geom import GeometryError
from .greens import identity_term, identity_term_from_g
from .group import (EnumerationBudgetError, GroupSpecError, load_group,
                    length_spectrum)
from .quadrature import QuadratureError
from .testfn import (counting_family, gaussian_family, q_from_g, q_from_phi,
                     resolvent_family, smooth_bump)
from .trace import (circle_check, cot_identity_check, cylinder_check,
                    geodesic_counting_check, heat_weyl_report, sphere_check,
                    surface_geometric_side, surface_model)
from .zeta import (ConvergenceRegionError, PoleProximityError,
                   log_derivative_check, scattering_poles,
                   scattering_residue_contour, zeta_euler_product)

USAGE_ERROR = 2
CHECK_FAILED = 1


@dataclass(frozen=True)
class RunConfig:
    """Validated run parameters: cutoffs and tolerances must be positive."""

    command: str
    group: str | None
    family: str
    beta: float
    ell: float
    s: complex
    rho: complex
    max_length: float
    l_max: int
    n_max: int
    m_max: int
    tol: float | None
    out: str | None
    format: str
    threads: int
    no_plot: bool
    which: str | None = None

    def __post_init__(self):
        for name in ("beta", "ell", "max_length"):
            if not getattr(self, name) > 0:
                raise ValueError(f"--{name.replace('_', '-')} must be positive")
        for name in ("l_max", "n_max", "m_max", "threads"):
            if getattr(self, name) < 1:
                raise ValueError(f"--{name.replace('_', '-')} must be at least 1")
        if self.tol is not None and not self.tol > 0:
            raise ValueError("--tol must be positive")

    @staticmethod
    def from_args(args) -> "RunConfig":
        return RunConfig(
            command=args.command, group=args.group, family=args.family,
            beta=args.beta, ell=args.ell, s=args.s, rho=args.rho,
            max_length=args.max_length, l_max=args.l_max, n_max=args.n_max,
            m_max=args.m_max, tol=args.tol, out=args.out, format=args.format,
            threads=args.threads, no_plot=args.no_plot,
            which=getattr(args, "which", None))


def _parse_complex(text: str) -> complex:
    parts = text.split(",")
    if len(parts) == 1:
        return complex(float(parts[0]), 0.0)
    if len(parts) == 2:
        return complex(float(parts[0]), float(parts[1]))
    raise argparse.ArgumentTypeError(f"expected RE or RE,IM, got {text!r}")


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="hypertrace",
        description="Numerical cross-checks of trace formulas on the circle, "
                    "sphere, hyperbolic cylinders and compact genus-2 surfaces.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--group", metavar="PATH", help="group file")
    common.add_argument("--family", choices=["gaussian", "resolvent", "counting"],
                        default="gaussian")
    common.add_argument("--beta", type=float, default=1.0)
    common.add_argument("--ell", type=float, default=2.0)
    common.add_argument("--s", type=_parse_complex, default=complex(2.0),
                        metavar="RE[,IM]")
    common.add_argument("--rho", type=_parse_complex, default=complex(0.3),
                        metavar="RE[,IM]")
    common.add_argument("--max-length", type=float, default=5.0)
    common.add_argument("--l-max", type=int, default=40)
    common.add_argument("--n-max", type=int, default=64)
    common.add_argument("--m-max", type=int, default=64)
    common.add_argument("--tol", type=float, default=None)
    common.add_argument("--out", metavar="PATH")
    common.add_argument("--format", choices=["csv", "text"], default="csv")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--no-plot", action="store_true",
                        help="suppress the figure rendered next to --out files")

    sub = p.add_subparsers(dest="command", required=True)
    chk = sub.add_parser("check", parents=[common],
                         help="two-sided trace identities and transforms")
    chk.add_argument("which", choices=["poisson", "cot", "sphere", "cylinder",
                                       "transform"])
    sub.add_parser("length-spectrum", parents=[common],
                   help="primitive length spectrum of a group file")
    sub.add_parser("trace-surface", parents=[common],
                   help="surface geometric side, two routes to the identity term")
    sub.add_parser("weyl", parents=[common],
                   help="heat traces and the eigenvalue-count slope")
    sub.add_parser("geodesic-count", parents=[common],
                   help="smoothed geodesic count against the density integral")
    sub.add_parser("zeta", parents=[common],
                   help="zeta values and the log-derivative identity")
    sub.add_parser("scattering-poles", parents=[common],
                   help="cylinder scattering-pole lattice with residue check")
    return p


def _family(args):
    if args.family == "gaussian":
        return gaussian_family(args.beta)
    if args.family == "resolvent":
        rho = args.rho if abs(args.rho.imag) > 0.5 else -2.0j
        return resolvent_family(rho, rho - 1.0j)
    psi = smooth_bump(-0.5, 0.5)
    return counting_family(psi, max(args.max_length, 2.0), (-0.5, 0.5))


def _pmap(fn, items, threads: int):
    """Order-preserving map; each item computed independently, so the
    thread count cannot change any value."""
    if threads <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _need_group(args):
    if not args.group:
        raise GroupSpecError("this subcommand needs --group PATH")
    return load_group(args.group)


def _octagon_model(args):
    spec = _need_group(args)
    spectrum = length_spectrum(spec, args.max_length)
    return surface_model(spec, spectrum), spectrum


def run(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE_ERROR if exc.code not in (0,) else 0

    try:
        return _dispatch(RunConfig.from_args(args))
    except (GroupSpecError, FileNotFoundError, GeometryError,
            ConvergenceRegionError, PoleProximityError, QuadratureError,
            EnumerationBudgetError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR


def _emit(args, header, rows, kind: str):
    rpt.emit(header, rows, args.out, args.format)
    if args.out and not args.no_plot:
        rpt.render_figure(kind, header, rows, args.out)


def _dispatch(args) -> int:
    cmd = args.command
    if cmd == "check":
        return _run_check(args)
    if cmd == "length-spectrum":
        spec = _need_group(args)
        spectrum = length_spectrum(spec, args.max_length)
        rows = [[ell, mult] for ell, mult in spectrum.entries]
        _emit(args, rpt.SPECTRUM_HEADER, rows, "spectrum")
        return 0
    if cmd == "trace-surface":
        model, _ = _octagon_model(args)
        pair = _family(args)
        side, tail = surface_geometric_side(model, pair, n_max=args.n_max)
        geodesic = side - model.area * identity_term(pair)
        alt = model.area * identity_term_from_g(pair) + geodesic
        tol = args.tol if args.tol is not None else 1e-8
        row = _trace_row("surface_geometric", {"family": pair.label,
                                               "max_length": args.max_length},
                         side, alt, tail)
        _emit(args, rpt.TRACE_HEADER, [row], "trace")
        return 0 if abs(side - alt) <= tol else CHECK_FAILED
    if cmd == "weyl":
        model, _ = _octagon_model(args)
        betas = (0.01, 0.02, 0.05)
        wr = heat_weyl_report(model, betas)
        rows = [_trace_row("weyl_heat_trace", {"beta": r.beta},
                           r.heat_trace, r.leading_term, 0.0)
                for r in wr.rows]
        target = model.area / (4.0 * math.pi)
        rows.append(_trace_row("weyl_slope", {"betas": ";".join(map(str, betas))},
                               wr.fitted_slope, target, 0.0))
        _emit(args, rpt.TRACE_HEADER, rows, "weyl")
        tol = args.tol if args.tol is not None else 0.02
        return 0 if abs(wr.fitted_slope - target) <= tol * target else CHECK_FAILED
    if cmd == "geodesic-count":
        model, _ = _octagon_model(args)
        L = args.max_length - 0.5
        psi = smooth_bump(-0.5, 0.5)
        res = geodesic_counting_check(model, psi, L, (-0.5, 0.5))
        row = _trace_row("geodesic_count", {"L": L, "window": 1.0},
                         res.geodesic_sum, res.integral, 0.0)
        _emit(args, rpt.TRACE_HEADER, [row], "trace")
        tol = args.tol if args.tol is not None else 0.3
        return 0 if abs(res.ratio - 1.0) <= tol else CHECK_FAILED
    if cmd == "zeta":
        spec = _need_group(args)
        spectrum = length_spectrum(spec, args.max_length)
        z = zeta_euler_product(args.s, spectrum, m_max=args.m_max)
        rows = [[args.s.real if args.s.imag == 0 else args.s,
                 z.value.real, z.value.imag, z.tail_bound]]
        _emit(args, rpt.ZETA_HEADER, rows, "zeta")
        d1, d2 = log_derivative_check(args.s, spectrum, m_max=args.m_max)
        tol = args.tol if args.tol is not None else 1e-6
        return 0 if abs(d1 - d2) <= tol else CHECK_FAILED
    if cmd == "scattering-poles":
        nu_range = range(-2, 3)
        m_range = range(0, min(args.m_max, 4))
        rows = []
        for nu in nu_range:
            for m in m_range:
                p = scattering_poles(args.ell, [nu], [m])[0]
                rows.append([nu, m, p.rho.real, p.rho.imag,
                             p.residue.real, p.residue.imag])
        _emit(args, rpt.POLE_HEADER, rows, "poles")
        res = scattering_residue_contour(args.ell, 1, 0)
        tol = args.tol if args.tol is not None else 1e-8
        return 0 if abs(res - 1.0 / (math.pi * 1j)) <= tol else CHECK_FAILED
    raise GroupSpecError(f"unknown command {cmd}")


def _trace_row(formula, params, spectral, geometric, tail):
    spectral = complex(spectral)
    geometric = complex(geometric)
    diff = abs(spectral - geometric)
    scale = max(abs(spectral), abs(geometric), 1e-300)
    return [formula, rpt.format_params(params), spectral, geometric,
            diff, diff / scale, tail]


def _run_check(args) -> int:
    pair = _family(args)
    which = args.which
    if which == "poisson":
        reports = _pmap(circle_check, [pair], args.threads)
        tol = args.tol if args.tol is not None else 1e-10
    elif which == "cot":
        lhs, rhs = cot_identity_check(args.rho)
        tol = args.tol if args.tol is not None else 1e-10
        row = _trace_row("cotangent", {"rho": args.rho}, lhs, rhs, 0.0)
        _emit(args, rpt.TRACE_HEADER, [row], "trace")
        return 0 if abs(lhs - rhs) <= tol else CHECK_FAILED
    elif which == "sphere":
        reports = [sphere_check(pair, l_max=args.l_max)]
        tol = args.tol if args.tol is not None else 1e-8
    elif which == "cylinder":
        reports = [cylinder_check(args.ell, pair, n_max=args.n_max)]
        tol = args.tol if args.tol is not None else 1e-8
    elif which == "transform":
        tol = args.tol if args.tol is not None else 1e-6
        profile = q_from_g(pair)
        q_back = q_from_phi(profile.Phi)
        etas = [0.0, 1.0, 10.0]
        vals = _pmap(lambda e: (complex(profile.Q(np.array([e]))[0]),
                                complex(q_back(e))), etas, args.threads)
        rows = [_trace_row("transform_roundtrip",
                           {"family": pair.label, "eta": e}, q0, q1, 0.0)
                for e, (q0, q1) in zip(etas, vals)]
        _emit(args, rpt.TRACE_HEADER, rows, "trace")
        return 0 if all(abs(q0 - q1) <= tol for _, (q0, q1) in
                        zip(etas, vals)) else CHECK_FAILED
    else:
        raise GroupSpecError(f"unknown check {which}")

    rows = [rpt.trace_report_row(r) for r in reports]
    _emit(args, rpt.TRACE_HEADER, rows, "trace")
    return 0 if all(r.passes(tol) for r in reports) else CHECK_FAILED


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
