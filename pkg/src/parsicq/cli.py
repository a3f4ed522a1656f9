"""Command line interface: ``run``, ``mesh`` and ``verify`` subcommands.

Exit codes: 0 success, 1 configuration error, 2 numerical failure (including
a non-positive containment margin in ``verify``).
"""

from __future__ import annotations

import argparse
import logging
import sys
from typing import Optional, Sequence

from . import bench
from .engine import choose_parameters
from .errors import ConfigurationError, NumericalError
from .generators import BDF2, IMPLICIT_EULER
from .mesh import (
    DEFAULT_GAMMA_QUAD,
    build_mesh_bdf2,
    build_mesh_euler,
    build_mesh_sectorial,
    extend_symmetric,
    mesh_csv,
    verify_containment,
)

log = logging.getLogger("parsicq")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 1, 2


def _n_list(text: str) -> tuple:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad N list {text!r}") from None


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="parsicq", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="convergence study, CSV output")
    run.add_argument("--kernel", default="hyperbolic", help="hyperbolic | sectorial:ALPHA | matrix:D")
    run.add_argument("--method", default="euler", choices=["euler", "bdf2", "trapezoidal"])
    run.add_argument("--scheme", default="standard", choices=["standard", "parsimonious"])
    run.add_argument("--T", type=float, default=5.0)
    run.add_argument("--N-list", type=_n_list, default=(20, 40, 80, 160, 320, 640, 1280))
    run.add_argument("--rho", type=float, default=2.0)
    run.add_argument("--gamma-quad", type=float, default=DEFAULT_GAMMA_QUAD)
    run.add_argument("--sector-gamma", type=float, default=None)
    run.add_argument("--sector-c", type=float, default=1.0)
    run.add_argument("--reference", default="analytic", help="analytic | fine:NREF")
    run.add_argument("--symmetry", choices=["on", "off"], default="on")
    run.add_argument("--out", default=None, help="CSV path (default: stdout)")

    for name, helptext in (("mesh", "dump the extended mesh as CSV"), ("verify", "check ellipse containment")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--method", default="euler", choices=["euler", "bdf2", "sectorial"])
        p.add_argument("--N", type=int, required=True)
        p.add_argument("--T", type=float, default=5.0)
        p.add_argument("--mu", type=float, default=1.0)
        p.add_argument("--gamma-quad", type=float, default=DEFAULT_GAMMA_QUAD)
        p.add_argument("--sector-gamma", type=float, default=1.0)
        p.add_argument("--sector-c", type=float, default=1.0)
        p.add_argument("--rho", type=float, default=2.0)
        if name == "mesh":
            p.add_argument("--out", default=None)
        else:
            p.add_argument("--samples", type=int, default=256)
    return parser


def _mesh_for(args):
    order = bench.ASSUMED_ORDER["bdf2" if args.method == "bdf2" else "euler"]
    params = choose_parameters(args.N, args.T, order, args.mu)
    if args.method == "euler":
        mesh = build_mesh_euler(params.N, params.epsilon, params.lam, rho=args.rho)
    elif args.method == "bdf2":
        mesh = build_mesh_bdf2(params.N, params.epsilon, params.lam, args.gamma_quad, rho=args.rho)
    else:
        mesh = build_mesh_sectorial(params.lam, args.sector_gamma, args.sector_c, rho=args.rho)
    return mesh, params


def _write(text: str, path: Optional[str]) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _cmd_run(args) -> int:
    config = bench.ExperimentConfig(
        kernel=args.kernel,
        method=args.method,
        scheme=args.scheme,
        T=args.T,
        N_list=args.N_list,
        rho=args.rho,
        gamma_quad=args.gamma_quad,
        sector_gamma=args.sector_gamma,
        sector_c=args.sector_c,
        reference=args.reference,
        use_symmetry=args.symmetry == "on",
        out=args.out,
    )
    rows = bench.run_study(config)
    _write(bench.rows_to_csv(rows), args.out)
    return EXIT_OK


def _cmd_mesh(args) -> int:
    mesh, params = _mesh_for(args)
    _write(mesh_csv(extend_symmetric(mesh, params.L, params.p)), args.out)
    return EXIT_OK


def _cmd_verify(args) -> int:
    mesh, params = _mesh_for(args)
    gen = BDF2 if args.method == "bdf2" else IMPLICIT_EULER
    gamma = args.sector_gamma if args.method == "sectorial" else None
    margin = verify_containment(
        mesh, params.lam, gen, args.rho, args.samples, sector_gamma=gamma
    )
    print(f"{margin:.17g}")
    return EXIT_OK if margin > 0 else EXIT_NUMERICAL


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    handlers = {"run": _cmd_run, "mesh": _cmd_mesh, "verify": _cmd_verify}
    try:
        return handlers[args.command](args)
    except ConfigurationError as exc:
        log.error("configuration error: %s", exc)
        return EXIT_CONFIG
    except NumericalError as exc:
        log.error("numerical failure: %s", exc)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
