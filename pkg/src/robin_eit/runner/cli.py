"""Command-line entry point ``robin-eit``.

Exit codes: 0 success, 2 configuration error, 3 numerical failure, 4 I/O error.
"""
from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from .. import verification as ver
from ..exceptions import ConfigError, RobinEITError
from ..forward import BoundaryGrid, KernelSpec, MediumConfig, boundary_trace, solve_mode
from ..greens import SamplingPoint, greens_trace_series, robin_greens_trace
from ..regularize import FilterSpec, filtered_solve
from . import experiments
from .config import PRESETS, ExperimentConfig, load_config, parse_assignments, preset

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4

log = logging.getLogger("robin_eit")


def _common_flags():
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--config", metavar="PATH", help="key = value configuration file")
    parent.add_argument("--preset", choices=sorted(PRESETS),
                        help="start from a built-in experiment configuration")
    parent.add_argument("--seed", type=int, help="noise seed (overrides the config)")
    parent.add_argument("--out", metavar="DIR", help="output directory (overrides the config)")
    parent.add_argument("--set", metavar="KEY=VALUE", action="append", default=[],
                        help="override any config key; may be repeated")
    parent.add_argument("--quiet", action="store_true", help="only log warnings and errors")
    return parent


def _point(text):
    try:
        rho_z, theta_z = (float(v) for v in text.replace(",", " ").split())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'RHO THETA', got {text!r}") from None
    return rho_z, theta_z


def build_parser():
    parser = argparse.ArgumentParser(
        prog="robin-eit",
        description="Sampling-type imaging of a Robin interface in the unit disk.",
    )
    parser.add_argument("--self-check", action="store_true",
                        help="run the verification oracles and exit")
    sub = parser.add_subparsers(dest="command")
    common = _common_flags()
    sub.add_parser("forward", parents=[common], help="write the gap operator as CSV")
    for name, text in (("greens", "write Green's function traces"),
                       ("picard", "write Picard diagnostics")):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("--point", type=_point, action="append", metavar="'RHO THETA'",
                       help="polar sampling point; may be repeated")
    sub.add_parser("image", parents=[common], help="indicator maps, metrics and manifest")
    p = sub.add_parser("sweep", parents=[common], help="metrics over a parameter sweep")
    p.add_argument("--axis", choices=["delta", "alpha", "rho"])
    p.add_argument("--values", help="comma-separated sweep values")
    return parser


def resolve_config(args):
    """Defaults < preset < config file < flags."""
    config = preset(args.preset) if args.preset else ExperimentConfig()
    if args.config:
        config = load_config(args.config, base=config)
    overrides = parse_assignments(args.set, source="--set")
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.out is not None:
        overrides["output_dir"] = args.out
    if getattr(args, "point", None):
        overrides["points"] = tuple(args.point)
    if getattr(args, "axis", None):
        overrides["sweep_axis"] = args.axis
    if getattr(args, "values", None):
        overrides.update(parse_assignments([f"sweep_values = {args.values}"], "--values"))
    return config.with_overrides(**overrides)


def self_check():
    """Quick oracle comparisons; returns a list of ``(name, ok, detail)``."""
    results = []
    medium = MediumConfig(0.4, 1.0, 10.0, 1.0)
    worst = max(
        abs(solve_mode(n, medium).gap - ver.symbolic_mode_solve(n, medium).gap)
        / abs(ver.symbolic_mode_solve(n, medium).gap)
        for n in range(11)
    )
    results.append(("mode solve vs extended precision", worst <= 1e-13, f"{worst:.2e}"))

    kernel = KernelSpec(2)
    f = np.zeros(5, complex)
    f[0] = f[4] = 0.5  # cos(2 phi)
    mesh = ver.PolarMesh.aligned_to(medium.rho, 64, 128)
    fd = ver.fd_forward_solve(medium, f, mesh)
    exact = boundary_trace(medium, f, kernel, mesh.angles)
    err = np.linalg.norm(fd - exact) / np.linalg.norm(exact)
    results.append(("finite differences vs series (64x128)", err <= 1e-2, f"{err:.2e}"))

    grid = BoundaryGrid(32)
    z = SamplingPoint(0.8, 0.3)
    gq = robin_greens_trace(z, 10.0, grid).values
    gs = greens_trace_series(z, 10.0, grid, 400).values
    err = np.max(np.abs(gq - gs))
    results.append(("Green's trace quadrature vs series", err <= 1e-8, f"{err:.2e}"))

    rng = np.random.default_rng(0)
    A, b = rng.standard_normal((8, 8)), rng.standard_normal(8)
    x = filtered_solve(A, b, FilterSpec("ttls", 3))
    ref = ver.direct_ttls(A, b, 3)
    err = np.linalg.norm(x - ref) / np.linalg.norm(ref)
    results.append(("TTLS closed form vs eigen route", err <= 1e-8, f"{err:.2e}"))
    return results


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    quiet = getattr(args, "quiet", False)
    logging.basicConfig(level=logging.WARNING if quiet else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")

    if args.self_check:
        results = self_check()
        for name, ok, detail in results:
            print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
        return EXIT_OK if all(ok for _, ok, _ in results) else EXIT_NUMERIC
    if args.command is None:
        parser.print_help(sys.stderr)
        return EXIT_CONFIG

    try:
        config = resolve_config(args)
        if args.command == "forward":
            experiments.run_forward(config)
        elif args.command == "greens":
            experiments.run_greens(config)
        elif args.command == "picard":
            experiments.run_picard(config)
        elif args.command == "image":
            experiments.run_image(config)
        elif args.command == "sweep":
            experiments.run_sweep(config)
    except ConfigError as exc:
        log.error("configuration error: %s", exc)
        return EXIT_CONFIG
    except OSError as exc:
        log.error("I/O error: %s", exc)
        return EXIT_IO
    except experiments.StageError as exc:
        log.error("%s", exc)
        return EXIT_IO if isinstance(exc.error, OSError) else EXIT_NUMERIC
    except (RobinEITError, ArithmeticError, np.linalg.LinAlgError) as exc:
        log.error("numerical failure: %s", exc)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
