"""Command-line entry point."""

import argparse
import json
import logging
import sys
from collections.abc import Callable, Sequence
from pathlib import Path
from typing import Any

from pydantic import ValidationError

from src import __version__
from src.config import Config
from src.errors import SBCError
from src.logging import setup_logging
from src.models import RunManifest
from src.services import ELLIPTIC_FUNCTIONS, JobService

logger = logging.getLogger(__name__)

USAGE_EXIT = 2
UNEXPECTED_EXIT = 1


def _floats(text: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from e


def _pair(text: str) -> tuple[float, float]:
    values = _floats(text)
    if len(values) != 2:
        raise argparse.ArgumentTypeError(f"expected two numbers 'a,b', got {text!r}")
    return values[0], values[1]


def _complex(text: str) -> complex:
    re, im = _pair(text)
    return complex(re, im)


def _add_globals(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out-dir", type=Path, default=None, help="Output directory")
    parser.add_argument("--threads", type=int, default=None, help="Worker threads")
    parser.add_argument("--grid-size", type=int, default=None, help="Samples per closed curve")
    parser.add_argument("--seed", type=int, default=None, help="Seed for randomized searches")
    parser.add_argument("--log-level", default=None, help="Logging level")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sbc",
        description="Self-Bäcklund centroaffine curves and polygons",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    _add_globals(parser)
    commands = parser.add_subparsers(dest="command", required=True)

    # elliptic
    p_elliptic = commands.add_parser("elliptic", help="Weierstrass functions")
    elliptic_actions = p_elliptic.add_subparsers(dest="action", required=True)
    p_eval = elliptic_actions.add_parser("eval", help="Evaluate one function at points")
    p_eval.add_argument("--omega", type=float, default=1.0, help="Real half-period")
    p_eval.add_argument("--omega-prime", type=float, default=None,
                        help="Imaginary part of the imaginary half-period")
    p_eval.add_argument("--fn", choices=sorted(ELLIPTIC_FUNCTIONS), default="wp")
    p_eval.add_argument("--z", type=_complex, action="append", required=True,
                        help="Point 're,im'; repeatable")

    # hill
    p_hill = commands.add_parser("hill", help="Hill operators and c-related curves")
    hill_actions = p_hill.add_subparsers(dest="action", required=True)
    for name, text in (("lambda0", "Lowest periodic eigenvalue"),
                       ("cmax", "Largest admissible relation constant")):
        p = hill_actions.add_parser(name, help=text)
        source = p.add_mutually_exclusive_group(required=True)
        source.add_argument("--potential", type=Path, help="Potential JSON")
        source.add_argument("--in", dest="curve", type=Path, help="Curve JSON")
    p_crelate = hill_actions.add_parser("crelate", help="Build the c-related curve")
    p_crelate.add_argument("--in", dest="curve", type=Path, required=True, help="Curve JSON")
    p_crelate.add_argument("--c", type=float, required=True, help="Relation constant")

    # curve
    p_curve = commands.add_parser("curve", help="Centroaffine curves")
    curve_actions = p_curve.add_subparsers(dest="action", required=True)
    p_verify = curve_actions.add_parser("verify", help="Test [γ(t), γ(t+α)] for constancy")
    p_verify.add_argument("--in", dest="curve", type=Path, required=True, help="Curve JSON")
    p_verify.add_argument("--alpha", type=float, required=True)
    p_roots = curve_actions.add_parser("roots", help="Certified rotation-equation roots")
    p_roots.add_argument("--kind", choices=["tan_tan", "tanh_tan", "coth_tan"], default="tan_tan")
    p_roots.add_argument("--u", type=float, required=True)
    p_roots.add_argument("--interval", type=_pair, required=True, help="'lo,hi'")
    p_wegner = curve_actions.add_parser("wegner", help="Curves of the Wegner ansatz")
    for name in ("a", "b", "c"):
        p_wegner.add_argument(f"--{name}", type=float, required=True)
    p_wegner.add_argument("--r0", type=float, required=True)

    # lame
    p_lame = commands.add_parser("lame", help="Lamé curves")
    lame_actions = p_lame.add_subparsers(dest="action", required=True)
    for name, text in (("build", "Build the curve and its angles"),
                       ("angles", "Self-Bäcklund angles only")):
        p = lame_actions.add_parser(name, help=text)
        p.add_argument("--k", type=int, required=True)
        p.add_argument("--n", type=int, default=1)
        p.add_argument("--m", type=int, default=0)
        p.add_argument("--omega-prime", type=float, default=None)
    p_deform = lame_actions.add_parser("deform", help="Deformation family in the nome")
    p_deform.add_argument("--k", type=int, required=True)
    p_deform.add_argument("--s-steps", type=_floats, default=[1.0, 0.5, 0.25, 0.1, 0.05])
    p_deform.add_argument("--omega-prime", type=float, default=None)

    # poly
    p_poly = commands.add_parser("poly", help="Centroaffine polygons")
    poly_actions = p_poly.add_subparsers(dest="action", required=True)
    p_build = poly_actions.add_parser("build", help="Polygon from Hill coefficients")
    p_build.add_argument("--hill", type=_floats, required=True, help="'a1,...,an'")
    p_construct = poly_actions.add_parser("construct", help="Explicit (n, k) constructions")
    p_construct.add_argument("--n", type=int, required=True)
    p_construct.add_argument("--k", type=int, required=True)
    p_construct.add_argument("--dilation", type=float, default=None)
    p_backlund = poly_actions.add_parser("backlund", help="Discrete Bäcklund transformation")
    p_backlund.add_argument("--in", dest="polygon", type=Path, required=True)
    p_backlund.add_argument("--q1", type=_pair, required=True, help="'x,y'")
    p_recut = poly_actions.add_parser("recut", help="Iterate recutting")
    p_recut.add_argument("--in", dest="polygon", type=Path, required=True)
    p_recut.add_argument("--iters", type=int, default=1000)
    p_rigidity = poly_actions.add_parser("rigidity", help="Circulant rigidity spectrum")
    p_rigidity.add_argument("--n", type=int, required=True)
    p_rigidity.add_argument("--k", type=int, required=True)
    p_search = poly_actions.add_parser("search", help="Random-restart search for solutions")
    p_search.add_argument("--n", type=int, required=True)
    p_search.add_argument("--k", type=int, required=True)
    p_search.add_argument("--restarts", type=int, default=100)

    # carousel
    p_carousel = commands.add_parser("carousel", help="Carousel flows")
    carousel_actions = p_carousel.add_subparsers(dest="action", required=True)
    p_flow = carousel_actions.add_parser("flow", help="Integrate the ξ field")
    p_flow.add_argument("--n", type=int, default=5)
    p_flow.add_argument("--init", type=Path, default=None, help="Initial polygon JSON")
    p_flow.add_argument("--T", dest="duration", type=float, default=10.0)
    p_flow.add_argument("--perturbation", type=float, default=0.1)
    p_flow.add_argument("--tol", type=float, default=1e-9)
    p_flow.add_argument("--samples", type=int, default=200)
    p_close = carousel_actions.add_parser("close", help="Shoot for a closed carousel")
    p_close.add_argument("--level-scan", type=_pair, default=(0.05, 2.0), help="'lo,hi'")
    p_close.add_argument("--points", type=int, default=16)
    p_close.add_argument("--tol", type=float, default=1e-10)

    # dual
    p_dual = commands.add_parser("dual", help="Dual curve in the hyperbolic plane")
    p_dual.add_argument("--in", dest="curve", type=Path, required=True)
    p_dual.add_argument("--out", default="dual.csv", help="CSV file name inside the output dir")

    commands.add_parser("repro", help="Regenerate the desk-scale figures")
    return parser


def _config(args: argparse.Namespace) -> Config:
    overrides: dict[str, Any] = {
        "output_dir": str(args.out_dir) if args.out_dir is not None else None,
        "threads": args.threads,
        "grid_size": args.grid_size,
        "seed": args.seed,
        "log_level": args.log_level,
        "omega_prime_im": getattr(args, "omega_prime", None),
        "dilation": getattr(args, "dilation", None),
    }
    base = Config()
    updates = {key: value for key, value in overrides.items() if value is not None}
    return Config.model_validate({**base.model_dump(), **updates})


def _dispatch(service: JobService, args: argparse.Namespace) -> RunManifest | list[complex]:
    cfg = service.config
    handlers: dict[tuple[str, str | None], Callable[[], Any]] = {
        ("elliptic", "eval"): lambda: service.elliptic_eval(
            args.omega, cfg.omega_prime_im, args.fn, args.z),
        ("hill", "lambda0"): lambda: service.hill_lambda0(args.potential, args.curve),
        ("hill", "cmax"): lambda: service.hill_cmax(args.potential, args.curve),
        ("hill", "crelate"): lambda: service.hill_crelate(args.curve, args.c),
        ("curve", "verify"): lambda: service.curve_verify(args.curve, args.alpha),
        ("curve", "roots"): lambda: service.curve_roots(args.kind, args.u, args.interval),
        ("curve", "wegner"): lambda: service.curve_wegner(args.a, args.b, args.c, args.r0),
        ("lame", "build"): lambda: service.lame_build(args.k, args.n, args.m,
                                                      cfg.omega_prime_im),
        ("lame", "angles"): lambda: service.lame_angles(args.k, args.n, args.m,
                                                        cfg.omega_prime_im),
        ("lame", "deform"): lambda: service.lame_deform(args.k, args.s_steps,
                                                        cfg.omega_prime_im),
        ("poly", "build"): lambda: service.poly_build(args.hill),
        ("poly", "construct"): lambda: service.poly_construct(args.n, args.k),
        ("poly", "backlund"): lambda: service.poly_backlund(args.polygon, args.q1),
        ("poly", "recut"): lambda: service.poly_recut(args.polygon, args.iters),
        ("poly", "rigidity"): lambda: service.poly_rigidity(args.n, args.k),
        ("poly", "search"): lambda: service.poly_search(args.n, args.k, args.restarts),
        ("carousel", "flow"): lambda: service.carousel_flow(
            args.n, args.duration, args.init, args.perturbation, args.tol, args.samples),
        ("carousel", "close"): lambda: service.carousel_close(
            args.level_scan[0], args.level_scan[1], args.points, args.tol),
        ("dual", None): lambda: service.dual(args.curve, args.out),
        ("repro", None): service.repro,
    }
    return handlers[(args.command, getattr(args, "action", None))]()


def _print(result: RunManifest | list[complex]) -> None:
    if isinstance(result, RunManifest):
        print(json.dumps(result.results, indent=2, sort_keys=True))
        return
    for value in result:
        print(f"{value.real:.17g},{value.imag:.17g}")


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    try:
        config = _config(args)
    except ValidationError as e:
        print(f"sbc: invalid configuration: {e}", file=sys.stderr)
        return USAGE_EXIT

    setup_logging(config)
    command = " ".join(filter(None, [args.command, getattr(args, "action", None)]))
    logger.info("Starting job", extra={"command": command, "version": __version__})

    try:
        result = _dispatch(JobService(config), args)
    except SBCError as e:
        logger.error("Job failed", extra={"command": command, "error": str(e),
                                          "error_type": type(e).__name__})
        return e.exit_code
    except Exception as e:
        logger.exception("Unexpected failure", extra={"command": command, "error": str(e)})
        return UNEXPECTED_EXIT

    _print(result)
    return 0


if __name__ == "__main__":
    sys.exit(main())
