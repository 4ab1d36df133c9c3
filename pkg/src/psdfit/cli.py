"""Command-line interface.

Subcommands:
  solve       fit a rank-k PSD matrix to a problem file
  gradcheck   analytic vs finite-difference gradient on a problem file
  linecheck   line-search coefficients vs polynomial interpolation
  gen         write a seeded random or consistent problem file
  demo-image  image-restoration demo on a binary PGM

Exit codes: 0 success / checks passed, 1 verification or convergence
failure, 2 usage or I/O errors.
"""

import argparse
import sys

import numpy as np

from . import io as pio
from .imagedemo import ImageFormatError, image_demo
from .linesearch import quartic_coeffs
from .oracle import compare, fd_gradient, interpolate_quartic
from .problem import ProblemInstance, ValidationError, gradient
from .solver import NumericalError, SolverConfig, TerminationReason, solve


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="psdfit",
        description="Low-rank PSD matrix fitting via factorized conjugate gradients.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve a problem file")
    p.add_argument("problem", help="problem file path")
    p.add_argument("--rank", type=int, default=None, help="override rank k")
    p.add_argument("--tol", type=float, default=1e-4, help="gradient-norm tolerance")
    p.add_argument("--max-iter", type=int, default=10_000)
    start = p.add_mutually_exclusive_group()
    start.add_argument("--seed", type=int, default=0, help="seed for the random start")
    start.add_argument("--init", default=None, help="file with an explicit Y0")
    p.add_argument("--trace", default=None, help="write per-iteration CSV here")
    p.add_argument("--out", default=None, help="write the solution file here")

    p = sub.add_parser("gradcheck", help="finite-difference gradient check")
    p.add_argument("problem")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-6)

    p = sub.add_parser("linecheck", help="line-search coefficient check")
    p.add_argument("problem")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-8)

    p = sub.add_parser("gen", help="generate a seeded problem file")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--m", type=int, default=None, help="pair count (sizes default to n)")
    p.add_argument(
        "--sizes", default=None, help="comma-separated per-pair sizes m_i"
    )
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=("random", "consistent"), default="random")
    p.add_argument("--out", required=True)

    p = sub.add_parser("demo-image", help="image-restoration demo (binary PGM)")
    p.add_argument("image")
    p.add_argument("--m", type=int, default=3, help="number of observations")
    p.add_argument("--rank", type=int, default=None, help="fit rank (default min(n, 16))")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--max-iter", type=int, default=50_000)
    p.add_argument("--out-dir", required=True)

    return parser


def _with_rank(instance: ProblemInstance, rank):
    if rank is None or rank == instance.k:
        return instance
    return ProblemInstance(pairs=instance.pairs, n=instance.n, k=rank)


def _seeded_point(instance, seed):
    rng = np.random.default_rng(seed)
    return rng.random((instance.n, instance.k))


def _cmd_solve(args):
    instance = _with_rank(pio.read_problem(args.problem), args.rank)
    if args.init is not None:
        Y0 = pio.read_matrix(args.init)
    else:
        Y0 = _seeded_point(instance, args.seed)
    config = SolverConfig(epsilon=args.tol, max_iterations=args.max_iter)
    result = solve(instance, Y0=Y0, config=config)
    last = result.trace[-1]
    print(f"termination {result.termination_reason.value}")
    print(f"iterations {result.iterations}")
    print(f"f {pio._fmt(last.f_value)}")
    print(f"grad_norm {pio._fmt(last.grad_norm)}")
    print(f"residual {pio._fmt(last.residual)}")
    if args.trace:
        pio.write_trace(args.trace, result.trace)
    if args.out:
        pio.write_solution(args.out, result)
    return 0 if result.termination_reason is TerminationReason.GRADIENT_TOLERANCE else 1


def _cmd_gradcheck(args):
    instance = pio.read_problem(args.problem)
    Y = _seeded_point(instance, args.seed)
    report = compare(
        "gradient",
        gradient(instance, Y),
        fd_gradient(instance, Y),
        tolerance=args.tol,
    )
    print(report)
    return 0 if report.passed else 1


def _cmd_linecheck(args):
    instance = pio.read_problem(args.problem)
    rng = np.random.default_rng(args.seed)
    Y = rng.random((instance.n, instance.k))
    D = 2.0 * rng.random((instance.n, instance.k)) - 1.0
    poly = quartic_coeffs(instance, Y, D)
    fitted = interpolate_quartic(instance, Y, D)
    coeff_report = compare(
        "quartic coefficients",
        np.array([poly.a0, poly.a1, poly.a2, poly.a3, poly.a4]),
        np.array([fitted.a0, fitted.a1, fitted.a2, fitted.a3, fitted.a4]),
        tolerance=args.tol,
    )
    slope_report = compare(
        "a1 vs tr(grad^T D)",
        np.array([poly.a1]),
        np.array([float(np.trace(gradient(instance, Y).T @ D))]),
        tolerance=1e-10,
    )
    print(coeff_report)
    print(slope_report)
    return 0 if (coeff_report.passed and slope_report.passed) else 1


def _cmd_gen(args):
    sizes = None
    if args.sizes is not None:
        sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
    instance = pio.generate_instance(
        n=args.n, k=args.k, m=args.m, sizes=sizes, seed=args.seed, mode=args.mode
    )
    pio.write_problem(args.out, instance)
    print(f"wrote {args.out} (m={instance.m}, n={instance.n}, k={instance.k})")
    return 0


def _cmd_demo_image(args):
    report = image_demo(
        args.image,
        m=args.m,
        k=args.rank,
        seed=args.seed,
        output_dir=args.out_dir,
        tol=args.tol,
        max_iterations=args.max_iter,
    )
    for line in report.lines():
        print(line)
    print(f"wrote {report.files['report']}")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "solve": _cmd_solve,
        "gradcheck": _cmd_gradcheck,
        "linecheck": _cmd_linecheck,
        "gen": _cmd_gen,
        "demo-image": _cmd_demo_image,
    }
    try:
        return handlers[args.command](args)
    except (OSError, pio.ParseError, ValidationError, ImageFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
