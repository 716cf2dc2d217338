"""Command line interface.

Exit codes: 0 success, 2 input error, 3 solver failure.
"""
from __future__ import annotations

import argparse
import logging
import sys
from typing import Optional

from . import harness
from .errors import DegenerateInitialPoint, STAError
from .initial import random_init, shd_init
from .io import InputError, decomposition_to_json, dump_json, load_poly
from .poly import REAL
from .rank1 import best_rank1
from .solver import PLAIN_NEWTON, TRUST_REGION, SolverOptions, solve

EXIT_OK, EXIT_INPUT, EXIT_SOLVER = 0, 2, 3

log = logging.getLogger("stanewton")


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="stanewton", description="Symmetric tensor low-rank approximation")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="cmd", required=True)

    a = sub.add_parser("approx", help="rank-r approximation of a polynomial")
    a.add_argument("--input", required=True)
    a.add_argument("--rank", type=int, required=True)
    a.add_argument("--init", choices=["shd", "random"], default="shd")
    a.add_argument("--mode", choices=["tr", "newton"], default="tr")
    a.add_argument("--seed", type=int, default=0)
    a.add_argument("--max-iters", type=int, default=200)
    a.add_argument("--out")
    a.add_argument("--trace")

    r1 = sub.add_parser("rank1", help="real rank-1 approximation")
    r1.add_argument("--input", required=True)
    r1.add_argument("--seed", type=int, default=0)
    r1.add_argument("--out")

    b = sub.add_parser("bench", help="experiment protocols")
    bsub = b.add_subparsers(dest="bench", required=True)
    p = bsub.add_parser("perturb", help="random perturbation study")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--rank", type=int, nargs="+", required=True)
    p.add_argument("--eps", type=float, nargs="+", required=True)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--field", choices=["real", "complex"], default="real")
    p.add_argument("--init", choices=["shd", "random"], default="shd")
    p.add_argument("--mode", choices=["tr", "newton"], default="tr")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="CSV summary file (default: stdout)")
    p.add_argument("--json", help="per-trial rows as JSON")
    e = bsub.add_parser("example", help="closed-form examples")
    e.add_argument("--name", required=True,
                   choices=list(harness.RANK1_EXAMPLES + harness.SPARSE_EXAMPLES))
    e.add_argument("--n", type=int)
    e.add_argument("--d", type=int)
    e.add_argument("--rank", type=int, nargs="+", default=[3, 5, 10])
    e.add_argument("--trials", type=int, default=50)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--out", help="CSV summary file (default: stdout)")
    e.add_argument("--json", help="full result as JSON")
    return ap


def _mode(flag: str) -> str:
    return PLAIN_NEWTON if flag == "newton" else TRUST_REGION


def _approx(args) -> int:
    P = load_poly(args.input)
    if args.init == "shd":
        p0, _ = shd_init(P, args.rank, seed=args.seed)
    else:
        p0 = random_init(P, args.rank, seed=args.seed)
    res = solve(P, p0, SolverOptions(max_iters=args.max_iters, mode=_mode(args.mode)))
    if args.trace:
        res.write_trace(args.trace)
    out = {
        "residual": res.residual,
        "iterations": res.iterations,
        "termination": res.termination,
        "decomposition": decomposition_to_json(res.decomposition),
    }
    text = dump_json(out, args.out)
    if not args.out:
        print(text)
    if res.termination in ("retraction_failed", "diverged"):
        log.error("solver failed: %s", res.termination)
        return EXIT_SOLVER
    return EXIT_OK


def _rank1(args) -> int:
    P = load_poly(args.input)
    if P.field != REAL:
        raise InputError("rank1 needs a real polynomial")
    res = best_rank1(P, seed=args.seed)
    out = {
        "w": res.w, "v": res.v.tolist(), "spectral_lower_bound": res.spectral_lower_bound,
        "dist1": res.dist1, "d0": res.d0, "d_star": res.d_star,
        "iterations": res.iterations, "termination": res.termination, "solver": res.solver,
    }
    text = dump_json(out, args.out)
    if not args.out:
        print(text)
    return EXIT_OK


def _emit(csv_text: str, path: Optional[str]):
    if path:
        with open(path, "w", newline="") as fh:
            fh.write(csv_text)
    else:
        sys.stdout.write(csv_text)


def _perturb(args) -> int:
    sums = []
    for r in args.rank:
        for eps in args.eps:
            spec = harness.ExperimentSpec(args.n, args.d, r, args.field, eps, args.trials,
                                          args.seed, args.init, _mode(args.mode))
            sums.append(harness.run_perturbation(spec))
    _emit(harness.perturbation_csv(sums), args.out)
    if args.json:
        dump_json([{"r": s.r, "eps": s.eps, "failures": s.failures, "absolute": s.absolute,
                    "rows": [vars(row) for row in s.rows]} for s in sums], args.json)
    if all(s.failures == len(s.rows) for s in sums):
        return EXIT_SOLVER
    return EXIT_OK


def _example(args) -> int:
    rep = harness.run_named_example(args.name, args.n, args.d, tuple(args.rank),
                                    args.trials, args.seed)
    _emit(rep["csv"], args.out)
    if args.json:
        dump_json(rep["result"], args.json)
    return EXIT_OK


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    handler = {"approx": _approx, "rank1": _rank1}.get(args.cmd)
    if handler is None:
        handler = _perturb if args.bench == "perturb" else _example
    try:
        return handler(args)
    except (OSError, InputError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except DegenerateInitialPoint as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except STAError as exc:
        # remaining library errors come from inconsistent input data
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
