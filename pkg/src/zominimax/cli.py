"""Command-line interface.

Subcommands: ``run`` (single-epsilon experiment), ``sweep`` (epsilon grid),
``verify-estimator`` (bound suite report), ``params`` (print resolved solver
parameters).  Exit codes: 0 success, 1 configuration error, 2 numerical
failure.  The environment variable ``ZOMINIMAX_OUTPUT_DIR`` overrides the
configured output directory.
"""

import argparse
import json
import math
import sys

from .errors import ConfigError, NumericalError
from .harness import (
    OUTPUT_DIR_ENV,
    load_config,
    print_params,
    resolve_output_dir,
    run_experiment,
    verify_estimators,
)
from .solvers import MODES, Overrides


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zominimax",
        description="Zeroth-order minimax solvers and benchmark harness",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one experiment config (single eps)")
    p_run.add_argument("config", help="YAML experiment config")

    p_sweep = sub.add_parser("sweep", help="run an eps-grid sweep config")
    p_sweep.add_argument("config", help="YAML experiment config with eps list")

    p_verify = sub.add_parser(
        "verify-estimator", help="run the estimator bound suite and emit JSON"
    )
    p_verify.add_argument("config", help="YAML experiment config")

    p_params = sub.add_parser("params", help="print resolved solver parameters")
    p_params.add_argument("--mode", required=True, choices=MODES)
    p_params.add_argument("--ell", required=True, type=float)
    p_params.add_argument("--tau", required=True, type=float)
    p_params.add_argument("--d1", type=int, default=1)
    p_params.add_argument("--d2", type=int, default=1)
    p_params.add_argument("--eps", required=True, type=float)
    p_params.add_argument("--sigma1", type=float, default=0.0)
    p_params.add_argument("--sigma2", type=float, default=0.0)
    p_params.add_argument(
        "--diameter",
        type=float,
        default=math.inf,
        help="feasible-set diameter (finite required for gdmsa/sgdmsa)",
    )
    p_params.add_argument("--c-s", dest="c_s", type=float, default=1.0)
    p_params.add_argument("--c-mu", dest="c_mu", type=float, default=1.0)
    p_params.add_argument("--c-t", dest="c_t", type=float, default=1.0)
    p_params.add_argument("--eta1", type=float, default=None)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "params":
            text = print_params(
                args.mode,
                ell=args.ell,
                tau=args.tau,
                d1=args.d1,
                d2=args.d2,
                eps=args.eps,
                sigma1=args.sigma1,
                sigma2=args.sigma2,
                diameter=args.diameter,
                overrides=Overrides(
                    c_s=args.c_s, c_mu=args.c_mu, c_t=args.c_t, eta1=args.eta1
                ),
            )
            print(text)
            return 0

        config = load_config(args.config)
        if args.command in ("run", "sweep"):
            n_eps = len(config.solver.eps_values)
            if args.command == "run" and n_eps != 1:
                raise ConfigError(
                    f"'run' expects a single solver.eps, got {n_eps}; use 'sweep'"
                )
            if args.command == "sweep" and n_eps < 2:
                raise ConfigError("'sweep' expects a list of solver.eps values")
            summary = run_experiment(config)
            out_dir = resolve_output_dir(config)
            done = sum(
                1 for r in summary["rows"] if r["iterations_to_target"] is not None
            )
            print(
                f"{args.command}: {len(summary['rows'])} cells, "
                f"{done} reached target; outputs in {out_dir}/ "
                f"(override with {OUTPUT_DIR_ENV})"
            )
            return 0
        if args.command == "verify-estimator":
            report = verify_estimators(config)
            n = len(report["results"])
            n_pass = sum(1 for r in report["results"] if r["pass"])
            print(
                json.dumps(
                    {"all_pass": report["all_pass"], "checks": n, "passed": n_pass}
                )
            )
            return 0 if report["all_pass"] else 2
        raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
