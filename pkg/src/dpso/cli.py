"""Command-line front end.

Subcommands: run (optimization runs), chain (birth-death tables), exact
(symmetric-group solvers), bounds (exponential bases), experiment (JSON
spec sweeps). Data goes to stdout as CSV or JSON; diagnostics go to
stderr. Exit codes: 0 success, 2 invalid flags (argparse), 1 runtime
error. Exact rationals render as "num/den", 13 as "13/1", so consumers
can tell exact values from floats.
"""

import argparse
import csv
import json
import math
import sys
from fractions import Fraction

from . import chain, exactperm, experiments, pso, spaces
from .rng import substream_seed
from .scalars import EXACT, FLOAT, render


def _fraction(text):
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from exc


def build_parser():
    parser = argparse.ArgumentParser(
        prog="dpso",
        description="Discrete particle swarm optimization laboratory",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute optimization runs")
    p_run.add_argument("--problem", required=True, choices=["onemax", "sort"])
    p_run.add_argument("--n", required=True, type=int)
    p_run.add_argument("--c", required=True, type=_fraction,
                       help="attractor pull; sets c_glob unless --cglob is given")
    p_run.add_argument("--particles", type=int, default=1)
    p_run.add_argument("--cloc", type=_fraction, default=Fraction(0))
    p_run.add_argument("--cglob", type=_fraction, default=None)
    p_run.add_argument("--repeats", type=int, default=1)
    p_run.add_argument("--seed", type=int, default=0)
    p_run.add_argument("--budget", type=int, default=0,
                       help="max evaluations per run; 0 = unlimited")
    p_run.add_argument("--format", choices=["csv", "json"], default="csv")

    p_chain = sub.add_parser("chain", help="birth-death return-time tables")
    p_chain.add_argument("--profile", required=True,
                         help="onemax | sort-min | sort-max | sort-avg | const:P")
    p_chain.add_argument("--n", required=True, type=int)
    p_chain.add_argument("--c", type=_fraction, default=Fraction(0))
    p_chain.add_argument("--exact", action="store_true",
                         help="exact rationals instead of floats")

    p_exact = sub.add_parser("exact", help="exact symmetric-group analysis")
    p_exact.add_argument("table", choices=["sort-walk", "qex", "qav", "h-table"])
    p_exact.add_argument("--n", required=True, type=int)
    p_exact.add_argument("--c", type=_fraction, default=Fraction(0))
    p_exact.add_argument("--float", action="store_true", dest="use_float",
                         help="float solver (larger n)")

    p_bounds = sub.add_parser("bounds", help="exponential bases for one c")
    p_bounds.add_argument("--c", required=True, type=_fraction)

    p_exp = sub.add_parser("experiment", help="run a JSON experiment spec")
    p_exp.add_argument("--spec", required=True)
    p_exp.add_argument("--format", choices=["csv", "json"], default="csv")
    return parser


def _cmd_run(args, out):
    if args.particles == 1 and args.cglob is None and args.cloc == 0:
        config = pso.onepso_config(float(args.c), budget=args.budget)
    else:
        cglob = args.c if args.cglob is None else args.cglob
        config = pso.SwarmConfig(
            particles=args.particles,
            c_loc=float(args.cloc),
            c_glob=float(cglob),
            budget=args.budget,
        )
    space = (spaces.hypercube(args.n) if args.problem == "onemax"
             else spaces.permutation_space(args.n))
    rows = []
    for rep in range(args.repeats):
        seed = substream_seed(args.seed, rep)
        result = pso.run(space, config, seed)
        rows.append({
            "problem": args.problem,
            "n": args.n,
            "P": config.particles,
            "c_loc": render(Fraction(args.cloc)),
            "c_glob": render(args.c if args.cglob is None else args.cglob),
            "seed": seed,
            "evaluations": result.evaluations,
            "iterations": result.iterations,
            "found": result.found,
            "best_value": result.best_value,
        })
    header = ["problem", "n", "P", "c_loc", "c_glob", "seed",
              "evaluations", "iterations", "found", "best_value"]
    if args.format == "json":
        json.dump(rows, out, indent=2)
        out.write("\n")
    else:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            row["found"] = int(row["found"])
            writer.writerow([row[col] for col in header])
    return 0


def _chain_spec(profile, n, c):
    if profile.startswith("const:"):
        p = Fraction(profile.split(":", 1)[1])
        return chain.BirthDeathSpec((p,) * n)
    if profile == "sort-avg":
        return exactperm.average_profile(n, c)
    return chain.standard_profiles(profile, n, c)


def _cmd_chain(args, out):
    spec = _chain_spec(args.profile, args.n, args.c)
    mode = EXACT if args.exact else FLOAT
    profile = chain.return_profile(spec, mode)
    pbar = chain.clamped_probabilities(spec, mode)
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["i", "p_i", "H_i", "V_i"])
    for i in range(spec.n):
        writer.writerow([
            i + 1,
            render(pbar[i]),
            render(profile.H[i]),
            render(profile.V[i]),
        ])
    return 0


def _cmd_exact(args, out):
    mode = FLOAT if args.use_float else EXACT
    writer = csv.writer(out, lineterminator="\n")
    if args.table in ("sort-walk", "h-table"):
        c = Fraction(0) if args.table == "sort-walk" else args.c
        table, values = exactperm.hitting_time_table(args.n, c, mode)
        writer.writerow(["partition", "level", "count", "h"])
        for level, lams in enumerate(table.levels):
            for lam in lams:
                writer.writerow([
                    "-".join(map(str, lam)),
                    level,
                    exactperm.permutation_count_of_type(lam),
                    render(values[lam]),
                ])
        if args.table == "sort-walk":
            writer.writerow(
                ["T_sort", "", "", render(exactperm.random_walk_sort_time(args.n, mode))]
            )
        return 0
    writer.writerow(["quantity", "n", "c", "value", "degree_estimate"])
    if args.table == "qex":
        diag = exactperm.q_ratios(args.n, args.c, mode)
        writer.writerow(["q_ex", args.n, render(args.c), render(diag.q_ex),
                         repr(diag.degree_ex)])
    else:
        # the averaged chain alone: cheap at any n, no partition solve
        if args.n < 3:
            raise ValueError(f"ratios need n >= 3, got {args.n}")
        num = exactperm.average_return_time(args.n, args.c, mode)
        den = exactperm.average_return_time(args.n - 1, args.c, mode)
        q_av = num / den
        degree = math.log(float(q_av)) / math.log(args.n / (args.n - 1))
        writer.writerow(["q_av", args.n, render(args.c), render(q_av),
                         repr(degree)])
    return 0


def _cmd_bounds(args, out):
    c = args.c
    cf = float(c)
    if not 0 < cf <= 0.5:
        raise ValueError(f"--c must be in (0, 1/2], got {c}")
    scale = 1000

    def linear(x):
        return cf + (1 - cf) * x / scale

    def quadratic(x):
        return cf + (1 - cf) * (x / scale) ** 2

    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["quantity", "value"])
    writer.writerow(["beta", repr(chain.beta_base(cf))])
    writer.writerow(["alpha", repr(chain.alpha_base(cf))])
    writer.writerow(["ratio_bound", repr((1 - cf) / cf)])
    writer.writerow(["base_linear", repr(chain.base_by_integration(linear, scale))])
    writer.writerow(["base_quadratic",
                     repr(chain.base_by_integration(quadratic, scale))])
    return 0


def _cmd_experiment(args, out):
    spec = experiments.load_experiment_spec(args.spec)
    results = experiments.run_experiment(spec)
    if args.format == "json":
        experiments.write_experiment_json(results, out)
    else:
        experiments.write_experiment_csv(results, out)
    return 0


_COMMANDS = {
    "run": _cmd_run,
    "chain": _cmd_chain,
    "exact": _cmd_exact,
    "bounds": _cmd_bounds,
    "experiment": _cmd_experiment,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args, sys.stdout)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
