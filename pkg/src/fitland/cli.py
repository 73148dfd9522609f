"""Command line: ``fitland census|analyze|verify-theorem|compare``.

Exit codes: 0 success, 1 theorem counterexample, 2 usage or parse error,
3 enumeration budget exceeded.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from fractions import Fraction

from . import io as lio
from .core import build_aggregate, build_histogram, global_proportions, level_of
from .errors import BudgetExceeded, LandscapeError
from .problems import SpecError, TspProblem, parse_problem, tsp_census
from .properties import analyze, good_enough, modal_fitness
from .search import PIVOTS, LandscapeIndex, SearchConfig, estimate_improvement, head_to_head
from .synth import VIOLATIONS, run_suite

EXIT_OK, EXIT_COUNTEREXAMPLE, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# census
# ---------------------------------------------------------------------------


def census_histogram(spec: str, budget=None, parallel=True):
    problem = parse_problem(spec)
    if isinstance(problem, TspProblem):
        return tsp_census(problem.instance, parallel=parallel)
    return build_histogram(problem, budget=budget)


def census_summary(hist, spec: str = "") -> dict:
    """Range, mode, size and the share of solutions reaching the good-enough level."""
    grid = hist.grid
    v_ge = good_enough(hist)
    p_at, p_above = global_proportions(hist, v_ge)
    return {
        "problem": spec,
        "sense": grid.sense,
        "size": lio.plain_number(hist.total),
        "best": lio.plain_number(grid.to_original(hist.v_max)),
        "worst": lio.plain_number(grid.to_original(hist.v_min)),
        "min": lio.plain_number(min(grid.to_original(hist.v_min), grid.to_original(hist.v_max))),
        "max": lio.plain_number(max(grid.to_original(hist.v_min), grid.to_original(hist.v_max))),
        "mode": lio.plain_number(grid.to_original(modal_fitness(hist))),
        "v_ge": lio.plain_number(grid.to_original(v_ge)),
        "proportion_at_or_better_v_ge": float(p_at + p_above),
        "proportion_better_than_v_ge": float(p_above),
    }


def _table(rows, header) -> str:
    cells = [[str(c) for c in header]] + [[str(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    return "\n".join("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in cells) + "\n"


def _csv(rows, header) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def cmd_census(args) -> tuple[int, str]:
    hist = census_histogram(args.spec, args.max_solutions, not args.serial)
    summary = census_summary(hist, args.spec)
    if args.csv:
        lio.histogram_csv(hist, args.csv)
    if args.summary:
        with open(args.summary, "w") as fh:
            fh.write(_json(summary))
    if args.format == "csv":
        return EXIT_OK, lio.histogram_csv(hist)
    if args.format == "json":
        return EXIT_OK, _json({"summary": summary, "histogram": [
            dict(zip(lio.CSV_HEADER, row)) for row in lio.histogram_rows(hist)]})
    lines = _table([[k, v] for k, v in summary.items()], ["field", "value"])
    return EXIT_OK, lines + "\n" + _table(lio.histogram_rows(hist), lio.CSV_HEADER)


# ---------------------------------------------------------------------------
# analyze
# ---------------------------------------------------------------------------


def _load_input(source: str, budget=None):
    if os.path.exists(source):
        return lio.load_landscape(source)
    return build_aggregate(parse_problem(source), budget=budget)


def _report_row(r):
    w = r.witness
    fmt = lambda x: "" if x is None else str(x)
    return [r.property, r.verdict.value,
            "" if w is None else w.v, "" if w is None else fmt(w.delta),
            "" if w is None else str(w.lhs), "" if w is None else str(w.rhs),
            "" if w is None else w.relation]


REPORT_HEADER = ["property", "verdict", "v", "delta", "lhs", "rhs", "relation"]


def cmd_analyze(args) -> tuple[int, str]:
    landscape = _load_input(args.input, args.max_solutions)
    try:
        tolerance = Fraction(args.tolerance)
    except ValueError:
        raise UsageError(f"bad tolerance {args.tolerance!r}") from None
    reports = analyze(landscape, tolerance)
    if args.format == "json":
        return EXIT_OK, _json([r.to_dict() for r in reports])
    rows = [_report_row(r) for r in reports]
    if args.format == "csv":
        return EXIT_OK, _csv(rows, REPORT_HEADER)
    head = reports[0]
    return EXIT_OK, f"v_mode={head.v_mode} v_ge={head.v_ge}\n" + _table(rows, REPORT_HEADER)


# ---------------------------------------------------------------------------
# verify-theorem
# ---------------------------------------------------------------------------


def cmd_verify_theorem(args) -> tuple[int, str]:
    if args.seeds < 1:
        raise UsageError("--seeds must be >= 1")
    suites = VIOLATIONS if args.violation == "all" else (args.violation,)
    results = [run_suite(args.seeds, v, args.levels, args.first_seed) for v in suites]
    found = sum(len(r.counterexamples) for r in results)
    if found and args.counterexample_dir:
        os.makedirs(args.counterexample_dir, exist_ok=True)
        for r in results:
            for spec, agg, report in r.counterexamples:
                stem = os.path.join(args.counterexample_dir, f"{r.violation}-seed{spec.seed}")
                lio.dump_landscape(agg, stem + ".json")
                with open(stem + ".report.json", "w") as fh:
                    fh.write(_json(report.to_dict()))
    code = EXIT_COUNTEREXAMPLE if found else EXIT_OK
    if args.format == "json":
        return code, _json({"suites": [r.to_dict() for r in results], "counterexamples": found})
    header = ["violation", "landscapes", "premises_held", "conclusion_failed", "counterexamples"]
    rows = [[r.to_dict()[k] for k in header] for r in results]
    if args.format == "csv":
        return code, _csv(rows, header)
    return code, _table(rows, header) + f"{found} counterexamples\n"


# ---------------------------------------------------------------------------
# compare
# ---------------------------------------------------------------------------


def cmd_compare(args) -> tuple[int, str]:
    problem = parse_problem(args.spec)
    config = SearchConfig(args.pivot, args.budget, args.seed)
    report = head_to_head(problem, config, args.runs)
    out = report.to_dict()
    if args.level is not None:
        index = LandscapeIndex(problem, budget=args.max_solutions)
        level = level_of(Fraction(args.level), problem.sense)
        exact_random = index.exact(level, "random")
        est = {}
        for k, mode in enumerate(("random", "neighbour", "union")):
            e = estimate_improvement(problem, level, mode, args.trials, args.seed + k, index)
            exact = index.exact(level, mode)
            est[mode] = dict(e.to_dict(), exact=str(exact),
                             z=(e.p_hat - float(exact)) / e.stderr if e.stderr else 0.0)
        out["improvement"] = {"fitness": args.level, "p_plus": str(exact_random), "estimates": est}
    if args.trace:
        with open(args.trace, "w", newline="") as fh:
            fh.write(_csv(report.trace_rows(), ["run", "step", "fitness", "evals"]))
    if args.format == "json":
        return EXIT_OK, _json(out)
    if args.format == "csv":
        return EXIT_OK, _csv(report.trace_rows(), ["run", "step", "fitness", "evals"])
    rows = [["hill-climb", out["hill_climb"]["mean_best"]],
            ["random-search", out["random_search"]["mean_best"]]]
    text = _table(rows, ["method", "mean_best"])
    if "improvement" in out:
        est = out["improvement"]["estimates"]
        text += "\n" + _table([[m, e["p_hat"], e["stderr"], e["exact"]] for m, e in est.items()],
                              ["mode", "p_hat", "stderr", "exact"])
    return EXIT_OK, text


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "table", "csv"), default="table")
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--max-solutions", type=int, default=None,
                        help="enumeration ceiling (default: $FITLAND_BUDGET or 1e8)")

    parser = argparse.ArgumentParser(prog="fitland", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("census", parents=[common], help="exact fitness histogram")
    p.add_argument("spec")
    p.add_argument("--serial", action="store_true", help="disable parallel TSP enumeration")
    p.add_argument("--csv", help="also write the histogram CSV here")
    p.add_argument("--summary", help="also write the summary JSON here")
    p.set_defaults(func=cmd_census)

    p = sub.add_parser("analyze", parents=[common], help="property reports for a landscape")
    p.add_argument("input", help="landscape JSON file or problem spec")
    p.add_argument("--tolerance", default="0")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("verify-theorem", parents=[common], help="synthetic theorem suites")
    p.add_argument("--seeds", type=int, default=1000)
    p.add_argument("--first-seed", type=int, default=0)
    p.add_argument("--levels", type=int, default=None, help="fixed level count (default: varies)")
    p.add_argument("--violation", choices=VIOLATIONS + ("all",), default="all")
    p.add_argument("--counterexample-dir")
    p.set_defaults(func=cmd_verify_theorem)

    p = sub.add_parser("compare", parents=[common], help="hill climb against random search")
    p.add_argument("spec")
    p.add_argument("--budget", type=int, default=500, help="evaluations per run")
    p.add_argument("--runs", type=int, default=100)
    p.add_argument("--pivot", choices=PIVOTS, default="first-improvement")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--level", help="fitness value (original units) for improvement estimates")
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--trace", help="write per-run traces as CSV")
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        code, text = args.func(args)
    except BudgetExceeded as exc:
        print(f"fitland: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (UsageError, SpecError, LandscapeError, ValueError, OSError) as exc:
        print(f"fitland: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
