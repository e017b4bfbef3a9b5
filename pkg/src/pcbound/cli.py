"""Command-line interface.

Subcommands: bound (confidence bound for a p-value file), select
(selection-adjusted bound for chosen ids), simulate (Monte Carlo coverage
for a scenario file), split (two-stage exploration/confirmation split),
serve (run the HTTP service).

Exit codes: 0 success, 1 unreadable input file, 2 invalid input or
arguments, 3 vector too large for exhaustive closed testing.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
import warnings
from pathlib import Path

from .closedtest import CapExceededError, build_lattice, selection_bound
from .combine import COMBINER_NAMES
from .conjunction import family_reports, report_bound
from .core import AnalysisConfig, PValueVector, ValidationError, load_pvalues
from .harness import load_scenario, simulate_coverage, simulate_selection_coverage, split_dataset


def _load_with_warnings(path: str, fmt: str | None) -> PValueVector:
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        vector = load_pvalues(path, fmt)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    return vector


def _emit(args, payload: dict, table: str) -> None:
    if args.format == "json":
        print(json.dumps(payload, indent=2))
    else:
        print(table)


def cmd_bound(args) -> int:
    vector = _load_with_warnings(args.file, args.input_format)
    config = AnalysisConfig(alpha=args.alpha, combiner=args.combiner)
    if args.by_family:
        reports = family_reports(vector, config)
        adjusted = config.alpha / len(reports)
        payload = {
            "alpha": config.alpha,
            "alpha_per_family": adjusted,
            "families": {fam: rep.to_dict() for fam, rep in reports.items()},
        }
        sections = [
            f"{len(reports)} families, global alpha {config.alpha:g} "
            f"split to {adjusted:g} per family"
        ]
        for fam, rep in reports.items():
            sections.append(f"\nfamily {fam}:\n{rep.format_table()}")
        _emit(args, payload, "\n".join(sections))
    else:
        report = report_bound(vector, config)
        _emit(args, report.to_dict(), report.format_table())
    return 0


def cmd_select(args) -> int:
    vector = _load_with_warnings(args.file, args.input_format)
    config = AnalysisConfig(alpha=args.alpha, combiner=args.combiner)
    ids = [i for chunk in args.ids for i in chunk.split(",") if i]
    lattice = build_lattice(vector, config)
    bound = selection_bound(lattice, ids)
    witness = ", ".join(bound.witness) if bound.witness else "(none: every subset rejected)"
    table = "\n".join(
        [
            f"selection ({bound.selection_size}): {', '.join(bound.selection)}",
            f"f_alpha = {bound.f_alpha} at alpha = {bound.alpha:g} (combiner {bound.combiner})",
            f"with {100 * (1 - bound.alpha):g}% confidence at least {bound.f_alpha} "
            f"of the selected hypotheses are false",
            f"largest unrejected subset: {witness}",
            "bounds for every selection from this dataset hold simultaneously",
        ]
    )
    _emit(args, bound.to_dict(), table)
    return 0


def cmd_simulate(args) -> int:
    spec, select_size = load_scenario(args.scenario)
    if args.seed is not None:
        spec = dataclasses.replace(spec, seed=args.seed)
    report = simulate_coverage(spec)
    payload = {"coverage": report.to_dict()}
    lines = [
        "scenario: "
        + " ".join(f"{k}={v}" for k, v in spec.to_dict().items()),
        f"coverage of [u_max, n]: {report.coverage:.4f} (se {report.se:.4f}), "
        f"mean u_max {report.mean_u_max:.3f}",
    ]
    if select_size is not None:
        sel = simulate_selection_coverage(spec, select_size)
        payload["selection"] = sel.to_dict()
        lines.append(
            f"selection of top {select_size}: adjusted coverage {sel.coverage:.4f} "
            f"(se {sel.se:.4f}), mean f_alpha {sel.mean_f_alpha:.3f}; "
            f"naive coverage {sel.naive_coverage:.4f}, "
            f"mean naive bound {sel.mean_naive_bound:.3f}"
        )
    _emit(args, payload, "\n".join(lines))
    return 0


def cmd_split(args) -> int:
    vector = _load_with_warnings(args.file, args.input_format)
    plan = split_dataset(vector, args.fraction, args.seed or 0)
    lines = [
        f"split {plan.n_total} hypotheses at fraction {plan.fraction:g} (seed {plan.seed}): "
        f"{len(plan.exploration_ids)} exploration, {len(plan.confirmation_ids)} confirmation"
    ]
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "exploration.txt").write_text("\n".join(plan.exploration_ids) + "\n", encoding="utf-8")
        (out / "confirmation.txt").write_text("\n".join(plan.confirmation_ids) + "\n", encoding="utf-8")
        lines.append(f"wrote exploration.txt and confirmation.txt to {out}")
    else:
        lines.append("exploration: " + ", ".join(plan.exploration_ids))
        lines.append("confirmation: " + ", ".join(plan.confirmation_ids))
    _emit(args, plan.to_dict(), "\n".join(lines))
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(snapshot_dir=args.snapshot_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level=args.log_level)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pcbound",
        description="Lower confidence bounds on the number of false null hypotheses.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_analysis_flags(p, with_input=True):
        if with_input:
            p.add_argument("file", help="CSV (id,p[,family]) or JSON array of {id, p, family?}")
            p.add_argument(
                "--input-format",
                choices=("csv", "json"),
                default=None,
                help="override format detection by file suffix",
            )
        p.add_argument("--alpha", type=float, default=0.05, help="significance level (default 0.05)")
        p.add_argument(
            "--combiner",
            choices=COMBINER_NAMES,
            default="fisher",
            help="p-value combining method (default fisher)",
        )
        p.add_argument(
            "--format",
            choices=("table", "json"),
            default="table",
            help="output format (default table)",
        )

    p_bound = sub.add_parser("bound", help="confidence bound on the number of false hypotheses")
    add_analysis_flags(p_bound)
    p_bound.add_argument(
        "--by-family",
        action="store_true",
        help="bound each family separately at alpha divided by the family count",
    )
    p_bound.set_defaults(func=cmd_bound)

    p_select = sub.add_parser("select", help="selection-adjusted bound for chosen hypothesis ids")
    add_analysis_flags(p_select)
    p_select.add_argument(
        "--ids",
        action="append",
        required=True,
        help="comma-separated hypothesis ids; may be repeated",
    )
    p_select.set_defaults(func=cmd_select)

    p_sim = sub.add_parser("simulate", help="Monte Carlo coverage for a scenario file")
    p_sim.add_argument("scenario", help="JSON scenario: n, k_false, effect, [alpha, combiner, reps, seed, select_size]")
    p_sim.add_argument("--seed", type=int, default=None, help="override the scenario's seed")
    p_sim.add_argument("--format", choices=("table", "json"), default="table")
    p_sim.set_defaults(func=cmd_simulate)

    p_split = sub.add_parser("split", help="random exploration/confirmation split of a p-value file")
    p_split.add_argument("file", help="CSV or JSON input file")
    p_split.add_argument(
        "--input-format", choices=("csv", "json"), default=None, help="override format detection"
    )
    p_split.add_argument("--fraction", type=float, required=True, help="exploration fraction in (0, 1)")
    p_split.add_argument("--seed", type=int, default=0, help="permutation seed (default 0)")
    p_split.add_argument("--out-dir", default=None, help="write exploration.txt and confirmation.txt here")
    p_split.add_argument("--format", choices=("table", "json"), default="table")
    p_split.set_defaults(func=cmd_split)

    p_serve = sub.add_parser("serve", help="run the HTTP session service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.add_argument("--snapshot-dir", default=None, help="persist sessions as JSON files here")
    p_serve.add_argument("--log-level", default="info")
    p_serve.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return args.func(args)
    except CapExceededError as exc:
        print(
            f"error: {exc}\nthe full-set bound is still available via the bound command",
            file=sys.stderr,
        )
        return 3
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
