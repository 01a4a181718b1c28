"""Command-line front end.

Subcommands: gen-dataset, run, analyze, compare, failures, validate-dataset.
Exit codes: 0 success, 1 usage error, 2 execution error.
"""

from __future__ import annotations

import argparse
import sys
from decimal import Decimal
from pathlib import Path

from .core import DatasetVersion, RunConfig, Strategy
from .datasetgen import generate_dataset, load_dataset, synthesize_boundaries, validate_dataset
from .harness import (
    ExperimentGrid,
    export_csv,
    failure_report,
    load_records,
    run_grid,
    summarize,
)
from .llmclient import BackendConfig
from .sandbox import Sandbox
from .stats import TSV_HEADER, compare_cells
from .strategies import CODEGEN_TEMPLATE, DIRECT_TEMPLATE, PromptTemplate

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FAILURE = 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad usage; the contract here is exit 1
    def error(self, message):
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="interoplab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    gen = sub.add_parser("gen-dataset", help="synthesize a corpus version")
    gen.add_argument("--count", type=int, default=222)
    gen.add_argument("--seed", type=int, default=42)
    gen.add_argument("--version", required=True, choices=[v.value for v in DatasetVersion])
    gen.add_argument("--out", required=True)

    val = sub.add_parser("validate-dataset", help="check a corpus against the reference conversion")
    val.add_argument("--dataset", required=True)

    run = sub.add_parser("run", help="run a strategy grid against a backend")
    run.add_argument("--dataset", action="append", required=True,
                     help="corpus directory (repeatable)")
    run.add_argument("--out", required=True, help="results directory")
    run.add_argument("--backend-kind", default="http",
                     choices=["http", "scripted", "oracle", "noisy"])
    run.add_argument("--backend-url", default=None,
                     help="base URL for the http backend (default $INTEROP_BACKEND_URL)")
    run.add_argument("--model", action="append", default=None,
                     help="model tag (repeatable); defaults to the backend kind")
    run.add_argument("--strategy", action="append", default=None,
                     choices=[s.value for s in Strategy],
                     help="strategy (repeatable); default direct")
    run.add_argument("--runs", type=int, default=3)
    run.add_argument("--temperature", type=float, default=0.9)
    run.add_argument("--seed", type=int, default=0, help="noisy backend seed")
    run.add_argument("--error-rate", type=float, default=0.0, help="noisy corruption rate")
    run.add_argument("--num-tolerance", type=Decimal, default=None,
                     help="numeric comparison tolerance (default exact)")
    run.add_argument("--prompt-dir", default=None,
                     help="directory with direct.txt / codegen.txt template overrides")
    run.add_argument("--jobs", type=int, default=1)
    run.add_argument("--response-dir", default=None, help="scripted backend response directory")
    run.add_argument("--runner", default=None,
                     help="conversion runner script for codegen (default $INTEROP_RUNNER "
                          "or an installed runner)")

    ana = sub.add_parser("analyze", help="summarize a results directory")
    ana.add_argument("--results", required=True)
    ana.add_argument("--csv", default=None, help="also export attempt records as CSV")

    cmp_ = sub.add_parser("compare", help="two-proportion comparison of two cells")
    cmp_.add_argument("--results", required=True)
    cmp_.add_argument("--a", required=True, help="cell as version:model:strategy")
    cmp_.add_argument("--b", required=True, help="cell as version:model:strategy")
    cmp_.add_argument("--alpha", type=float, default=0.05)
    cmp_.add_argument("--no-correction", action="store_true",
                      help="drop the continuity correction")

    fail = sub.add_parser("failures", help="failure-cause histogram of a results directory")
    fail.add_argument("--results", required=True)
    fail.add_argument("--strategy", default=None, choices=[s.value for s in Strategy])

    return parser


def _load_template(prompt_dir: str | None, strategy: Strategy) -> PromptTemplate:
    default = DIRECT_TEMPLATE if strategy is Strategy.DIRECT else CODEGEN_TEMPLATE
    if not prompt_dir:
        return default
    path = Path(prompt_dir) / f"{strategy.value}.txt"
    if not path.is_file():
        return default
    body = path.read_text(encoding="utf-8")
    tag = f"{strategy.value}-custom"
    return PromptTemplate(body=body, version_tag=tag)


def _cmd_gen_dataset(args) -> int:
    if args.count < 1:
        raise ValueError("--count must be >= 1")
    version = DatasetVersion(args.version)
    # one extra boundary becomes the unscored target example
    boundaries = synthesize_boundaries(args.count + 1, args.seed)
    manifest = generate_dataset(boundaries[: args.count], boundaries[args.count], version, args.out)
    print(
        f"wrote {len(manifest.entries)} entry pairs + target.txt "
        f"({version.value}) to {manifest.root}"
    )
    return EXIT_OK


def _cmd_validate_dataset(args) -> int:
    manifest = load_dataset(args.dataset)
    report = validate_dataset(manifest)
    for result in report.results:
        if not result.ok:
            print(f"FAIL {result.prefix}: {result.detail}")
    print(
        f"{report.passed}/{len(report.results)} entries valid "
        f"({manifest.version.value})"
    )
    return EXIT_OK if report.ok else EXIT_FAILURE


def _cmd_run(args) -> int:
    manifests = [load_dataset(d) for d in args.dataset]
    strategies = [Strategy(s) for s in (args.strategy or ["direct"])]
    models = args.model or [args.backend_kind]
    cfg = BackendConfig(
        kind=args.backend_kind,
        base_url=args.backend_url,
        temperature=args.temperature,
        seed=args.seed,
        error_rate=args.error_rate,
        response_dir=args.response_dir,
    )
    grid = ExperimentGrid(
        datasets=manifests,
        strategies=strategies,
        backends=[(tag, cfg) for tag in models],
        runs=args.runs,
        results_dir=Path(args.out),
    )
    config = RunConfig(
        runs=args.runs,
        temperature=args.temperature,
        num_tolerance=args.num_tolerance,
        jobs=args.jobs,
    )
    sandbox = None
    if Strategy.CODEGEN in strategies:
        runner_cmd = [sys.executable, args.runner] if args.runner else None
        sandbox = Sandbox(runner_cmd=runner_cmd)
    templates = {s: _load_template(args.prompt_dir, s) for s in strategies}
    written = run_grid(grid, config, sandbox=sandbox, templates=templates)
    print(f"wrote {len(written)} new attempt records to {grid.results_dir}")
    for summary in summarize(grid.results_dir):
        avg = summary.average_pass1
        shown = f"{avg:.7f}" if avg is not None else "incomplete"
        print(f"{summary.label()}: pass@1 {shown}")
    return EXIT_OK


def _cmd_analyze(args) -> int:
    summaries = summarize(args.results)
    if not summaries:
        raise ValueError(f"no attempt records under {args.results}")
    print(
        "dataset_version\tmodel_tag\tstrategy\truns\tattempts\tsuccesses"
        "\tper_run_pass1\tavg_pass1\tcomplete"
    )
    for s in summaries:
        avg = s.average_pass1
        print(
            "\t".join(
                (
                    s.dataset_version,
                    s.model_tag,
                    s.strategy.value,
                    str(len(s.run_counts)),
                    str(s.total_attempts),
                    str(s.total_successes),
                    ";".join(f"{rate:.7f}" for rate in s.per_run_pass1),
                    f"{avg:.7f}" if avg is not None else "",
                    "true" if s.complete else "false",
                )
            )
        )
    if args.csv:
        export_csv(load_records(args.results), args.csv)
        print(f"records exported to {args.csv}")
    return EXIT_OK


def _parse_cell(text: str) -> tuple[str, str, str]:
    # model tags may contain ':', so split off the first and last segments
    parts = text.split(":")
    if len(parts) < 3:
        raise ValueError(f"cell address must be version:model:strategy, got {text!r}")
    return parts[0], ":".join(parts[1:-1]), parts[-1]


def _find_summary(summaries, address: str):
    version, model_tag, strategy = _parse_cell(address)
    for s in summaries:
        if (
            s.dataset_version == version
            and s.model_tag == model_tag
            and s.strategy.value == strategy
        ):
            return s
    raise ValueError(f"no records for cell {address!r}")


def _cmd_compare(args) -> int:
    summaries = summarize(args.results)
    a = _find_summary(summaries, args.a)
    b = _find_summary(summaries, args.b)
    result = compare_cells(a, b, alpha=args.alpha, corrected=not args.no_correction)
    print(TSV_HEADER)
    print(result.tsv_row())
    return EXIT_OK


def _cmd_failures(args) -> int:
    strategy = Strategy(args.strategy) if args.strategy else None
    report = failure_report(args.results, strategy)
    print("failure_cause\tcount\tpercent")
    for row in report.rows:
        print(f"{row.cause.csv_name}\t{row.count}\t{row.percent:.1f}")
    print(
        f"# {report.total_failures} failures over {report.total_attempts} attempts"
        + (f" ({strategy.value})" if strategy else "")
    )
    return EXIT_OK


_HANDLERS = {
    "gen-dataset": _cmd_gen_dataset,
    "validate-dataset": _cmd_validate_dataset,
    "run": _cmd_run,
    "analyze": _cmd_analyze,
    "compare": _cmd_compare,
    "failures": _cmd_failures,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as err:
        print(f"usage error: {err}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return _HANDLERS[args.command](args)
    except _UsageError as err:
        print(f"usage error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as err:  # noqa: BLE001 - the CLI boundary reports, not raises
        print(f"error: {err}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
