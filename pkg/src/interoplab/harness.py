"""Grid execution with resumable record logs, summaries, CSV export, reports.

Each (dataset, model, strategy) cell appends JSON-lines attempt records to
its own file, flushed per record, so an interrupted experiment resumes by
skipping the keys already on disk.  Harness mode always compares against the
expected document and never uses the module cache.
"""

from __future__ import annotations

import csv
import json
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

from . import stats
from .core import AttemptRecord, ConversionTask, FailureCause, RunConfig, Strategy
from .datasetgen import DatasetManifest
from .llmclient import Backend, BackendConfig, build_backend
from .sandbox import Sandbox
from .strategies import (
    AttemptMeta,
    DEFAULT_TEMPLATES,
    PromptTemplate,
    convert_codegen,
    convert_direct,
)

CSV_HEADER = [
    "dataset_version",
    "entry_id",
    "model_tag",
    "strategy",
    "run",
    "success",
    "failure_cause",
    "detail",
    "duration_ms",
    "cache_hit",
]


@dataclass(slots=True)
class ExperimentGrid:
    """Cartesian product of datasets, strategies, and backends, times runs."""

    datasets: list[DatasetManifest]
    strategies: list[Strategy]
    backends: list[tuple[str, BackendConfig]]
    runs: int
    results_dir: Path

    def __post_init__(self):
        self.results_dir = Path(self.results_dir)
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        if not (self.datasets and self.strategies and self.backends):
            raise ValueError("grid needs at least one dataset, strategy, and backend")

    def total_attempts(self) -> int:
        entries = sum(len(m.entries) for m in self.datasets)
        return entries * len(self.strategies) * len(self.backends) * self.runs


def _safe_name(text: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]+", "-", text)


def cell_filename(version: str, model_tag: str, strategy: Strategy) -> str:
    return f"{_safe_name(version)}__{_safe_name(model_tag)}__{strategy.value}.jsonl"


def record_to_json(record: AttemptRecord) -> dict:
    return {
        "dataset_version": record.dataset_version,
        "entry_id": record.entry_id,
        "model_tag": record.model_tag,
        "strategy": record.strategy.value,
        "run": record.run_index,
        "success": record.success,
        "failure_cause": record.failure_cause.csv_name if record.failure_cause else None,
        "detail": record.detail,
        "duration_ms": record.duration_ms,
        "cache_hit": record.cache_hit,
    }


def record_from_json(doc: dict) -> AttemptRecord:
    cause = doc.get("failure_cause")
    return AttemptRecord(
        dataset_version=doc["dataset_version"],
        entry_id=doc["entry_id"],
        model_tag=doc["model_tag"],
        strategy=Strategy(doc["strategy"]),
        run_index=int(doc["run"]),
        success=bool(doc["success"]),
        failure_cause=FailureCause(cause) if cause else None,
        detail=doc.get("detail", ""),
        duration_ms=int(doc.get("duration_ms", 0)),
        cache_hit=doc.get("cache_hit"),
    )


def load_records(results_dir: str | Path) -> list[AttemptRecord]:
    records: list[AttemptRecord] = []
    for path in sorted(Path(results_dir).glob("*.jsonl")):
        with open(path, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line:
                    records.append(record_from_json(json.loads(line)))
    return records


def _existing_keys(path: Path) -> set[tuple]:
    keys: set[tuple] = set()
    if path.is_file():
        with open(path, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line:
                    keys.add(record_from_json(json.loads(line)).key())
    return keys


def run_grid(
    grid: ExperimentGrid,
    config: RunConfig | None = None,
    *,
    sandbox: Sandbox | None = None,
    templates: dict[Strategy, PromptTemplate] | None = None,
    backend_factory=None,
) -> list[AttemptRecord]:
    """Execute every missing attempt in the grid; returns the new records.

    backend_factory(cfg, manifest, strategy) may be injected to observe or
    replace backend construction; by default build_backend is used.  One
    backend instance serves one whole cell.
    """
    config = config or RunConfig()
    templates = {**DEFAULT_TEMPLATES, **(templates or {})}
    factory = backend_factory or (
        lambda cfg, manifest, strategy: build_backend(cfg, manifest=manifest, strategy=strategy)
    )
    grid.results_dir.mkdir(parents=True, exist_ok=True)
    if Strategy.CODEGEN in grid.strategies and sandbox is None:
        sandbox = Sandbox()  # raises if no runner is available
    written: list[AttemptRecord] = []
    for manifest in grid.datasets:
        for model_tag, backend_cfg in grid.backends:
            cfg = replace(backend_cfg, model_tag=model_tag, temperature=config.temperature)
            for strategy in grid.strategies:
                written.extend(
                    _run_cell(
                        manifest, model_tag, cfg, strategy, grid, config,
                        sandbox, templates[strategy], factory,
                    )
                )
    return written


def _run_cell(
    manifest: DatasetManifest,
    model_tag: str,
    backend_cfg: BackendConfig,
    strategy: Strategy,
    grid: ExperimentGrid,
    config: RunConfig,
    sandbox: Sandbox | None,
    template: PromptTemplate,
    factory,
) -> list[AttemptRecord]:
    version = manifest.version.value
    path = grid.results_dir / cell_filename(version, model_tag, strategy)
    existing = _existing_keys(path)
    backend: Backend = factory(backend_cfg, manifest, strategy)
    tasks = [
        ConversionTask(
            input_text=entry.input_text,
            target_example=manifest.target_text,
            entry_id=entry.prefix,
            expected_text=entry.expected_text,
        )
        for entry in manifest.entries
    ]
    written: list[AttemptRecord] = []
    with open(path, "a", encoding="utf-8") as sink:
        for run_index in range(1, grid.runs + 1):
            todo = [
                task
                for task in tasks
                if (version, task.entry_id, model_tag, strategy.value, run_index)
                not in existing
            ]
            if not todo:
                continue
            meta = AttemptMeta(dataset_version=version, run_index=run_index)

            def attempt(task: ConversionTask) -> AttemptRecord:
                if strategy is Strategy.DIRECT:
                    record, _ = convert_direct(
                        task, backend, template, meta=meta, tolerance=config.num_tolerance
                    )
                else:
                    record, _ = convert_codegen(
                        task, backend, sandbox, template,
                        meta=meta, tolerance=config.num_tolerance, cache=None,
                    )
                return record

            if config.jobs > 1:
                with ThreadPoolExecutor(max_workers=config.jobs) as pool:
                    results = list(pool.map(attempt, todo))
            else:
                results = [attempt(task) for task in todo]
            for record in results:
                sink.write(json.dumps(record_to_json(record)) + "\n")
                sink.flush()
                existing.add(record.key())
                written.append(record)
    return written


@dataclass(slots=True)
class CellSummary:
    """Per-cell pass@1 rollup; incomplete cells carry no average."""

    dataset_version: str
    model_tag: str
    strategy: Strategy
    run_counts: dict[int, tuple[int, int]]  # run index -> (successes, attempts)
    complete: bool

    def label(self) -> str:
        return f"{self.dataset_version}:{self.model_tag}:{self.strategy.value}"

    @property
    def total_successes(self) -> int:
        return sum(c for c, _ in self.run_counts.values())

    @property
    def total_attempts(self) -> int:
        return sum(n for _, n in self.run_counts.values())

    @property
    def per_run_pass1(self) -> list[float]:
        return [
            stats.pass_at_k(n, c, 1) for _, (c, n) in sorted(self.run_counts.items())
        ]

    @property
    def average_pass1(self) -> float | None:
        if not self.complete:
            return None
        rates = self.per_run_pass1
        return sum(rates) / len(rates)


def summarize(source) -> list[CellSummary]:
    """Summarize a results directory or a list of records into cells.

    A cell is complete when its run indices are contiguous from 1 and every
    run holds the same number of attempts; incomplete cells are flagged and
    excluded from averaging.
    """
    records = source if isinstance(source, list) else load_records(source)
    cells: dict[tuple[str, str, Strategy], dict[int, list[AttemptRecord]]] = {}
    for record in records:
        cell = cells.setdefault(
            (record.dataset_version, record.model_tag, record.strategy), {}
        )
        cell.setdefault(record.run_index, []).append(record)
    summaries: list[CellSummary] = []
    for (version, model_tag, strategy), runs in sorted(
        cells.items(), key=lambda item: (item[0][0], item[0][1], item[0][2].value)
    ):
        run_counts = {
            run: (sum(1 for r in recs if r.success), len(recs))
            for run, recs in sorted(runs.items())
        }
        sizes = {n for _, n in run_counts.values()}
        complete = (
            len(sizes) == 1 and sorted(run_counts) == list(range(1, len(run_counts) + 1))
        )
        summaries.append(
            CellSummary(
                dataset_version=version,
                model_tag=model_tag,
                strategy=strategy,
                run_counts=run_counts,
                complete=complete,
            )
        )
    return summaries


def _record_sort_key(record: AttemptRecord):
    return (
        record.dataset_version,
        record.model_tag,
        record.strategy.value,
        record.entry_id,
        record.run_index,
    )


def export_csv(items, path: str | Path) -> None:
    """Write attempt records (or cell summaries) as CSV, deterministically.

    Exporting the same records again yields a byte-identical file.
    """
    items = list(items)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if items and isinstance(items[0], CellSummary):
        _export_summaries(items, path)
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for record in sorted(items, key=_record_sort_key):
            writer.writerow(
                [
                    record.dataset_version,
                    record.entry_id,
                    record.model_tag,
                    record.strategy.value,
                    record.run_index,
                    "true" if record.success else "false",
                    record.failure_cause.csv_name if record.failure_cause else "",
                    record.detail,
                    record.duration_ms,
                    "" if record.cache_hit is None else ("true" if record.cache_hit else "false"),
                ]
            )


def _export_summaries(summaries: list[CellSummary], path: Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            ["dataset_version", "model_tag", "strategy", "runs", "attempts",
             "successes", "per_run_pass1", "avg_pass1", "complete"]
        )
        for s in sorted(summaries, key=lambda s: (s.dataset_version, s.model_tag, s.strategy.value)):
            avg = s.average_pass1
            writer.writerow(
                [
                    s.dataset_version,
                    s.model_tag,
                    s.strategy.value,
                    len(s.run_counts),
                    s.total_attempts,
                    s.total_successes,
                    ";".join(f"{rate:.7f}" for rate in s.per_run_pass1),
                    "" if avg is None else f"{avg:.7f}",
                    "true" if s.complete else "false",
                ]
            )


@dataclass(slots=True, frozen=True)
class FailureRow:
    cause: FailureCause
    count: int
    percent: float


@dataclass(slots=True)
class FailureReport:
    strategy: Strategy | None
    total_attempts: int
    total_failures: int
    rows: list[FailureRow]


def failure_report(source, strategy: Strategy | None = None) -> FailureReport:
    """Histogram of failure causes, most frequent first, over failed attempts."""
    records = source if isinstance(source, list) else load_records(source)
    if strategy is not None:
        records = [r for r in records if r.strategy is strategy]
    failures = [r for r in records if not r.success and r.failure_cause is not None]
    counts: dict[FailureCause, int] = {}
    for record in failures:
        counts[record.failure_cause] = counts.get(record.failure_cause, 0) + 1
    total = len(failures)
    rows = [
        FailureRow(cause, count, 100.0 * count / total if total else 0.0)
        for cause, count in sorted(counts.items(), key=lambda kv: (-kv[1], kv[0].value))
    ]
    return FailureReport(
        strategy=strategy,
        total_attempts=len(records),
        total_failures=total,
        rows=rows,
    )
