import json
from pathlib import Path

import pytest

from interoplab.core import (
    AttemptRecord,
    DatasetVersion,
    FailureCause,
    RunConfig,
    Strategy,
)
from interoplab.harness import (
    CSV_HEADER,
    CellSummary,
    ExperimentGrid,
    cell_filename,
    export_csv,
    failure_report,
    load_records,
    record_from_json,
    record_to_json,
    run_grid,
    summarize,
)
from interoplab.llmclient import BackendConfig, build_backend


def oracle_grid(manifests, results_dir, runs=2, strategies=(Strategy.DIRECT,)):
    return ExperimentGrid(
        datasets=list(manifests),
        strategies=list(strategies),
        backends=[("oracle", BackendConfig(kind="oracle"))],
        runs=runs,
        results_dir=Path(results_dir),
    )


def test_grid_validation_and_size(small_corpora, tmp_path):
    grid = oracle_grid(small_corpora.values(), tmp_path, runs=3)
    assert grid.total_attempts() == 4 * 6 * 1 * 3
    with pytest.raises(ValueError):
        ExperimentGrid([], [Strategy.DIRECT], [("m", BackendConfig())], 1, tmp_path)
    with pytest.raises(ValueError):
        oracle_grid(small_corpora.values(), tmp_path, runs=0)


def test_cell_filename_sanitizes_tags():
    name = cell_filename("v1", "qwen2.5:32b", Strategy.DIRECT)
    assert name == "v1__qwen2.5-32b__direct.jsonl"
    assert cell_filename("v2", "m/x y", Strategy.CODEGEN) == "v2__m-x-y__codegen.jsonl"


def test_record_json_round_trip():
    record = AttemptRecord(
        dataset_version="v3",
        entry_id="001-abcd1234",
        model_tag="m:1",
        strategy=Strategy.CODEGEN,
        run_index=2,
        success=False,
        failure_cause=FailureCause.CODE_EXECUTE,
        detail="exit 4",
        duration_ms=17,
        cache_hit=True,
    )
    doc = record_to_json(record)
    assert doc["run"] == 2
    assert doc["failure_cause"] == "CODE_EXECUTE"
    assert record_from_json(doc) == record
    ok = AttemptRecord(
        dataset_version="v1",
        entry_id="e",
        model_tag="m",
        strategy=Strategy.DIRECT,
        run_index=1,
        success=True,
        failure_cause=None,
        detail="",
        duration_ms=3,
        cache_hit=None,
    )
    assert record_from_json(record_to_json(ok)) == ok


def test_run_grid_writes_one_jsonl_per_cell(small_corpora, tmp_path):
    manifests = [small_corpora[DatasetVersion.V1], small_corpora[DatasetVersion.V2]]
    grid = oracle_grid(manifests, tmp_path / "results", runs=2)
    records = run_grid(grid, RunConfig(runs=2))
    assert len(records) == 2 * 6 * 2
    files = sorted(p.name for p in (tmp_path / "results").glob("*.jsonl"))
    assert files == ["v1__oracle__direct.jsonl", "v2__oracle__direct.jsonl"]
    lines = (tmp_path / "results" / files[0]).read_text().splitlines()
    assert len(lines) == 12
    docs = [json.loads(line) for line in lines]
    assert {d["run"] for d in docs} == {1, 2}
    assert all(d["success"] for d in docs)
    assert all(d["strategy"] == "direct" for d in docs)
    assert all(d["cache_hit"] is None for d in docs)
    assert all(d["duration_ms"] >= 0 for d in docs)


def test_run_grid_resumes_without_duplicating_work(small_corpora, tmp_path):
    manifest = small_corpora[DatasetVersion.V1]
    grid = oracle_grid([manifest], tmp_path / "results", runs=2)
    first = run_grid(grid, RunConfig(runs=2))
    assert len(first) == 12
    again = run_grid(grid, RunConfig(runs=2))
    assert again == []  # everything already on disk
    assert len(load_records(tmp_path / "results")) == 12


def test_run_grid_completes_a_partial_cell(small_corpora, tmp_path):
    manifest = small_corpora[DatasetVersion.V1]
    results = tmp_path / "results"
    grid = oracle_grid([manifest], results, runs=2)
    run_grid(grid, RunConfig(runs=2))
    path = results / "v1__oracle__direct.jsonl"
    lines = path.read_text().splitlines()
    path.write_text("\n".join(lines[:5]) + "\n")  # drop 7 of 12 attempts
    added = run_grid(grid, RunConfig(runs=2))
    assert len(added) == 7
    records = load_records(results)
    assert len(records) == 12
    keys = {r.key() for r in records}
    assert len(keys) == 12  # no duplicates after the resume


def test_run_grid_is_deterministic_for_a_seeded_backend(small_corpora, tmp_path):
    manifest = small_corpora[DatasetVersion.V2]
    outcomes = []
    for name in ("one", "two"):
        grid = ExperimentGrid(
            datasets=[manifest],
            strategies=[Strategy.DIRECT],
            backends=[
                ("noisy", BackendConfig(kind="noisy", seed=7, error_rate=0.5))
            ],
            runs=2,
            results_dir=tmp_path / name,
        )
        records = run_grid(grid, RunConfig(runs=2))
        outcomes.append(
            [(r.key(), r.success, r.failure_cause, r.detail) for r in records]
        )
    assert outcomes[0] == outcomes[1]


def test_run_grid_parallel_jobs_match_serial(small_corpora, tmp_path):
    manifest = small_corpora[DatasetVersion.V3]

    def run(jobs, name):
        grid = ExperimentGrid(
            datasets=[manifest],
            strategies=[Strategy.DIRECT],
            backends=[("noisy", BackendConfig(kind="noisy", seed=11, error_rate=0.4))],
            runs=2,
            results_dir=tmp_path / name,
        )
        run_grid(grid, RunConfig(runs=2, jobs=jobs))
        return {
            (r.key()): (r.success, r.failure_cause)
            for r in load_records(tmp_path / name)
        }

    serial = run(1, "serial")
    parallel = run(4, "parallel")
    assert serial == parallel


def test_backend_factory_sees_every_cell(small_corpora, tmp_path):
    manifests = [small_corpora[DatasetVersion.V1], small_corpora[DatasetVersion.V4]]
    seen = []

    def factory(cfg, manifest, strategy):
        backend = build_backend(cfg, manifest=manifest, strategy=strategy)
        seen.append((manifest.version, strategy, backend))
        return backend

    grid = oracle_grid(manifests, tmp_path, runs=1)
    run_grid(grid, RunConfig(runs=1), backend_factory=factory)
    assert [(v, s) for v, s, _ in seen] == [
        (DatasetVersion.V1, Strategy.DIRECT),
        (DatasetVersion.V4, Strategy.DIRECT),
    ]
    assert all(b.calls == 6 for *_, b in seen)  # one call per entry per run


def test_summarize_complete_cell(small_corpora, tmp_path):
    manifest = small_corpora[DatasetVersion.V1]
    grid = oracle_grid([manifest], tmp_path, runs=3)
    run_grid(grid, RunConfig(runs=3))
    summaries = summarize(tmp_path)
    assert len(summaries) == 1
    cell = summaries[0]
    assert isinstance(cell, CellSummary)
    assert cell.label() == "v1:oracle:direct"
    assert cell.complete
    assert cell.run_counts == {1: (6, 6), 2: (6, 6), 3: (6, 6)}
    assert cell.per_run_pass1 == [1.0, 1.0, 1.0]
    assert cell.average_pass1 == 1.0
    assert cell.total_successes == 18
    assert cell.total_attempts == 18


def test_summarize_flags_incomplete_cells(small_corpora, tmp_path):
    manifest = small_corpora[DatasetVersion.V1]
    grid = oracle_grid([manifest], tmp_path, runs=2)
    run_grid(grid, RunConfig(runs=2))
    path = tmp_path / "v1__oracle__direct.jsonl"
    lines = path.read_text().splitlines()
    path.write_text("\n".join(lines[:-1]) + "\n")  # drop one attempt from run 2
    cell = summarize(tmp_path)[0]
    assert not cell.complete
    assert cell.average_pass1 is None
    # gap in the run sequence also breaks completeness
    docs = [json.loads(line) for line in lines]
    run3 = [dict(d, run=3) for d in docs if d["run"] == 1]
    path.write_text(
        "\n".join(json.dumps(d) for d in docs if d["run"] == 1)
        + "\n"
        + "\n".join(json.dumps(d) for d in run3)
        + "\n"
    )
    cell = summarize(tmp_path)[0]
    assert cell.run_counts.keys() == {1, 3}
    assert not cell.complete


def test_export_csv_has_the_exact_contract_header(small_corpora, tmp_path):
    manifest = small_corpora[DatasetVersion.V2]
    grid = oracle_grid([manifest], tmp_path / "r", runs=1)
    run_grid(grid, RunConfig(runs=1))
    out = tmp_path / "records.csv"
    export_csv(load_records(tmp_path / "r"), out)
    text = out.read_text()
    lines = text.splitlines()
    assert lines[0] == ",".join(CSV_HEADER)
    assert lines[0] == (
        "dataset_version,entry_id,model_tag,strategy,run,"
        "success,failure_cause,detail,duration_ms,cache_hit"
    )
    assert len(lines) == 1 + 6
    first = lines[1].split(",")
    assert first[0] == "v2"
    assert first[3] == "direct"
    assert first[5] == "true"
    assert first[6] == ""  # no failure cause on success
    assert first[9] == ""  # cache_hit blank for the direct strategy


def test_export_csv_is_byte_stable(small_corpora, tmp_path):
    manifest = small_corpora[DatasetVersion.V1]
    grid = oracle_grid([manifest], tmp_path / "r", runs=2)
    run_grid(grid, RunConfig(runs=2))
    records = load_records(tmp_path / "r")
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    export_csv(records, a)
    export_csv(list(reversed(records)), b)  # order in must not matter
    assert a.read_bytes() == b.read_bytes()


def test_export_csv_of_summaries(small_corpora, tmp_path):
    manifest = small_corpora[DatasetVersion.V3]
    grid = oracle_grid([manifest], tmp_path / "r", runs=2)
    run_grid(grid, RunConfig(runs=2))
    out = tmp_path / "cells.csv"
    export_csv(summarize(tmp_path / "r"), out)
    lines = out.read_text().splitlines()
    assert lines[0].startswith("dataset_version,model_tag,strategy,")
    assert len(lines) == 2
    assert "1.0000000;1.0000000" in lines[1]


def test_failure_report_orders_by_count(tmp_path, small_corpora):
    manifest = small_corpora[DatasetVersion.V1]
    grid = ExperimentGrid(
        datasets=[manifest],
        strategies=[Strategy.DIRECT],
        backends=[("noisy", BackendConfig(kind="noisy", seed=3, error_rate=0.7))],
        runs=4,
        results_dir=tmp_path,
    )
    run_grid(grid, RunConfig(runs=4))
    report = failure_report(tmp_path)
    assert report.total_attempts == 24
    assert report.total_failures > 0
    counts = [row.count for row in report.rows]
    assert counts == sorted(counts, reverse=True)
    assert sum(counts) == report.total_failures
    for row in report.rows:
        assert row.percent == pytest.approx(100.0 * row.count / report.total_failures)
    direct_only = failure_report(tmp_path, strategy=Strategy.DIRECT)
    assert direct_only.total_failures == report.total_failures
    codegen_only = failure_report(tmp_path, strategy=Strategy.CODEGEN)
    assert codegen_only.total_attempts == 0
