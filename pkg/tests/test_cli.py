import io
import json
from contextlib import redirect_stderr, redirect_stdout
from pathlib import Path

import pytest

from interoplab.cli import main
from interoplab.stats import TSV_HEADER


def run_cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        code = main(list(argv))
    return code, out.getvalue(), err.getvalue()


@pytest.fixture(scope="module")
def cli_corpus(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli-corpus")
    code, out, _ = run_cli(
        "gen-dataset", "--count", "5", "--seed", "9", "--version", "v2",
        "--out", str(root / "v2"),
    )
    assert code == 0
    assert "5 entry pairs" in out
    return root / "v2"


def test_usage_errors_exit_1():
    code, _, err = run_cli("no-such-command")
    assert code == 1
    code, _, err = run_cli("run", "--dataset", "x")  # missing required --out
    assert code == 1
    assert "usage" in err.lower() or err


def test_no_arguments_is_a_usage_error():
    code, _, _ = run_cli()
    assert code == 1


def test_gen_and_validate_round_trip(cli_corpus):
    files = list(Path(cli_corpus).glob("*.txt"))
    assert len(files) == 11  # 5 inputs + 5 expected + target
    code, out, _ = run_cli("validate-dataset", "--dataset", str(cli_corpus))
    assert code == 0
    assert out.strip().endswith("5/5 entries valid (v2)")


def test_validate_flags_corruption_with_exit_2(cli_corpus, tmp_path):
    import shutil

    broken = tmp_path / "broken"
    shutil.copytree(cli_corpus, broken)
    victim = sorted(broken.glob("*.expected.txt"))[0]
    victim.write_text(victim.read_text().replace("Feature", "Banana"))
    code, out, _ = run_cli("validate-dataset", "--dataset", str(broken))
    assert code == 2
    assert "FAIL" in out
    assert "4/5 entries valid" in out


def test_execution_errors_exit_2(tmp_path):
    code, _, err = run_cli("validate-dataset", "--dataset", str(tmp_path / "absent"))
    assert code == 2
    assert err.strip()  # diagnostic on stderr


def test_run_analyze_compare_failures_flow(cli_corpus, tmp_path):
    results = tmp_path / "results"
    code, out, _ = run_cli(
        "run",
        "--dataset", str(cli_corpus),
        "--out", str(results),
        "--backend-kind", "oracle",
        "--model", "oracle:v1",
        "--model", "oracle:v2",
        "--runs", "2",
    )
    assert code == 0
    assert "wrote 20 new attempt records" in out
    assert "v2:oracle:v1:direct: pass@1 1.0000000" in out

    # resume: nothing new to do
    code, out, _ = run_cli(
        "run",
        "--dataset", str(cli_corpus),
        "--out", str(results),
        "--backend-kind", "oracle",
        "--model", "oracle:v1",
        "--model", "oracle:v2",
        "--runs", "2",
    )
    assert code == 0
    assert "wrote 0 new attempt records" in out

    csv_path = tmp_path / "records.csv"
    code, out, _ = run_cli(
        "analyze", "--results", str(results), "--csv", str(csv_path)
    )
    assert code == 0
    table = out.splitlines()
    assert table[0].startswith("dataset_version\tmodel_tag\tstrategy")
    assert len(table) == 1 + 2 + 1  # header + two cells + export note
    assert csv_path.read_text().splitlines()[0] == (
        "dataset_version,entry_id,model_tag,strategy,run,"
        "success,failure_cause,detail,duration_ms,cache_hit"
    )

    # model tags containing ':' survive cell addressing
    code, out, _ = run_cli(
        "compare",
        "--results", str(results),
        "--a", "v2:oracle:v1:direct",
        "--b", "v2:oracle:v2:direct",
    )
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == TSV_HEADER
    fields = lines[1].split("\t")
    assert fields[0] == "v2:oracle:v1:direct vs v2:oracle:v2:direct"
    assert fields[2] == "1"  # identical cells: p = 1
    assert fields[5] == "false"

    code, out, _ = run_cli("failures", "--results", str(results))
    assert code == 0
    assert out.splitlines()[0] == "failure_cause\tcount\tpercent"
    assert "# 0 failures over 20 attempts" in out


def test_compare_unknown_cell_is_an_execution_error(cli_corpus, tmp_path):
    results = tmp_path / "results"
    run_cli(
        "run", "--dataset", str(cli_corpus), "--out", str(results),
        "--backend-kind", "oracle", "--runs", "1",
    )
    code, _, err = run_cli(
        "compare", "--results", str(results),
        "--a", "v2:oracle:direct", "--b", "v9:nobody:direct",
    )
    assert code == 2
    assert "v9:nobody:direct" in err


def test_noisy_run_reports_failures(cli_corpus, tmp_path):
    results = tmp_path / "noisy-results"
    code, out, _ = run_cli(
        "run",
        "--dataset", str(cli_corpus),
        "--out", str(results),
        "--backend-kind", "noisy",
        "--error-rate", "0.6",
        "--seed", "5",
        "--runs", "3",
    )
    assert code == 0
    code, out, _ = run_cli("failures", "--results", str(results))
    assert code == 0
    body = out.splitlines()
    assert body[0] == "failure_cause\tcount\tpercent"
    assert len(body) > 2  # at least one cause row plus the footer
    assert body[-1].startswith("#")


def test_run_with_custom_prompt_dir(cli_corpus, tmp_path):
    prompt_dir = tmp_path / "prompts"
    prompt_dir.mkdir()
    (prompt_dir / "direct.txt").write_text(
        "Convert now.\nSOURCE:\n{INPUT}\nSHAPE:\n{TARGET_EXAMPLE}\nJSON only."
    )
    results = tmp_path / "results"
    code, out, _ = run_cli(
        "run",
        "--dataset", str(cli_corpus),
        "--out", str(results),
        "--backend-kind", "oracle",
        "--prompt-dir", str(prompt_dir),
        "--runs", "1",
    )
    assert code == 0
    records = [
        json.loads(line)
        for line in (results / "v2__oracle__direct.jsonl").read_text().splitlines()
    ]
    assert all(r["success"] for r in records)  # oracle matches on embedded input


def test_gen_dataset_rejects_bad_count(tmp_path):
    code, _, err = run_cli(
        "gen-dataset", "--count", "0", "--version", "v1", "--out", str(tmp_path / "x")
    )
    assert code == 2
    assert "count" in err
