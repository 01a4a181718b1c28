import pytest

from interoplab import DatasetVersion, FailureCause, PipelineStage, RunConfig, classify_failure
from interoplab.core import DETAIL_LIMIT, detail_text
from interoplab.equivalence import JsonSyntaxError
from interoplab.llmclient import BackendError, BackendTimeout, LlmLengthStopError
from interoplab.strategies import CodeCompileError, CodeExecError, NoCodeError


def test_stage_defaults_cover_every_stage():
    for stage in PipelineStage:
        assert isinstance(classify_failure(stage, "anything"), FailureCause)


@pytest.mark.parametrize(
    "stage,error,expected",
    [
        (PipelineStage.LLM_CALL, LlmLengthStopError("completion stopped abnormally: length"),
         FailureCause.LLM_LENGTH_STOP),
        (PipelineStage.LLM_CALL, BackendTimeout("request timed out"), FailureCause.HTTP_TIMEOUT),
        (PipelineStage.LLM_CALL, BackendError("connection refused"), FailureCause.LLM_RUNTIME),
        (PipelineStage.LLM_CALL, "socket closed", FailureCause.LLM_RUNTIME),
        (PipelineStage.EXTRACTION, "empty document", FailureCause.EMPTY_DATA),
        (PipelineStage.EXTRACTION, NoCodeError("no code found"), FailureCause.CODE_COMPILE),
        (PipelineStage.COMPILE, CodeCompileError("syntax error"), FailureCause.CODE_COMPILE),
        (PipelineStage.EXECUTE, CodeExecError("boom"), FailureCause.CODE_EXECUTE),
        (PipelineStage.EXECUTE, "unexpected", FailureCause.CODE_EXECUTE),
        (PipelineStage.PARSE, JsonSyntaxError("unbalanced brace", offset=14),
         FailureCause.JSON_SYNTAX),
        (PipelineStage.COMPARE, "values differ at features[0]", FailureCause.DATA_MISMATCH),
    ],
)
def test_classification_table(stage, error, expected):
    assert classify_failure(stage, error) is expected


def test_csv_names_are_pinned():
    assert {c.csv_name for c in FailureCause} == {
        "LLM_RUNTIME", "LLM_LENGTH_STOP", "HTTP_TIMEOUT", "JSON_SYNTAX",
        "DATA_MISMATCH", "CODE_COMPILE", "CODE_EXECUTE", "EMPTY_DATA",
    }


def test_detail_text_flattens_and_truncates():
    assert detail_text("a\n b\t\tc") == "a b c"
    long = detail_text("x" * (DETAIL_LIMIT + 500))
    assert len(long) == DETAIL_LIMIT


def test_version_property_keys():
    assert DatasetVersion.V1.property_keys == ()
    assert DatasetVersion.V2.property_keys == ("id",)
    assert DatasetVersion.V3.property_keys == ("id", "area_ha")
    assert DatasetVersion.V4.property_keys == ("id", "area_acres")
    assert DatasetVersion.from_property_keys(["area_acres", "id"]) is DatasetVersion.V4
    with pytest.raises(ValueError):
        DatasetVersion.from_property_keys(["id", "bogus"])


def test_run_config_validation():
    cfg = RunConfig()
    assert (cfg.runs, cfg.temperature, cfg.k, cfg.alpha, cfg.beta) == (3, 0.9, 1, 0.05, 0.2)
    with pytest.raises(ValueError):
        RunConfig(runs=0)
    with pytest.raises(ValueError):
        RunConfig(runs=2, k=3)
    with pytest.raises(ValueError):
        RunConfig(alpha=0.0)
    with pytest.raises(ValueError):
        RunConfig(jobs=0)
