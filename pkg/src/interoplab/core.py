"""Shared domain types: tasks, attempt records, the failure taxonomy, run config."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from decimal import Decimal

DETAIL_LIMIT = 2000


class DatasetVersion(enum.Enum):
    """Target-schema variant; versions differ only in the properties block."""

    V1 = "v1"
    V2 = "v2"
    V3 = "v3"
    V4 = "v4"

    @property
    def property_keys(self) -> tuple[str, ...]:
        return _VERSION_KEYS[self]

    @classmethod
    def from_property_keys(cls, keys) -> "DatasetVersion":
        wanted = tuple(sorted(keys))
        for version, expected in _VERSION_KEYS.items():
            if tuple(sorted(expected)) == wanted:
                return version
        raise ValueError(f"no dataset version has property keys {sorted(keys)!r}")


_VERSION_KEYS = {
    DatasetVersion.V1: (),
    DatasetVersion.V2: ("id",),
    DatasetVersion.V3: ("id", "area_ha"),
    DatasetVersion.V4: ("id", "area_acres"),
}


class Strategy(enum.Enum):
    DIRECT = "direct"
    CODEGEN = "codegen"


class FailureCause(enum.Enum):
    """Terminal failure classes; the value is the exact on-disk spelling."""

    LLM_RUNTIME = "LLM_RUNTIME"
    LLM_LENGTH_STOP = "LLM_LENGTH_STOP"
    HTTP_TIMEOUT = "HTTP_TIMEOUT"
    JSON_SYNTAX = "JSON_SYNTAX"
    DATA_MISMATCH = "DATA_MISMATCH"
    CODE_COMPILE = "CODE_COMPILE"
    CODE_EXECUTE = "CODE_EXECUTE"
    EMPTY_DATA = "EMPTY_DATA"

    @property
    def csv_name(self) -> str:
        return self.value


class PipelineStage(enum.Enum):
    """Where in an attempt a failure surfaced."""

    LLM_CALL = "llm-call"
    EXTRACTION = "extraction"
    COMPILE = "compile"
    EXECUTE = "execute"
    PARSE = "parse"
    COMPARE = "compare"


# Fallback class per stage; typed errors override it with their own cause.
_STAGE_DEFAULTS = {
    PipelineStage.LLM_CALL: FailureCause.LLM_RUNTIME,
    PipelineStage.EXTRACTION: FailureCause.EMPTY_DATA,
    PipelineStage.COMPILE: FailureCause.CODE_COMPILE,
    PipelineStage.EXECUTE: FailureCause.CODE_EXECUTE,
    PipelineStage.PARSE: FailureCause.JSON_SYNTAX,
    PipelineStage.COMPARE: FailureCause.DATA_MISMATCH,
}


class ClassifiedError(Exception):
    """Pipeline error that already knows its failure class."""

    cause: FailureCause | None = None

    def __init__(self, message: str, cause: FailureCause | None = None):
        super().__init__(message)
        if cause is not None:
            self.cause = cause


class EmptyDataError(ClassifiedError):
    cause = FailureCause.EMPTY_DATA


class DataMismatchError(ClassifiedError):
    cause = FailureCause.DATA_MISMATCH


def classify_failure(stage: PipelineStage, raw_error: BaseException | str) -> FailureCause:
    """Map a pipeline stage and raw error onto the failure taxonomy.

    Errors that carry their own cause win; everything else falls back to the
    stage's generic class, so classification is total.
    """
    if isinstance(raw_error, ClassifiedError) and raw_error.cause is not None:
        return raw_error.cause
    return _STAGE_DEFAULTS[stage]


def detail_text(raw: BaseException | str) -> str:
    """Single-line detail string bounded to DETAIL_LIMIT characters."""
    flat = " ".join(str(raw).split())
    return flat[:DETAIL_LIMIT]


@dataclass(slots=True, frozen=True)
class ConversionTask:
    """One document to convert plus the target example shown to the model.

    expected_text is present in harness mode only; gateway-mode callers leave
    it None and success means the pipeline produced a parseable document.
    """

    input_text: str
    target_example: str
    entry_id: str
    expected_text: str | None = None


@dataclass(slots=True)
class AttemptRecord:
    """Outcome of one conversion attempt, addressable within an experiment."""

    dataset_version: str
    entry_id: str
    model_tag: str
    strategy: Strategy
    run_index: int
    success: bool
    failure_cause: FailureCause | None
    detail: str
    duration_ms: int
    cache_hit: bool | None = None  # codegen only; None for direct attempts

    def key(self) -> tuple[str, str, str, str, int]:
        return (
            self.dataset_version,
            self.entry_id,
            self.model_tag,
            self.strategy.value,
            self.run_index,
        )


@dataclass(slots=True)
class RunConfig:
    """Experiment-wide knobs shared by the harness and the CLI."""

    runs: int = 3
    temperature: float = 0.9
    k: int = 1
    alpha: float = 0.05
    beta: float = 0.2
    num_tolerance: Decimal | None = None  # None means exact numeric comparison
    jobs: int = 1

    def __post_init__(self):
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        # one sample per entry per run, so k can never exceed the run count
        if not 1 <= self.k <= self.runs:
            raise ValueError("k must satisfy 1 <= k <= runs")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")
        if self.jobs < 1:
            raise ValueError("jobs must be >= 1")
