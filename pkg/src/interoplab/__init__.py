"""Runtime data interoperability through LLM conversion strategies.

The library converts JSON documents between producer and consumer schemas two
ways: asking a model for the converted document directly, or asking it for a
conversion module that runs sandboxed and is reused across inputs with the
same schema fingerprint.  Around that core sit a synthetic-corpus generator,
pluggable completion backends (HTTP, scripted, oracle, noisy), an evaluation
harness with resumable record logs, a failure taxonomy, and the statistics
needed to compare strategies (pass@k, corrected two-proportion tests, effect
size, power).
"""

from .core import (
    AttemptRecord,
    ClassifiedError,
    ConversionTask,
    DatasetVersion,
    FailureCause,
    PipelineStage,
    RunConfig,
    Strategy,
    classify_failure,
)
from .datasetgen import (
    DatasetEntry,
    DatasetManifest,
    generate_dataset,
    load_dataset,
    synthesize_boundaries,
    validate_dataset,
)
from .equivalence import JsonSyntaxError, canonicalize, equivalent, first_difference
from .geoconv import (
    ACRES_PER_HECTARE,
    EARTH_RADIUS_M,
    FieldBoundary,
    hectares_to_acres,
    reference_convert,
    ring_area_ha,
)
from .harness import (
    CellSummary,
    ExperimentGrid,
    export_csv,
    failure_report,
    load_records,
    run_grid,
    summarize,
)
from .llmclient import (
    NOISE_EXPECTED_CAUSE,
    NOISE_MODES,
    Backend,
    BackendConfig,
    BackendError,
    CompletionResult,
    HttpBackend,
    NoisyBackend,
    OracleBackend,
    ScriptedBackend,
    StopReason,
    build_backend,
)
from .sandbox import (
    ExecStatus,
    ExecutionResult,
    Sandbox,
    SandboxLimits,
    default_runner_cmd,
    execute_module,
)
from .stats import (
    TSV_HEADER,
    ComparisonResult,
    cohens_h,
    compare_cells,
    compare_counts,
    compare_runs,
    format_p_value,
    pass_at_k,
    power_two_prop,
    two_prop_test,
)
from .strategies import (
    AttemptMeta,
    CODEGEN_TEMPLATE,
    DIRECT_TEMPLATE,
    ConversionModule,
    ModuleCache,
    PromptTemplate,
    build_prompt,
    convert_codegen,
    convert_direct,
    extract_code,
    extract_json,
    fingerprint_schema,
)

__version__ = "0.1.0"

__all__ = [
    "ACRES_PER_HECTARE",
    "AttemptMeta",
    "AttemptRecord",
    "Backend",
    "BackendConfig",
    "BackendError",
    "CODEGEN_TEMPLATE",
    "CellSummary",
    "ClassifiedError",
    "ComparisonResult",
    "CompletionResult",
    "ConversionModule",
    "ConversionTask",
    "DIRECT_TEMPLATE",
    "DatasetEntry",
    "DatasetManifest",
    "DatasetVersion",
    "EARTH_RADIUS_M",
    "ExecStatus",
    "ExecutionResult",
    "ExperimentGrid",
    "FailureCause",
    "FieldBoundary",
    "HttpBackend",
    "JsonSyntaxError",
    "ModuleCache",
    "NOISE_EXPECTED_CAUSE",
    "NOISE_MODES",
    "NoisyBackend",
    "OracleBackend",
    "PipelineStage",
    "PromptTemplate",
    "RunConfig",
    "Sandbox",
    "SandboxLimits",
    "ScriptedBackend",
    "StopReason",
    "Strategy",
    "TSV_HEADER",
    "build_backend",
    "build_prompt",
    "canonicalize",
    "classify_failure",
    "cohens_h",
    "compare_cells",
    "compare_counts",
    "compare_runs",
    "convert_codegen",
    "convert_direct",
    "default_runner_cmd",
    "equivalent",
    "execute_module",
    "export_csv",
    "extract_code",
    "extract_json",
    "failure_report",
    "fingerprint_schema",
    "first_difference",
    "format_p_value",
    "generate_dataset",
    "hectares_to_acres",
    "load_dataset",
    "load_records",
    "pass_at_k",
    "power_two_prop",
    "reference_convert",
    "ring_area_ha",
    "run_grid",
    "summarize",
    "synthesize_boundaries",
    "two_prop_test",
    "validate_dataset",
]
