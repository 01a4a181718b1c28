"""Prompt construction, reply mining, and the two conversion strategies.

direct: prompt the model for the converted document itself.
codegen: prompt the model for a conversion module, run it in the sandbox, and
reuse validated modules across inputs that share a schema fingerprint.
"""

from __future__ import annotations

import hashlib
import re
import threading
import time
from dataclasses import dataclass
from decimal import Decimal

from . import jsonutil
from .core import (
    AttemptRecord,
    ClassifiedError,
    ConversionTask,
    DataMismatchError,
    EmptyDataError,
    FailureCause,
    PipelineStage,
    Strategy,
    classify_failure,
    detail_text,
)
from .equivalence import canonicalize, first_difference
from .llmclient import Backend, LlmLengthStopError, StopReason
from .sandbox import ExecStatus, ExecutionResult, Sandbox

INPUT_SLOT = "{INPUT}"
TARGET_SLOT = "{TARGET_EXAMPLE}"

_SLOT_RE = re.compile(r"(\{INPUT\}|\{TARGET_EXAMPLE\})")
_FENCE_RE = re.compile(r"```[A-Za-z0-9_+-]*[ \t]*\r?\n(.*?)```", re.DOTALL)


class CodeCompileError(ClassifiedError):
    cause = FailureCause.CODE_COMPILE


class CodeExecError(ClassifiedError):
    cause = FailureCause.CODE_EXECUTE


@dataclass(slots=True, frozen=True)
class PromptTemplate:
    """Prompt body with one input slot and one target-example slot."""

    body: str
    version_tag: str

    def __post_init__(self):
        for slot in (INPUT_SLOT, TARGET_SLOT):
            if self.body.count(slot) != 1:
                raise ValueError(f"template must contain {slot} exactly once")


DIRECT_TEMPLATE = PromptTemplate(
    body=(
        "Consider the data below:\n\n"
        "```\n{INPUT}\n```\n\n"
        "Convert it into the following representation:\n\n"
        "```\n{TARGET_EXAMPLE}\n```\n\n"
        "Reply with the converted document only: a single JSON document and no"
        " other text.\n"
    ),
    version_tag="direct-v1",
)

CODEGEN_TEMPLATE = PromptTemplate(
    body=(
        "Consider the data below:\n\n"
        "```\n{INPUT}\n```\n\n"
        "Write a Python 3 module that converts documents of that form into the"
        " following representation:\n\n"
        "```\n{TARGET_EXAMPLE}\n```\n\n"
        "The module must define a function named convert that takes the raw"
        " input text as its only argument and returns the converted document"
        " as text. Use only the Python standard library. Reply with a single"
        " fenced code block and no other text.\n"
    ),
    version_tag="codegen-v1",
)

DEFAULT_TEMPLATES = {
    Strategy.DIRECT: DIRECT_TEMPLATE,
    Strategy.CODEGEN: CODEGEN_TEMPLATE,
}


def build_prompt(template: PromptTemplate, task: ConversionTask) -> str:
    """Fill both slots in a single pass over the template.

    Slot-shaped text inside the payloads stays literal: substitution never
    rescans inserted content.
    """
    values = {INPUT_SLOT: task.input_text, TARGET_SLOT: task.target_example}
    return "".join(values.get(part, part) for part in _SLOT_RE.split(template.body))


def _parses_as_json(text: str) -> bool:
    try:
        jsonutil.loads(text)
        return True
    except ValueError:
        return False


def _balanced_object_span(text: str) -> str | None:
    """Substring from the first '{' to its balanced closing brace, string-aware."""
    start = text.find("{")
    if start < 0:
        return None
    depth = 0
    in_string = False
    escaped = False
    for i in range(start, len(text)):
        c = text[i]
        if in_string:
            if escaped:
                escaped = False
            elif c == "\\":
                escaped = True
            elif c == '"':
                in_string = False
            continue
        if c == '"':
            in_string = True
        elif c == "{":
            depth += 1
        elif c == "}":
            depth -= 1
            if depth == 0:
                return text[start : i + 1]
    return None


def extract_json(response: str) -> str:
    """Mine the document out of a possibly chatty reply.

    Preference order: first fenced block when it parses as JSON, then the
    first balanced {...} span, then the trimmed reply itself.
    """
    fence = _FENCE_RE.search(response)
    if fence:
        candidate = fence.group(1).strip()
        if candidate and _parses_as_json(candidate):
            return candidate
    span = _balanced_object_span(response)
    if span is not None:
        return span
    return response.strip()


class NoCodeError(ClassifiedError):
    cause = FailureCause.CODE_COMPILE


def extract_code(response: str) -> str:
    """Pull module source out of a reply: first fence, else a code-looking tail."""
    fence = _FENCE_RE.search(response)
    if fence:
        code = fence.group(1).strip()
        if code:
            return code
    lines = response.splitlines()
    for i, line in enumerate(lines):
        if line.startswith(("import ", "from ", "def ")):
            code = "\n".join(lines[i:]).strip()
            if code:
                return code
            break
    raise NoCodeError("no code found")


def structural_paths(text: str) -> frozenset[str]:
    """Schema signature of a JSON text: typed leaf paths, arrays collapsed to []."""
    doc = jsonutil.loads(text)
    paths: set[str] = set()
    _walk_paths(doc, "", paths)
    return frozenset(paths)


def _walk_paths(node, path: str, paths: set[str]) -> None:
    if isinstance(node, dict):
        if not node:
            paths.add(f"{path or '$'}:object")
        for key, value in node.items():
            _walk_paths(value, f"{path}.{key}" if path else str(key), paths)
    elif isinstance(node, list):
        if not node:
            paths.add(f"{path or '$'}:array")
        for value in node:
            _walk_paths(value, path + "[]", paths)
    else:
        paths.add(f"{path or '$'}:{_leaf_label(node)}")


def _leaf_label(value) -> str:
    if isinstance(value, bool):
        return "boolean"
    if value is None:
        return "null"
    if isinstance(value, Decimal):
        return "number"
    return "string"


def _structural_head(text: str) -> str:
    compact = "".join(text.split())
    return compact[:64]


def fingerprint_schema(input_text: str, target_text: str, version_tag: str) -> str:
    """Stable fingerprint of the (input schema, target schema, template) triple.

    Key order and whitespace never change it; non-JSON sides degrade to a hash
    of their first 64 structural characters.
    """
    parts = [f"template={version_tag}"]
    for label, text in (("input", input_text), ("target", target_text)):
        try:
            signature = ";".join(sorted(structural_paths(text)))
        except ValueError:
            signature = f"raw:{_structural_head(text)}"
        parts.append(f"{label}={signature}")
    return hashlib.sha256("\n".join(parts).encode("utf-8")).hexdigest()


@dataclass(slots=True, frozen=True)
class ConversionModule:
    fingerprint: str
    source: str
    validated: bool = False


class ModuleCache:
    """Fingerprint-keyed store of validated modules; entries never mutate."""

    def __init__(self):
        self._modules: dict[str, ConversionModule] = {}
        self._lock = threading.Lock()

    def get(self, fingerprint: str) -> ConversionModule | None:
        with self._lock:
            return self._modules.get(fingerprint)

    def put(self, module: ConversionModule) -> None:
        with self._lock:
            self._modules.setdefault(module.fingerprint, module)

    def __len__(self) -> int:
        with self._lock:
            return len(self._modules)


@dataclass(slots=True, frozen=True)
class AttemptMeta:
    """Cell coordinates the harness stamps onto records; gateway callers skip it."""

    dataset_version: str = ""
    run_index: int = 1


def _finish_record(
    task: ConversionTask,
    backend: Backend,
    strategy: Strategy,
    meta: AttemptMeta,
    start: float,
    success: bool,
    cause: FailureCause | None,
    detail: str,
    cache_hit: bool | None,
) -> AttemptRecord:
    return AttemptRecord(
        dataset_version=meta.dataset_version,
        entry_id=task.entry_id,
        model_tag=backend.model_tag,
        strategy=strategy,
        run_index=meta.run_index,
        success=success,
        failure_cause=cause,
        detail=detail,
        duration_ms=int((time.perf_counter() - start) * 1000),
        cache_hit=cache_hit,
    )


def convert_direct(
    task: ConversionTask,
    backend: Backend,
    template: PromptTemplate = DIRECT_TEMPLATE,
    *,
    meta: AttemptMeta = AttemptMeta(),
    tolerance: Decimal | None = None,
) -> tuple[AttemptRecord, str | None]:
    """One direct-strategy attempt; returns (record, output text or None)."""
    start = time.perf_counter()
    stage = PipelineStage.LLM_CALL
    try:
        prompt = build_prompt(template, task)
        result = backend.complete(prompt)
        if result.stop_reason is StopReason.LENGTH:
            raise LlmLengthStopError("completion stopped abnormally: length")
        stage = PipelineStage.EXTRACTION
        doc = extract_json(result.text)
        if not doc.strip():
            raise EmptyDataError("empty document")
        stage = PipelineStage.PARSE
        canonical = canonicalize(doc)
        stage = PipelineStage.COMPARE
        if task.expected_text is not None:
            diff = first_difference(canonical, canonicalize(task.expected_text), tolerance)
            if diff is not None:
                raise DataMismatchError(f"mismatch at {diff}")
        record = _finish_record(
            task, backend, Strategy.DIRECT, meta, start, True, None, "", None
        )
        return record, doc
    except Exception as err:
        cause = classify_failure(stage, err)
        record = _finish_record(
            task, backend, Strategy.DIRECT, meta, start, False, cause, detail_text(err), None
        )
        return record, None


def _raise_for_execution(execution: ExecutionResult) -> None:
    if execution.status is ExecStatus.OK:
        return
    detail = execution.stderr.strip() or execution.status.value
    if execution.status in (ExecStatus.COMPILE_ERROR, ExecStatus.MISSING_CONVERT):
        # deploy-side contract failures, distinct from crashes inside convert()
        raise CodeCompileError(f"{execution.status.value}: {detail}")
    raise CodeExecError(f"{execution.status.value}: {detail}")


def convert_codegen(
    task: ConversionTask,
    backend: Backend,
    sandbox: Sandbox,
    template: PromptTemplate = CODEGEN_TEMPLATE,
    *,
    meta: AttemptMeta = AttemptMeta(),
    tolerance: Decimal | None = None,
    cache: ModuleCache | None = None,
) -> tuple[AttemptRecord, str | None]:
    """One codegen-strategy attempt; returns (record, output text or None).

    With a cache, a fingerprint hit skips the model call entirely and a module
    is stored only after its output validates.
    """
    start = time.perf_counter()
    stage = PipelineStage.LLM_CALL
    cache_hit = False
    try:
        fingerprint = fingerprint_schema(
            task.input_text, task.target_example, template.version_tag
        )
        module = cache.get(fingerprint) if cache is not None else None
        if module is not None:
            cache_hit = True
        else:
            prompt = build_prompt(template, task)
            result = backend.complete(prompt)
            if result.stop_reason is StopReason.LENGTH:
                raise LlmLengthStopError("completion stopped abnormally: length")
            stage = PipelineStage.EXTRACTION
            source = extract_code(result.text)
            stage = PipelineStage.COMPILE
            try:
                compile(source, "<generated>", "exec")
            except (SyntaxError, ValueError) as err:
                raise CodeCompileError(f"syntax error: {err}") from err
            module = ConversionModule(fingerprint=fingerprint, source=source)
        stage = PipelineStage.EXECUTE
        execution = sandbox.execute(module.source, task.input_text)
        _raise_for_execution(execution)
        stage = PipelineStage.EXTRACTION
        doc = extract_json(execution.stdout)
        if not doc.strip():
            raise EmptyDataError("module produced no data")
        stage = PipelineStage.PARSE
        canonical = canonicalize(doc)
        stage = PipelineStage.COMPARE
        if task.expected_text is not None:
            diff = first_difference(canonical, canonicalize(task.expected_text), tolerance)
            if diff is not None:
                raise DataMismatchError(f"mismatch at {diff}")
        else:
            # gateway validation: emitted structure must match the target example
            if structural_paths(doc) != structural_paths(task.target_example):
                raise DataMismatchError("structure differs from target example")
        if cache is not None and not cache_hit:
            cache.put(ConversionModule(fingerprint, module.source, validated=True))
        record = _finish_record(
            task, backend, Strategy.CODEGEN, meta, start, True, None, "", cache_hit
        )
        return record, doc
    except Exception as err:
        cause = classify_failure(stage, err)
        record = _finish_record(
            task,
            backend,
            Strategy.CODEGEN,
            meta,
            start,
            False,
            cause,
            detail_text(err),
            cache_hit,
        )
        return record, None
