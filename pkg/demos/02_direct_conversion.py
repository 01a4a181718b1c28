"""
The direct conversion strategy
==============================

DIRECT asks a language model to emit the converted document itself: the
prompt carries the input document plus one example of the target shape, and
the reply is mined for JSON, parsed, and compared against the expectation.

This demo uses the built-in backends, so it runs without any model server:
the "oracle" backend answers perfectly, and a canned backend shows what a
wrong answer looks like when it is classified.
"""

import tempfile
from pathlib import Path

from interoplab import (
    BackendConfig,
    ConversionTask,
    DatasetVersion,
    Strategy,
    build_backend,
    convert_direct,
    generate_dataset,
    synthesize_boundaries,
)
from interoplab.llmclient import Backend, CompletionResult, StopReason

# ---------------------------------------------------------------------------
# Build a small corpus to convert.
# ---------------------------------------------------------------------------

boundaries = synthesize_boundaries(count=4, seed=7)
root = Path(tempfile.mkdtemp(prefix="direct-demo-"))
manifest = generate_dataset(boundaries[:-1], boundaries[-1], DatasetVersion.V3, root)

entry = manifest.entries[0]
task = ConversionTask(
    input_text=entry.input_text,
    target_example=manifest.target_text,
    entry_id=entry.prefix,
    expected_text=entry.expected_text,
)

# ---------------------------------------------------------------------------
# A perfect backend: the attempt succeeds and the output is the converted
# document.
# ---------------------------------------------------------------------------

oracle = build_backend(
    BackendConfig(kind="oracle"), manifest=manifest, strategy=Strategy.DIRECT
)
record, output = convert_direct(task, oracle)
print(f"oracle attempt   : success={record.success} in {record.duration_ms} ms")
print(f"output (1 line)  : {output.splitlines()[2].strip()}")

# ---------------------------------------------------------------------------
# A flawed backend: chatty framing is stripped; a value error is caught by
# the comparison and lands in the failure taxonomy as DATA_MISMATCH, with the
# first differing path in the detail.
# ---------------------------------------------------------------------------


class OffByOneBackend(Backend):
    def __init__(self):
        super().__init__("off-by-one")

    def _complete(self, prompt):
        wrong = entry.expected_text.replace('"type": "Feature"', '"type": "Banana"', 1)
        return CompletionResult(
            text=f"Sure, here is the conversion:\n{wrong}\nHope this helps!",
            stop_reason=StopReason.DONE,
        )


record, output = convert_direct(task, OffByOneBackend())
print(f"\nflawed attempt   : success={record.success}")
print(f"failure cause    : {record.failure_cause.csv_name}")
print(f"detail           : {record.detail}")

# ---------------------------------------------------------------------------
# A truncated reply fails earlier, at the parsing stage.
# ---------------------------------------------------------------------------


class TruncatingBackend(Backend):
    def __init__(self):
        super().__init__("truncating")

    def _complete(self, prompt):
        half = entry.expected_text[: len(entry.expected_text) // 2]
        return CompletionResult(text=half, stop_reason=StopReason.DONE)


record, _ = convert_direct(task, TruncatingBackend())
print(f"\ntruncated attempt: success={record.success}")
print(f"failure cause    : {record.failure_cause.csv_name}")
