"""
The codegen strategy and schema-keyed module reuse
==================================================

CODEGEN asks the model for a conversion *program* instead of a converted
document.  The program runs in a disposable child process (never in the
orchestrator), its output is validated, and - once validated - the module is
cached under a fingerprint of the (input schema, target schema, prompt)
triple.  Every later document with the same shape reuses the module without
another model call, which is how one generation amortizes over a whole feed.

Requires a conversion runner: either the separately installed `convrunner`
package or a script pointed to by $INTEROP_RUNNER.
"""

import sys
import tempfile
from pathlib import Path

from interoplab import (
    BackendConfig,
    ConversionTask,
    DatasetVersion,
    ModuleCache,
    Sandbox,
    Strategy,
    build_backend,
    convert_codegen,
    default_runner_cmd,
    fingerprint_schema,
    generate_dataset,
    synthesize_boundaries,
)
from interoplab.strategies import CODEGEN_TEMPLATE

if default_runner_cmd() is None:
    print("no conversion runner installed; install the runner package or set $INTEROP_RUNNER")
    sys.exit(0)

# ---------------------------------------------------------------------------
# Corpus and sandbox.
# ---------------------------------------------------------------------------

boundaries = synthesize_boundaries(count=13, seed=31)
root = Path(tempfile.mkdtemp(prefix="codegen-demo-"))
manifest = generate_dataset(boundaries[:-1], boundaries[-1], DatasetVersion.V4, root)
sandbox = Sandbox()
backend = build_backend(
    BackendConfig(kind="oracle"), manifest=manifest, strategy=Strategy.CODEGEN
)

# ---------------------------------------------------------------------------
# All twelve documents share one schema, so they share one fingerprint.
# ---------------------------------------------------------------------------

prints = {
    fingerprint_schema(e.input_text, manifest.target_text, CODEGEN_TEMPLATE.version_tag)
    for e in manifest.entries
}
print(f"{len(manifest.entries)} documents, {len(prints)} distinct schema fingerprint(s)")
print(f"fingerprint: {next(iter(prints))[:16]}...")

# ---------------------------------------------------------------------------
# Convert the corpus with a shared cache.  The first attempt generates and
# validates a module; every later attempt is a cache hit that skips the model
# entirely but still executes in its own child process.
# ---------------------------------------------------------------------------

cache = ModuleCache()
for entry in manifest.entries:
    task = ConversionTask(
        input_text=entry.input_text,
        target_example=manifest.target_text,
        entry_id=entry.prefix,
        expected_text=entry.expected_text,
    )
    record, _ = convert_codegen(task, backend, sandbox, cache=cache)
    marker = "hit " if record.cache_hit else "MISS"
    print(f"  {entry.prefix}: success={record.success} cache={marker} "
          f"{record.duration_ms:>4} ms")

print(f"\nmodel generations for the whole corpus: {backend.calls}")
print(f"modules in cache                      : {len(cache)}")

# ---------------------------------------------------------------------------
# The cached module itself is ordinary Python source; this is what actually
# executed in the child processes above.
# ---------------------------------------------------------------------------

module = cache.get(next(iter(prints)))
print(f"\ncached module is {len(module.source.splitlines())} lines, validated={module.validated}")
print("first lines:")
for line in module.source.splitlines()[:5]:
    print(f"  {line}")
