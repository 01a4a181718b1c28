"""
Synthesizing a conversion corpus
================================

Every experiment in this library runs against a corpus of paired documents:
a provider-style boundary export as the input, and its lossless geographic
conversion as the expected output.  This script builds a small corpus for
each target-schema version and pokes around in the result.
"""

import tempfile
from pathlib import Path

from interoplab import (
    DatasetVersion,
    generate_dataset,
    load_dataset,
    synthesize_boundaries,
    validate_dataset,
)

# ---------------------------------------------------------------------------
# Synthesize field boundaries.  The generator is fully seeded: same seed,
# same fields, byte for byte.  One extra boundary becomes the unscored
# "target example" that prompts show to the model.
# ---------------------------------------------------------------------------

boundaries = synthesize_boundaries(count=9, seed=2024)
sample = boundaries[0]
print(f"synthesized {len(boundaries)} boundaries")
print(f"  first id     : {sample.boundary_id}")
print(f"  first name   : {sample.name}")
print(f"  vertices     : {len(sample.rings[0]) - 1}")
print(f"  area (ha)    : {sample.area_ha}")

# ---------------------------------------------------------------------------
# Write one corpus per target version.  The four versions differ only in the
# properties block of the expected output: v1 keeps it empty, v2 adds the id,
# v3 carries the hectare area through verbatim, v4 converts it to acres.
# ---------------------------------------------------------------------------

root = Path(tempfile.mkdtemp(prefix="corpus-demo-"))
for version in DatasetVersion:
    manifest = generate_dataset(
        boundaries[:-1], boundaries[-1], version, root / version.value
    )
    files = sorted(p.name for p in manifest.root.iterdir())
    print(f"\n{version.value}: {len(files)} files in {manifest.root}")
    print("  " + ", ".join(files[:3]) + f", ... , {files[-1]}")

# ---------------------------------------------------------------------------
# Look at one pair.  Inputs are identical across versions; the expected
# output is what changes.
# ---------------------------------------------------------------------------

v4 = load_dataset(root / "v4")
entry = v4.entries[0]
print(f"\nentry {entry.prefix} input (first 3 lines):")
print("\n".join("  " + line for line in entry.input_text.splitlines()[:3]))
print(f"entry {entry.prefix} expected (first 12 lines):")
print("\n".join("  " + line for line in entry.expected_text.splitlines()[:12]))

# ---------------------------------------------------------------------------
# A corpus can always be re-checked against the reference converter, which is
# how regenerated datasets prove they are faithful.
# ---------------------------------------------------------------------------

for version in DatasetVersion:
    report = validate_dataset(load_dataset(root / version.value))
    print(f"validate {version.value}: {report.passed}/{len(report.results)} entries ok")
