"""Synthetic corpus generation, loading, and validation.

A corpus directory is flat: one <PREFIX>.input.txt / <PREFIX>.expected.txt
pair per boundary plus a single target.txt showing the target schema on a
boundary that is excluded from scoring.  Input files are identical across
versions of the same boundary set; only expected files and target.txt vary.
"""

from __future__ import annotations

import datetime
import math
import random
import uuid
from dataclasses import dataclass
from decimal import Decimal
from pathlib import Path

from . import jsonutil
from .core import DatasetVersion
from .equivalence import JsonSyntaxError, canonicalize, first_difference
from .geoconv import FieldBoundary, SOURCE_TYPE, provider_text, reference_convert, ring_area_ha

LAT_RANGE = (47.5, 54.5)
LON_RANGE = (6.5, 14.5)
VERTEX_RANGE = (5, 30)
COORD_PLACES = 6


class DatasetFormatError(ValueError):
    """Corpus directory violates the file-pair layout."""


@dataclass(slots=True, frozen=True)
class DatasetEntry:
    prefix: str
    input_text: str
    expected_text: str


@dataclass(slots=True)
class DatasetManifest:
    version: DatasetVersion
    entries: list[DatasetEntry]
    target_text: str
    root: Path | None = None


@dataclass(slots=True, frozen=True)
class EntryValidation:
    prefix: str
    ok: bool
    detail: str | None


@dataclass(slots=True)
class ValidationReport:
    version: DatasetVersion
    results: list[EntryValidation]

    @property
    def passed(self) -> int:
        return sum(1 for r in self.results if r.ok)

    @property
    def failed(self) -> int:
        return len(self.results) - self.passed

    @property
    def ok(self) -> bool:
        return self.failed == 0


def _round_coord(value: float) -> Decimal:
    return Decimal(str(round(value, COORD_PLACES)))


def _timestamp(rng: random.Random) -> tuple[str, str]:
    base = datetime.datetime(2018, 1, 1) + datetime.timedelta(seconds=rng.randrange(3_000_000))
    created = base.strftime("%Y-%m-%dT%H:%M:%SZ")
    modified_dt = base + datetime.timedelta(seconds=rng.randrange(20_000_000))
    modified = f"{modified_dt:%Y-%m-%dT%H:%M:%S}.{rng.randrange(1000):03d}Z"
    return created, modified


def synthesize_boundaries(count: int, seed: int) -> list[FieldBoundary]:
    """Deterministically synthesize irregular, non-self-intersecting boundaries.

    Same (count, seed) always yields the same boundaries; ids are UUIDv4-format
    strings drawn from the seeded stream.
    """
    rng = random.Random(seed)
    boundaries: list[FieldBoundary] = []
    for index in range(count):
        boundary_id = str(uuid.UUID(int=rng.getrandbits(128), version=4))
        created, modified = _timestamp(rng)
        n_vertices = rng.randint(*VERTEX_RANGE)
        center_lat = rng.uniform(*LAT_RANGE)
        center_lon = rng.uniform(*LON_RANGE)
        # radius in degrees of latitude: fields roughly 100 m to 1.5 km across
        base_radius = rng.uniform(0.0008, 0.008)
        lon_stretch = 1.0 / math.cos(math.radians(center_lat))
        points: list[tuple[Decimal, Decimal]] = []
        for v in range(n_vertices):
            # strictly increasing angles keep the polygon star-shaped (simple)
            theta = 2.0 * math.pi * (v + rng.uniform(-0.35, 0.35)) / n_vertices
            radius = base_radius * rng.uniform(0.6, 1.4)
            lat = center_lat + radius * math.sin(theta)
            lon = center_lon + radius * math.cos(theta) * lon_stretch
            points.append((_round_coord(lon), _round_coord(lat)))
        ring = tuple(points + [points[0]])
        # the float area's shortest repr becomes the authoritative digit string
        area_ha = Decimal(repr(ring_area_ha(ring)))
        boundaries.append(
            FieldBoundary(
                boundary_id=boundary_id,
                name=f"Field_{index + 1:03d}",
                source_type=SOURCE_TYPE,
                created_time=created,
                modified_time=modified,
                area_ha=area_ha,
                rings=(ring,),
            )
        )
    return boundaries


def entry_prefix(index: int, boundary_id: str) -> str:
    return f"{index:03d}-{boundary_id[:8]}"


def generate_dataset(
    boundaries: list[FieldBoundary],
    target_boundary: FieldBoundary,
    version: DatasetVersion,
    out_dir: str | Path,
) -> DatasetManifest:
    """Write one corpus version; expected files are the reference conversion."""
    root = Path(out_dir)
    root.mkdir(parents=True, exist_ok=True)
    entries: list[DatasetEntry] = []
    for index, boundary in enumerate(boundaries):
        prefix = entry_prefix(index, boundary.boundary_id)
        input_text = provider_text(boundary)
        expected_text = reference_convert(input_text, version)
        (root / f"{prefix}.input.txt").write_text(input_text, encoding="utf-8")
        (root / f"{prefix}.expected.txt").write_text(expected_text, encoding="utf-8")
        entries.append(DatasetEntry(prefix, input_text, expected_text))
    target_text = reference_convert(provider_text(target_boundary), version)
    (root / "target.txt").write_text(target_text, encoding="utf-8")
    return DatasetManifest(version=version, entries=entries, target_text=target_text, root=root)


def infer_version(target_text: str) -> DatasetVersion:
    try:
        doc = jsonutil.loads(target_text)
        properties = doc["features"][0]["properties"]
    except Exception as err:
        raise DatasetFormatError(f"cannot read target schema example: {err}") from err
    if not isinstance(properties, dict):
        raise DatasetFormatError("target schema example has no properties object")
    return DatasetVersion.from_property_keys(properties.keys())


def load_dataset(root: str | Path) -> DatasetManifest:
    """Load a corpus directory, pairing files by prefix and inferring the version."""
    root = Path(root)
    target_path = root / "target.txt"
    if not target_path.is_file():
        raise DatasetFormatError(f"missing target.txt in {root}")
    target_text = target_path.read_text(encoding="utf-8")
    version = infer_version(target_text)

    inputs = {p.name.removesuffix(".input.txt"): p for p in root.glob("*.input.txt")}
    expecteds = {p.name.removesuffix(".expected.txt"): p for p in root.glob("*.expected.txt")}
    orphans = sorted(set(inputs) ^ set(expecteds))
    if orphans:
        raise DatasetFormatError(f"unpaired corpus files for prefix(es): {', '.join(orphans)}")

    entries = [
        DatasetEntry(
            prefix=prefix,
            input_text=inputs[prefix].read_text(encoding="utf-8"),
            expected_text=expecteds[prefix].read_text(encoding="utf-8"),
        )
        for prefix in sorted(inputs)
    ]
    return DatasetManifest(version=version, entries=entries, target_text=target_text, root=root)


def validate_dataset(manifest: DatasetManifest) -> ValidationReport:
    """Check every expected file against the reference conversion of its input."""
    results: list[EntryValidation] = []
    for entry in manifest.entries:
        try:
            reference = reference_convert(entry.input_text, manifest.version)
            diff = first_difference(
                canonicalize(entry.expected_text), canonicalize(reference)
            )
        except (ValueError, JsonSyntaxError) as err:
            results.append(EntryValidation(entry.prefix, False, str(err)))
            continue
        if diff is None:
            results.append(EntryValidation(entry.prefix, True, None))
        else:
            results.append(EntryValidation(entry.prefix, False, f"differs at {diff}"))
    return ValidationReport(version=manifest.version, results=results)
