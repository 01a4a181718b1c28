"""Field-boundary documents and the reference conversion between them.

Source documents carry one drawn field boundary: nested rings of lat/lon
points plus area metadata.  Targets are GeoJSON FeatureCollections whose
properties block varies by dataset version.  Numeric payloads stay Decimal
end to end; floats appear only inside the spherical area math.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal, localcontext

from . import jsonutil
from .core import DatasetVersion

EARTH_RADIUS_M = 6378137.0
SQM_PER_HECTARE = 10000.0
# 10000 m^2/ha divided by 4046.8564224 m^2 per international acre,
# rounded to 16 significant digits and applied as a single multiplication.
ACRES_PER_HECTARE = Decimal("2.471053814671653")

AREA_UNIT = "ha"
SOURCE_TYPE = "HandDrawn"


@dataclass(slots=True, frozen=True)
class FieldBoundary:
    """One field boundary; rings hold closed sequences of (lon, lat) Decimals."""

    boundary_id: str
    name: str
    source_type: str
    created_time: str
    modified_time: str
    area_ha: Decimal
    rings: tuple[tuple[tuple[Decimal, Decimal], ...], ...]


def hectares_to_acres(area_ha: Decimal) -> Decimal:
    """Exact product of the input and the acre factor, no intermediate rounding."""
    digits = len(area_ha.as_tuple().digits) + len(ACRES_PER_HECTARE.as_tuple().digits)
    with localcontext() as ctx:
        ctx.prec = digits + 2
        return area_ha * ACRES_PER_HECTARE


def ring_area_m2(ring) -> float:
    """Spherical-excess area of one closed ring on the authalic-style sphere.

    Accepts (lon, lat) pairs in degrees (Decimal or float); a repeated final
    position is tolerated.  Orientation does not matter.
    """
    pts = [(float(lon), float(lat)) for lon, lat in ring]
    if len(pts) > 1 and pts[0] == pts[-1]:
        pts = pts[:-1]
    if len(set(pts)) < 3:
        raise ValueError("degenerate ring: need at least 3 distinct positions")
    total = 0.0
    n = len(pts)
    for i in range(n):
        lon_prev = pts[i - 1][0]
        lon_next = pts[(i + 1) % n][0]
        lat_mid = pts[i][1]
        total += math.radians(lon_next - lon_prev) * math.sin(math.radians(lat_mid))
    return abs(total) * EARTH_RADIUS_M * EARTH_RADIUS_M / 2.0


def ring_area_ha(ring) -> float:
    return ring_area_m2(ring) / SQM_PER_HECTARE


def provider_doc(boundary: FieldBoundary) -> dict:
    """Source-side document for one boundary (single boundary per file)."""
    measurement = {
        "@type": "MeasurementAsDouble",
        "valueAsDouble": boundary.area_ha,
        "unit": AREA_UNIT,
    }
    return {
        "values": [
            {
                "@type": "Boundary",
                "id": boundary.boundary_id,
                "name": boundary.name,
                "sourceType": boundary.source_type,
                "createdTime": boundary.created_time,
                "modifiedTime": boundary.modified_time,
                "area": measurement,
                "workableArea": dict(measurement),
                "multipolygons": [
                    {
                        "@type": "Polygon",
                        "rings": [
                            {
                                "@type": "Ring",
                                "points": [
                                    {"@type": "Point", "lat": lat, "lon": lon}
                                    for lon, lat in ring
                                ],
                            }
                            for ring in boundary.rings
                        ],
                    }
                ],
            }
        ]
    }


def provider_text(boundary: FieldBoundary) -> str:
    return jsonutil.dumps(provider_doc(boundary)) + "\n"


def geo_properties(boundary_id: str, area_ha: Decimal, version: DatasetVersion) -> dict:
    props: dict = {}
    if version in (DatasetVersion.V2, DatasetVersion.V3, DatasetVersion.V4):
        props["id"] = boundary_id
    if version is DatasetVersion.V3:
        props["area_ha"] = area_ha
    elif version is DatasetVersion.V4:
        props["area_acres"] = hectares_to_acres(area_ha)
    return props


def geo_doc(boundary: FieldBoundary, version: DatasetVersion) -> dict:
    """Target-side GeoJSON document for one boundary under one schema version."""
    return {
        "type": "FeatureCollection",
        "features": [
            {
                "type": "Feature",
                "properties": geo_properties(boundary.boundary_id, boundary.area_ha, version),
                "geometry": {
                    "type": "Polygon",
                    "coordinates": [
                        [[lon, lat] for lon, lat in ring] for ring in boundary.rings
                    ],
                },
            }
        ],
    }


def geo_text(boundary: FieldBoundary, version: DatasetVersion) -> str:
    return jsonutil.dumps(geo_doc(boundary, version)) + "\n"


def parse_provider(text: str) -> FieldBoundary:
    """Parse and validate a source document back into a FieldBoundary."""
    doc = jsonutil.loads(text)
    try:
        values = doc["values"]
        record = values[0]
    except (TypeError, KeyError, IndexError) as err:
        raise ValueError("source document has no boundary record") from err
    area = record.get("area")
    if not isinstance(area, dict) or "valueAsDouble" not in area:
        raise ValueError("source document has no area measurement")
    if area.get("unit") != AREA_UNIT:
        raise ValueError(f"unsupported area unit: {area.get('unit')!r}")
    polygons = record.get("multipolygons")
    if not polygons:
        raise ValueError("source document has no geometry")
    if len(polygons) != 1:
        raise ValueError("multiple polygons per boundary are not supported")
    rings = polygons[0].get("rings")
    if not rings:
        raise ValueError("source document has no geometry")
    parsed_rings = []
    for ring in rings:
        points = ring.get("points") or []
        if len(points) < 3:
            raise ValueError("source document ring has fewer than 3 points")
        parsed_rings.append(tuple((p["lon"], p["lat"]) for p in points))
    return FieldBoundary(
        boundary_id=str(record.get("id", "")),
        name=str(record.get("name", "")),
        source_type=str(record.get("sourceType", "")),
        created_time=str(record.get("createdTime", "")),
        modified_time=str(record.get("modifiedTime", "")),
        area_ha=area["valueAsDouble"],
        rings=tuple(parsed_rings),
    )


def reference_convert(provider_doc_text: str, version: DatasetVersion) -> str:
    """Ground-truth conversion: source document text to target document text."""
    boundary = parse_provider(provider_doc_text)
    return geo_text(boundary, version)
