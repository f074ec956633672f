"""File formats: the JSON family format, distance-matrix output, manifests.

Family format::

    {"degree": d,
     "breakpoints": [a_0, ..., a_{s-1}],
     "densities": [{"name": str,
                    "segments": [{"b": int, "c": int, "coeffs": [...]}]}]}

Breakpoint indices are 0-based and segments cover half-open intervals
``[a_b, a_c)``.  Numbers are written with Python's shortest round-trip
formatting, so canonicalized files are stable across platforms.

Distance matrices are written as CSV (header row of density names, manifest
in leading ``#`` comment lines) or as JSON with ``names``/``matrix`` keys
plus the embedded manifest.  Manifests record command, parameters, seed,
artifact version, and an input content digest; wall time is reported on
stderr instead so that reruns with identical parameters are byte-identical.
"""

from __future__ import annotations

import hashlib
import json
from typing import Any

import numpy as np

from . import __version__
from .densities import Breakpoints, DensityFamily, PiecewisePolyDensity, PolySegment
from .errors import FamilyFormatError
from .pipeline import DistanceMatrix


def family_to_dict(family: DensityFamily) -> dict:
    return {
        "degree": family.degree,
        "breakpoints": [float(p) for p in family.breakpoints.points],
        "densities": [
            {
                "name": dens.name,
                "segments": [
                    {"b": seg.b, "c": seg.c, "coeffs": [float(a) for a in seg.coeffs]}
                    for seg in dens.segments
                ],
            }
            for dens in family.densities
        ],
    }


def family_from_dict(doc: Any) -> DensityFamily:
    if not isinstance(doc, dict):
        raise FamilyFormatError("family document must be a JSON object")
    try:
        degree = int(doc["degree"])
        bp = Breakpoints(np.asarray(doc["breakpoints"], dtype=float))
        densities = []
        for dd in doc["densities"]:
            segs = [
                PolySegment(int(sd["b"]), int(sd["c"]), np.asarray(sd["coeffs"], dtype=float))
                for sd in dd["segments"]
            ]
            densities.append(PiecewisePolyDensity(str(dd["name"]), segs, degree))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, FamilyFormatError):
            raise
        raise FamilyFormatError(f"malformed family document: {exc}") from exc
    return DensityFamily(bp, densities, degree)


def family_to_json(family: DensityFamily) -> str:
    return json.dumps(family_to_dict(family), indent=2) + "\n"


def family_from_json(text: str) -> DensityFamily:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FamilyFormatError(
            f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    return family_from_dict(doc)


def load_family(path: str) -> DensityFamily:
    with open(path, "r", encoding="utf-8") as handle:
        return family_from_json(handle.read())


def save_family(family: DensityFamily, path: str) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(family_to_json(family))


def sha256_digest(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def build_manifest(command: str, parameters: dict, seed: int, input_digest: str | None) -> dict:
    """Run provenance embedded in every output.

    Deliberately excludes wall time and runtime-only knobs such as thread
    count: identical manifests must imply identical output bytes.
    """
    return {
        "command": command,
        "parameters": {k: parameters[k] for k in sorted(parameters)},
        "seed": seed,
        "artifact_version": __version__,
        "input_digest": input_digest,
    }


def matrix_to_json(dm: DistanceMatrix, manifest: dict) -> str:
    doc = {
        "names": dm.names,
        "matrix": [[float(v) for v in row] for row in dm.entries],
        "method": dm.method,
        "config": _jsonable(dm.config),
        "manifest": manifest,
    }
    return json.dumps(doc, indent=2) + "\n"


def matrix_to_csv(dm: DistanceMatrix, manifest: dict) -> str:
    lines = [f"# manifest: {json.dumps(manifest, sort_keys=True)}"]
    lines.append(f"# method: {dm.method}")
    lines.append(f"# config: {json.dumps(_jsonable(dm.config), sort_keys=True)}")
    lines.append(",".join(["name"] + dm.names))
    for name, row in zip(dm.names, dm.entries):
        lines.append(",".join([name] + [repr(float(v)) for v in row]))
    return "\n".join(lines) + "\n"


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    return obj
