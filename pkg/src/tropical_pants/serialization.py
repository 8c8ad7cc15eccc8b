"""Deterministic serialization helpers (JSON, CSV, OFF parsing)."""

from __future__ import annotations

import json
from typing import Iterable, Sequence


def json_dumps(obj) -> str:
    """Canonical JSON text: sorted keys, fixed separators, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2, separators=(",", ": ")) + "\n"


def write_json(path, obj) -> None:
    with open(path, "w") as fh:
        fh.write(json_dumps(obj))


def fmt_float(x: float) -> str:
    return format(float(x), ".17g")


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    """Plain CSV with deterministic float formatting."""
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(
                ",".join(
                    fmt_float(x) if isinstance(x, float) else str(x) for x in row
                )
                + "\n"
            )


def parse_off(path) -> tuple[list[tuple[float, float, float]], list[list[int]]]:
    """Minimal OFF reader used by round-trip tests."""
    with open(path) as fh:
        tokens = fh.read().split()
    if tokens[0] != "OFF":
        raise ValueError("not an OFF file")
    nv, nf = int(tokens[1]), int(tokens[2])
    pos = 4
    verts = []
    for _ in range(nv):
        verts.append((float(tokens[pos]), float(tokens[pos + 1]), float(tokens[pos + 2])))
        pos += 3
    faces = []
    for _ in range(nf):
        k = int(tokens[pos])
        faces.append([int(t) for t in tokens[pos + 1 : pos + 1 + k]])
        pos += 1 + k
    return verts, faces
