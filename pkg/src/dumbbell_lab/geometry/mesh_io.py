"""Plain-text mesh dump: ``vertex z s``, ``tri i j k region``, ``bnd i tag`` and ``meta key json`` lines.

The format is described in docs/MESH_FORMAT.md.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
from numpy.typing import NDArray

from dumbbell_lab.errors import ConfigurationError
from dumbbell_lab.geometry.models import MeridianMesh

HEADER = "# dumbbell-lab mesh v1"


def dump_mesh(mesh: MeridianMesh, path: Path | str) -> Path:
    """Write ``mesh`` to ``path``; vertex coordinates use repr precision."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    lines = [HEADER, f"kind {mesh.kind}", f"dimension {mesh.dimension}"]
    lines.append("dirichlet " + " ".join(mesh.dirichlet_tags))
    lines.extend(
        f"meta {key} {json.dumps(value, sort_keys=True, separators=(',', ':'))}"
        for key, value in sorted(mesh.metadata.items())
    )
    lines.extend(f"vertex {z!r} {s!r}" for z, s in mesh.vertices.tolist())
    for (i, j, k), code in zip(mesh.triangles.tolist(), mesh.regions.tolist()):
        lines.append(f"tri {i} {j} {k} {mesh.region_names[code]}")
    for tag in sorted(mesh.boundary):
        lines.extend(f"bnd {i} {tag}" for i in mesh.boundary[tag].tolist())
    target.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return target


def load_mesh(path: Path | str) -> MeridianMesh:
    """
    Read a mesh written by ``dump_mesh``.

    Raises:
        FileNotFoundError: If the file does not exist.
        ConfigurationError: On malformed lines.
    """
    source = Path(path)
    if not source.exists():
        raise FileNotFoundError(f"Mesh dump not found: {source}")
    kind, dimension, dirichlet = "dumbbell", 3, ()
    vertices: list[tuple[float, float]] = []
    triangles: list[tuple[int, int, int]] = []
    region_labels: list[str] = []
    boundary: dict[str, list[int]] = {}
    metadata: dict[str, object] = {}
    for lineno, raw in enumerate(source.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        head, *rest = line.split()
        try:
            if head == "meta":
                key, payload = line.split(maxsplit=2)[1:]
                metadata[key] = json.loads(payload)
                continue
            if head == "vertex":
                vertices.append((float(rest[0]), float(rest[1])))
            elif head == "tri":
                triangles.append((int(rest[0]), int(rest[1]), int(rest[2])))
                region_labels.append(rest[3])
            elif head == "bnd":
                boundary.setdefault(rest[1], []).append(int(rest[0]))
            elif head == "kind":
                kind = rest[0]
            elif head == "dimension":
                dimension = int(rest[0])
            elif head == "dirichlet":
                dirichlet = tuple(rest)
            else:
                raise ConfigurationError(f"{source}:{lineno}: unknown record {head!r}")
        except (IndexError, ValueError) as exc:  # JSONDecodeError is a ValueError
            raise ConfigurationError(f"{source}:{lineno}: malformed line {line!r}") from exc

    names = tuple(dict.fromkeys(region_labels))
    codes = np.array([names.index(label) for label in region_labels], dtype=np.int64)
    return MeridianMesh(
        vertices=np.array(vertices, dtype=float),
        triangles=np.array(triangles, dtype=np.int64),
        regions=codes,
        region_names=names,
        boundary={tag: np.array(idx, dtype=np.int64) for tag, idx in boundary.items()},
        dirichlet_tags=dirichlet,
        dimension=dimension,
        kind=kind,
        metadata=metadata,
    )


def dump_field(values: NDArray[np.float64], path: Path | str, name: str = "field") -> Path:
    """Nodal values as ``field i value`` lines, aligned with the mesh dump vertex order."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    lines = [f"# {name}"] + [f"field {i} {v!r}" for i, v in enumerate(np.asarray(values).tolist())]
    target.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return target
