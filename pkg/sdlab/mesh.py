# SPDX-FileCopyrightText: 2024-2025 ModelCloud.ai
# SPDX-FileCopyrightText: 2024-2025 qubitium@modelcloud.ai
# SPDX-License-Identifier: Apache-2.0
# Contact: qubitium@modelcloud.ai, x.com/qubitium

"""Polar disk meshes of the lifted minimal surface, written as OBJ."""

import cmath
import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Tuple, Union

import numpy as np

from .errors import ConfigError
from .harmonic import HarmonicMap, criterion5_margin, we_lift
from .log import LabLog
from .nehari import NehariFunction
from .progress import sweep

log = LabLog.shared()

SIDECAR_HEADER = ("vertex", "U", "V", "W", "lambda", "K", "criterion_margin")


def disk_points(rings: int, sectors: int, radius: float) -> np.ndarray:
    """Center first, then ring by ring outward, sectors counterclockwise from angle 0."""

    if rings < 1 or sectors < 3:
        raise ConfigError("mesh needs at least one ring and three sectors")
    if not 0.0 < radius < 1.0:
        raise ConfigError("mesh radius must lie in (0, 1)")
    pts = [0j]
    for k in range(1, rings + 1):
        r = radius * k / rings
        pts.extend(r * cmath.exp(2j * math.pi * j / sectors) for j in range(sectors))
    return np.array(pts, dtype=complex)


def disk_faces(rings: int, sectors: int) -> np.ndarray:
    """0-based triangles: a fan around the center, two per quad between rings."""

    def at(k: int, j: int) -> int:
        return 1 + (k - 1) * sectors + (j % sectors)

    faces: List[Tuple[int, int, int]] = [(0, at(1, j), at(1, j + 1)) for j in range(sectors)]
    for k in range(1, rings):
        for j in range(sectors):
            a, b = at(k, j), at(k, j + 1)
            c, d = at(k + 1, j), at(k + 1, j + 1)
            faces.append((a, c, d))
            faces.append((a, d, b))
    return np.array(faces, dtype=np.int64)


@dataclass(frozen=True, eq=False)
class LiftMesh:
    label: str
    points: np.ndarray = field(repr=False)
    vertices: np.ndarray = field(repr=False)
    faces: np.ndarray = field(repr=False)
    lambda_: np.ndarray = field(repr=False)
    K: np.ndarray = field(repr=False)
    margin: np.ndarray = field(repr=False)

    @property
    def vertex_count(self) -> int:
        return int(self.vertices.shape[0])

    def write_obj(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"# lifted surface of {self.label}\n")
            fh.write(f"# vertices {self.vertex_count} faces {self.faces.shape[0]}\n")
            for U, V, W in self.vertices:
                fh.write(f"v {float(U)!r} {float(V)!r} {float(W)!r}\n")
            for a, b, c in self.faces + 1:
                fh.write(f"f {a} {b} {c}\n")
        return path

    def write_sidecar(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(SIDECAR_HEADER)
            for k in range(self.vertex_count):
                U, V, W = self.vertices[k]
                writer.writerow([k + 1, repr(float(U)), repr(float(V)), repr(float(W)), repr(float(self.lambda_[k])), repr(float(self.K[k])), repr(float(self.margin[k]))])
        return path


def build_lift_mesh(
    f: HarmonicMap,
    p: NehariFunction,
    rings: int = 24,
    sectors: int = 48,
    radius: float = 0.9,
    *,
    workers: Optional[int] = None,
) -> LiftMesh:
    points = disk_points(rings, sectors, radius)
    faces = disk_faces(rings, sectors)

    def lift(z: complex):
        w = we_lift(f, complex(z))
        return w, criterion5_margin(f, p, complex(z))

    rows = sweep(lift, list(points), title="lift mesh", workers=workers)
    vertices = np.array([w.xyz for w, _ in rows])
    mesh = LiftMesh(
        label=f.label,
        points=points,
        vertices=vertices,
        faces=faces,
        lambda_=np.array([w.lambda_ for w, _ in rows]),
        K=np.array([w.K for w, _ in rows]),
        margin=np.array([m for _, m in rows]),
    )
    log.debug("mesh %s: %d vertices, %d faces", f.label, mesh.vertex_count, faces.shape[0])
    return mesh
