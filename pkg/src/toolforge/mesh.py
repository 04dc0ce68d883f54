"""Triangle meshes in the plain-text v/f format: parse, validate, measure, scale.

Meshes are immutable values (coordinates in millimeters, zero-based face
indices internally) and every operation here is pure, so they are safe to
share across threads. Serialization uses Python's shortest round-trip float
repr, which makes parse(serialize(m)) bit-exact.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateMesh,
    EmptyMesh,
    IndexOutOfBounds,
    MalformedLine,
    NonPositiveTarget,
)

Vec3 = tuple[float, float, float]
Face = tuple[int, int, int]

# Generated mesh text frequently duplicates vertices; welding at this
# tolerance makes the manifoldness checks meaningful.
WELD_TOLERANCE_MM = 1e-6
# Far below printer resolution.
DEGENERATE_AREA_MM2 = 1e-9


@dataclass(frozen=True)
class AABB:
    """Axis-aligned bounding box; units follow the surrounding context."""

    min: Vec3
    max: Vec3

    def __post_init__(self):
        if any(lo > hi for lo, hi in zip(self.min, self.max)):
            raise ValueError(f"AABB min {self.min} exceeds max {self.max}")

    @property
    def size(self) -> Vec3:
        return tuple(hi - lo for lo, hi in zip(self.min, self.max))

    @property
    def center(self) -> Vec3:
        return tuple((lo + hi) / 2.0 for lo, hi in zip(self.min, self.max))

    def contains(self, point, tol: float = 0.0) -> bool:
        return all(
            lo - tol <= c <= hi + tol
            for c, lo, hi in zip(point, self.min, self.max)
        )

    def clamp(self, point) -> Vec3:
        return tuple(
            min(max(c, lo), hi) for c, lo, hi in zip(point, self.min, self.max)
        )


@dataclass(frozen=True)
class TriangleMesh:
    vertices: tuple[Vec3, ...]
    faces: tuple[Face, ...]

    def __post_init__(self):
        verts = tuple((float(x), float(y), float(z)) for x, y, z in self.vertices)
        faces = tuple((int(a), int(b), int(c)) for a, b, c in self.faces)
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "faces", faces)
        n = len(verts)
        for fi, face in enumerate(faces):
            if any(i < 0 or i >= n for i in face):
                raise IndexOutOfBounds(f"face {fi} {face} with {n} vertices")
            if len(set(face)) != 3:
                raise ValueError(f"face {fi} repeats a vertex index: {face}")

    def vertex_array(self) -> np.ndarray:
        return np.asarray(self.vertices, dtype=np.float64).reshape(-1, 3)

    def face_array(self) -> np.ndarray:
        return np.asarray(self.faces, dtype=np.int64).reshape(-1, 3)


@dataclass(frozen=True)
class Defect:
    kind: str
    ref: str
    detail: str


@dataclass(frozen=True)
class ValidationReport:
    watertight: bool
    oriented_consistently: bool
    defects: tuple[Defect, ...]
    signed_volume_mm3: float

    @property
    def ok(self) -> bool:
        return not self.defects


def parse_mesh_text(text: str) -> TriangleMesh:
    """Parse v/f mesh text into a TriangleMesh.

    `v x y z` lines become vertices in order; `f i j k [l ...]` lines carry
    one-based indices and polygons are fan-triangulated from the first listed
    vertex. Unknown line prefixes are ignored. Parsing is locale-independent
    (decimal point only, via float()).
    """
    vertices: list[Vec3] = []
    polygons: list[tuple[int, list[int]]] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "v":
            if len(parts) != 4:
                raise MalformedLine(f"line {lineno}: expected 'v x y z': {raw!r}")
            try:
                coords = tuple(float(p) for p in parts[1:])
            except ValueError:
                raise MalformedLine(f"line {lineno}: non-numeric coordinate: {raw!r}") from None
            if not all(math.isfinite(c) for c in coords):
                raise MalformedLine(f"line {lineno}: non-finite coordinate: {raw!r}")
            vertices.append(coords)
        elif parts[0] == "f":
            if len(parts) < 4:
                raise MalformedLine(f"line {lineno}: face needs >=3 indices: {raw!r}")
            try:
                indices = [int(p) for p in parts[1:]]
            except ValueError:
                raise MalformedLine(f"line {lineno}: non-integer face index: {raw!r}") from None
            polygons.append((lineno, indices))
        # anything else (comments, normals, materials, ...) is ignored

    faces: list[Face] = []
    n = len(vertices)
    for lineno, indices in polygons:
        if any(i < 1 or i > n for i in indices):
            raise IndexOutOfBounds(f"line {lineno}: face index outside 1..{n}: {indices}")
        if len(set(indices)) != len(indices):
            raise MalformedLine(f"line {lineno}: face repeats a vertex: {indices}")
        zero = [i - 1 for i in indices]
        for b, c in zip(zero[1:], zero[2:]):
            faces.append((zero[0], b, c))

    if not vertices or not faces:
        raise EmptyMesh(f"parsed {len(vertices)} vertices, {len(faces)} faces")
    return TriangleMesh(tuple(vertices), tuple(faces))


def serialize_mesh(mesh: TriangleMesh) -> str:
    """Inverse of parse_mesh_text; one-based indices, round-trip exact floats."""
    if not mesh.vertices or not mesh.faces:
        raise EmptyMesh("cannot serialize a mesh without vertices and faces")
    lines = [f"v {x!r} {y!r} {z!r}" for x, y, z in mesh.vertices]
    lines += [f"f {a + 1} {b + 1} {c + 1}" for a, b, c in mesh.faces]
    return "\n".join(lines) + "\n"


def weld_vertices(mesh: TriangleMesh, tolerance_mm: float = WELD_TOLERANCE_MM) -> TriangleMesh:
    """Merge vertices that coincide within tolerance; drop collapsed faces.

    The first-seen coordinate wins for each weld cell, keeping the result
    deterministic. Faces whose indices collapse under welding are removed.
    """
    keeper: dict[tuple[int, int, int], int] = {}
    remap: list[int] = []
    kept: list[Vec3] = []
    for v in mesh.vertices:
        key = tuple(round(c / tolerance_mm) for c in v)
        idx = keeper.get(key)
        if idx is None:
            idx = len(kept)
            keeper[key] = idx
            kept.append(v)
        remap.append(idx)

    faces = []
    for a, b, c in mesh.faces:
        fa, fb, fc = remap[a], remap[b], remap[c]
        if fa != fb and fb != fc and fa != fc:
            faces.append((fa, fb, fc))
    if not kept or not faces:
        raise EmptyMesh("welding removed every face")
    return TriangleMesh(tuple(kept), tuple(faces))


def _face_area(v: np.ndarray, face: Face) -> float:
    a, b, c = face
    return 0.5 * float(np.linalg.norm(np.cross(v[b] - v[a], v[c] - v[a])))


def signed_volume(mesh: TriangleMesh) -> float:
    """Signed volume via the divergence theorem; positive for outward winding."""
    v = mesh.vertex_array()
    f = mesh.face_array()
    a, b, c = v[f[:, 0]], v[f[:, 1]], v[f[:, 2]]
    return float(np.einsum("ij,ij->i", a, np.cross(b, c)).sum() / 6.0)


def validate_mesh(mesh: TriangleMesh) -> ValidationReport:
    """Run every mesh check and report defects; never raises.

    Checks: finite coordinates, degenerate faces (area < 1e-9 mm^2),
    edge-manifoldness (no edge in >2 faces), watertightness (every edge in
    exactly 2 faces), consistent winding across shared edges, and signed
    volume. A watertight, consistently wound mesh with negative volume gets an
    "inverted_orientation" defect (fixable by flip_faces).
    """
    defects: list[Defect] = []

    if not mesh.vertices or not mesh.faces:
        return ValidationReport(False, False, (Defect("empty_mesh", "mesh", "no geometry"),), 0.0)

    varr = mesh.vertex_array()
    for i, vert in enumerate(mesh.vertices):
        if not all(math.isfinite(c) for c in vert):
            defects.append(Defect("nonfinite_vertex", f"v{i}", f"{vert}"))
    if any(d.kind == "nonfinite_vertex" for d in defects):
        # Topology checks below are meaningless on non-finite geometry.
        return ValidationReport(False, False, tuple(defects), float("nan"))

    for fi, face in enumerate(mesh.faces):
        area = _face_area(varr, face)
        if area < DEGENERATE_AREA_MM2:
            defects.append(Defect("degenerate_face", f"f{fi}", f"area {area:.3e} mm^2"))

    undirected: Counter = Counter()
    directed: Counter = Counter()
    for a, b, c in mesh.faces:
        for u, w in ((a, b), (b, c), (c, a)):
            undirected[(min(u, w), max(u, w))] += 1
            directed[(u, w)] += 1

    watertight = True
    for edge, count in sorted(undirected.items()):
        if count == 1:
            watertight = False
            defects.append(Defect("boundary_edge", f"e{edge}", "edge borders one face"))
        elif count > 2:
            watertight = False
            defects.append(Defect("nonmanifold_edge", f"e{edge}", f"edge borders {count} faces"))

    oriented = True
    for edge, count in sorted(directed.items()):
        if count > 1:
            oriented = False
            defects.append(
                Defect("inconsistent_winding", f"e{edge}", f"{count} faces traverse the same direction")
            )

    volume = signed_volume(mesh)
    if watertight and oriented and volume < 0:
        defects.append(Defect("inverted_orientation", "mesh", f"signed volume {volume:.3e} mm^3"))

    return ValidationReport(watertight, oriented, tuple(defects), volume)


def flip_faces(mesh: TriangleMesh) -> TriangleMesh:
    """Reverse every face winding (fix for inverted_orientation)."""
    return TriangleMesh(mesh.vertices, tuple((a, c, b) for a, b, c in mesh.faces))


def bounding_box(mesh: TriangleMesh) -> AABB:
    if not mesh.vertices:
        raise EmptyMesh("bounding box of an empty mesh")
    v = mesh.vertex_array()
    return AABB(tuple(v.min(axis=0)), tuple(v.max(axis=0)))


def max_extent(mesh: TriangleMesh) -> float:
    return max(bounding_box(mesh).size)


def translate_mesh(mesh: TriangleMesh, offset) -> TriangleMesh:
    ox, oy, oz = (float(c) for c in offset)
    return TriangleMesh(
        tuple((x + ox, y + oy, z + oz) for x, y, z in mesh.vertices),
        mesh.faces,
    )


def scale_mesh_to_target(
    mesh: TriangleMesh, target_size_mm: float, fit_ratio: float = 1.5
) -> TriangleMesh:
    """Uniformly scale about the AABB center so max extent = fit_ratio * target_size_mm.

    fit_ratio is the tool-to-item size ratio (a knife must exceed the cake's
    width); 1.5 is the default knob.
    """
    if target_size_mm <= 0:
        raise NonPositiveTarget(f"target size {target_size_mm} mm")
    if fit_ratio <= 0:
        raise NonPositiveTarget(f"fit ratio {fit_ratio}")
    if not mesh.vertices or not mesh.faces:
        raise EmptyMesh("cannot scale an empty mesh")

    extent = max_extent(mesh)
    if extent <= 0:
        raise DegenerateMesh(f"mesh max extent {extent} mm")

    factor = fit_ratio * target_size_mm / extent
    if factor == 1.0:
        return mesh
    cx, cy, cz = bounding_box(mesh).center
    return TriangleMesh(
        tuple(
            (cx + factor * (x - cx), cy + factor * (y - cy), cz + factor * (z - cz))
            for x, y, z in mesh.vertices
        ),
        mesh.faces,
    )
