"""Deterministic parametric tool meshes, used as the mock mesh-text generator.

Each tool is a flat star-shaped 2D profile extruded along Z into a watertight
prism (caps fan-triangulated from a per-profile apex vertex that sees the
whole polygon). The generated shapes deliberately stay simple: sharp edges,
constant cross-sections, nothing curved.
"""

from __future__ import annotations

from typing import Protocol

from .errors import UnknownObject
from .mesh import TriangleMesh, serialize_mesh

Point2 = tuple[float, float]

# profile: CCW 2D outline in mm; apex: index of the fan vertex (must see the
# whole polygon); thickness: extrusion height in mm.
_TOOL_PROFILES: dict[str, dict] = {
    "knife": {
        "profile": [
            (0.0, -9.0), (35.0, -9.0), (40.0, -6.0), (88.0, -6.0),
            (100.0, 4.0), (40.0, 6.0), (35.0, 9.0), (0.0, 9.0),
        ],
        "apex": 2,
        "thickness": 3.0,
    },
    "wrench": {
        "profile": [
            (0.0, -7.0), (75.0, -10.0), (100.0, -10.0), (92.0, 0.0),
            (100.0, 10.0), (75.0, 10.0), (0.0, 7.0),
        ],
        "apex": 3,
        "thickness": 6.0,
    },
    "screwdriver": {
        "profile": [
            (0.0, -9.0), (40.0, -9.0), (42.0, -3.0), (105.0, -3.0),
            (110.0, -1.0), (110.0, 1.0), (105.0, 3.0), (42.0, 3.0),
            (40.0, 9.0), (0.0, 9.0),
        ],
        "apex": 2,
        "thickness": 6.0,
    },
    "hammer": {
        "profile": [
            (0.0, -6.0), (70.0, -6.0), (72.0, -20.0), (100.0, -20.0),
            (100.0, 20.0), (72.0, 20.0), (70.0, 6.0), (0.0, 6.0),
        ],
        "apex": 1,
        "thickness": 10.0,
    },
}

# Fallback silhouette for tool names without a dedicated profile: a flat
# paddle, still a usable sharp-edged shape.
_GENERIC_PROFILE = {
    "profile": [
        (0.0, -8.0), (60.0, -8.0), (64.0, -20.0), (100.0, -20.0),
        (100.0, 20.0), (64.0, 20.0), (60.0, 8.0), (0.0, 8.0),
    ],
    "apex": 1,
    "thickness": 5.0,
}


def fan_triangulate(n: int, apex: int) -> list[tuple[int, int, int]]:
    """Index triangles of an n-gon fanned from the apex vertex."""
    order = [(apex + k) % n for k in range(1, n)]
    return [(apex, a, b) for a, b in zip(order, order[1:])]


def extrude_polygon(profile: list[Point2], thickness: float, apex: int = 0) -> TriangleMesh:
    """Extrude a CCW star-shaped polygon along +Z into a watertight prism.

    Bottom ring sits at z=0, top ring at z=thickness. Winding is outward:
    bottom cap faces -Z, top cap +Z, side quads split into two triangles.
    """
    n = len(profile)
    if n < 3:
        raise ValueError("profile needs at least 3 points")
    if thickness <= 0:
        raise ValueError("thickness must be positive")

    vertices = [(x, y, 0.0) for x, y in profile] + [(x, y, thickness) for x, y in profile]
    faces: list[tuple[int, int, int]] = []
    for a, b, c in fan_triangulate(n, apex):
        faces.append((a, c, b))          # bottom cap, -Z normal
        faces.append((a + n, b + n, c + n))  # top cap, +Z normal
    for i in range(n):
        j = (i + 1) % n
        faces.append((i, j, j + n))
        faces.append((i, j + n, i + n))
    return TriangleMesh(tuple(vertices), tuple(faces))


def tool_mesh(tool_name: str) -> TriangleMesh:
    """Nominal-size mesh for a tool name (scaling happens downstream)."""
    spec = _TOOL_PROFILES.get(tool_name.strip().lower(), _GENERIC_PROFILE)
    return extrude_polygon(spec["profile"], spec["thickness"], spec["apex"])


def known_tools() -> tuple[str, ...]:
    return tuple(sorted(_TOOL_PROFILES))


def tool_name_from_prompt(prompt: str) -> str:
    """Extract the tool name from a 'Create a 3D model of a <tool>' prompt."""
    marker = " of a "
    lowered = prompt.lower()
    if marker not in lowered:
        raise UnknownObject(f"cannot find a tool name in prompt {prompt!r}")
    name = prompt[lowered.rindex(marker) + len(marker):].strip().strip(".").strip()
    if not name:
        raise UnknownObject(f"empty tool name in prompt {prompt!r}")
    return name


class MeshGenBackend(Protocol):
    name: str

    def generate(self, prompt: str, max_faces: int | None = None) -> str: ...


class MockMeshGenerator:
    """Deterministic text-to-mesh stand-in: prompt -> parametric v/f text."""

    name = "mock"

    def generate(self, prompt: str, max_faces: int | None = None) -> str:
        mesh = tool_mesh(tool_name_from_prompt(prompt))
        if max_faces is not None and len(mesh.faces) > max_faces:
            raise UnknownObject(
                f"mock mesh for {prompt!r} needs {len(mesh.faces)} faces > cap {max_faces}"
            )
        return serialize_mesh(mesh)


class FaultInjectingMeshGenerator:
    """Wrap a generator so the first `broken_attempts` calls emit a defective mesh.

    The broken variant drops the final face, opening the surface, which the
    validation stage must catch and retry.
    """

    name = "fault-injecting"

    def __init__(self, inner: MeshGenBackend, broken_attempts: int):
        self.inner = inner
        self.broken_attempts = broken_attempts
        self.calls = 0

    def generate(self, prompt: str, max_faces: int | None = None) -> str:
        self.calls += 1
        text = self.inner.generate(prompt, max_faces)
        if self.calls <= self.broken_attempts:
            lines = text.strip().splitlines()
            return "\n".join(lines[:-1]) + "\n"
        return text


class RemoteMeshGenerator:
    """Mesh generator backed by a remote model server."""

    name = "remote"

    def __init__(self, url: str, timeout_s: float = 30.0):
        self.url = url
        self.timeout_s = timeout_s

    def generate(self, prompt: str, max_faces: int | None = None) -> str:
        from . import wire

        return wire.call_genmesh(self.url, prompt, max_faces=max_faces, timeout_s=self.timeout_s)
