"""Shared fixtures and procedural geometry generators for the test suite."""

from __future__ import annotations

import math
import random
from pathlib import Path

import pytest

from toolforge.mesh import TriangleMesh
from toolforge.meshgen import extrude_polygon

FIXTURES = Path(__file__).parent / "fixtures"

# test_acceptance.py appends one "PASS ..."/"FAIL ..." line per criterion;
# replayed after the run so the verdicts survive output capture.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def cake_scene_path() -> Path:
    return FIXTURES / "scenes" / "cake.json"


@pytest.fixture
def scenes_dir() -> Path:
    return FIXTURES / "scenes"


def random_convex_polygon(rng: random.Random, n_min: int = 3, n_max: int = 10,
                          radius: float = 20.0) -> list[tuple[float, float]]:
    """Convex CCW polygon: points on a randomized ellipse at sorted angles.

    Angles are spaced at least 0.1 rad apart so no two points collapse and
    no three become collinear enough to produce degenerate triangles.
    """
    n = rng.randint(n_min, n_max)
    while True:
        angles = sorted(rng.uniform(0.0, 2.0 * math.pi) for _ in range(n))
        gaps = [b - a for a, b in zip(angles, angles[1:])]
        gaps.append(2.0 * math.pi - (angles[-1] - angles[0]))
        if min(gaps) > 0.1:
            break
    rx = radius * rng.uniform(0.5, 1.5)
    ry = radius * rng.uniform(0.5, 1.5)
    return [(rx * math.cos(a), ry * math.sin(a)) for a in angles]


def random_convex_prism(rng: random.Random) -> TriangleMesh:
    """Random convex prism (a convex polyhedron the slicer oracle can clip)."""
    profile = random_convex_polygon(rng)
    thickness = rng.uniform(2.0, 30.0)
    return extrude_polygon(profile, thickness)


def random_watertight_mesh(rng: random.Random) -> TriangleMesh:
    """Watertight test mesh: a random convex prism, sometimes translated."""
    mesh = random_convex_prism(rng)
    if rng.random() < 0.5:
        from toolforge.mesh import translate_mesh

        mesh = translate_mesh(
            mesh,
            (rng.uniform(-50, 50), rng.uniform(-50, 50), rng.uniform(-50, 50)),
        )
    return mesh


def tetrahedron() -> TriangleMesh:
    """Unit-ish tetrahedron with outward winding."""
    return TriangleMesh(
        vertices=((0.0, 0.0, 0.0), (10.0, 0.0, 0.0), (0.0, 10.0, 0.0), (0.0, 0.0, 10.0)),
        faces=((0, 2, 1), (0, 1, 3), (0, 3, 2), (1, 2, 3)),
    )
