"""Mock mesh generation: extrusion helper and tool library."""

import random

import pytest
from hypothesis import given, settings, strategies as st

from toolforge.errors import UnknownObject
from toolforge.mesh import bounding_box, parse_mesh_text, signed_volume, validate_mesh
from toolforge.meshgen import (
    FaultInjectingMeshGenerator,
    MockMeshGenerator,
    extrude_polygon,
    known_tools,
    tool_mesh,
    tool_name_from_prompt,
)

import oracles
from conftest import random_convex_polygon

KNIFE_PROMPT = "Create a 3D model of a knife"


class TestExtrude:
    def test_square_prism_volume(self):
        mesh = extrude_polygon([(0, 0), (10, 0), (10, 10), (0, 10)], 5.0)
        assert signed_volume(mesh) == pytest.approx(500.0, rel=1e-12)

    def test_result_is_watertight_and_oriented(self):
        mesh = extrude_polygon([(0, 0), (10, 0), (10, 10), (0, 10)], 5.0)
        assert validate_mesh(mesh).ok

    def test_volume_matches_shoelace_times_height(self):
        rng = random.Random(99)
        for _ in range(20):
            poly = random_convex_polygon(rng)
            mesh = extrude_polygon(poly, 7.5)
            expected = abs(oracles.shoelace_area(poly)) * 7.5
            assert signed_volume(mesh) == pytest.approx(expected, rel=1e-9)

    def test_too_few_points_rejected(self):
        with pytest.raises(ValueError):
            extrude_polygon([(0, 0), (1, 0)], 5.0)

    def test_zero_thickness_rejected(self):
        with pytest.raises(ValueError):
            extrude_polygon([(0, 0), (1, 0), (0, 1)], 0.0)

    @given(st.floats(0.5, 50.0), st.integers(0, 10_000))
    @settings(max_examples=25)
    def test_extrusion_height_property(self, thickness, seed):
        poly = random_convex_polygon(random.Random(seed))
        box = bounding_box(extrude_polygon(poly, thickness))
        assert box.max[2] - box.min[2] == pytest.approx(thickness, rel=1e-12)


class TestToolLibrary:
    def test_known_tools_nonempty(self):
        tools = known_tools()
        assert {"knife", "wrench", "screwdriver", "hammer"} <= set(tools)

    def test_every_tool_mesh_is_valid(self):
        for name in known_tools():
            report = validate_mesh(tool_mesh(name))
            assert report.ok, (name, report.defects)
            assert report.signed_volume_mm3 > 0.0

    def test_unlisted_tool_uses_generic_profile(self):
        report = validate_mesh(tool_mesh("spatula"))
        assert report.ok
        assert report.signed_volume_mm3 > 0.0

    def test_prompt_name_extraction(self):
        assert tool_name_from_prompt(KNIFE_PROMPT) == "knife"
        assert tool_name_from_prompt("Create a 3D model of a wrench.") == "wrench"

    def test_prompt_without_marker_rejected(self):
        with pytest.raises(UnknownObject):
            tool_name_from_prompt("a lovely teapot")

    def test_prompt_with_empty_name_rejected(self):
        with pytest.raises(UnknownObject):
            tool_name_from_prompt("Create a 3D model of a ")


class TestMockGenerator:
    def test_generates_parseable_valid_mesh(self):
        text = MockMeshGenerator().generate(KNIFE_PROMPT)
        assert validate_mesh(parse_mesh_text(text)).ok

    def test_deterministic(self):
        gen = MockMeshGenerator()
        assert gen.generate(KNIFE_PROMPT) == gen.generate(KNIFE_PROMPT)

    def test_generous_max_faces_accepted(self):
        text = MockMeshGenerator().generate(KNIFE_PROMPT, max_faces=10_000)
        assert len(parse_mesh_text(text).faces) <= 10_000

    def test_tiny_max_faces_rejected(self):
        with pytest.raises(UnknownObject):
            MockMeshGenerator().generate(KNIFE_PROMPT, max_faces=2)


class TestFaultInjection:
    def test_broken_then_good(self):
        gen = FaultInjectingMeshGenerator(MockMeshGenerator(), broken_attempts=2)
        for _ in range(2):
            text = gen.generate(KNIFE_PROMPT)
            try:
                ok = validate_mesh(parse_mesh_text(text)).ok
            except Exception:
                ok = False
            assert not ok
        assert validate_mesh(parse_mesh_text(gen.generate(KNIFE_PROMPT))).ok

    def test_zero_broken_passes_through(self):
        gen = FaultInjectingMeshGenerator(MockMeshGenerator(), broken_attempts=0)
        assert gen.generate(KNIFE_PROMPT) == MockMeshGenerator().generate(KNIFE_PROMPT)
