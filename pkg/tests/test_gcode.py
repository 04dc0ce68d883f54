"""G-code emission, extrusion math, stats, and the golden fixture."""

import math
import random
import sys
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from toolforge.errors import EmptyLayers, ExceedsBed
from toolforge.gcode import (
    GcodeCommand,
    GcodeProgram,
    emit_gcode,
    extrusion_per_mm,
    gcode_stats,
    program_header,
)
from toolforge.meshgen import extrude_polygon
from toolforge.slicer import LayerContours, PrinterProfile, generate_infill, slice_mesh

from conftest import FIXTURES

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "scripts"))
from make_golden_gcode import build_knife_gcode  # noqa: E402


def square_layer(side=10.0, z=0.1):
    loop = [(0.0, 0.0), (side, 0.0), (side, side), (0.0, side), (0.0, 0.0)]
    return LayerContours(z_mm=z, loops=[loop])


def shifted(layer, dx, dy):
    loops = [[(x + dx, y + dy) for x, y in loop] for loop in layer.loops]
    return LayerContours(z_mm=layer.z_mm, loops=loops)


class TestExtrusionMath:
    def test_per_mm_formula(self):
        profile = PrinterProfile()
        expected = (0.2 * 0.4) / (math.pi * 1.75**2 / 4)
        assert extrusion_per_mm(profile) == pytest.approx(expected, rel=1e-12)

    def test_square_loop_total_e(self):
        """Perimeter 80 mm at defaults -> E ~= 2.6607."""
        layer = shifted(square_layer(side=20.0), 100.0, 100.0)
        program = emit_gcode([layer], [[]], PrinterProfile())
        total_e = sum(c.e for c in program.commands if c.e)
        assert total_e == pytest.approx(2.6607, abs=1e-3)


class TestEmit:
    def test_empty_layers_rejected(self):
        with pytest.raises(EmptyLayers):
            emit_gcode([], [], PrinterProfile())

    def test_off_bed_rejected(self):
        layer = shifted(square_layer(), 300.0, 0.0)
        with pytest.raises(ExceedsBed):
            emit_gcode([layer], [[]], PrinterProfile())

    def test_negative_coordinate_rejected(self):
        layer = shifted(square_layer(), -20.0, 0.0)
        with pytest.raises(ExceedsBed):
            emit_gcode([layer], [[]], PrinterProfile())

    def test_travel_has_no_extrusion(self):
        layer = square_layer()
        program = emit_gcode([layer], [[]], PrinterProfile())
        for cmd in program.commands:
            if cmd.code == "G0":
                assert not cmd.e

    def test_extrudes_positive(self):
        program = emit_gcode([square_layer()], [[]], PrinterProfile())
        for cmd in program.commands:
            if cmd.code == "G1" and cmd.e is not None:
                assert cmd.e > 0

    def test_z_nondecreasing(self):
        layers = [square_layer(z=0.1), square_layer(z=0.3)]
        program = emit_gcode(layers, [[], []], PrinterProfile())
        z = 0.0
        for cmd in program.commands:
            if cmd.z is not None:
                assert cmd.z >= z
                z = cmd.z

    def test_perimeter_before_infill(self):
        layer = square_layer()
        fill = generate_infill(layer, 2.0, 0.0)
        program = emit_gcode([layer], [fill], PrinterProfile())
        moves = [c for c in program.commands if c.code in ("G0", "G1")]
        corner_idx = next(i for i, c in enumerate(moves) if c.y == 10.0)
        infill_idx = next(i for i, c in enumerate(moves) if c.y == fill[0][0][1])
        assert corner_idx < infill_idx

    def test_header_echoes_profile(self):
        cmds = program_header(PrinterProfile(print_feed_mm_per_min=1234.0))
        text = GcodeProgram(commands=cmds, profile=PrinterProfile()).to_text()
        assert "; print_feed_mm_per_min=1234" in text
        assert "G21" in text and "G90" in text and "M83" in text

    def test_feed_emitted_only_on_change(self):
        layer = square_layer()
        fill = generate_infill(layer, 2.0, 0.0)
        program = emit_gcode([layer], [fill], PrinterProfile())
        feeds = [c.f for c in program.commands if c.code in ("G0", "G1")]
        seen_f = [f for f in feeds if f is not None]
        assert len(seen_f) < len(feeds)
        last = None
        for cmd in program.commands:
            if cmd.code not in ("G0", "G1"):
                continue
            expected = 6000.0 if cmd.code == "G0" else 1800.0
            if expected != last:
                assert cmd.f == expected
                last = expected
            else:
                assert cmd.f is None


class TestStats:
    def test_header_only_zeros(self):
        program = GcodeProgram(commands=(), profile=PrinterProfile())
        stats = gcode_stats(program)
        assert stats["extruded_path_mm"] == 0.0
        assert stats["travel_path_mm"] == 0.0
        assert stats["filament_mm"] == 0.0
        assert stats["layer_count"] == 0
        assert stats["estimated_seconds"] == 0.0

    def test_single_10mm_extrude_at_600(self):
        cmds = (GcodeCommand(code="G1", x=10.0, y=0.0, e=0.33, f=600.0),)
        stats = gcode_stats(GcodeProgram(commands=cmds, profile=PrinterProfile()))
        assert stats["estimated_seconds"] == pytest.approx(1.0, rel=1e-9)
        assert stats["extruded_path_mm"] == pytest.approx(10.0, rel=1e-12)
        assert stats["filament_mm"] == pytest.approx(0.33)

    def test_path_length_round_trip(self):
        """Stats path length equals the geometric length of the inputs."""
        layer = square_layer(side=17.0)
        fill = generate_infill(layer, 2.0, 0.0)
        program = emit_gcode([layer], [fill], PrinterProfile())
        stats = gcode_stats(program)
        expected = 4 * 17.0 + sum(
            math.dist(a, b) for seg in fill for a, b in zip(seg, seg[1:])
        )
        assert stats["extruded_path_mm"] == pytest.approx(expected, rel=1e-9)

    def test_layer_count_matches_input(self):
        layers = [square_layer(z=0.1 + 0.2 * k) for k in range(7)]
        program = emit_gcode(layers, [[] for _ in layers], PrinterProfile())
        assert gcode_stats(program)["layer_count"] == 7


class TestConservation:
    @given(st.integers(0, 10_000))
    @settings(max_examples=30, deadline=None)
    def test_extrusion_conservation(self, seed):
        """Total E == extruded path length x per-mm factor, rel 1e-9."""
        rng = random.Random(seed)
        side = rng.uniform(5.0, 40.0)
        profile = PrinterProfile()
        mesh = extrude_polygon(
            [(100, 100), (100 + side, 100), (100 + side, 100 + side), (100, 100 + side)],
            rng.uniform(0.5, 3.0),
        )
        layers = slice_mesh(mesh, profile)
        infill = [
            generate_infill(layer, profile.infill_spacing_mm, 90.0 * (k % 2))
            for k, layer in enumerate(layers)
        ]
        program = emit_gcode(layers, infill, profile)
        stats = gcode_stats(program)
        expected = stats["extruded_path_mm"] * extrusion_per_mm(profile)
        assert stats["filament_mm"] == pytest.approx(expected, rel=1e-9)


class TestGolden:
    def test_knife_gcode_matches_golden_bytes(self):
        golden = (FIXTURES / "golden" / "knife.gcode").read_text(encoding="utf-8")
        assert build_knife_gcode() == golden

    def test_golden_regeneration_is_deterministic(self):
        assert build_knife_gcode() == build_knife_gcode()
