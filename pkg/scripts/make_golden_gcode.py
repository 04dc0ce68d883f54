#!/usr/bin/env python3
"""Regenerate the golden knife G-code fixture.

Runs the mock mesh path end to end (generate -> weld -> validate -> scale ->
place -> slice -> infill -> emit) with default settings and writes the result
to tests/fixtures/golden/knife.gcode. Run from the repo root after any
intentional change to the toolpath or header format, then review the diff.
"""

from pathlib import Path

from toolforge.gcode import emit_gcode
from toolforge.mesh import parse_mesh_text, scale_mesh_to_target, weld_vertices
from toolforge.meshgen import MockMeshGenerator
from toolforge.pipeline import place_on_bed
from toolforge.slicer import PrinterProfile, generate_infill, slice_mesh

TARGET_SIZE_MM = 80.0
FIT_RATIO = 1.5


def build_knife_gcode() -> str:
    profile = PrinterProfile()
    text = MockMeshGenerator().generate("Create a 3D model of a knife")
    mesh = weld_vertices(parse_mesh_text(text))
    mesh = scale_mesh_to_target(mesh, TARGET_SIZE_MM, fit_ratio=FIT_RATIO)
    mesh = place_on_bed(mesh, profile.bed_size_mm)
    layers = slice_mesh(mesh, profile)
    infill = [
        generate_infill(layer, profile.infill_spacing_mm, 0.0 if k % 2 == 0 else 90.0)
        for k, layer in enumerate(layers)
    ]
    return emit_gcode(layers, infill, profile).to_text()


def main() -> None:
    out = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "golden" / "knife.gcode"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(build_knife_gcode(), encoding="utf-8")
    print(f"wrote {out} ({out.stat().st_size} bytes)")


if __name__ == "__main__":
    main()
