"""G-code emission for sliced layers (Marlin-flavored subset).

Programs use millimeter units, absolute XYZ positioning, and relative
extrusion (M83), so total filament use is the plain sum of E values and the
geometry/extrusion conservation property is checkable by summation. Header
and footer strings are fixed; artifact text must stay byte-stable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import EmptyLayers, ExceedsBed
from .slicer import LayerContours, Point2, PrinterProfile


@dataclass(frozen=True)
class GcodeCommand:
    """One program line. ``code`` is "G0"/"G1" for moves; any other code is
    emitted verbatim (header/footer words like "G21" or "M104 S0")."""

    code: str
    x: float | None = None
    y: float | None = None
    z: float | None = None
    e: float | None = None
    f: float | None = None
    comment: str | None = None

    def is_move(self) -> bool:
        return self.code in ("G0", "G1")


@dataclass(frozen=True)
class GcodeProgram:
    commands: tuple[GcodeCommand, ...]
    profile: PrinterProfile

    def to_text(self) -> str:
        return "".join(_format_command(c) + "\n" for c in self.commands)


def extrusion_per_mm(profile: PrinterProfile) -> float:
    """Filament millimeters pushed per millimeter of printed path."""
    filament_area = math.pi * profile.filament_diameter_mm**2 / 4.0
    return (profile.layer_height_mm * profile.line_width_mm) / filament_area


def _fmt_float(value: float) -> str:
    return f"{value:g}"


def _format_command(cmd: GcodeCommand) -> str:
    if cmd.code == ";":
        return f"; {cmd.comment}" if cmd.comment else ";"
    parts = [cmd.code]
    if cmd.is_move():
        if cmd.x is not None:
            parts.append(f"X{cmd.x:.3f}")
        if cmd.y is not None:
            parts.append(f"Y{cmd.y:.3f}")
        if cmd.z is not None:
            parts.append(f"Z{cmd.z:.3f}")
        if cmd.e is not None:
            parts.append(f"E{cmd.e:.5f}")
        if cmd.f is not None:
            parts.append(f"F{cmd.f:g}")
    line = " ".join(parts)
    if cmd.comment:
        line += f" ; {cmd.comment}"
    return line


def program_header(profile: PrinterProfile) -> tuple[GcodeCommand, ...]:
    bx, by, bz = profile.bed_size_mm
    echo = [
        "toolforge print",
        f"layer_height_mm={_fmt_float(profile.layer_height_mm)}",
        f"line_width_mm={_fmt_float(profile.line_width_mm)}",
        f"filament_diameter_mm={_fmt_float(profile.filament_diameter_mm)}",
        f"print_feed_mm_per_min={_fmt_float(profile.print_feed_mm_per_min)}",
        f"travel_feed_mm_per_min={_fmt_float(profile.travel_feed_mm_per_min)}",
        f"bed_size_mm={_fmt_float(bx)}x{_fmt_float(by)}x{_fmt_float(bz)}",
        f"infill_spacing_mm={_fmt_float(profile.infill_spacing_mm)}",
    ]
    fixed = (
        GcodeCommand(code="G21", comment="units: millimeters"),
        GcodeCommand(code="G90", comment="absolute positioning"),
        GcodeCommand(code="M83", comment="relative extrusion"),
        GcodeCommand(code="M104 S0", comment="hotend placeholder"),
        GcodeCommand(code="M140 S0", comment="bed placeholder"),
    )
    return tuple(GcodeCommand(code=";", comment=text) for text in echo) + fixed


def program_footer() -> tuple[GcodeCommand, ...]:
    return (
        GcodeCommand(code="M104 S0", comment="hotend off"),
        GcodeCommand(code="M140 S0", comment="bed off"),
        GcodeCommand(code=";", comment="end of print"),
    )


def _check_on_bed(x: float, y: float, z: float, profile: PrinterProfile) -> None:
    bx, by, bz = profile.bed_size_mm
    if not (0.0 <= x <= bx and 0.0 <= y <= by and 0.0 <= z <= bz):
        raise ExceedsBed(
            f"point ({x:g}, {y:g}, {z:g}) outside bed "
            f"[0, {bx:g}] x [0, {by:g}] x [0, {bz:g}]"
        )


def emit_gcode(
    layers: Sequence[LayerContours],
    infill: Sequence[Sequence[tuple[Point2, ...]]] | None,
    profile: PrinterProfile,
) -> GcodeProgram:
    """Turn contours plus optional per-layer infill polylines into a program.

    Per layer the perimeter loops print first, then infill; travels between
    disconnected paths carry no extrusion. ``infill`` must align with
    ``layers`` when given.
    """
    if not layers:
        raise EmptyLayers("no layers to print")
    if infill is not None and len(infill) != len(layers):
        raise ValueError(f"{len(infill)} infill groups for {len(layers)} layers")

    k_e = extrusion_per_mm(profile)
    commands: list[GcodeCommand] = list(program_header(profile))
    feed: float | None = None

    def move(code: str, x: float, y: float, z: float | None, e: float | None, want_feed: float):
        nonlocal feed
        _check_on_bed(x, y, z if z is not None else current_z, profile)
        f_field = want_feed if feed != want_feed else None
        feed = want_feed
        commands.append(GcodeCommand(code=code, x=x, y=y, z=z, e=e, f=f_field))

    for layer_idx, layer in enumerate(layers):
        current_z = layer.z_mm
        commands.append(GcodeCommand(code=";", comment=f"layer {layer_idx} z={layer.z_mm:.3f}"))
        paths: list[tuple[Point2, ...]] = list(layer.loops)
        if infill is not None:
            paths.extend(infill[layer_idx])
        first_in_layer = True
        for path in paths:
            if len(path) < 2:
                continue
            x0, y0 = path[0]
            move("G0", x0, y0, layer.z_mm if first_in_layer else None, None,
                 profile.travel_feed_mm_per_min)
            first_in_layer = False
            px, py = x0, y0
            for x1, y1 in path[1:]:
                length = math.hypot(x1 - px, y1 - py)
                move("G1", x1, y1, None, length * k_e, profile.print_feed_mm_per_min)
                px, py = x1, y1

    commands.extend(program_footer())
    return GcodeProgram(commands=tuple(commands), profile=profile)


def gcode_stats(program: GcodeProgram) -> dict:
    """Walk the program from (0, 0, 0) and total path, filament, and time.

    estimated_seconds converts each move's modal feed (mm/min) to seconds;
    moves issued before any feed rate contribute no time.
    """
    x, y, z = 0.0, 0.0, 0.0
    feed: float | None = None
    extruded_path = 0.0
    travel_path = 0.0
    filament = 0.0
    seconds = 0.0
    z_values: list[float] = []

    for cmd in program.commands:
        if not cmd.is_move():
            continue
        nx = cmd.x if cmd.x is not None else x
        ny = cmd.y if cmd.y is not None else y
        nz = cmd.z if cmd.z is not None else z
        length = math.sqrt((nx - x) ** 2 + (ny - y) ** 2 + (nz - z) ** 2)
        if cmd.f is not None:
            feed = cmd.f
        if cmd.e is not None:
            extruded_path += length
            filament += cmd.e
        else:
            travel_path += length
        if feed is not None and feed > 0:
            seconds += length / feed * 60.0
        if cmd.z is not None and (not z_values or cmd.z != z_values[-1]):
            z_values.append(cmd.z)
        x, y, z = nx, ny, nz

    return {
        "extruded_path_mm": extruded_path,
        "travel_path_mm": travel_path,
        "filament_mm": filament,
        "layer_count": len(z_values),
        "estimated_seconds": seconds,
    }
