"""End-to-end pipeline: scene in, tool printed (simulated), task executed.

Stages: interpret the scene, formulate a tool prompt, generate a mesh
(bounded retry on validation defects; an inverted orientation is repaired
in place rather than retried), scale it to the target, place it on the
bed, slice, emit G-code, then run the control loop and record the episode.
Stage failures come back as a record naming the failed stage, never as an
exception, so batch callers can keep going.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from pathlib import Path

from .action import TaskSpec, world_from_snapshot
from .config import PipelineConfig
from .control import run_control_loop
from .episodes import save_episode
from .errors import TargetMissing, ToolforgeError, ValidationExhausted
from .gcode import emit_gcode
from .mesh import (
    TriangleMesh,
    bounding_box,
    flip_faces,
    parse_mesh_text,
    scale_mesh_to_target,
    serialize_mesh,
    translate_mesh,
    validate_mesh,
    weld_vertices,
)
from .meshgen import MeshGenBackend, MockMeshGenerator, RemoteMeshGenerator
from .policies import PolicyBackend, RemotePolicy, ScriptedExpert
from .scene import (
    InterpreterBackend,
    MockInterpreter,
    RemoteInterpreter,
    interpret_scene,
    load_scene,
)
from .slicer import generate_infill, slice_mesh

STAGES = ("load_scene", "interpret", "genmesh", "validate", "scale", "slice", "control")


@dataclass(frozen=True)
class PipelineRunRecord:
    success: bool
    attempts: int
    timings: dict = field(default_factory=dict)
    mesh_path: str | None = None
    gcode_path: str | None = None
    episode_path: str | None = None
    failed_stage: str | None = None
    error: str | None = None

    def to_dict(self) -> dict:
        return {
            "success": self.success,
            "attempts": self.attempts,
            "timings": dict(self.timings),
            "mesh_path": self.mesh_path,
            "gcode_path": self.gcode_path,
            "episode_path": self.episode_path,
            "failed_stage": self.failed_stage,
            "error": self.error,
        }


def make_interpreter(config: PipelineConfig) -> InterpreterBackend:
    if config.interpret_backend == "remote":
        return RemoteInterpreter(config.interpret_url, timeout_s=config.request_timeout_s)
    return MockInterpreter()


def make_mesh_generator(config: PipelineConfig) -> MeshGenBackend:
    if config.genmesh_backend == "remote":
        return RemoteMeshGenerator(config.genmesh_url, timeout_s=config.request_timeout_s)
    return MockMeshGenerator()


def make_policy(config: PipelineConfig) -> PolicyBackend:
    if config.act_backend == "remote":
        return RemotePolicy(config.act_url, timeout_s=config.request_timeout_s)
    return ScriptedExpert()


def generate_valid_mesh(
    generator: MeshGenBackend, prompt: str, max_attempts: int, timings: dict
) -> tuple[TriangleMesh, int]:
    """Generate until validation passes, up to max_attempts.

    Parse failures and validation defects both consume an attempt; a mesh
    whose only flaw is inverted orientation is flipped and accepted.
    Accumulates per-stage seconds into ``timings``.
    """
    timings.setdefault("genmesh", 0.0)
    timings.setdefault("validate", 0.0)
    last_problem = "no attempts made"
    for attempt in range(1, max_attempts + 1):
        t0 = time.perf_counter()
        try:
            text = generator.generate(prompt)
            mesh = parse_mesh_text(text)
        except ToolforgeError as exc:
            timings["genmesh"] += time.perf_counter() - t0
            last_problem = f"attempt {attempt}: unparseable mesh ({exc})"
            continue
        timings["genmesh"] += time.perf_counter() - t0

        t0 = time.perf_counter()
        mesh = weld_vertices(mesh)
        report = validate_mesh(mesh)
        timings["validate"] += time.perf_counter() - t0
        kinds = {d.kind for d in report.defects}
        if kinds == {"inverted_orientation"}:
            return flip_faces(mesh), attempt
        if not kinds:
            return mesh, attempt
        last_problem = f"attempt {attempt}: defects {sorted(kinds)}"
    raise ValidationExhausted(
        f"no valid mesh after {max_attempts} attempts; last problem: {last_problem}"
    )


def place_on_bed(mesh: TriangleMesh, bed_size_mm) -> TriangleMesh:
    """Center the mesh on the bed in XY and rest it on z = 0."""
    box = bounding_box(mesh)
    center = box.center
    return translate_mesh(
        mesh,
        (
            bed_size_mm[0] / 2.0 - center[0],
            bed_size_mm[1] / 2.0 - center[1],
            -box.min[2],
        ),
    )


def run_pipeline(scene_path: str | Path, task: TaskSpec, config: PipelineConfig) -> PipelineRunRecord:
    """Run the full scene-to-episode pipeline; see module docstring."""
    timings = {"interpret": 0.0, "genmesh": 0.0, "validate": 0.0, "slice": 0.0}
    attempts = 0
    out_dir = Path(config.output_dir)

    def failure(stage: str, exc: Exception) -> PipelineRunRecord:
        return PipelineRunRecord(
            success=False,
            attempts=attempts,
            timings=timings,
            failed_stage=stage,
            error=f"{type(exc).__name__}: {exc}",
        )

    try:
        snapshot = load_scene(scene_path)
    except ToolforgeError as exc:
        return failure("load_scene", exc)

    t0 = time.perf_counter()
    try:
        analysis = interpret_scene(snapshot, make_interpreter(config))
    except ToolforgeError as exc:
        timings["interpret"] = time.perf_counter() - t0
        return failure("interpret", exc)
    timings["interpret"] = time.perf_counter() - t0

    generator = make_mesh_generator(config)
    try:
        mesh, attempts = generate_valid_mesh(
            generator, analysis.tool_prompt, config.max_genmesh_attempts, timings
        )
    except ToolforgeError as exc:
        attempts = config.max_genmesh_attempts
        return failure("genmesh", exc)

    try:
        mesh = scale_mesh_to_target(mesh, analysis.target.approx_size_mm, config.fit_ratio)
        mesh = place_on_bed(mesh, config.profile.bed_size_mm)
    except ToolforgeError as exc:
        return failure("scale", exc)

    out_dir.mkdir(parents=True, exist_ok=True)
    mesh_path = out_dir / f"{analysis.tool_name}.obj"
    mesh_path.write_text(serialize_mesh(mesh), encoding="utf-8")

    t0 = time.perf_counter()
    try:
        layers = slice_mesh(mesh, config.profile)
        infill = [
            generate_infill(layer, config.profile.infill_spacing_mm,
                            0.0 if i % 2 == 0 else 90.0)
            for i, layer in enumerate(layers)
        ]
        program = emit_gcode(layers, infill, config.profile)
    except ToolforgeError as exc:
        timings["slice"] += time.perf_counter() - t0
        return failure("slice", exc)
    timings["slice"] += time.perf_counter() - t0

    gcode_path = out_dir / f"{analysis.tool_name}.gcode"
    gcode_path.write_text(program.to_text(), encoding="utf-8")

    try:
        world = world_from_snapshot(snapshot)
        episode = run_control_loop(
            make_policy(config), world, task,
            hz=config.hz, mode=config.control_mode, seed=config.seed,
        )
    except (ToolforgeError, TargetMissing) as exc:
        return PipelineRunRecord(
            success=False, attempts=attempts, timings=timings,
            mesh_path=str(mesh_path), gcode_path=str(gcode_path),
            failed_stage="control", error=f"{type(exc).__name__}: {exc}",
        )

    episode_path = out_dir / f"episode-{episode.episode_id}.json"
    save_episode(episode, episode_path)

    error = episode.metadata.get("error")
    return PipelineRunRecord(
        success=episode.success,
        attempts=attempts,
        timings=timings,
        mesh_path=str(mesh_path),
        gcode_path=str(gcode_path),
        episode_path=str(episode_path),
        failed_stage="control" if not episode.success else None,
        error=error if error else (None if episode.success else "episode did not reach the goal"),
    )
