"""Command-line interface.

Exit codes: 0 success, 1 domain error (or failed task/pipeline), 2 usage
error. Every command honors --format text|csv so output stays
machine-parseable either way.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from .action import make_task, world_from_snapshot
from .config import PipelineConfig, load_config
from .control import run_control_loop
from .episodes import save_episode, summarize_dataset, write_manifest
from .errors import ToolforgeError
from .evaluation import (
    CATEGORIES,
    aggregate_report,
    generate_scenarios,
    reference_snapshot,
    render_report,
    run_trials,
)
from .gcode import emit_gcode, gcode_stats
from .mesh import parse_mesh_text, scale_mesh_to_target, serialize_mesh, validate_mesh
from .pipeline import make_interpreter, make_mesh_generator, make_policy, run_pipeline
from .policies import NullPolicy, ScriptedExpert
from .scene import interpret_scene, load_scene
from .slicer import generate_infill, slice_mesh

TASK_CHOICES = ("cut", "pick_place")


def _load_pipeline_config(args) -> PipelineConfig:
    config = load_config(args.config) if args.config else PipelineConfig()
    if getattr(args, "seed", None) is not None:
        config = _replace(config, seed=args.seed)
    if getattr(args, "output", None) is not None:
        config = _replace(config, output_dir=args.output)
    return config


def _replace(config: PipelineConfig, **kwargs) -> PipelineConfig:
    from dataclasses import replace

    return replace(config, **kwargs)


def _emit_rows(rows: list[tuple[str, str]], fmt: str) -> None:
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(("key", "value"))
        writer.writerows(rows)
        sys.stdout.write(buf.getvalue())
    else:
        width = max((len(k) for k, _ in rows), default=0)
        for key, value in rows:
            print(f"{key:<{width}}  {value}")


def cmd_interpret(args) -> int:
    config = _load_pipeline_config(args)
    snapshot = load_scene(args.scene)
    analysis = interpret_scene(snapshot, make_interpreter(config))
    _emit_rows(
        [
            ("description", analysis.description),
            ("target", analysis.target.name),
            ("target_size_mm", f"{analysis.target.approx_size_mm:g}"),
            ("tool_name", analysis.tool_name),
            ("tool_prompt", analysis.tool_prompt),
        ],
        args.format,
    )
    return 0


def cmd_genmesh(args) -> int:
    config = _load_pipeline_config(args)
    text = make_mesh_generator(config).generate(args.prompt, max_faces=args.max_faces)
    if args.mesh_out:
        Path(args.mesh_out).write_text(text, encoding="utf-8")
        print(f"wrote {args.mesh_out}")
    else:
        sys.stdout.write(text)
    return 0


def cmd_mesh_validate(args) -> int:
    mesh = parse_mesh_text(Path(args.mesh).read_text(encoding="utf-8"))
    report = validate_mesh(mesh)
    rows = [
        ("watertight", str(report.watertight).lower()),
        ("oriented_consistently", str(report.oriented_consistently).lower()),
        ("signed_volume_mm3", f"{report.signed_volume_mm3:.6f}"),
        ("defect_count", str(len(report.defects))),
    ]
    for i, defect in enumerate(report.defects):
        rows.append((f"defect_{i}", f"{defect.kind}: {defect.detail}"))
    _emit_rows(rows, args.format)
    return 1 if report.defects else 0


def cmd_mesh_scale(args) -> int:
    mesh = parse_mesh_text(Path(args.mesh).read_text(encoding="utf-8"))
    config = _load_pipeline_config(args)
    fit_ratio = args.fit_ratio if args.fit_ratio is not None else config.fit_ratio
    scaled = scale_mesh_to_target(mesh, args.target_size_mm, fit_ratio)
    out = args.mesh_out or str(Path(args.mesh).with_suffix(".scaled.obj"))
    Path(out).write_text(serialize_mesh(scaled), encoding="utf-8")
    print(f"wrote {out}")
    return 0


def cmd_slice(args) -> int:
    config = _load_pipeline_config(args)
    mesh = parse_mesh_text(Path(args.mesh).read_text(encoding="utf-8"))
    layers = slice_mesh(mesh, config.profile)
    infill = [
        generate_infill(layer, config.profile.infill_spacing_mm, 0.0 if i % 2 == 0 else 90.0)
        for i, layer in enumerate(layers)
    ]
    program = emit_gcode(layers, infill, config.profile)
    out = args.gcode_out or str(Path(args.mesh).with_suffix(".gcode"))
    Path(out).write_text(program.to_text(), encoding="utf-8")
    stats = gcode_stats(program)
    _emit_rows(
        [("gcode_path", out)] + [(k, f"{v:g}") for k, v in stats.items()],
        args.format,
    )
    return 0


def _make_cli_policy(name: str, config: PipelineConfig):
    if name == "expert":
        return ScriptedExpert()
    if name == "null":
        return NullPolicy()
    if name == "remote":
        return make_policy(_replace(config, act_backend="remote"))
    raise ToolforgeError(f"unknown policy {name!r}")


def cmd_act_run(args) -> int:
    config = _load_pipeline_config(args)
    snapshot = load_scene(args.scene) if args.scene else reference_snapshot()
    target = snapshot.target
    if target is None:
        print("error: scene has no target object", file=sys.stderr)
        return 1
    world = world_from_snapshot(snapshot)
    task = make_task(args.task, target.name)
    policy = _make_cli_policy(args.policy, config)
    episode = run_control_loop(
        policy, world, task, hz=config.hz, mode=args.mode, seed=config.seed
    )
    rows = [
        ("episode_id", episode.episode_id),
        ("success", str(episode.success).lower()),
        ("steps", str(len(episode.steps))),
        ("wall_seconds", f"{episode.wall_seconds:.3f}"),
    ]
    if "error" in episode.metadata:
        rows.append(("error", episode.metadata["error"]))
    if args.save:
        save_episode(episode, args.save)
        rows.append(("episode_path", args.save))
    _emit_rows(rows, args.format)
    return 0 if episode.success else 1


def cmd_record(args) -> int:
    config = _load_pipeline_config(args)
    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    tasks = TASK_CHOICES if args.task == "both" else (args.task,)
    recorded = 0
    for task_name in tasks:
        for i in range(args.count):
            seed = config.seed + i
            snapshot = reference_snapshot()
            world = world_from_snapshot(snapshot)
            task = make_task(task_name, snapshot.target.name)
            episode = run_control_loop(
                ScriptedExpert(), world, task, hz=config.hz, mode="fast", seed=seed
            )
            save_episode(episode, out_dir / f"{episode.episode_id}.json")
            recorded += 1
    manifest = write_manifest(out_dir)
    summary = summarize_dataset(out_dir)
    _emit_rows(
        [
            ("recorded", str(recorded)),
            ("directory", str(out_dir)),
            ("manifest", str(manifest)),
            ("episode_count", str(summary.episode_count)),
            ("success_count", str(summary.success_count)),
            ("per_task", json.dumps(summary.per_task_counts, sort_keys=True)),
        ],
        args.format,
    )
    return 0


def cmd_eval(args) -> int:
    config = _load_pipeline_config(args)
    categories = CATEGORIES if args.categories == "all" else tuple(args.categories.split(","))
    task = make_task(args.task, "cake")
    policy = _make_cli_policy(args.policy, config)
    results = []
    for i, category in enumerate(categories):
        scenarios = generate_scenarios(task, category, args.n, seed=config.seed + i)
        results.extend(run_trials(policy, scenarios, hz=config.hz))
    report = aggregate_report(results)
    text = render_report(report, format=args.format)
    if args.report_out:
        Path(args.report_out).write_text(text, encoding="utf-8")
        print(f"wrote {args.report_out}")
    else:
        sys.stdout.write(text)
    return 0


def cmd_pipeline(args) -> int:
    config = _load_pipeline_config(args)
    snapshot = load_scene(args.scene)
    target = snapshot.target
    if target is None:
        print("error: scene has no target object", file=sys.stderr)
        return 1
    task = make_task(args.task, target.name)
    record = run_pipeline(args.scene, task, config)
    rows = [
        ("success", str(record.success).lower()),
        ("attempts", str(record.attempts)),
        ("mesh_path", record.mesh_path or ""),
        ("gcode_path", record.gcode_path or ""),
        ("episode_path", record.episode_path or ""),
    ]
    for stage, seconds in record.timings.items():
        rows.append((f"timing_{stage}_s", f"{seconds:.4f}"))
    if record.failed_stage:
        rows.append(("failed_stage", record.failed_stage))
    if record.error:
        rows.append(("error", record.error))
    _emit_rows(rows, args.format)
    return 0 if record.success else 1


def cmd_report(args) -> int:
    summary = summarize_dataset(args.dataset)
    rows = [
        ("episode_count", str(summary.episode_count)),
        ("success_count", str(summary.success_count)),
        ("mean_steps", f"{summary.mean_steps:g}"),
        ("per_task", json.dumps(summary.per_task_counts, sort_keys=True)),
    ]
    for name in summary.invalid_files:
        rows.append(("invalid_file", name))
    _emit_rows(rows, args.format)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="toolforge",
        description="Scene-to-tool fabrication and manipulation pipeline.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="pipeline .cfg file")
    common.add_argument("--seed", type=int, help="override config seed")
    common.add_argument("--output", help="override config output directory")
    common.add_argument("--format", choices=("text", "csv"), default="text")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("interpret", parents=[common], help="analyze a scene file")
    p.add_argument("--scene", required=True)
    p.set_defaults(func=cmd_interpret)

    p = sub.add_parser("genmesh", parents=[common], help="generate a tool mesh from a prompt")
    p.add_argument("--prompt", required=True)
    p.add_argument("--max-faces", type=int, default=None)
    p.add_argument("--mesh-out", help="write mesh text here instead of stdout")
    p.set_defaults(func=cmd_genmesh)

    p = sub.add_parser("mesh", parents=[], help="mesh utilities")
    mesh_sub = p.add_subparsers(dest="mesh_command", required=True)
    pv = mesh_sub.add_parser("validate", parents=[common])
    pv.add_argument("mesh")
    pv.set_defaults(func=cmd_mesh_validate)
    ps = mesh_sub.add_parser("scale", parents=[common])
    ps.add_argument("mesh")
    ps.add_argument("--target-size-mm", type=float, required=True)
    ps.add_argument("--fit-ratio", type=float, default=None)
    ps.add_argument("--mesh-out")
    ps.set_defaults(func=cmd_mesh_scale)

    p = sub.add_parser("slice", parents=[common], help="slice a mesh and emit G-code")
    p.add_argument("mesh")
    p.add_argument("--gcode-out")
    p.set_defaults(func=cmd_slice)

    p = sub.add_parser("act", parents=[], help="control-loop commands")
    act_sub = p.add_subparsers(dest="act_command", required=True)
    pr = act_sub.add_parser("run", parents=[common])
    pr.add_argument("--task", choices=TASK_CHOICES, required=True)
    pr.add_argument("--scene", help="scene file (defaults to the reference scene)")
    pr.add_argument("--policy", choices=("expert", "null", "remote"), default="expert")
    pr.add_argument("--mode", choices=("fast", "realtime"), default="fast")
    pr.add_argument("--save", help="write the episode JSON here")
    pr.set_defaults(func=cmd_act_run)

    p = sub.add_parser("record", parents=[common], help="record a reference dataset")
    p.add_argument("--task", choices=TASK_CHOICES + ("both",), default="both")
    p.add_argument("--count", type=int, default=10, help="episodes per task")
    p.set_defaults(func=cmd_record)

    p = sub.add_parser("eval", parents=[common], help="run the generalization harness")
    p.add_argument("--task", choices=TASK_CHOICES, default="pick_place")
    p.add_argument("--categories", default="all", help="'all' or comma-separated category names")
    p.add_argument("--n", type=int, default=10, help="scenarios per category")
    p.add_argument("--policy", choices=("expert", "null", "remote"), default="expert")
    p.add_argument("--report-out", help="write the rendered report here")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("pipeline", parents=[common], help="run the full pipeline on a scene")
    p.add_argument("--scene", required=True)
    p.add_argument("--task", choices=TASK_CHOICES, required=True)
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("report", parents=[common], help="summarize an episode dataset")
    p.add_argument("--dataset", required=True)
    p.set_defaults(func=cmd_report)

    return parser


def cli_main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ToolforgeError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cli_main())
