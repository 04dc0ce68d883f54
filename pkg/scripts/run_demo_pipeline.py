#!/usr/bin/env python3
"""Run the full mock pipeline on a scene and narrate every stage.

Scene analysis, mesh generation with validation retries, scaling, slicing,
G-code emission, and one simulated task episode all run locally with the
mock backends, so this works with no network and no models. Artifacts land
in the output directory; the narration prints what each stage produced.
"""

import argparse
import dataclasses
import sys
from pathlib import Path

from toolforge.action import make_task
from toolforge.config import PipelineConfig, load_config
from toolforge.episodes import load_episode
from toolforge.mesh import bounding_box, parse_mesh_text
from toolforge.pipeline import run_pipeline

REPO_ROOT = Path(__file__).resolve().parent.parent
DEFAULT_SCENE = REPO_ROOT / "tests" / "fixtures" / "scenes" / "cake.json"


def summarize_gcode_text(text: str) -> tuple[int, float]:
    """Layer count (distinct Z words) and total filament (sum of E words)."""
    z_values: list[float] = []
    filament = 0.0
    for line in text.splitlines():
        if not line.startswith(("G0 ", "G1 ")):
            continue
        for word in line.split(";", 1)[0].split():
            if word.startswith("Z"):
                z = float(word[1:])
                if not z_values or z != z_values[-1]:
                    z_values.append(z)
            elif word.startswith("E"):
                filament += float(word[1:])
    return len(z_values), filament


def narrate(record) -> None:
    print(f"attempts        {record.attempts}")
    for stage, seconds in sorted(record.timings.items()):
        print(f"stage {stage:<10} {seconds * 1000.0:8.2f} ms")
    mesh = parse_mesh_text(Path(record.mesh_path).read_text(encoding="utf-8"))
    box = bounding_box(mesh)
    extents = tuple(round(float(box.max[i] - box.min[i]), 3) for i in range(3))
    print(f"mesh            {record.mesh_path}")
    print(f"  vertices {len(mesh.vertices)}, faces {len(mesh.faces)}, extents {extents} mm")
    layers, filament = summarize_gcode_text(Path(record.gcode_path).read_text(encoding="utf-8"))
    print(f"gcode           {record.gcode_path}")
    print(f"  layers {layers}, filament {filament:.1f} mm")
    episode = load_episode(record.episode_path)
    print(f"episode         {record.episode_path}")
    print(f"  {episode.task_name!r} {'succeeded' if episode.success else 'failed'} "
          f"in {len(episode.steps)} steps")


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--scene", type=Path, default=DEFAULT_SCENE)
    parser.add_argument("--task", choices=("cut", "pick_place"), default="cut")
    parser.add_argument("--config", type=Path, default=None)
    parser.add_argument("--out", type=Path, default=REPO_ROOT / "artifacts" / "demo")
    args = parser.parse_args()

    config = load_config(args.config) if args.config else PipelineConfig()
    config = dataclasses.replace(config, output_dir=str(args.out))
    print(f"scene           {args.scene}")
    record = run_pipeline(args.scene, make_task(args.task, "cake"), config)
    if not record.success:
        print(f"FAILED at stage {record.failed_stage}: {record.error}", file=sys.stderr)
        return 1
    narrate(record)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
