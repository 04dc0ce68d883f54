#!/usr/bin/env python3
"""Record the 20-episode reference dataset (10 per task) plus training config.

The scripted expert runs each task ten times with consecutive seeds against
the reference scene, episodes are saved one file each, a manifest is written,
and the fine-tuning hyperparameters are exported alongside as
training_config.json so a downstream trainer has dataset and config in one
place.
"""

import argparse
import json
from pathlib import Path

from toolforge.action import make_task, world_from_snapshot
from toolforge.control import run_control_loop
from toolforge.episodes import (
    export_training_config,
    save_episode,
    summarize_dataset,
    write_manifest,
)
from toolforge.evaluation import reference_snapshot
from toolforge.policies import ScriptedExpert

REPO_ROOT = Path(__file__).resolve().parent.parent
TASKS = ("cut", "pick_place")


def record_dataset(out_dir: Path, per_task: int, hz: float, base_seed: int) -> int:
    out_dir.mkdir(parents=True, exist_ok=True)
    recorded = 0
    for task_name in TASKS:
        for i in range(per_task):
            snapshot = reference_snapshot()
            world = world_from_snapshot(snapshot)
            task = make_task(task_name, snapshot.target.name)
            episode = run_control_loop(
                ScriptedExpert(), world, task, hz=hz, mode="fast", seed=base_seed + i
            )
            if not episode.success:
                raise RuntimeError(f"expert failed {task_name} with seed {base_seed + i}")
            save_episode(episode, out_dir / f"{episode.episode_id}.json")
            recorded += 1
    return recorded


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, default=REPO_ROOT / "artifacts" / "reference_dataset")
    parser.add_argument("--per-task", type=int, default=10)
    parser.add_argument("--hz", type=float, default=5.0)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    recorded = record_dataset(args.out, args.per_task, args.hz, args.seed)
    manifest = write_manifest(args.out)
    summary = summarize_dataset(args.out)
    config_path = args.out / "training_config.json"
    config_path.write_text(
        json.dumps(export_training_config().to_dict(), indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )
    print(f"recorded {recorded} episodes into {args.out}")
    print(f"per task: {json.dumps(summary.per_task_counts, sort_keys=True)}")
    print(f"successes: {summary.success_count}, mean steps: {summary.mean_steps:.1f}")
    print(f"manifest: {manifest}")
    print(f"training config: {config_path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
