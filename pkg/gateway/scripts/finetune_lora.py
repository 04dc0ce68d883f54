#!/usr/bin/env python3
"""LoRA fine-tuning driver: plan from a dataset + training config, then train.

The default invocation is a dry run: it resolves the dataset (converting to
a TFRecord container if one is not already present), loads the exported
hyperparameters, and prints the full training plan without touching any
model. Actual training needs --execute plus --model-path pointing at local
VLA weights; no weights ship with this repository, and nothing in CI runs
this script. Budget one GPU-day per task for the reference setup.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from toolforge.episodes import TrainingConfig, export_training_config

from model_gateway.rlds import convert_dataset


def load_training_config(dataset_dir: Path) -> TrainingConfig:
    path = dataset_dir / "training_config.json"
    if path.is_file():
        return TrainingConfig.from_dict(json.loads(path.read_text(encoding="utf-8")))
    return export_training_config()


def build_plan(dataset_dir: Path, model_path: Path | None) -> dict:
    container_path = dataset_dir / "rlds.tfrecord"
    if container_path.is_file():
        container = None
    else:
        container = convert_dataset(dataset_dir)
        container_path = container.path
    config = load_training_config(dataset_dir)
    return {
        "dataset": str(dataset_dir),
        "container": str(container_path),
        "episodes": container.episode_count if container else "preconverted",
        "model_path": str(model_path) if model_path else None,
        "hyperparameters": config.to_dict(),
        "trainable": "LoRA adapters only; base weights frozen",
    }


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("dataset", type=Path, help="episode dataset directory")
    parser.add_argument("--model-path", type=Path, default=None,
                        help="local base-model weights (required with --execute)")
    parser.add_argument("--execute", action="store_true",
                        help="actually train instead of printing the plan")
    args = parser.parse_args()

    if not args.dataset.is_dir():
        print(f"error: {args.dataset} is not a directory", file=sys.stderr)
        return 1
    plan = build_plan(args.dataset, args.model_path)
    print(json.dumps(plan, indent=2, sort_keys=True))

    if not args.execute:
        print("\ndry run only; pass --execute --model-path <weights> to train")
        return 0
    if args.model_path is None or not args.model_path.exists():
        print("error: --execute requires --model-path pointing at local weights "
              "(none are bundled)", file=sys.stderr)
        return 1
    # training loop intentionally not implemented here: wiring a specific VLA
    # trainer is deployment-specific; the plan above is its contract
    print("error: no trainer is wired into this repository; see README",
          file=sys.stderr)
    return 1


if __name__ == "__main__":
    sys.exit(main())
