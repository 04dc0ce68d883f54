"""Episode recording, RLDS-style JSON persistence, and dataset summaries.

One JSON file per episode. Steps carry is_first/is_last/is_terminal flags,
the language instruction, and a sparse terminal reward, which is everything
a downstream RLDS converter needs. Files are byte-stable: saving the same
episode twice yields identical bytes, and floats round-trip exactly.
"""

from __future__ import annotations

import json
import logging
import statistics
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import jsonschema

from .action import ActionVector7, ManipulatorState, action_from_sequence, ActionLimits
from .errors import EpisodeFinalized, IoFailure, SchemaViolation
from .wire import load_schema

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1

# Recorded actions may legitimately sit at the limit boundary; reuse the wide
# default so reload never rejects what the loop accepted.
_LOAD_LIMITS = ActionLimits(max_translation_m=0.02, max_rotation_rad=0.1, max_grip=1.0)


@dataclass(frozen=True)
class StepObservation:
    state: ManipulatorState
    image_ref: str | None = None


@dataclass(frozen=True)
class Step:
    observation: StepObservation
    action: ActionVector7
    instruction: str
    is_first: bool = False
    is_last: bool = False
    is_terminal: bool = False
    reward: float = 0.0


@dataclass(frozen=True)
class Episode:
    episode_id: str
    task_name: str
    instruction: str
    steps: tuple[Step, ...]
    success: bool
    metadata: dict
    created_at: str = field(default="", compare=False)
    wall_seconds: float = field(default=0.0, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))
        if not self.steps:
            raise ValueError("episode must contain at least one step")
        for i, step in enumerate(self.steps):
            if step.is_first != (i == 0):
                raise ValueError(f"step {i}: is_first must mark exactly the first step")
            if step.is_last != (i == len(self.steps) - 1):
                raise ValueError(f"step {i}: is_last must mark exactly the final step")
            if step.is_terminal and not step.is_last:
                raise ValueError(f"step {i}: is_terminal requires is_last")
            if step.instruction != self.instruction:
                raise ValueError(f"step {i}: instruction differs from episode instruction")


class EpisodeRecorder:
    """Collects steps and stamps RLDS flags at finalize time."""

    def __init__(self, episode_id: str, task_name: str, instruction: str, metadata: dict):
        self._episode_id = episode_id
        self._task_name = task_name
        self._instruction = instruction
        self._metadata = dict(metadata)
        self._pending: list[tuple[StepObservation, ActionVector7]] = []
        self._finalized = False

    @property
    def step_count(self) -> int:
        return len(self._pending)

    def annotate(self, key: str, value) -> None:
        """Add a metadata entry discovered mid-episode (e.g. an error)."""
        if self._finalized:
            raise EpisodeFinalized(f"episode {self._episode_id} already finalized")
        self._metadata[key] = value

    def record_step(self, observation: StepObservation, action: ActionVector7) -> None:
        if self._finalized:
            raise EpisodeFinalized(f"episode {self._episode_id} already finalized")
        self._pending.append((observation, action))

    def finalize(self, success: bool, wall_seconds: float = 0.0,
                 created_at: str | None = None) -> Episode:
        if self._finalized:
            raise EpisodeFinalized(f"episode {self._episode_id} already finalized")
        if not self._pending:
            raise ValueError("cannot finalize an episode with zero steps")
        self._finalized = True
        last = len(self._pending) - 1
        steps = tuple(
            Step(
                observation=obs,
                action=act,
                instruction=self._instruction,
                is_first=(i == 0),
                is_last=(i == last),
                is_terminal=(i == last and success),
                reward=1.0 if (i == last and success) else 0.0,
            )
            for i, (obs, act) in enumerate(self._pending)
        )
        stamp = created_at if created_at is not None else _utc_now_iso()
        return Episode(
            episode_id=self._episode_id,
            task_name=self._task_name,
            instruction=self._instruction,
            steps=steps,
            success=success,
            metadata=self._metadata,
            created_at=stamp,
            wall_seconds=wall_seconds,
        )


def _utc_now_iso() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def episode_to_dict(episode: Episode) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "episode_id": episode.episode_id,
        "task_name": episode.task_name,
        "instruction": episode.instruction,
        "success": episode.success,
        "metadata": episode.metadata,
        "created_at": episode.created_at,
        "wall_seconds": episode.wall_seconds,
        "steps": [
            {
                "observation": {
                    "state": list(s.observation.state.as_vector()),
                    "image_ref": s.observation.image_ref,
                },
                "action": list(s.action.as_tuple()),
                "instruction": s.instruction,
                "is_first": s.is_first,
                "is_last": s.is_last,
                "is_terminal": s.is_terminal,
                "reward": s.reward,
            }
            for s in episode.steps
        ],
    }


def episode_from_dict(data: dict) -> Episode:
    try:
        jsonschema.validate(data, load_schema("episode.json"))
    except jsonschema.ValidationError as exc:
        raise SchemaViolation(f"episode schema: {exc.message}") from exc
    try:
        steps = tuple(
            Step(
                observation=StepObservation(
                    state=_state_from_vector(raw["observation"]["state"]),
                    image_ref=raw["observation"].get("image_ref"),
                ),
                action=action_from_sequence(raw["action"], _LOAD_LIMITS),
                instruction=raw["instruction"],
                is_first=raw["is_first"],
                is_last=raw["is_last"],
                is_terminal=raw["is_terminal"],
                reward=float(raw["reward"]),
            )
            for raw in data["steps"]
        )
        return Episode(
            episode_id=data["episode_id"],
            task_name=data["task_name"],
            instruction=data["instruction"],
            steps=steps,
            success=data["success"],
            metadata=dict(data["metadata"]),
            created_at=data["created_at"],
            wall_seconds=float(data["wall_seconds"]),
        )
    except (ValueError, KeyError) as exc:
        raise SchemaViolation(f"episode invariant: {exc}") from exc


def _state_from_vector(vec) -> ManipulatorState:
    if len(vec) != 7:
        raise ValueError(f"state vector must have 7 components, got {len(vec)}")
    return ManipulatorState(
        position=(vec[0], vec[1], vec[2]), roll=vec[3], pitch=vec[4], yaw=vec[5], grip=vec[6]
    )


def save_episode(episode: Episode, path: str | Path) -> None:
    payload = json.dumps(episode_to_dict(episode), sort_keys=True, indent=2) + "\n"
    try:
        Path(path).write_text(payload, encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot write episode to {path}: {exc}") from exc


def load_episode(path: str | Path) -> Episode:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot read episode from {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaViolation(f"{path}: not valid JSON: {exc}") from exc
    return episode_from_dict(data)


@dataclass(frozen=True)
class DatasetSummary:
    episode_count: int
    per_task_counts: dict
    success_count: int
    mean_steps: float
    invalid_files: tuple[str, ...] = ()


def episode_files(directory: str | Path) -> list[Path]:
    root = Path(directory)
    return sorted(p for p in root.glob("*.json") if p.name != "manifest.json")


def summarize_dataset(directory: str | Path) -> DatasetSummary:
    """Summarize every episode file in a directory.

    Unreadable files are reported in ``invalid_files`` (and logged); the
    summary still covers the valid ones.
    """
    per_task: dict[str, int] = {}
    successes = 0
    step_counts: list[int] = []
    invalid: list[str] = []
    for path in episode_files(directory):
        try:
            episode = load_episode(path)
        except (IoFailure, SchemaViolation) as exc:
            logger.warning("skipping %s: %s", path, exc)
            invalid.append(f"{path.name}: {exc}")
            continue
        per_task[episode.task_name] = per_task.get(episode.task_name, 0) + 1
        successes += 1 if episode.success else 0
        step_counts.append(len(episode.steps))
    return DatasetSummary(
        episode_count=len(step_counts),
        per_task_counts=per_task,
        success_count=successes,
        mean_steps=statistics.fmean(step_counts) if step_counts else 0.0,
        invalid_files=tuple(invalid),
    )


def write_manifest(directory: str | Path) -> Path:
    """Write manifest.json indexing the directory's valid episode files."""
    entries = []
    for path in episode_files(directory):
        try:
            episode = load_episode(path)
        except (IoFailure, SchemaViolation):
            continue
        entries.append(
            {
                "file": path.name,
                "episode_id": episode.episode_id,
                "task_name": episode.task_name,
                "step_count": len(episode.steps),
                "success": episode.success,
            }
        )
    manifest = {"schema_version": SCHEMA_VERSION, "episodes": entries}
    out = Path(directory) / "manifest.json"
    try:
        out.write_text(json.dumps(manifest, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot write manifest to {out}: {exc}") from exc
    return out


@dataclass(frozen=True)
class TrainingConfig:
    """Fine-tuning hyperparameters exported for the model gateway."""

    lora_rank: int = 32
    batch_size: int = 16
    learning_rate: float = 5e-4
    grad_steps: int = 4000
    image_aug: bool = False

    def __post_init__(self) -> None:
        for name in ("lora_rank", "batch_size", "grad_steps", "learning_rate"):
            value = getattr(self, name)
            if value <= 0:
                raise ValueError(f"{name} must be positive, got {value}")

    def to_dict(self) -> dict:
        return {
            "lora_rank": self.lora_rank,
            "batch_size": self.batch_size,
            "learning_rate": self.learning_rate,
            "grad_steps": self.grad_steps,
            "image_aug": self.image_aug,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TrainingConfig":
        return cls(
            lora_rank=int(data["lora_rank"]),
            batch_size=int(data["batch_size"]),
            learning_rate=float(data["learning_rate"]),
            grad_steps=int(data["grad_steps"]),
            image_aug=bool(data["image_aug"]),
        )


def export_training_config() -> TrainingConfig:
    return TrainingConfig()
