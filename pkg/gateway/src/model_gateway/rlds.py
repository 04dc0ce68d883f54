"""Episode datasets as TFRecord containers of RLDS-style SequenceExamples.

One SequenceExample per episode: episode-level fields ride in the context,
per-step fields in the feature lists. State and action vectors are stored
as raw little-endian float64 bytes so the conversion is exact, not
float32-rounded; reading the container back reconstructs episodes that
compare equal to the originals. tensorflow is imported lazily so serving
never pays for it.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from toolforge.action import ActionVector7, ManipulatorState
from toolforge.episodes import (
    Episode,
    Step,
    StepObservation,
    episode_files,
    load_episode,
)


def _tf():
    import tensorflow as tf

    return tf


@dataclass(frozen=True)
class RldsContainer:
    path: Path | None
    episode_count: int
    task_names: tuple[str, ...]
    step_counts: tuple[int, ...]


def _vector_bytes(values) -> bytes:
    return np.asarray(values, dtype="<f8").tobytes()


def _vector_from_bytes(raw: bytes) -> tuple[float, ...]:
    return tuple(float(v) for v in np.frombuffer(raw, dtype="<f8"))


def episode_to_sequence_example(episode: Episode):
    tf = _tf()

    def bytes_feature(value: bytes):
        return tf.train.Feature(bytes_list=tf.train.BytesList(value=[value]))

    def text_feature(value: str):
        return bytes_feature(value.encode("utf-8"))

    def int_feature(value: int):
        return tf.train.Feature(int64_list=tf.train.Int64List(value=[int(value)]))

    def float_feature(value: float):
        return tf.train.Feature(float_list=tf.train.FloatList(value=[float(value)]))

    context = tf.train.Features(
        feature={
            "episode_id": text_feature(episode.episode_id),
            "task_name": text_feature(episode.task_name),
            "instruction": text_feature(episode.instruction),
            "success": int_feature(episode.success),
            "created_at": text_feature(episode.created_at),
            # float64 bytes: FloatList would round to float32
            "wall_seconds": bytes_feature(_vector_bytes([episode.wall_seconds])),
            "metadata_json": text_feature(
                json.dumps(episode.metadata, sort_keys=True, separators=(",", ":"))
            ),
        }
    )

    lists: dict[str, list] = {
        "state": [], "action": [], "instruction": [], "image_ref": [],
        "has_image_ref": [], "is_first": [], "is_last": [], "is_terminal": [],
        "reward": [],
    }
    for step in episode.steps:
        lists["state"].append(bytes_feature(_vector_bytes(step.observation.state.as_vector())))
        lists["action"].append(bytes_feature(_vector_bytes(step.action.as_tuple())))
        lists["instruction"].append(text_feature(step.instruction))
        lists["image_ref"].append(text_feature(step.observation.image_ref or ""))
        lists["has_image_ref"].append(int_feature(step.observation.image_ref is not None))
        lists["is_first"].append(int_feature(step.is_first))
        lists["is_last"].append(int_feature(step.is_last))
        lists["is_terminal"].append(int_feature(step.is_terminal))
        # rewards are exactly 0.0 or 1.0, both float32-exact
        lists["reward"].append(float_feature(step.reward))

    feature_lists = tf.train.FeatureLists(
        feature_list={
            name: tf.train.FeatureList(feature=features)
            for name, features in lists.items()
        }
    )
    return tf.train.SequenceExample(context=context, feature_lists=feature_lists)


def sequence_example_to_episode(example) -> Episode:
    context = example.context.feature

    def text(name: str) -> str:
        return context[name].bytes_list.value[0].decode("utf-8")

    lists = example.feature_lists.feature_list
    n = len(lists["state"].feature)
    steps = []
    for i in range(n):
        state = _vector_from_bytes(lists["state"].feature[i].bytes_list.value[0])
        action = _vector_from_bytes(lists["action"].feature[i].bytes_list.value[0])
        has_ref = bool(lists["has_image_ref"].feature[i].int64_list.value[0])
        image_ref = (
            lists["image_ref"].feature[i].bytes_list.value[0].decode("utf-8")
            if has_ref else None
        )
        steps.append(
            Step(
                observation=StepObservation(
                    state=ManipulatorState(
                        position=state[:3], roll=state[3], pitch=state[4],
                        yaw=state[5], grip=state[6],
                    ),
                    image_ref=image_ref,
                ),
                action=ActionVector7(*action),
                instruction=lists["instruction"].feature[i].bytes_list.value[0].decode("utf-8"),
                is_first=bool(lists["is_first"].feature[i].int64_list.value[0]),
                is_last=bool(lists["is_last"].feature[i].int64_list.value[0]),
                is_terminal=bool(lists["is_terminal"].feature[i].int64_list.value[0]),
                reward=float(lists["reward"].feature[i].float_list.value[0]),
            )
        )
    return Episode(
        episode_id=text("episode_id"),
        task_name=text("task_name"),
        instruction=text("instruction"),
        steps=tuple(steps),
        success=bool(context["success"].int64_list.value[0]),
        metadata=json.loads(text("metadata_json")),
        created_at=text("created_at"),
        wall_seconds=_vector_from_bytes(context["wall_seconds"].bytes_list.value[0])[0],
    )


def convert_dataset(episode_dir: str | Path, out_path: str | Path | None = None) -> RldsContainer:
    """Convert a directory of episode files into one TFRecord container.

    Bad episode files raise (SchemaViolation/IoFailure from the loader);
    an empty directory produces an empty container and a warning.
    """
    tf = _tf()
    files = episode_files(episode_dir)
    episodes = [load_episode(path) for path in files]
    out = Path(out_path) if out_path is not None else Path(episode_dir) / "rlds.tfrecord"
    out.parent.mkdir(parents=True, exist_ok=True)
    with tf.io.TFRecordWriter(str(out)) as writer:
        for episode in episodes:
            writer.write(episode_to_sequence_example(episode).SerializeToString())
    if not episodes:
        warnings.warn(f"no episode files in {episode_dir}; wrote an empty container", RuntimeWarning)
    return RldsContainer(
        path=out,
        episode_count=len(episodes),
        task_names=tuple(sorted({e.task_name for e in episodes})),
        step_counts=tuple(len(e.steps) for e in episodes),
    )


def read_dataset(path: str | Path) -> list[Episode]:
    """Parse a container back into episodes (the round-trip check's other half)."""
    tf = _tf()
    episodes = []
    for raw in tf.data.TFRecordDataset(str(path)):
        example = tf.train.SequenceExample.FromString(raw.numpy())
        episodes.append(sequence_example_to_episode(example))
    return episodes
