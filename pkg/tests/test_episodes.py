"""Episode recording, RLDS-style flags, JSON round-trips, dataset summaries."""

import json
import math

import pytest

from toolforge.action import (
    DEFAULT_WORKSPACE,
    ActionVector7,
    ManipulatorState,
    SimObject,
    SimWorld,
    ZERO_ACTION,
    make_task,
)
from toolforge.control import run_control_loop
from toolforge.episodes import (
    EpisodeRecorder,
    StepObservation,
    TrainingConfig,
    episode_from_dict,
    episode_to_dict,
    episode_files,
    export_training_config,
    load_episode,
    save_episode,
    summarize_dataset,
    write_manifest,
)
from toolforge.errors import EpisodeFinalized, IoFailure, SchemaViolation
from toolforge.policies import NullPolicy, ScriptedExpert

import oracles


def small_episode(n_steps=3, success=True, episode_id="ep-1"):
    rec = EpisodeRecorder(
        episode_id=episode_id, task_name="cut",
        instruction="Cut one piece of cake", metadata={"hz": 5.0},
    )
    state = ManipulatorState()
    for i in range(n_steps):
        action = ActionVector7(dx=0.001 * (i + 1), dyaw=0.01 * i, dgrip=0.1)
        rec.record_step(StepObservation(state=state), action)
    return rec.finalize(success=success, wall_seconds=0.5, created_at="2026-01-01T00:00:00Z")


def expert_episode(task_name="cut", seed=0):
    world = SimWorld(
        objects=[
            SimObject(name="cake", position=(0.55, 0.0, 0.02), size_mm=80.0, color_id="white"),
            SimObject(name="plate", position=(0.7, 0.3, 0.02), size_mm=180.0, color_id="blue"),
        ],
        workspace=DEFAULT_WORKSPACE,
        background_id="table",
    )
    task = make_task(task_name, "cake")
    return run_control_loop(ScriptedExpert(), world, task, mode="fast", seed=seed)


class TestFlags:
    def test_first_last_terminal_on_success(self):
        ep = small_episode(n_steps=3, success=True)
        assert [s.is_first for s in ep.steps] == [True, False, False]
        assert [s.is_last for s in ep.steps] == [False, False, True]
        assert [s.is_terminal for s in ep.steps] == [False, False, True]
        assert [s.reward for s in ep.steps] == [0.0, 0.0, 1.0]

    def test_failure_episode_not_terminal(self):
        ep = small_episode(n_steps=2, success=False)
        assert ep.steps[-1].is_last
        assert not ep.steps[-1].is_terminal
        assert all(s.reward == 0.0 for s in ep.steps)

    def test_single_step_episode(self):
        ep = small_episode(n_steps=1, success=True)
        step = ep.steps[0]
        assert step.is_first and step.is_last and step.is_terminal

    def test_constant_instruction_enforced(self):
        ep = small_episode()
        assert len({s.instruction for s in ep.steps}) == 1


class TestRecorderLifecycle:
    def test_record_after_finalize_rejected(self):
        rec = EpisodeRecorder("e", "cut", "Cut one piece of cake", {})
        rec.record_step(StepObservation(state=ManipulatorState()), ZERO_ACTION)
        rec.finalize(success=False)
        with pytest.raises(EpisodeFinalized):
            rec.record_step(StepObservation(state=ManipulatorState()), ZERO_ACTION)

    def test_double_finalize_rejected(self):
        rec = EpisodeRecorder("e", "cut", "Cut one piece of cake", {})
        rec.record_step(StepObservation(state=ManipulatorState()), ZERO_ACTION)
        rec.finalize(success=False)
        with pytest.raises(EpisodeFinalized):
            rec.finalize(success=False)

    def test_zero_step_finalize_rejected(self):
        rec = EpisodeRecorder("e", "cut", "Cut one piece of cake", {})
        with pytest.raises(ValueError):
            rec.finalize(success=False)


class TestSerialization:
    def test_dict_round_trip_equality(self):
        ep = small_episode()
        assert episode_from_dict(episode_to_dict(ep)) == ep

    def test_save_load_round_trip(self, tmp_path):
        ep = expert_episode()
        path = tmp_path / "ep.json"
        save_episode(ep, path)
        assert load_episode(path) == ep

    def test_floats_bit_exact(self, tmp_path):
        ep = expert_episode()
        path = tmp_path / "ep.json"
        save_episode(ep, path)
        loaded = load_episode(path)
        for a, b in zip(ep.steps, loaded.steps):
            assert a.action.as_tuple() == b.action.as_tuple()
            assert a.observation.state.as_vector() == b.observation.state.as_vector()

    def test_double_save_byte_identical(self, tmp_path):
        ep = small_episode()
        p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
        save_episode(ep, p1)
        save_episode(ep, p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_two_is_first_rejected(self, tmp_path):
        ep = small_episode()
        data = episode_to_dict(ep)
        data["steps"][1]["is_first"] = True
        with pytest.raises(SchemaViolation):
            episode_from_dict(data)

    def test_terminal_before_last_rejected(self):
        ep = small_episode(n_steps=3)
        data = episode_to_dict(ep)
        data["steps"][0]["is_terminal"] = True
        with pytest.raises(SchemaViolation):
            episode_from_dict(data)

    def test_missing_key_rejected(self):
        data = episode_to_dict(small_episode())
        del data["steps"]
        with pytest.raises(SchemaViolation):
            episode_from_dict(data)

    def test_bad_reward_rejected(self):
        data = episode_to_dict(small_episode())
        data["steps"][0]["reward"] = 0.5
        with pytest.raises(SchemaViolation):
            episode_from_dict(data)

    def test_wrong_arity_state_rejected(self):
        data = episode_to_dict(small_episode())
        data["steps"][0]["observation"]["state"] = [0.0] * 6
        with pytest.raises(SchemaViolation):
            episode_from_dict(data)

    def test_load_missing_file_rejected(self, tmp_path):
        with pytest.raises(IoFailure):
            load_episode(tmp_path / "absent.json")

    def test_load_invalid_json_rejected(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{", encoding="utf-8")
        with pytest.raises(SchemaViolation):
            load_episode(path)

    def test_created_at_excluded_from_equality(self):
        a = small_episode()
        b_rec = EpisodeRecorder("ep-1", "cut", "Cut one piece of cake", {"hz": 5.0})
        state = ManipulatorState()
        for i in range(3):
            action = ActionVector7(dx=0.001 * (i + 1), dyaw=0.01 * i, dgrip=0.1)
            b_rec.record_step(StepObservation(state=state), action)
        b = b_rec.finalize(success=True, wall_seconds=9.9, created_at="2031-12-31T23:59:59Z")
        assert a == b


class TestDataset:
    def _write_dataset(self, tmp_path, n_success=3, n_fail=2):
        for i in range(n_success):
            save_episode(
                small_episode(n_steps=3 + i, success=True, episode_id=f"cut-{i}"),
                tmp_path / f"cut-{i}.json",
            )
        for i in range(n_fail):
            save_episode(
                small_episode(n_steps=2, success=False, episode_id=f"fail-{i}"),
                tmp_path / f"fail-{i}.json",
            )
        return tmp_path

    def test_summary_counts(self, tmp_path):
        self._write_dataset(tmp_path)
        summary = summarize_dataset(tmp_path)
        assert summary.episode_count == 5
        assert summary.success_count == 3
        assert summary.per_task_counts == {"cut": 5}
        assert summary.invalid_files == ()

    def test_summary_matches_raw_recount_oracle(self, tmp_path):
        self._write_dataset(tmp_path, n_success=4, n_fail=3)
        summary = summarize_dataset(tmp_path)
        raw = oracles.recount_dataset(tmp_path)
        assert summary.episode_count == raw["episode_count"]
        assert summary.success_count == raw["success_count"]
        assert summary.per_task_counts == raw["per_task_counts"]
        assert summary.mean_steps == pytest.approx(raw["mean_steps"])

    def test_invalid_file_collected_not_fatal(self, tmp_path):
        self._write_dataset(tmp_path)
        (tmp_path / "zz-broken.json").write_text("{not json", encoding="utf-8")
        summary = summarize_dataset(tmp_path)
        assert summary.episode_count == 5
        assert len(summary.invalid_files) == 1

    def test_manifest_lists_files(self, tmp_path):
        self._write_dataset(tmp_path)
        manifest_path = write_manifest(tmp_path)
        data = json.loads(manifest_path.read_text(encoding="utf-8"))
        assert len(data["episodes"]) == 5
        names = [e["file"] for e in data["episodes"]]
        assert names == sorted(names)

    def test_manifest_not_listed_as_episode(self, tmp_path):
        self._write_dataset(tmp_path)
        write_manifest(tmp_path)
        files = episode_files(tmp_path)
        assert all(p.name != "manifest.json" for p in files)
        assert summarize_dataset(tmp_path).episode_count == 5


class TestTrainingConfig:
    def test_reference_values(self):
        config = export_training_config()
        assert config.lora_rank == 32
        assert config.batch_size == 16
        assert config.learning_rate == pytest.approx(5e-4)
        assert config.grad_steps == 4000
        assert config.image_aug is False

    def test_round_trip(self):
        config = TrainingConfig(lora_rank=8, batch_size=4, learning_rate=1e-3,
                                grad_steps=100, image_aug=True)
        assert TrainingConfig.from_dict(config.to_dict()) == config

    def test_invalid_values_rejected(self):
        with pytest.raises(ValueError):
            TrainingConfig(lora_rank=0)
        with pytest.raises(ValueError):
            TrainingConfig(learning_rate=-1.0)
