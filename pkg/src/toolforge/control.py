"""Fixed-frequency control loop: observe, predict, integrate, record.

Realtime mode paces ticks against absolute deadlines (start + k/hz), so
timing error does not accumulate; fast mode runs the identical rollout
unpaced and produces an equal episode (timing fields excluded from
equality).
"""

from __future__ import annotations

import time
from dataclasses import dataclass

from .action import (
    CUT_CONTACT_RANGE_M,
    CUT_MAX_GRIP,
    CUT_RETRACT_M,
    CutGoal,
    GraspGoal,
    ManipulatorState,
    PlaceGoal,
    SimWorld,
    TaskSpec,
    ZERO_ACTION,
    apply_action,
    distance,
    observe,
)
from .episodes import Episode, EpisodeRecorder, StepObservation
from .errors import TargetMissing, ToolforgeError
from .policies import PolicyBackend, predict_action

DEFAULT_HZ = 5.0


@dataclass
class GoalTracker:
    """Evaluates a task's goal predicate, keeping the state the cut goal needs.

    A cut counts once the end-effector has touched the target center
    (within 0.01 m, grip at most 0.2) and then retracted 0.05 m upward.
    """

    touched: bool = False
    touch_z: float = 0.0

    def update(self, state: ManipulatorState, world: SimWorld, task: TaskSpec) -> bool:
        target = world.object_by_name(task.target_object)
        if target is None:
            return False
        goal = task.goal
        if isinstance(goal, GraspGoal):
            return target.held
        if isinstance(goal, PlaceGoal):
            return (not target.held) and distance(target.position, goal.position) <= goal.tolerance_m
        if isinstance(goal, CutGoal):
            if not self.touched:
                if (
                    distance(state.position, target.position) <= CUT_CONTACT_RANGE_M
                    and state.grip <= CUT_MAX_GRIP
                ):
                    self.touched = True
                    self.touch_z = state.position[2]
                return False
            return state.position[2] >= self.touch_z + CUT_RETRACT_M
        return False


def run_control_loop(
    policy: PolicyBackend,
    world: SimWorld,
    task: TaskSpec,
    hz: float = DEFAULT_HZ,
    mode: str = "realtime",
    seed: int = 0,
    initial_state: ManipulatorState | None = None,
) -> Episode:
    """Run one episode of the task and return its recording.

    Terminates on goal success or after max_steps. Policy errors do not
    propagate: the episode comes back failed with the error message in
    metadata["error"].
    """
    if hz <= 0:
        raise ValueError(f"hz must be positive, got {hz}")
    if mode not in ("realtime", "fast"):
        raise ValueError(f"mode must be 'realtime' or 'fast', got {mode!r}")
    if world.object_by_name(task.target_object) is None:
        raise TargetMissing(f"target object {task.target_object!r} not in world")

    # mode is a pacing detail, not episode data: fast and realtime runs of
    # the same rollout must compare equal
    metadata = {"hz": hz, "world_seed": seed, "policy_name": policy.name}
    recorder = EpisodeRecorder(
        episode_id=f"{task.task_name}-{seed:08x}",
        task_name=task.task_name,
        instruction=task.instruction,
        metadata=metadata,
    )
    state = initial_state if initial_state is not None else ManipulatorState()
    tracker = GoalTracker()
    policy.begin_episode(world, task, seed)

    period = 1.0 / hz
    start = time.perf_counter()
    success = False
    error_text: str | None = None

    for step_idx in range(task.max_steps):
        observation = observe(world, state)
        try:
            action = predict_action(policy, observation, task.instruction)
        except ToolforgeError as exc:
            error_text = f"{type(exc).__name__}: {exc}"
            recorder.record_step(StepObservation(state=state), ZERO_ACTION)
            break
        state = apply_action(state, action, world)
        recorder.record_step(StepObservation(state=state), action)
        success = tracker.update(state, world, task)
        if mode == "realtime":
            deadline = start + (step_idx + 1) * period
            pause = deadline - time.perf_counter()
            if pause > 0:
                time.sleep(pause)
        if success:
            break

    wall = time.perf_counter() - start
    if error_text is not None:
        recorder.annotate("error", error_text)
    return recorder.finalize(success=success, wall_seconds=wall)
