"""Policy backends: scripted expert, null, failure-injection, and remote.

A policy maps (observation, instruction) to a 7D action. Backends carry a
``begin_episode`` hook so stateful controllers can plan against the initial
world; the control loop calls it exactly once per episode.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Protocol, runtime_checkable

from .action import (
    CUT_CONTACT_RANGE_M,
    CUT_RETRACT_M,
    DEFAULT_ACTION_LIMITS,
    ActionLimits,
    ActionVector7,
    GraspGoal,
    CutGoal,
    Observation,
    PlaceGoal,
    SimWorld,
    TaskSpec,
    ZERO_ACTION,
    Vec3,
)
from .errors import TargetMissing


@runtime_checkable
class PolicyBackend(Protocol):
    name: str

    def begin_episode(self, world: SimWorld, task: TaskSpec, seed: int) -> None: ...

    def predict(self, observation: Observation, instruction: str) -> ActionVector7: ...


def predict_action(
    policy: PolicyBackend, observation: Observation, instruction: str
) -> ActionVector7:
    """Query a policy for the next action. Backend errors propagate."""
    return policy.predict(observation, instruction)


class NullPolicy:
    """Does nothing; useful as a guaranteed-failure baseline."""

    name = "null"

    def begin_episode(self, world: SimWorld, task: TaskSpec, seed: int) -> None:
        pass

    def predict(self, observation: Observation, instruction: str) -> ActionVector7:
        return ZERO_ACTION


@dataclass(frozen=True)
class _Waypoint:
    position: Vec3 | None = None  # None freezes position this phase
    grip_target: float | None = None  # None leaves grip alone


class ScriptedExpert:
    """Proportional controller over a per-task waypoint plan.

    Each tick moves toward the current waypoint with per-axis deltas capped
    at the action limits; a phase completes when position and grip both land
    on their targets, so the plan always terminates on reachable goals.
    """

    name = "scripted_expert"
    APPROACH_HEIGHT_M = 0.10
    POSITION_EPS_M = 1e-6
    GRIP_EPS = 1e-6

    def __init__(self, limits: ActionLimits = DEFAULT_ACTION_LIMITS):
        self._limits = limits
        self._plan: list[_Waypoint] = []
        self._phase = 0

    def begin_episode(self, world: SimWorld, task: TaskSpec, seed: int) -> None:
        target = world.object_by_name(task.target_object)
        if target is None:
            raise TargetMissing(f"target object {task.target_object!r} not in world")
        tx, ty, tz = target.position
        above = (tx, ty, tz + self.APPROACH_HEIGHT_M)
        goal = task.goal
        if isinstance(goal, GraspGoal):
            plan = [
                _Waypoint(position=above),
                _Waypoint(position=(tx, ty, tz)),
                _Waypoint(grip_target=1.0),
            ]
        elif isinstance(goal, PlaceGoal):
            gx, gy, gz = world.workspace.clamp(goal.position)
            plan = [
                _Waypoint(position=above),
                _Waypoint(position=(tx, ty, tz)),
                _Waypoint(grip_target=1.0),
                _Waypoint(position=above),
                _Waypoint(position=(gx, gy, gz + self.APPROACH_HEIGHT_M)),
                _Waypoint(position=(gx, gy, gz)),
                _Waypoint(grip_target=0.0),
            ]
        elif isinstance(goal, CutGoal):
            # approach open-gripped, touch the target center, retract past the
            # required cut height with margin
            retract = (tx, ty, tz + CUT_RETRACT_M + 2 * CUT_CONTACT_RANGE_M)
            plan = [
                _Waypoint(position=above, grip_target=0.0),
                _Waypoint(position=(tx, ty, tz)),
                _Waypoint(position=retract),
            ]
        else:
            raise TargetMissing(f"no plan for goal kind {goal!r}")
        self._plan = [
            _Waypoint(
                position=world.workspace.clamp(wp.position) if wp.position else wp.position,
                grip_target=wp.grip_target,
            )
            for wp in plan
        ]
        self._phase = 0

    def predict(self, observation: Observation, instruction: str) -> ActionVector7:
        state = observation.state
        while self._phase < len(self._plan):
            wp = self._plan[self._phase]
            pos_done = wp.position is None or all(
                abs(w - p) <= self.POSITION_EPS_M for w, p in zip(wp.position, state.position)
            )
            grip_done = wp.grip_target is None or abs(state.grip - wp.grip_target) <= self.GRIP_EPS
            if pos_done and grip_done:
                self._phase += 1
                continue
            t = self._limits.max_translation_m
            g = self._limits.max_grip
            dx = dy = dz = dgrip = 0.0
            if wp.position is not None:
                dx = _cap(wp.position[0] - state.position[0], t)
                dy = _cap(wp.position[1] - state.position[1], t)
                dz = _cap(wp.position[2] - state.position[2], t)
            if wp.grip_target is not None:
                dgrip = _cap(wp.grip_target - state.grip, g)
            return ActionVector7(dx=dx, dy=dy, dz=dz, dgrip=dgrip)
        return ZERO_ACTION


def _cap(delta: float, limit: float) -> float:
    return -limit if delta < -limit else limit if delta > limit else delta


class FailureInjectingPolicy:
    """Wraps a policy; with probability p an episode is sabotaged (no motion).

    The Bernoulli draw is keyed on (wrapper seed, episode seed), so a batch
    of trials with fixed scenario seeds reproduces exactly.
    """

    def __init__(self, inner: PolicyBackend, failure_probability: float, seed: int = 0):
        if not 0.0 <= failure_probability <= 1.0:
            raise ValueError(f"failure_probability must be in [0, 1], got {failure_probability}")
        self._inner = inner
        self._p = failure_probability
        self._seed = seed
        self._sabotaged = False
        self.name = f"failure_injected({inner.name}, p={failure_probability:g})"

    def begin_episode(self, world: SimWorld, task: TaskSpec, seed: int) -> None:
        rng = random.Random((self._seed << 32) ^ (seed & 0xFFFFFFFF))
        self._sabotaged = rng.random() < self._p
        if not self._sabotaged:
            self._inner.begin_episode(world, task, seed)

    def predict(self, observation: Observation, instruction: str) -> ActionVector7:
        if self._sabotaged:
            return ZERO_ACTION
        return self._inner.predict(observation, instruction)


class RemotePolicy:
    """Delegates prediction to an HTTP /v1/act backend.

    Responses are schema-validated and magnitude-clamped by the wire client;
    transport problems surface as the wire error types.
    """

    name = "remote"

    def __init__(self, url: str, timeout_s: float = 30.0,
                 limits: ActionLimits = DEFAULT_ACTION_LIMITS):
        self._url = url
        self._timeout_s = timeout_s
        self._limits = limits

    def begin_episode(self, world: SimWorld, task: TaskSpec, seed: int) -> None:
        pass

    def predict(self, observation: Observation, instruction: str) -> ActionVector7:
        from . import wire

        return wire.call_act(self._url, observation, instruction,
                             timeout_s=self._timeout_s, limits=self._limits)
