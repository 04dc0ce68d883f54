"""Simulated workspace, 7D delta actions, and manipulator state integration.

The action vector carries spatial displacements, angular movements, and a
grip delta. State integration is deliberately simple and total: positions
clamp to the workspace box, angles wrap to (-pi, pi], grip clamps to [0, 1].
Grasping is a discrete latch: crossing grip 0.5 upward within 0.03 m of an
object picks it up, crossing downward releases it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Union

from .errors import InvalidAction
from .mesh import AABB, Vec3
from .scene import SceneSnapshot

# Workspace defaults, meters. A desk-scale reach envelope in front of the arm.
DEFAULT_WORKSPACE = AABB(min=(0.2, -0.5, 0.0), max=(0.9, 0.5, 0.6))

GRASP_RANGE_M = 0.03
GRIP_LATCH = 0.5

# Cut goal geometry: blade contact range, required upward retract, and the
# maximum grip value that still counts as "holding a blade, not a fist".
CUT_CONTACT_RANGE_M = 0.01
CUT_RETRACT_M = 0.05
CUT_MAX_GRIP = 0.2


@dataclass(frozen=True)
class ActionLimits:
    max_translation_m: float = 0.02
    max_rotation_rad: float = 0.1
    max_grip: float = 1.0

    def __post_init__(self):
        if min(self.max_translation_m, self.max_rotation_rad, self.max_grip) <= 0:
            raise ValueError("action limits must be positive")


DEFAULT_ACTION_LIMITS = ActionLimits()


@dataclass(frozen=True)
class ActionVector7:
    dx: float = 0.0
    dy: float = 0.0
    dz: float = 0.0
    droll: float = 0.0
    dpitch: float = 0.0
    dyaw: float = 0.0
    dgrip: float = 0.0

    def as_tuple(self) -> tuple[float, ...]:
        return (self.dx, self.dy, self.dz, self.droll, self.dpitch, self.dyaw, self.dgrip)

    def clamped(self, limits: ActionLimits = DEFAULT_ACTION_LIMITS) -> "ActionVector7":
        t, r, g = limits.max_translation_m, limits.max_rotation_rad, limits.max_grip
        return ActionVector7(
            dx=_clamp(self.dx, -t, t),
            dy=_clamp(self.dy, -t, t),
            dz=_clamp(self.dz, -t, t),
            droll=_clamp(self.droll, -r, r),
            dpitch=_clamp(self.dpitch, -r, r),
            dyaw=_clamp(self.dyaw, -r, r),
            dgrip=_clamp(self.dgrip, -g, g),
        )

    def validate(self, limits: ActionLimits = DEFAULT_ACTION_LIMITS) -> None:
        values = self.as_tuple()
        if not all(math.isfinite(v) for v in values):
            raise InvalidAction(f"non-finite action component in {values}")
        bounds = (limits.max_translation_m,) * 3 + (limits.max_rotation_rad,) * 3 + (limits.max_grip,)
        for name, value, bound in zip(
            ("dx", "dy", "dz", "droll", "dpitch", "dyaw", "dgrip"), values, bounds
        ):
            if abs(value) > bound:
                raise InvalidAction(f"{name}={value} exceeds magnitude limit {bound}")


ZERO_ACTION = ActionVector7()


def action_from_sequence(values, limits: ActionLimits = DEFAULT_ACTION_LIMITS) -> ActionVector7:
    """Build a validated action from a 7-number sequence (wire responses)."""
    seq = list(values)
    if len(seq) != 7:
        raise InvalidAction(f"action must have exactly 7 components, got {len(seq)}")
    try:
        floats = [float(v) for v in seq]
    except (TypeError, ValueError) as exc:
        raise InvalidAction(f"non-numeric action component: {exc}") from exc
    action = ActionVector7(*floats)
    action.validate(limits)
    return action


def wrap_angle(angle_rad: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    a = math.fmod(angle_rad + math.pi, 2.0 * math.pi)
    if a <= 0.0:
        a += 2.0 * math.pi
    return a - math.pi


def _clamp(value: float, lo: float, hi: float) -> float:
    return lo if value < lo else hi if value > hi else value


@dataclass(frozen=True)
class ManipulatorState:
    position: Vec3 = (0.3, 0.0, 0.3)
    roll: float = 0.0
    pitch: float = 0.0
    yaw: float = 0.0
    grip: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "position", tuple(float(c) for c in self.position))
        for name in ("roll", "pitch", "yaw"):
            a = getattr(self, name)
            if not -math.pi < a <= math.pi:
                raise ValueError(f"{name}={a} outside wrap range (-pi, pi]")
        if not 0.0 <= self.grip <= 1.0:
            raise ValueError(f"grip={self.grip} outside [0, 1]")

    def as_vector(self) -> tuple[float, ...]:
        return (*self.position, self.roll, self.pitch, self.yaw, self.grip)


@dataclass
class SimObject:
    name: str
    position: Vec3
    size_mm: float
    color_id: str = ""
    held: bool = False

    def __post_init__(self):
        self.position = tuple(float(c) for c in self.position)


@dataclass
class SimWorld:
    objects: list[SimObject] = field(default_factory=list)
    workspace: AABB = DEFAULT_WORKSPACE
    background_id: str = ""

    def __post_init__(self):
        held = [o for o in self.objects if o.held]
        if len(held) > 1:
            raise ValueError(f"at most one object may be held, got {len(held)}")

    def object_by_name(self, name: str) -> SimObject | None:
        for obj in self.objects:
            if obj.name == name:
                return obj
        return None

    def held_object(self) -> SimObject | None:
        for obj in self.objects:
            if obj.held:
                return obj
        return None


@dataclass(frozen=True)
class GraspGoal:
    kind: str = field(default="grasp", init=False)


@dataclass(frozen=True)
class PlaceGoal:
    position: Vec3
    tolerance_m: float
    kind: str = field(default="place_at", init=False)

    def __post_init__(self):
        if self.tolerance_m <= 0:
            raise ValueError(f"tolerance_m must be positive, got {self.tolerance_m}")
        object.__setattr__(self, "position", tuple(float(c) for c in self.position))


@dataclass(frozen=True)
class CutGoal:
    kind: str = field(default="cut", init=False)


GoalPredicate = Union[GraspGoal, PlaceGoal, CutGoal]


@dataclass(frozen=True)
class TaskSpec:
    instruction: str
    target_object: str
    goal: GoalPredicate
    max_steps: int = 150
    task_name: str = ""

    def __post_init__(self):
        if self.max_steps < 1:
            raise ValueError(f"max_steps must be >= 1, got {self.max_steps}")
        if not self.target_object:
            raise ValueError("target_object must be non-empty")
        if not self.task_name:
            object.__setattr__(self, "task_name", self.goal.kind)


def distance(a: Vec3, b: Vec3) -> float:
    return math.dist(a, b)


def apply_action(
    state: ManipulatorState,
    action: ActionVector7,
    world: SimWorld,
    limits: ActionLimits = DEFAULT_ACTION_LIMITS,
) -> ManipulatorState:
    """Integrate one action tick; clamp/wrap everything; run the grasp latch.

    Mutates ``world`` object held flags and positions; returns the new state.
    """
    action.validate(limits)

    raw = (
        state.position[0] + action.dx,
        state.position[1] + action.dy,
        state.position[2] + action.dz,
    )
    position = world.workspace.clamp(raw)
    roll = wrap_angle(state.roll + action.droll)
    pitch = wrap_angle(state.pitch + action.dpitch)
    yaw = wrap_angle(state.yaw + action.dyaw)
    old_grip = state.grip
    grip = _clamp(old_grip + action.dgrip, 0.0, 1.0)

    if old_grip < GRIP_LATCH <= grip and world.held_object() is None:
        in_range = [
            obj for obj in world.objects if distance(position, obj.position) <= GRASP_RANGE_M
        ]
        if in_range:
            in_range.sort(key=lambda o: (distance(position, o.position), o.name))
            in_range[0].held = True
    elif grip < GRIP_LATCH <= old_grip:
        held = world.held_object()
        if held is not None:
            held.held = False

    held = world.held_object()
    if held is not None:
        held.position = position

    return ManipulatorState(position=position, roll=roll, pitch=pitch, yaw=yaw, grip=grip)


@dataclass(frozen=True)
class ObjectSummary:
    name: str
    position: Vec3
    size_mm: float
    color_id: str
    held: bool


@dataclass(frozen=True)
class Observation:
    state: ManipulatorState
    objects: tuple[ObjectSummary, ...]
    background_id: str
    image_b64: str | None = None


def observe(world: SimWorld, state: ManipulatorState, image_b64: str | None = None) -> Observation:
    summaries = tuple(
        ObjectSummary(
            name=o.name,
            position=tuple(o.position),
            size_mm=o.size_mm,
            color_id=o.color_id,
            held=o.held,
        )
        for o in world.objects
    )
    return Observation(state=state, objects=summaries, background_id=world.background_id,
                       image_b64=image_b64)


def observation_to_dict(obs: Observation) -> dict:
    """Wire-protocol shape for /v1/act requests."""
    payload = {
        "state": list(obs.state.as_vector()),
        "objects": [
            {
                "name": o.name,
                "position": list(o.position),
                "size_mm": o.size_mm,
                "color_id": o.color_id,
                "held": o.held,
            }
            for o in obs.objects
        ],
        "background_id": obs.background_id,
    }
    if obs.image_b64 is not None:
        payload["image_b64"] = obs.image_b64
    return payload


def world_from_snapshot(
    snapshot: SceneSnapshot, workspace: AABB = DEFAULT_WORKSPACE
) -> SimWorld:
    """Stand up a simulated world mirroring a scene snapshot.

    Scene positions are meters already; objects outside the workspace are
    clamped onto it so every task starts reachable.
    """
    objects = [
        SimObject(
            name=o.name,
            position=workspace.clamp(o.position),
            size_mm=o.approx_size_mm,
            color_id=o.color_id,
        )
        for o in snapshot.objects
    ]
    return SimWorld(objects=objects, workspace=workspace, background_id=snapshot.background_id)


# Canonical task builders mirroring the two reference tasks.
PLATE_POSITION = (0.7, 0.3, 0.02)
PLACE_TOLERANCE_M = 0.05


def make_task(task_name: str, target_object: str, max_steps: int = 150) -> TaskSpec:
    """Build one of the named reference tasks ("cut" or "pick_place")."""
    if task_name == "cut":
        return TaskSpec(
            instruction="Cut one piece of cake",
            target_object=target_object,
            goal=CutGoal(),
            max_steps=max_steps,
            task_name="cut",
        )
    if task_name == "pick_place":
        return TaskSpec(
            instruction="Pick one piece of cake and place on plate",
            target_object=target_object,
            goal=PlaceGoal(position=PLATE_POSITION, tolerance_m=PLACE_TOLERANCE_M),
            max_steps=max_steps,
            task_name="pick_place",
        )
    raise ValueError(f"unknown task name {task_name!r}; expected 'cut' or 'pick_place'")


def retarget_task(task: TaskSpec, target_object: str, instruction: str | None = None) -> TaskSpec:
    new_instruction = instruction if instruction is not None else task.instruction
    return replace(task, target_object=target_object, instruction=new_instruction)
