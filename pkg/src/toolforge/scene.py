"""Scene interpretation: turn a scene snapshot into a tool-generation prompt.

The mock backend is rule-based and deterministic (structured object
annotations stand in for pixels); the remote backend speaks the wire
protocol and is schema-validated. Both produce the same SceneAnalysis
contract for downstream stages.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from typing import Protocol

from .errors import (
    EmptyToolName,
    NoTargetObject,
    SchemaViolation,
    UnknownObject,
)

Vec3 = tuple[float, float, float]

TOOL_PROMPT_TEMPLATE = "Create a 3D model of a {tool_name}"

SCENE_SCHEMA_VERSION = 1


@dataclass(frozen=True)
class SceneObject:
    name: str
    approx_size_mm: float
    position: Vec3 = (0.0, 0.0, 0.0)
    color_id: str = ""
    is_target: bool = False

    def __post_init__(self):
        if not self.name:
            raise ValueError("scene object name must be non-empty")
        if self.approx_size_mm <= 0:
            raise ValueError(f"approx_size_mm must be positive, got {self.approx_size_mm}")
        object.__setattr__(self, "position", tuple(float(c) for c in self.position))


@dataclass(frozen=True)
class SceneSnapshot:
    scene_id: str
    objects: tuple[SceneObject, ...] = ()
    background_id: str = ""
    image_ref: str | None = None
    timestamp: float = 0.0

    def __post_init__(self):
        if not self.scene_id:
            raise ValueError("scene_id must be non-empty")
        object.__setattr__(self, "objects", tuple(self.objects))
        targets = [o for o in self.objects if o.is_target]
        if len(targets) > 1:
            raise ValueError(f"at most one target object allowed, got {len(targets)}")

    @property
    def target(self) -> SceneObject | None:
        for obj in self.objects:
            if obj.is_target:
                return obj
        return None


@dataclass(frozen=True)
class SceneAnalysis:
    description: str
    target: SceneObject
    tool_name: str
    tool_prompt: str

    def __post_init__(self):
        if not self.tool_name:
            raise ValueError("tool_name must be non-empty")


def formulate_tool_prompt(tool_name: str) -> str:
    """Apply the fixed prompt template to a tool name."""
    if not tool_name or not tool_name.strip():
        raise EmptyToolName("tool name must be non-empty")
    return TOOL_PROMPT_TEMPLATE.format(tool_name=tool_name)


def load_tool_lookup(path: str | None = None) -> dict[str, str]:
    """Load the object-name -> tool-name table (packaged default or a config file)."""
    if path is None:
        text = resources.files("toolforge").joinpath("data/tool_lookup.json").read_text()
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    table = json.loads(text)
    if not isinstance(table, dict) or not all(
        isinstance(k, str) and isinstance(v, str) for k, v in table.items()
    ):
        raise SchemaViolation("tool lookup table must map object names to tool names")
    return table


class InterpreterBackend(Protocol):
    name: str

    def interpret(self, snapshot: SceneSnapshot) -> SceneAnalysis: ...


class MockInterpreter:
    """Deterministic rule-based interpreter over structured annotations.

    Resolves the target via the is_target flag and maps its name through the
    lookup table; identical snapshots always yield identical analyses. There
    is no fallback tool: names outside the table are rejected.
    """

    name = "mock"

    def __init__(self, lookup: dict[str, str] | None = None):
        self.lookup = dict(lookup) if lookup is not None else load_tool_lookup()

    def interpret(self, snapshot: SceneSnapshot) -> SceneAnalysis:
        if not snapshot.objects:
            raise NoTargetObject(f"scene {snapshot.scene_id!r} has no objects")
        target = snapshot.target
        if target is None:
            raise NoTargetObject(f"scene {snapshot.scene_id!r} has no is_target object")
        tool = self.lookup.get(target.name)
        if tool is None:
            raise UnknownObject(
                f"no tool known for object {target.name!r} "
                f"(table covers: {', '.join(sorted(self.lookup))})"
            )
        others = [o.name for o in snapshot.objects if not o.is_target]
        description = (
            f"Scene {snapshot.scene_id} on {snapshot.background_id or 'unknown background'}: "
            f"target is a {target.color_id + ' ' if target.color_id else ''}{target.name} "
            f"about {target.approx_size_mm:g} mm across"
            + (f"; also visible: {', '.join(others)}" if others else "")
            + "."
        )
        return SceneAnalysis(
            description=description,
            target=target,
            tool_name=tool,
            tool_prompt=formulate_tool_prompt(tool),
        )


class RemoteInterpreter:
    """Interpreter backed by a remote model server speaking the wire protocol."""

    name = "remote"

    def __init__(self, url: str, timeout_s: float = 30.0):
        self.url = url
        self.timeout_s = timeout_s

    def interpret(self, snapshot: SceneSnapshot) -> SceneAnalysis:
        if snapshot.image_ref is None:
            raise ValueError("remote interpreter requires snapshot.image_ref")
        from . import wire

        return wire.call_interpret(self.url, snapshot, timeout_s=self.timeout_s)


def interpret_scene(snapshot: SceneSnapshot, backend: InterpreterBackend) -> SceneAnalysis:
    """Run the configured interpreter backend over a snapshot."""
    return backend.interpret(snapshot)


def snapshot_to_dict(snapshot: SceneSnapshot) -> dict:
    return {
        "schema_version": SCENE_SCHEMA_VERSION,
        "scene_id": snapshot.scene_id,
        "background_id": snapshot.background_id,
        "timestamp": snapshot.timestamp,
        "image_ref": snapshot.image_ref,
        "objects": [
            {
                "name": o.name,
                "approx_size_mm": o.approx_size_mm,
                "position": list(o.position),
                "color_id": o.color_id,
                "is_target": o.is_target,
            }
            for o in snapshot.objects
        ],
    }


def snapshot_from_dict(data: dict) -> SceneSnapshot:
    if not isinstance(data, dict):
        raise SchemaViolation(f"scene data must be a JSON object, got {type(data).__name__}")
    try:
        objects = tuple(
            SceneObject(
                name=o["name"],
                approx_size_mm=o["approx_size_mm"],
                position=tuple(o.get("position", (0.0, 0.0, 0.0))),
                color_id=o.get("color_id", ""),
                is_target=o.get("is_target", False),
            )
            for o in data["objects"]
        )
        return SceneSnapshot(
            scene_id=data["scene_id"],
            objects=objects,
            background_id=data.get("background_id", ""),
            image_ref=data.get("image_ref"),
            timestamp=data.get("timestamp", 0.0),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaViolation(f"bad scene data: {exc}") from exc


def load_scene(path: str) -> SceneSnapshot:
    """Read a one-scene-per-file JSON fixture."""
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise SchemaViolation(f"cannot read scene file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SchemaViolation(f"scene file {path} is not valid JSON: {exc}") from exc
    return snapshot_from_dict(data)


def save_scene(snapshot: SceneSnapshot, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(snapshot_to_dict(snapshot), fh, indent=2)
        fh.write("\n")
