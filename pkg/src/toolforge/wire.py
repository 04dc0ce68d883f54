"""HTTP clients for the model wire protocol.

Endpoints: POST /v1/interpret, /v1/genmesh, /v1/act and GET /v1/health.
Bodies are JSON and validated against the packaged schemas on both send and
receive, so nothing partially-validated ever crosses this boundary: a call
returns schema-valid data or raises a typed error.
"""

from __future__ import annotations

import base64
import json
import math
from functools import lru_cache
from importlib import resources
from pathlib import Path

import jsonschema
import requests

from .action import (
    ActionLimits,
    ActionVector7,
    DEFAULT_ACTION_LIMITS,
    Observation,
    observation_to_dict,
)
from .errors import (
    BackendUnavailable,
    HttpError,
    MalformedResponse,
    RequestTimeout,
    ToolforgeError,
)
from .mesh import parse_mesh_text
from .scene import SceneAnalysis, SceneObject, SceneSnapshot, snapshot_to_dict

DEFAULT_TIMEOUT_S = 30.0


@lru_cache(maxsize=None)
def load_schema(name: str) -> dict:
    """Load one of the packaged JSON schemas by bare name (no suffix)."""
    filename = name if name.endswith(".json") else f"{name}.json"
    text = resources.files("toolforge").joinpath("schemas", filename).read_text(encoding="utf-8")
    return json.loads(text)


def validate_payload(payload: dict, schema_name: str) -> None:
    """Validate a payload against a packaged schema; raises MalformedResponse."""
    try:
        jsonschema.validate(payload, load_schema(schema_name))
    except jsonschema.ValidationError as exc:
        raise MalformedResponse(f"{schema_name}: {exc.message}") from exc


def _post(url: str, path: str, payload: dict, response_schema: str,
          timeout_s: float) -> dict:
    endpoint = url.rstrip("/") + path
    try:
        response = requests.post(endpoint, json=payload, timeout=timeout_s)
    except requests.Timeout as exc:
        raise RequestTimeout(f"{endpoint}: no response within {timeout_s} s") from exc
    except requests.RequestException as exc:
        raise BackendUnavailable(f"{endpoint}: {exc}") from exc
    if response.status_code >= 400:
        raise HttpError(response.status_code, response.text[:500])
    try:
        data = response.json()
    except ValueError as exc:
        raise MalformedResponse(f"{endpoint}: response is not JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise MalformedResponse(f"{endpoint}: expected a JSON object, got {type(data).__name__}")
    validate_payload(data, response_schema)
    return data


def call_interpret(url: str, snapshot: SceneSnapshot,
                   timeout_s: float = DEFAULT_TIMEOUT_S) -> SceneAnalysis:
    """POST /v1/interpret. Embeds the snapshot image as base64 when readable."""
    payload: dict = {"scene": snapshot_to_dict(snapshot)}
    if snapshot.image_ref:
        image = Path(snapshot.image_ref)
        if image.is_file():
            payload["image_b64"] = base64.b64encode(image.read_bytes()).decode("ascii")
    data = _post(url, "/v1/interpret", payload, "interpret_response", timeout_s)
    target = SceneObject(
        name=data["target"]["name"],
        approx_size_mm=data["target"]["size_mm"],
        is_target=True,
    )
    return SceneAnalysis(
        description=data["description"],
        target=target,
        tool_name=data["tool_name"],
        tool_prompt=data["tool_prompt"],
    )


def call_genmesh(url: str, prompt: str, max_faces: int | None = None,
                 timeout_s: float = DEFAULT_TIMEOUT_S) -> str:
    """POST /v1/genmesh. The mesh text is parse-checked before return."""
    payload: dict = {"prompt": prompt}
    if max_faces is not None:
        payload["max_faces"] = max_faces
    data = _post(url, "/v1/genmesh", payload, "genmesh_response", timeout_s)
    mesh_text = data["mesh_text"]
    try:
        parse_mesh_text(mesh_text)
    except ToolforgeError as exc:
        raise MalformedResponse(f"genmesh returned unparseable mesh text: {exc}") from exc
    return mesh_text


def call_act(url: str, observation: Observation, instruction: str,
             timeout_s: float = DEFAULT_TIMEOUT_S,
             limits: ActionLimits = DEFAULT_ACTION_LIMITS) -> ActionVector7:
    """POST /v1/act. Responses are arity/finiteness-checked, then clamped."""
    payload = {"observation": observation_to_dict(observation), "instruction": instruction}
    data = _post(url, "/v1/act", payload, "act_response", timeout_s)
    return action_from_wire(data["action"], limits)


def action_from_wire(values, limits: ActionLimits = DEFAULT_ACTION_LIMITS) -> ActionVector7:
    """Convert a wire action array into a validated, clamped ActionVector7.

    Wrong arity or non-finite components are protocol violations
    (MalformedResponse); out-of-limit magnitudes are clamped, not rejected.
    """
    if not isinstance(values, (list, tuple)):
        raise MalformedResponse(f"action must be an array, got {type(values).__name__}")
    if len(values) != 7:
        raise MalformedResponse(f"action must have exactly 7 components, got {len(values)}")
    floats = []
    for i, value in enumerate(values):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise MalformedResponse(f"action[{i}] is not a number: {value!r}")
        f = float(value)
        if not math.isfinite(f):
            raise MalformedResponse(f"action[{i}] is not finite: {f!r}")
        floats.append(f)
    return ActionVector7(*floats).clamped(limits)


def check_health(url: str, timeout_s: float = DEFAULT_TIMEOUT_S) -> dict:
    """GET /v1/health; returns the validated status document."""
    endpoint = url.rstrip("/") + "/v1/health"
    try:
        response = requests.get(endpoint, timeout=timeout_s)
    except requests.Timeout as exc:
        raise RequestTimeout(f"{endpoint}: no response within {timeout_s} s") from exc
    except requests.RequestException as exc:
        raise BackendUnavailable(f"{endpoint}: {exc}") from exc
    if response.status_code >= 400:
        raise HttpError(response.status_code, response.text[:500])
    try:
        data = response.json()
    except ValueError as exc:
        raise MalformedResponse(f"{endpoint}: response is not JSON: {exc}") from exc
    validate_payload(data, "health_response")
    return data
