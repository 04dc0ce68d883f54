"""Live-mode backends: output normalization plus documented load points.

Model weights and inference stacks are not bundled, so the predict hooks
raise ModelUnavailable until a deployment wires real models into them;
the HTTP layer maps that to 503. The normalizers below are the part that
runs in production either way: whatever a model emits must leave this
module schema-shaped or as an Unnormalizable error (HTTP 422).
"""

from __future__ import annotations

import math

from toolforge.errors import ToolforgeError
from toolforge.mesh import parse_mesh_text


class ModelUnavailable(RuntimeError):
    """The configured model cannot be loaded or reached."""


class Unnormalizable(ValueError):
    """Model output cannot be coerced into the wire schema."""


def normalize_mesh_text(raw: str) -> str:
    """Strip non-geometry chatter and require a parseable mesh.

    Generative models wrap mesh text in prose or code fences; keep only
    v/f lines (the parser ignores unknown keywords anyway, but fences can
    contain stray tokens that look malformed).
    """
    lines = [
        line for line in raw.splitlines()
        if line.lstrip().startswith(("v ", "f "))
    ]
    text = "\n".join(lines) + "\n" if lines else ""
    try:
        parse_mesh_text(text)
    except ToolforgeError as exc:
        raise Unnormalizable(f"model output is not a usable mesh: {exc}") from exc
    return text


def normalize_action(values) -> list[float]:
    """Enforce the 7-number contract; reject what clamping cannot fix."""
    if not isinstance(values, (list, tuple)) or len(values) != 7:
        raise Unnormalizable(f"action must be a 7-element array, got {values!r:.80}")
    floats = []
    for i, value in enumerate(values):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise Unnormalizable(f"action[{i}] is not a number")
        f = float(value)
        if not math.isfinite(f):
            raise Unnormalizable(f"action[{i}] is not finite")
        floats.append(f)
    return floats


def predict_interpret(config, payload: dict) -> dict:
    raise ModelUnavailable(
        f"interpret model {config.interpret_model!r} is not loaded; "
        "wire a vision-language backend into model_gateway.live.predict_interpret"
    )


def predict_genmesh(config, payload: dict) -> dict:
    raise ModelUnavailable(
        f"genmesh model {config.genmesh_model!r} is not loaded; "
        "wire a mesh-generation backend into model_gateway.live.predict_genmesh "
        "and pass its raw text through normalize_mesh_text"
    )


def predict_act(config, payload: dict) -> dict:
    raise ModelUnavailable(
        f"act model {config.act_model!r} is not loaded; "
        "wire a policy backend into model_gateway.live.predict_act "
        "and pass its raw vector through normalize_action"
    )
