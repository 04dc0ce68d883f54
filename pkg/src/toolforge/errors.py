"""Exception types shared across the package.

Domain errors all derive from ToolforgeError so the CLI can map them to
exit code 1 while genuine bugs keep surfacing as ordinary tracebacks.
"""


class ToolforgeError(Exception):
    """Base class for all domain errors raised by this package."""


# --- scene interpretation ---------------------------------------------------

class NoTargetObject(ToolforgeError):
    """Snapshot contains no object flagged as the manipulation target."""


class UnknownObject(ToolforgeError):
    """Target object name has no entry in the tool lookup table."""


class EmptyToolName(ToolforgeError):
    """Tool prompt requested for an empty tool name."""


# --- mesh -------------------------------------------------------------------

class MalformedLine(ToolforgeError):
    """Mesh text line has wrong arity or a non-numeric token."""


class IndexOutOfBounds(ToolforgeError):
    """Face references a vertex index outside the parsed vertex list."""


class EmptyMesh(ToolforgeError):
    """Mesh has no vertices or no faces."""


class DegenerateMesh(ToolforgeError):
    """Mesh has zero spatial extent and cannot be scaled."""


class NonPositiveTarget(ToolforgeError):
    """Scaling target size or fit ratio is not strictly positive."""


# --- slicer -----------------------------------------------------------------

class NotWatertight(ToolforgeError):
    """Slicing requires a watertight, consistently oriented mesh."""


class OpenContour(ToolforgeError):
    """Layer segments could not be stitched into closed loops."""


class EmptyLayers(ToolforgeError):
    """G-code emission called with no layers."""


class ExceedsBed(ToolforgeError):
    """Toolpath coordinate falls outside the printer bed volume."""


# --- action / control -------------------------------------------------------

class InvalidAction(ToolforgeError):
    """Action vector has non-finite or over-magnitude components."""


class TargetMissing(ToolforgeError):
    """Task target object does not exist in the simulated world."""


# --- episodes ---------------------------------------------------------------

class EpisodeFinalized(ToolforgeError):
    """Attempt to append a step to an already finalized episode."""


class IoFailure(ToolforgeError):
    """Episode file could not be read or written."""


class SchemaViolation(ToolforgeError):
    """Persisted data violates its documented schema."""


# --- evaluation -------------------------------------------------------------

class UnknownCategory(ToolforgeError):
    """Scenario category outside the generalization taxonomy."""


class EmptyResults(ToolforgeError):
    """Report aggregation called with no trial results."""


# --- wire protocol ----------------------------------------------------------

class BackendUnavailable(ToolforgeError):
    """Remote backend could not be reached."""


class RequestTimeout(BackendUnavailable):
    """Remote backend did not answer within the configured timeout."""


class HttpError(ToolforgeError):
    """Remote backend answered with a non-2xx status."""

    def __init__(self, status: int, body: str):
        self.status = status
        self.body = body
        super().__init__(f"HTTP {status}: {body[:200]}")


class MalformedResponse(ToolforgeError):
    """Remote backend answered 2xx but the payload violates the wire schema."""


# --- orchestrator -----------------------------------------------------------

class ConfigError(ToolforgeError):
    """Pipeline configuration file is invalid or inconsistent."""


class ValidationExhausted(ToolforgeError):
    """Mesh generation kept producing defective meshes until the retry budget ran out."""
