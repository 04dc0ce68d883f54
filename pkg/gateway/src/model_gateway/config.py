"""Gateway configuration and its mode invariants."""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path

MODES = ("stub", "live")
_MODEL_FIELDS = ("interpret_model", "genmesh_model", "act_model")


def packaged_fixture_dir() -> Path:
    """The fixture set shipped inside the package (stub-mode default)."""
    return Path(str(resources.files("model_gateway").joinpath("fixtures_data")))


@dataclass(frozen=True)
class GatewayConfig:
    mode: str = "stub"
    interpret_model: str | None = None
    genmesh_model: str | None = None
    act_model: str | None = None
    device: str = "cpu"
    # None means the packaged fixtures; only consulted in stub mode
    fixture_dir: str | None = None
    host: str = "127.0.0.1"
    port: int = 8080

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.mode == "live":
            missing = [name for name in _MODEL_FIELDS if not getattr(self, name)]
            if missing:
                raise ValueError(f"live mode requires model identifiers: missing {missing}")
        if not 0 <= self.port <= 65535:
            raise ValueError(f"port must be in [0, 65535], got {self.port}")
        if not self.device:
            raise ValueError("device must be non-empty")

    def resolved_fixture_dir(self) -> Path:
        """Stub mode's fixture directory; must exist at serve time."""
        root = Path(self.fixture_dir) if self.fixture_dir else packaged_fixture_dir()
        if not root.is_dir():
            raise ValueError(f"fixture directory {root} does not exist")
        return root
