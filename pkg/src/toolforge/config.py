"""Pipeline configuration: defaults, invariants, and .cfg file loading.

Config files are INI-style key-value text under a single [pipeline]
section with a config_version key. Unknown keys are rejected so typos fail
loudly instead of silently running with defaults.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, replace
from pathlib import Path

from .errors import ConfigError
from .slicer import PrinterProfile

CONFIG_VERSION = 1
BACKEND_MODES = ("mock", "remote")
CONTROL_MODES = ("fast", "realtime")


@dataclass(frozen=True)
class PipelineConfig:
    interpret_backend: str = "mock"
    genmesh_backend: str = "mock"
    act_backend: str = "mock"
    interpret_url: str | None = None
    genmesh_url: str | None = None
    act_url: str | None = None
    profile: PrinterProfile = PrinterProfile()
    fit_ratio: float = 1.5
    hz: float = 5.0
    control_mode: str = "fast"
    max_genmesh_attempts: int = 3
    request_timeout_s: float = 30.0
    output_dir: str = "out"
    seed: int = 0

    def __post_init__(self):
        for stage, mode, url in (
            ("interpret", self.interpret_backend, self.interpret_url),
            ("genmesh", self.genmesh_backend, self.genmesh_url),
            ("act", self.act_backend, self.act_url),
        ):
            if mode not in BACKEND_MODES:
                raise ConfigError(f"{stage}_backend must be one of {BACKEND_MODES}, got {mode!r}")
            if mode == "remote" and not url:
                raise ConfigError(f"{stage}_backend=remote requires {stage}_url")
        if self.control_mode not in CONTROL_MODES:
            raise ConfigError(f"control_mode must be one of {CONTROL_MODES}, got {self.control_mode!r}")
        if self.max_genmesh_attempts < 1:
            raise ConfigError(f"max_genmesh_attempts must be >= 1, got {self.max_genmesh_attempts}")
        if self.hz <= 0:
            raise ConfigError(f"hz must be positive, got {self.hz}")
        if self.fit_ratio < 1.0:
            raise ConfigError(f"fit_ratio must be >= 1, got {self.fit_ratio}")
        if self.request_timeout_s <= 0:
            raise ConfigError(f"request_timeout_s must be positive, got {self.request_timeout_s}")


# one parser per key: configparser hands back strings
_STR_KEYS = ("interpret_backend", "genmesh_backend", "act_backend",
             "interpret_url", "genmesh_url", "act_url", "control_mode", "output_dir")
_FLOAT_KEYS = ("fit_ratio", "hz", "request_timeout_s")
_INT_KEYS = ("max_genmesh_attempts", "seed")
_PROFILE_FLOAT_KEYS = ("layer_height_mm", "line_width_mm", "filament_diameter_mm",
                       "print_feed_mm_per_min", "travel_feed_mm_per_min", "infill_spacing_mm")
DOCUMENTED_KEYS = (("config_version",) + _STR_KEYS + _FLOAT_KEYS + _INT_KEYS
                   + _PROFILE_FLOAT_KEYS + ("bed_size_mm",))


def load_config(path: str | Path) -> PipelineConfig:
    """Parse a .cfg file into a PipelineConfig; unknown keys are errors."""
    parser = configparser.ConfigParser()
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        parser.read_string(text, source=str(path))
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}") from exc
    if "pipeline" not in parser:
        raise ConfigError(f"{path}: missing [pipeline] section")
    section = parser["pipeline"]

    unknown = sorted(set(section) - set(DOCUMENTED_KEYS))
    if unknown:
        raise ConfigError(f"{path}: unknown keys {unknown}; documented keys: {sorted(DOCUMENTED_KEYS)}")
    version = section.get("config_version", str(CONFIG_VERSION))
    if version.strip() != str(CONFIG_VERSION):
        raise ConfigError(f"{path}: unsupported config_version {version!r}")

    kwargs: dict = {}
    for key in _STR_KEYS:
        if key in section:
            value = section[key].strip()
            if key.endswith("_url"):
                kwargs[key] = value or None
            else:
                kwargs[key] = value
    try:
        for key in _FLOAT_KEYS:
            if key in section:
                kwargs[key] = float(section[key])
        for key in _INT_KEYS:
            if key in section:
                kwargs[key] = int(section[key])
        profile_kwargs: dict = {}
        for key in _PROFILE_FLOAT_KEYS:
            if key in section:
                profile_kwargs[key] = float(section[key])
        if "bed_size_mm" in section:
            parts = [float(p) for p in section["bed_size_mm"].split(",")]
            if len(parts) != 3:
                raise ConfigError(f"{path}: bed_size_mm needs 3 comma-separated values")
            profile_kwargs["bed_size_mm"] = tuple(parts)
    except ValueError as exc:
        raise ConfigError(f"{path}: bad numeric value: {exc}") from exc

    try:
        profile = replace(PrinterProfile(), **profile_kwargs) if profile_kwargs else PrinterProfile()
        return PipelineConfig(profile=profile, **kwargs)
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
