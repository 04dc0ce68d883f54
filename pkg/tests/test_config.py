"""Pipeline config: defaults, validation, and .cfg parsing."""

import pytest

from toolforge.config import PipelineConfig, load_config
from toolforge.errors import ConfigError


def write_cfg(tmp_path, body):
    path = tmp_path / "pipeline.cfg"
    path.write_text(body, encoding="utf-8")
    return path


GOOD_CFG = """\
[pipeline]
config_version = 1
genmesh_backend = mock
fit_ratio = 2.0
hz = 10
max_genmesh_attempts = 5
layer_height_mm = 0.3
bed_size_mm = 200, 200, 180
output_dir = artifacts
seed = 7
"""


class TestDefaults:
    def test_default_construction(self):
        config = PipelineConfig()
        assert config.interpret_backend == "mock"
        assert config.fit_ratio == 1.5
        assert config.hz == 5.0
        assert config.control_mode == "fast"
        assert config.max_genmesh_attempts == 3

    def test_remote_requires_url(self):
        with pytest.raises(ConfigError):
            PipelineConfig(genmesh_backend="remote")

    def test_remote_with_url_ok(self):
        config = PipelineConfig(genmesh_backend="remote", genmesh_url="http://localhost:1")
        assert config.genmesh_url == "http://localhost:1"

    def test_bad_backend_rejected(self):
        with pytest.raises(ConfigError):
            PipelineConfig(act_backend="quantum")

    def test_bad_control_mode_rejected(self):
        with pytest.raises(ConfigError):
            PipelineConfig(control_mode="warp")

    def test_zero_attempts_rejected(self):
        with pytest.raises(ConfigError):
            PipelineConfig(max_genmesh_attempts=0)

    def test_fit_ratio_below_one_rejected(self):
        with pytest.raises(ConfigError):
            PipelineConfig(fit_ratio=0.5)

    def test_nonpositive_hz_rejected(self):
        with pytest.raises(ConfigError):
            PipelineConfig(hz=0.0)


class TestLoadConfig:
    def test_good_file(self, tmp_path):
        config = load_config(write_cfg(tmp_path, GOOD_CFG))
        assert config.fit_ratio == 2.0
        assert config.hz == 10.0
        assert config.max_genmesh_attempts == 5
        assert config.profile.layer_height_mm == 0.3
        assert config.profile.bed_size_mm == (200.0, 200.0, 180.0)
        assert config.output_dir == "artifacts"
        assert config.seed == 7

    def test_unknown_key_rejected(self, tmp_path):
        cfg = "[pipeline]\nconfig_version = 1\nlayer_hight_mm = 0.3\n"
        with pytest.raises(ConfigError) as info:
            load_config(write_cfg(tmp_path, cfg))
        assert "layer_hight_mm" in str(info.value)

    def test_missing_section_rejected(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(write_cfg(tmp_path, "[other]\nconfig_version = 1\n"))

    def test_wrong_version_rejected(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(write_cfg(tmp_path, "[pipeline]\nconfig_version = 2\n"))

    def test_missing_file_rejected(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(tmp_path / "absent.cfg")

    def test_non_numeric_value_rejected(self, tmp_path):
        cfg = "[pipeline]\nconfig_version = 1\nhz = fast\n"
        with pytest.raises(ConfigError):
            load_config(write_cfg(tmp_path, cfg))

    def test_empty_url_means_none(self, tmp_path):
        cfg = "[pipeline]\nconfig_version = 1\ngenmesh_url =\n"
        config = load_config(write_cfg(tmp_path, cfg))
        assert config.genmesh_url is None

    def test_minimal_file_gives_defaults(self, tmp_path):
        config = load_config(write_cfg(tmp_path, "[pipeline]\nconfig_version = 1\n"))
        assert config == PipelineConfig()
