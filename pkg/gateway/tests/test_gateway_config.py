"""GatewayConfig invariants and the fixture store's keying rules."""

import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from model_gateway import FixtureStore, GatewayConfig, packaged_fixture_dir, request_key
from model_gateway.fixtures import ENDPOINTS, canonical_request_bytes

LIVE_MODELS = {"interpret_model": "vlm-x", "genmesh_model": "gen-x", "act_model": "vla-x"}


class TestGatewayConfig:
    def test_defaults_are_a_valid_stub_config(self):
        config = GatewayConfig()
        assert config.mode == "stub"
        assert config.resolved_fixture_dir() == packaged_fixture_dir()

    def test_unknown_mode_rejected(self):
        with pytest.raises(ValueError, match="mode"):
            GatewayConfig(mode="replay")

    def test_live_requires_all_three_model_ids(self):
        with pytest.raises(ValueError, match="model identifiers"):
            GatewayConfig(mode="live")
        with pytest.raises(ValueError, match="act_model"):
            GatewayConfig(mode="live", interpret_model="a", genmesh_model="b")
        GatewayConfig(mode="live", **LIVE_MODELS)

    def test_stub_ignores_model_ids(self):
        GatewayConfig(mode="stub", **LIVE_MODELS)

    @pytest.mark.parametrize("port", [-1, 65536, 100000])
    def test_port_out_of_range_rejected(self, port):
        with pytest.raises(ValueError, match="port"):
            GatewayConfig(port=port)

    def test_empty_device_rejected(self):
        with pytest.raises(ValueError, match="device"):
            GatewayConfig(device="")

    def test_missing_fixture_dir_rejected_at_resolve_time(self, tmp_path):
        config = GatewayConfig(fixture_dir=str(tmp_path / "nope"))
        with pytest.raises(ValueError, match="does not exist"):
            config.resolved_fixture_dir()

    def test_packaged_fixtures_cover_every_endpoint(self):
        root = packaged_fixture_dir()
        for endpoint in ENDPOINTS:
            assert (root / endpoint / "default.json").is_file()


class TestFixtureKeying:
    def test_key_ignores_dict_insertion_order(self):
        a = {"prompt": "knife", "max_faces": 100}
        b = {"max_faces": 100, "prompt": "knife"}
        assert request_key(a) == request_key(b)

    def test_canonical_encoding_is_compact_sorted_json(self):
        payload = {"b": [1, 2], "a": "x"}
        assert canonical_request_bytes(payload) == b'{"a":"x","b":[1,2]}'

    @given(
        st.dictionaries(
            st.text(min_size=1, max_size=8),
            st.one_of(st.integers(), st.text(max_size=8), st.booleans()),
            max_size=6,
        )
    )
    def test_key_is_a_function_of_content_not_order(self, payload):
        reordered = dict(reversed(list(payload.items())))
        assert request_key(payload) == request_key(reordered)
        # and distinct from any strict superset
        assert request_key(payload) != request_key({**payload, "\x00extra": 1})


class TestFixtureStore:
    def test_exact_fixture_beats_default(self, tmp_path):
        store = FixtureStore(tmp_path)
        store.save("genmesh", {"prompt": "a"}, {"mesh_text": "exact"})
        store.save("genmesh", None, {"mesh_text": "default"})
        assert store.lookup("genmesh", {"prompt": "a"}) == {"mesh_text": "exact"}
        assert store.lookup("genmesh", {"prompt": "b"}) == {"mesh_text": "default"}

    def test_miss_without_default_returns_none(self, tmp_path):
        store = FixtureStore(tmp_path)
        assert store.lookup("act", {"observation": {}}) is None

    def test_unknown_endpoint_rejected(self, tmp_path):
        store = FixtureStore(tmp_path)
        with pytest.raises(ValueError, match="endpoint"):
            store.lookup("translate", {})
        with pytest.raises(ValueError, match="endpoint"):
            store.save("translate", None, {})

    def test_missing_root_rejected(self, tmp_path):
        with pytest.raises(ValueError, match="does not exist"):
            FixtureStore(tmp_path / "absent")

    def test_saved_fixture_is_pretty_printed_json(self, tmp_path):
        store = FixtureStore(tmp_path)
        path = store.save("act", None, {"action": [0.0] * 7})
        assert json.loads(path.read_text()) == {"action": [0.0] * 7}
        assert path.read_text().endswith("\n")
