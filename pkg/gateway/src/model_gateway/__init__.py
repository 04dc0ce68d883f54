"""HTTP gateway for the toolforge wire protocol.

Stub mode serves recorded fixtures (deterministic, no models); live mode
forwards to configured model backends and normalizes their output. The
request/response schemas are the ones packaged with toolforge, so client
and server can never drift apart.
"""

from .config import GatewayConfig, packaged_fixture_dir
from .app import create_app
from .fixtures import FixtureStore, request_key
from .rlds import RldsContainer, convert_dataset, read_dataset

__all__ = [
    "GatewayConfig",
    "packaged_fixture_dir",
    "create_app",
    "FixtureStore",
    "request_key",
    "RldsContainer",
    "convert_dataset",
    "read_dataset",
]
