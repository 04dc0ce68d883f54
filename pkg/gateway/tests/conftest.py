"""Gateway test harness: real uvicorn servers on ephemeral ports.

Contract tests exercise the actual HTTP stack (server thread + wire
clients over sockets), not an in-process test client, so what passes here
is what a deployed stub would do.
"""

from __future__ import annotations

import socket
import threading
import time

import pytest
import uvicorn

from model_gateway import GatewayConfig, create_app


def free_port() -> int:
    with socket.socket() as sock:
        sock.bind(("127.0.0.1", 0))
        return sock.getsockname()[1]


class GatewayServer:
    """uvicorn in a daemon thread, ready when .start() returns."""

    def __init__(self, config: GatewayConfig):
        self.url = f"http://{config.host}:{config.port}"
        self._server = uvicorn.Server(
            uvicorn.Config(create_app(config), host=config.host, port=config.port,
                           log_level="warning")
        )
        self._thread = threading.Thread(target=self._server.run, daemon=True)

    def start(self, timeout_s: float = 10.0) -> "GatewayServer":
        self._thread.start()
        deadline = time.monotonic() + timeout_s
        while not self._server.started:
            if time.monotonic() > deadline:
                raise RuntimeError("gateway server did not start in time")
            time.sleep(0.01)
        return self

    def stop(self) -> None:
        self._server.should_exit = True
        self._thread.join(timeout=10.0)


@pytest.fixture(scope="session")
def stub_url():
    """One packaged-fixture stub server shared by the whole session."""
    server = GatewayServer(GatewayConfig(port=free_port())).start()
    yield server.url
    server.stop()


@pytest.fixture
def gateway_factory():
    """Start extra servers with config overrides; all stopped at teardown.

    Ports are assigned automatically unless the caller pins one.
    """
    servers: list[GatewayServer] = []

    def start(**config_kwargs) -> str:
        config_kwargs.setdefault("port", free_port())
        server = GatewayServer(GatewayConfig(**config_kwargs)).start()
        servers.append(server)
        return server.url

    yield start
    for server in servers:
        server.stop()
