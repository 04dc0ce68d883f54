"""Run the gateway under uvicorn.

Stub mode needs no flags: `model-gateway` serves the packaged fixtures on
127.0.0.1:8080. Live mode requires all three model identifiers.
"""

from __future__ import annotations

import argparse

import uvicorn

from .app import create_app
from .config import GatewayConfig


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--mode", choices=("stub", "live"), default="stub")
    parser.add_argument("--fixture-dir", default=None, help="stub mode fixture root")
    parser.add_argument("--interpret-model", default=None)
    parser.add_argument("--genmesh-model", default=None)
    parser.add_argument("--act-model", default=None)
    parser.add_argument("--device", default="cpu")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8080)
    args = parser.parse_args(argv)

    try:
        config = GatewayConfig(
            mode=args.mode,
            fixture_dir=args.fixture_dir,
            interpret_model=args.interpret_model,
            genmesh_model=args.genmesh_model,
            act_model=args.act_model,
            device=args.device,
            host=args.host,
            port=args.port,
        )
        app = create_app(config)
    except ValueError as exc:
        parser.error(str(exc))
    uvicorn.run(app, host=config.host, port=config.port, log_level="warning")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
