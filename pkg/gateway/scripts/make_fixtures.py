#!/usr/bin/env python3
"""Regenerate the packaged stub fixtures from the mock backends.

Writes src/model_gateway/fixtures_data/: per-endpoint exact fixtures for the
reference requests plus default.json fallbacks. Rerun after changing the
mocks; the files are committed so the stub answers never drift silently.
"""

from __future__ import annotations

import argparse
from pathlib import Path

from toolforge.mesh import TriangleMesh, serialize_mesh
from toolforge.meshgen import MockMeshGenerator
from toolforge.scene import MockInterpreter, load_scene, snapshot_to_dict

from model_gateway.fixtures import FixtureStore

REPO_ROOT = Path(__file__).resolve().parents[2]
CAKE_SCENE = REPO_ROOT / "tests" / "fixtures" / "scenes" / "cake.json"
KNIFE_PROMPT = "Create a 3D model of a knife"

# default genmesh answer: a minimal valid solid, obviously not a real tool
FALLBACK_MESH = TriangleMesh(
    vertices=((0.0, 0.0, 0.0), (10.0, 0.0, 0.0), (0.0, 10.0, 0.0), (0.0, 0.0, 10.0)),
    faces=((0, 2, 1), (0, 1, 3), (0, 3, 2), (1, 2, 3)),
)


def interpret_response_doc(snapshot) -> dict:
    analysis = MockInterpreter().interpret(snapshot)
    return {
        "description": analysis.description,
        "target": {"name": analysis.target.name, "size_mm": analysis.target.approx_size_mm},
        "tool_name": analysis.tool_name,
        "tool_prompt": analysis.tool_prompt,
    }


def write_fixtures(root: Path) -> list[Path]:
    root.mkdir(parents=True, exist_ok=True)
    store = FixtureStore(root)
    snapshot = load_scene(str(CAKE_SCENE))
    cake_doc = interpret_response_doc(snapshot)
    mesh_text = MockMeshGenerator().generate(KNIFE_PROMPT)
    written = [
        store.save("interpret", {"scene": snapshot_to_dict(snapshot)}, cake_doc),
        store.save("interpret", None, cake_doc),
        store.save("genmesh", {"prompt": KNIFE_PROMPT}, {"mesh_text": mesh_text}),
        store.save("genmesh", None, {"mesh_text": serialize_mesh(FALLBACK_MESH)}),
        store.save("act", None, {"action": [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]}),
    ]
    return written


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--out",
        type=Path,
        default=Path(__file__).resolve().parents[1] / "src" / "model_gateway" / "fixtures_data",
        help="fixture tree to (re)write",
    )
    args = parser.parse_args()
    for path in write_fixtures(args.out):
        print(path)


if __name__ == "__main__":
    main()
