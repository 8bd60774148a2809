"""Rewrite the golden artifacts from the bundled configs: ``python tests/golden/regenerate.py``."""

import json
from pathlib import Path

from modlab.cli import main

ROOT = Path(__file__).resolve().parents[2]
HERE = Path(__file__).resolve().parent


def artifact_name(config):
    fmt = json.loads(config.read_text()).get("output", {}).get("format", "json")
    return f"{config.stem}.{fmt}"


if __name__ == "__main__":
    for config in sorted((ROOT / "configs").glob("*.json")):
        kind = json.loads(config.read_text())["kind"]
        status = main([kind, "--config", str(config), "--out", str(HERE / artifact_name(config))])
        if status != 0:
            raise SystemExit(f"{config.name} exited with {status}")
