"""Bundled sequence specs and witness files used by the tests and examples."""

from __future__ import annotations

from pathlib import Path

_HERE = Path(__file__).parent


def path(name: str) -> Path:
    """Absolute path of a bundled file; ``name`` may omit the ``.json`` suffix."""
    p = _HERE / (name if name.endswith(".json") else f"{name}.json")
    if not p.is_file():
        raise FileNotFoundError(f"no bundled fixture {name!r}")
    return p


def spec_names() -> list[str]:
    """Sequence specs in sorted order (witness-only files excluded)."""
    return sorted(p.stem for p in _HERE.glob("*.json") if not p.stem.endswith("_witness"))
