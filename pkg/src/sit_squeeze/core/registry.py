"""Name-based registry of scan kinds: get_runner('detuning')(config, threads=4)."""
from __future__ import annotations

from collections.abc import Callable
from typing import Any

ScanRunner = Callable[..., Any]
_REGISTRY: dict[str, ScanRunner] = {}


def register(kind: str, runner: ScanRunner) -> None:
    _REGISTRY[kind] = runner


def get_runner(kind: str) -> ScanRunner:
    if kind not in _REGISTRY:
        raise ValueError(f"Unknown scan kind '{kind}'. Known: {sorted(_REGISTRY)}")
    return _REGISTRY[kind]


def list_kinds() -> list[str]:
    return sorted(_REGISTRY)
