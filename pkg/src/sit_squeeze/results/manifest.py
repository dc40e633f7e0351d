"""Run manifest: config echo plus run bookkeeping, in the config file's own INI dialect."""
from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path

from .. import __version__
from ..config import SECTIONS, RunConfig, parse_config_text
from ..physics.limitations import model_limitations
from .paths import MANIFEST
from .writer import sha256_file, write_text_atomic

RUN_SECTIONS = ("run", "model", "limitations", "checksums")


@dataclass
class RunManifest:
    config: RunConfig
    run: dict[str, str] = field(default_factory=dict)
    model: dict[str, str] = field(default_factory=dict)
    limitations: dict[str, str] = field(default_factory=dict)
    checksums: dict[str, str] = field(default_factory=dict)


def _section(name: str, values: dict) -> str:
    lines = [f"[{name}]"]
    for key, value in values.items():
        text = f"{value:.8e}" if isinstance(value, float) else str(value)
        lines.append(f"{key} = {text}")
    return "\n".join(lines) + "\n"


def write_manifest(directory: Path, config: RunConfig, *, run: dict, model: dict,
                   outputs: list[Path]) -> Path:
    """Echo the config and list every output with its sha256; written last, atomically."""
    limits = model_limitations()
    limitations = {"disclaimer": limits["disclaimer"]}
    limitations.update({f"item_{i}": text for i, text in enumerate(limits["limitations"], 1)})
    parts = [
        config.to_ini(),
        _section("run", {"version": __version__, **run}),
        _section("model", model),
        _section("limitations", limitations),
        _section("checksums", {p.name: sha256_file(p) for p in outputs}),
    ]
    return write_text_atomic(Path(directory) / MANIFEST, "\n".join(parts))


def read_manifest(path: str | Path) -> RunManifest:
    """Parse a manifest back; the config echo goes through the regular config parser."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    parser.read_string(text, source=str(path))
    config_text = "\n".join(
        f"[{name}]\n" + "\n".join(f"{k} = {v}" for k, v in parser[name].items())
        for name in SECTIONS if parser.has_section(name))
    extra = {name: dict(parser[name]) if parser.has_section(name) else {}
             for name in RUN_SECTIONS}
    return RunManifest(config=parse_config_text(config_text, str(path)), **extra)
