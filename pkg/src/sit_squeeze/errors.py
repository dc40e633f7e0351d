"""Exception hierarchy shared by the library and the CLI.

Each class carries the process exit code the CLI uses for it, so the mapping
lives next to the error rather than in a lookup table.
"""
from __future__ import annotations


class SitSqueezeError(Exception):
    exit_code = 1


class ConfigError(SitSqueezeError, ValueError):
    """Invalid run configuration. ``line`` is the 1-based line in the source file."""

    exit_code = 1

    def __init__(self, message: str, *, key: str | None = None, line: int | None = None,
                 source: str | None = None) -> None:
        super().__init__(message)
        self.message = message
        self.key = key
        self.line = line
        self.source = source

    def __str__(self) -> str:
        where = self.source or ""
        if self.line is not None:
            where = f"{where}:{self.line}" if where else f"line {self.line}"
        return f"{where}: {self.message}" if where else self.message


class DataFileError(ConfigError):
    """Malformed or missing isotope / transition data."""


class DivergenceError(SitSqueezeError, RuntimeError):
    exit_code = 2

    def __init__(self, message: str, *, requested: int = 0, discarded: int = 0) -> None:
        super().__init__(message)
        self.requested = requested
        self.discarded = discarded

    @property
    def fraction(self) -> float:
        return self.discarded / self.requested if self.requested else 0.0

    def report(self) -> dict[str, float]:
        return {"requested": self.requested, "discarded": self.discarded,
                "fraction": self.fraction}


class CalibrationError(SitSqueezeError, RuntimeError):
    exit_code = 2

    def __init__(self, message: str, *, diagnostics: dict | None = None) -> None:
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class PlotInputError(SitSqueezeError, ValueError):
    exit_code = 4
