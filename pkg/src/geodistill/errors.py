"""Shared exception hierarchy.

Module-specific failures subclass GeodistillError so callers can catch one
base type at stage boundaries; anything else escaping a stage is a bug.
"""


class GeodistillError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(GeodistillError):
    """Project configuration is missing, unreadable, or inconsistent."""


class MissingArtifact(GeodistillError):
    """A required input artifact for a stage does not exist yet."""

    def __init__(self, filename: str):
        self.filename = filename
        super().__init__(f"missing required artifact: {filename}")
