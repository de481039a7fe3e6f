#!/usr/bin/env python3
"""
Engine error hierarchy.

Each class carries the process exit code the command line reports for it:
2 malformed input, 3 precondition or genericity failure, 4 verification
failure.
"""

from typing import Optional


class MkitError(Exception):
    """Base class for all engine errors."""

    exit_code = 1


class MalformedInputError(MkitError, ValueError):
    """Input that cannot be parsed into engine objects."""

    exit_code = 2


class PreconditionError(MkitError, ValueError):
    """A mathematical precondition or genericity condition does not hold."""

    exit_code = 3

    def __init__(self, condition: str, stage: Optional[str] = None):
        self.condition = condition
        self.stage = stage
        super().__init__(self._render())

    def _render(self) -> str:
        if self.stage:
            return f"[{self.stage}] {self.condition}"
        return self.condition

    def with_stage(self, stage: str) -> "PreconditionError":
        """Return a copy tagged with the pipeline stage that raised it."""
        if self.stage:
            return self
        return PreconditionError(self.condition, stage)


class VerificationError(MkitError, RuntimeError):
    """A certificate, pullback identity or numeric residual failed to check."""

    exit_code = 4
