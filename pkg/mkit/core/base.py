#!/usr/bin/env python3
"""
Base Pipeline Stage Class

Common plumbing for the multi-stage engine pipelines (pair normalization,
classification, flux checks): a per-class logger, stage timing and the
stage tag attached to precondition failures.
"""

import logging
import time
from typing import Any, Callable

from .errors import PreconditionError

# Logging setup is handled by config.py when the application starts


class PipelineStage:
    """Base class for engine pipelines that run as a sequence of tagged stages."""

    def __init__(self, name: str = None):
        self.name = name or self.__class__.__name__
        self.logger = logging.getLogger(self.__class__.__name__)
        if self.logger.level == logging.NOTSET:
            self.logger.setLevel(logging.INFO)

    def log(self, level: str, message: str) -> None:
        """Unified logging method."""
        getattr(self.logger, level.lower())(message)

    def _log_stage_success(self, stage: str, duration: float) -> None:
        self.log('info', f"{self.name} | {stage} | Duration: {duration:.2f}s")

    def run_stage(self, stage: str, fn: Callable[..., Any], *args, **kwargs) -> Any:
        """Run one stage, tagging precondition failures with the stage name."""
        start = time.time()
        try:
            result = fn(*args, **kwargs)
        except PreconditionError as e:
            self.log('error', f"{self.name} | {stage} | {e.condition}")
            raise e.with_stage(stage) from e
        self._log_stage_success(stage, time.time() - start)
        return result
