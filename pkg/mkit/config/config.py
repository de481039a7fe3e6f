#!/usr/bin/env python3
"""
Engine Configuration Loader

Loads engine defaults (series orders, truncation headroom, quadrature
settings, tolerances) from config.yaml and attaches the central log file.

Usage:
    from mkit.config.config import config
    print(f"Decomposing up to order {config.max_order}")

    # Settings are read-only and managed through config.yaml
"""

import os
import sys
import yaml
import logging
from dataclasses import dataclass


PROJECT_ROOT = os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
LOG_FORMAT = '%(asctime)s - %(levelname)s - %(message)s'


@dataclass
class EngineConfig:
    """Engine settings with simple attribute access."""

    # Series Settings
    max_order: int
    normal_form_order: int
    normalizer_headroom: int
    milnor_cap_quasidegree: int

    # Numeric Oracle Settings
    quadrature_nodes: int
    fd_step: float
    tolerance: float
    condition_limit: float

    # Processing Settings
    parallel_processing: bool

    # Logging
    log_level: str
    logs_dir: str

    def __post_init__(self):
        """Load configuration from file, then attach file logging."""
        self.load_from_yaml()
        self._setup_file_logging()

    def load_from_yaml(self, filename: str = None) -> None:
        """Load configuration from YAML file."""
        try:
            if not filename:
                filename = os.path.join(os.path.dirname(__file__), 'config.yaml')
            if not os.path.exists(filename):
                raise FileNotFoundError(f"Configuration file not found: {filename}")

            with open(filename, 'r') as f:
                yaml_config = yaml.safe_load(f)

            if not yaml_config:
                raise ValueError(f"Configuration file {filename} is empty or invalid")

            required_fields = [
                'max_order', 'normal_form_order', 'normalizer_headroom', 'milnor_cap_quasidegree',
                'quadrature_nodes', 'fd_step', 'tolerance', 'condition_limit',
                'parallel_processing', 'log_level', 'logs_dir'
            ]

            missing_fields = []
            for field in required_fields:
                if field not in yaml_config:
                    missing_fields.append(field)
                elif hasattr(self, field):
                    setattr(self, field, yaml_config[field])

            if missing_fields:
                raise ValueError(f"Missing required configuration fields: {', '.join(missing_fields)}")

            self._validate_config_values()

        except Exception as e:
            error_msg = f"Failed to load configuration from {filename}: {str(e)}"
            logging.error(error_msg)
            raise RuntimeError(error_msg)

    def _validate_config_values(self) -> None:
        """Validate configuration values and log warnings for invalid ones."""
        warnings = []

        for name in ('max_order', 'normal_form_order', 'milnor_cap_quasidegree'):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 1:
                warnings.append(f"Invalid {name}: {value}. Must be a positive integer")

        if not isinstance(self.normalizer_headroom, int) or self.normalizer_headroom < 0:
            warnings.append(f"Invalid normalizer_headroom: {self.normalizer_headroom}. Must be a non-negative integer")

        if not isinstance(self.quadrature_nodes, int) or self.quadrature_nodes < 8:
            warnings.append(f"Invalid quadrature_nodes: {self.quadrature_nodes}. Must be an integer >= 8")

        for name in ('fd_step', 'tolerance', 'condition_limit'):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or value <= 0:
                warnings.append(f"Invalid {name}: {value}. Must be positive")

        if not isinstance(self.parallel_processing, bool):
            warnings.append(f"Invalid parallel_processing: {self.parallel_processing}. Must be boolean")

        if self.log_level not in ('DEBUG', 'INFO', 'WARNING', 'ERROR'):
            warnings.append(f"Invalid log_level: {self.log_level}. Must be DEBUG, INFO, WARNING or ERROR")

        if not isinstance(self.logs_dir, str) or not self.logs_dir:
            warnings.append(f"Invalid logs_dir: {self.logs_dir}. Must be non-empty string")

        for warning in warnings:
            logging.warning(f"Configuration warning: {warning}")

        # orders, node counts and tolerances feed straight into the engine
        critical_errors = [w for w in warnings if 'log_level' not in w and 'parallel' not in w]
        if critical_errors:
            raise ValueError(f"Critical configuration errors: {'; '.join(critical_errors)}")

    def _setup_file_logging(self) -> None:
        """Attach the central file handler once; never crash on failure."""
        try:
            root_logger = logging.getLogger()
            logs_dir = self.logs_path
            os.makedirs(logs_dir, exist_ok=True)

            log_path = os.path.join(logs_dir, 'mkit.log')
            has_our_file = any(
                isinstance(h, logging.FileHandler) and getattr(h, 'baseFilename', None) == log_path
                for h in root_logger.handlers
            )
            if not has_our_file:
                for h in list(root_logger.handlers):
                    if isinstance(h, logging.FileHandler):
                        try:
                            root_logger.removeHandler(h)
                        except Exception:
                            pass
                fh = None
                try:
                    fh = logging.FileHandler(log_path, mode='a')
                except (OSError, PermissionError) as e:
                    print(f"Warning: could not attach file handler {log_path}: {e}", file=sys.stderr)
                if fh is not None:
                    fh.setFormatter(logging.Formatter(LOG_FORMAT))
                    root_logger.addHandler(fh)
            if root_logger.level in (logging.NOTSET, logging.WARNING):
                root_logger.setLevel(getattr(logging, self.log_level, logging.INFO))
        except Exception as e:
            print(f"Warning: logging setup failed: {e}", file=sys.stderr)

    @property
    def logs_path(self) -> str:
        """Absolute log directory; relative settings resolve against the project root."""
        if os.path.isabs(self.logs_dir):
            return self.logs_dir
        return os.path.join(PROJECT_ROOT, self.logs_dir)


def initialize_config() -> EngineConfig:
    """Initialize configuration with proper error handling."""
    global config
    try:
        # Placeholder values are overridden by the YAML file
        config = EngineConfig(
            max_order=0,
            normal_form_order=0,
            normalizer_headroom=0,
            milnor_cap_quasidegree=0,
            quadrature_nodes=0,
            fd_step=0.0,
            tolerance=0.0,
            condition_limit=0.0,
            parallel_processing=False,
            log_level="INFO",
            logs_dir=""
        )
        return config
    except Exception as e:
        logging.error(f"Failed to initialize configuration: {str(e)}")
        raise


config = initialize_config()
