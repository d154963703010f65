"""
Cross-platform settings management for weighted_chi2.
Stores user defaults for the CLI in platform-appropriate locations.
"""

import json
import logging
import os
import sys
from pathlib import Path
from typing import Any, Dict, Optional

logger = logging.getLogger(__name__)


def get_config_dir() -> Path:
    """Get platform-appropriate config directory."""
    if sys.platform == "win32":
        # Windows: %APPDATA%/WeightedChi2
        base = os.environ.get("APPDATA", os.path.expanduser("~"))
        config_dir = Path(base) / "WeightedChi2"
    elif sys.platform == "darwin":
        # macOS: ~/Library/Application Support/WeightedChi2
        config_dir = Path.home() / "Library" / "Application Support" / "WeightedChi2"
    else:
        # Linux/Unix: ~/.config/weighted-chi2
        xdg_config = os.environ.get("XDG_CONFIG_HOME", os.path.expanduser("~/.config"))
        config_dir = Path(xdg_config) / "weighted-chi2"

    config_dir.mkdir(parents=True, exist_ok=True)
    return config_dir


class Config:
    """Persisted CLI defaults; command-line flags always win over these."""

    CONFIG_FILE = "config.json"

    DEFAULTS: Dict[str, Any] = {
        "seed": 42,
        "samples": 1_000_000,
        "abs_tol": 1e-8,
        "merge_tol": 1e-9,
        "preset": "default",
    }

    # Setting name -> parser for `config --set key=value`
    PARSERS = {
        "seed": int,
        "samples": int,
        "abs_tol": float,
        "merge_tol": float,
        "preset": str,
    }

    def __init__(self):
        self.config_dir = get_config_dir()
        self.config_path = self.config_dir / self.CONFIG_FILE
        self._config = self._load_config()

    def _load_config(self) -> Dict[str, Any]:
        """Load config from file or return defaults."""
        config = dict(self.DEFAULTS)
        if self.config_path.exists():
            try:
                with open(self.config_path, "r", encoding="utf-8") as f:
                    stored = json.load(f)
                config.update({k: v for k, v in stored.items() if k in self.DEFAULTS})
            except (json.JSONDecodeError, IOError, AttributeError):
                logger.warning("ignoring unreadable settings file %s", self.config_path)
        return config

    def save(self):
        """Save config to file."""
        with open(self.config_path, "w", encoding="utf-8") as f:
            json.dump(self._config, f, indent=2)

    def set(self, key: str, text: str):
        """Parse and store one setting from its text form."""
        if key not in self.PARSERS:
            raise KeyError(f"unknown setting {key!r}; known: {', '.join(self.PARSERS)}")
        try:
            value = self.PARSERS[key](text)
        except ValueError as e:
            raise ValueError(f"bad value for {key}: {text!r}") from e
        self._config[key] = value
        self.save()

    def as_dict(self) -> Dict[str, Any]:
        return dict(self._config)

    @property
    def seed(self) -> int:
        return self._config["seed"]

    @property
    def samples(self) -> int:
        return self._config["samples"]

    @property
    def abs_tol(self) -> float:
        return self._config["abs_tol"]

    @property
    def merge_tol(self) -> float:
        return self._config["merge_tol"]

    @property
    def preset(self) -> str:
        return self._config["preset"]


# Global config instance
_config: Optional[Config] = None


def get_config() -> Config:
    """Get global config instance."""
    global _config
    if _config is None:
        _config = Config()
    return _config


def reset_config():
    """Drop the cached instance so the next get_config() re-reads the file."""
    global _config
    _config = None
