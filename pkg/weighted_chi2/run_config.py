"""
Run Preset Configuration Module

Provides loading, validation and management of YAML run presets: the
weight pairs and grid of the figure command and the tolerances of the
verification command.
"""

import logging
import os
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import yaml

from .errors import SpecError

logger = logging.getLogger(__name__)

PRESETS_DIR = os.path.join(os.path.dirname(__file__), "presets")


@dataclass
class FigureConfig:
    """cdf curves for pairs of weights sharing one dof."""
    dof: int = 50
    pairs: List[Tuple[float, float]] = field(
        default_factory=lambda: [(1.0, 0.5), (2.0, 1.0), (1.0, -0.5), (2.0, -1.0)]
    )
    points: int = 201
    span_sigmas: float = 6.0


@dataclass
class VerifyConfig:
    """Oracle comparison settings; None means 'use the persisted setting'."""
    quantile_levels: List[float] = field(
        default_factory=lambda: [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]
    )
    mc_sigmas: float = 4.0
    cf_slack: float = 1e-6
    samples: Optional[int] = None
    seed: Optional[int] = None
    abs_tol: Optional[float] = None


@dataclass
class RunPreset:
    """Complete run preset."""
    name: str = "default"
    version: str = "1.0"
    figure: FigureConfig = field(default_factory=FigureConfig)
    verify: VerifyConfig = field(default_factory=VerifyConfig)

    @classmethod
    def from_yaml(cls, path: str) -> "RunPreset":
        """Load a preset from a YAML file."""
        with open(path, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f)
        return cls.from_dict(data)

    @classmethod
    def from_dict(cls, data: dict) -> "RunPreset":
        """Create a preset from a dictionary; missing keys keep their defaults."""
        preset = cls()

        if data is None:
            return preset
        if not isinstance(data, dict):
            raise SpecError("a preset must be a mapping")

        preset.name = data.get("name", preset.name)
        preset.version = str(data.get("version", preset.version))

        # Parse figure config
        if "figure" in data:
            fig_data = data["figure"] or {}
            pairs = fig_data.get("pairs", preset.figure.pairs)
            try:
                pairs = [(float(p[0]), float(p[1])) for p in pairs]
            except (TypeError, ValueError, IndexError) as e:
                raise SpecError(f"figure pairs must be [lambda1, lambda2] lists: {e}") from e
            preset.figure = FigureConfig(
                dof=int(fig_data.get("dof", preset.figure.dof)),
                pairs=pairs,
                points=int(fig_data.get("points", preset.figure.points)),
                span_sigmas=float(fig_data.get("span_sigmas", preset.figure.span_sigmas)),
            )

        # Parse verify config
        if "verify" in data:
            ver_data = data["verify"] or {}
            preset.verify = VerifyConfig(
                quantile_levels=[float(q) for q in ver_data.get("quantile_levels", preset.verify.quantile_levels)],
                mc_sigmas=float(ver_data.get("mc_sigmas", preset.verify.mc_sigmas)),
                cf_slack=float(ver_data.get("cf_slack", preset.verify.cf_slack)),
                samples=ver_data.get("samples", preset.verify.samples),
                seed=ver_data.get("seed", preset.verify.seed),
                abs_tol=ver_data.get("abs_tol", preset.verify.abs_tol),
            )

        preset.validate()
        return preset

    def validate(self) -> None:
        if self.figure.dof < 2 or self.figure.dof % 2:
            raise SpecError(f"figure dof must be a positive even integer, got {self.figure.dof}")
        if self.figure.points < 2:
            raise SpecError(f"figure needs at least 2 points, got {self.figure.points}")
        if not self.figure.span_sigmas > 0:
            raise SpecError("figure span_sigmas must be positive")
        if not all(0.0 < q < 1.0 for q in self.verify.quantile_levels):
            raise SpecError("verify quantile levels must lie in (0, 1)")

    def to_dict(self) -> dict:
        """Convert the preset to a dictionary."""
        return {
            "name": self.name,
            "version": self.version,
            "figure": {
                "dof": self.figure.dof,
                "pairs": [list(p) for p in self.figure.pairs],
                "points": self.figure.points,
                "span_sigmas": self.figure.span_sigmas,
            },
            "verify": {
                "quantile_levels": list(self.verify.quantile_levels),
                "mc_sigmas": self.verify.mc_sigmas,
                "cf_slack": self.verify.cf_slack,
                "samples": self.verify.samples,
                "seed": self.verify.seed,
                "abs_tol": self.verify.abs_tol,
            },
        }

    def to_yaml(self, path: str) -> None:
        """Save the preset to a YAML file."""
        with open(path, "w", encoding="utf-8") as f:
            yaml.dump(self.to_dict(), f, default_flow_style=False, sort_keys=False)


def get_preset_path(preset_name: str) -> Optional[str]:
    """Get the path to a built-in preset by name."""
    preset_path = os.path.join(PRESETS_DIR, f"{preset_name}.yaml")

    if os.path.exists(preset_path):
        return preset_path
    return None


def load_preset(preset_name_or_path: str) -> RunPreset:
    """
    Load a preset by name or path.

    Args:
        preset_name_or_path: Either a built-in preset name (e.g. 'quick')
                             or a path to a YAML file.

    Returns:
        RunPreset instance.
    """
    # Check if it's a file path
    if os.path.exists(preset_name_or_path):
        return RunPreset.from_yaml(preset_name_or_path)

    # Check if it's a built-in preset
    preset_path = get_preset_path(preset_name_or_path)
    if preset_path:
        return RunPreset.from_yaml(preset_path)

    logger.warning("preset '%s' not found; using the default preset", preset_name_or_path)
    return RunPreset()
