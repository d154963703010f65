"""Shared fixtures: validation corpora and an isolated settings directory."""

import logging
from typing import List

import numpy as np
import pytest

from weighted_chi2.config import reset_config
from weighted_chi2.model import WeightedSumSpec
from weighted_chi2.partial_fractions import min_separation

CORPUS_SEED = 20240611


def build_corpus(count: int, seed: int = CORPUS_SEED, common_dof: bool = False,
                 max_terms: int = 4, max_dof: int = 20) -> List[WeightedSumSpec]:
    """
    Random specs with 2..max_terms terms, even dof in [2, max_dof], weights
    in +-[0.2, 5] and every pair of weights at least 5% apart in ratio.
    """
    rng = np.random.default_rng(seed)
    specs = []
    while len(specs) < count:
        k = int(rng.integers(2, max_terms + 1))
        weights = rng.choice([-1.0, 1.0], size=k) * rng.uniform(0.2, 5.0, size=k)
        if min_separation(list(weights)) < 0.05:
            continue
        if common_dof:
            dofs = int(2 * rng.integers(1, max_dof // 2 + 1))
        else:
            dofs = [int(2 * n) for n in rng.integers(1, max_dof // 2 + 1, size=k)]
        specs.append(WeightedSumSpec.from_pairs([float(w) for w in weights], dofs))
    return specs


@pytest.fixture(scope="session")
def corpus() -> List[WeightedSumSpec]:
    """The full 200-spec validation corpus."""
    return build_corpus(200)


@pytest.fixture(scope="session")
def small_corpus(corpus) -> List[WeightedSumSpec]:
    return corpus[:25]


@pytest.fixture(scope="session")
def common_dof_corpus() -> List[WeightedSumSpec]:
    """Two- and three-term specs sharing one dof, for the closed forms."""
    return build_corpus(60, seed=CORPUS_SEED + 1, common_dof=True, max_terms=3)


@pytest.fixture(autouse=True)
def isolated_settings(tmp_path, monkeypatch):
    """Point every platform's settings directory at a temporary folder."""
    monkeypatch.setenv("XDG_CONFIG_HOME", str(tmp_path / "xdg"))
    monkeypatch.setenv("APPDATA", str(tmp_path / "appdata"))
    monkeypatch.setenv("HOME", str(tmp_path / "home"))
    reset_config()
    yield
    reset_config()


@pytest.fixture(autouse=True)
def reset_package_logging():
    """Drop handlers the CLI attaches so they never outlive a captured stream."""
    yield
    package_logger = logging.getLogger("weighted_chi2")
    for handler in list(package_logger.handlers):
        package_logger.removeHandler(handler)
        handler.close()
    package_logger.setLevel(logging.NOTSET)
