import logging
import tempfile
from pathlib import Path

import numpy as np
import pytest

from config import get_config
from config.models.tolerances import Tolerances


@pytest.fixture
def temp_project_dir():
    """Create a temporary directory for testing."""
    with tempfile.TemporaryDirectory() as temp_dir:
        yield Path(temp_dir)


@pytest.fixture
def tol():
    """Default numerical thresholds."""
    return Tolerances()


@pytest.fixture
def rng():
    """Seeded generator so that every test run draws the same vectors."""
    return np.random.default_rng(20240607)


@pytest.fixture
def clear_config_cache():
    """Drop cached settings before and after the test."""
    get_config.cache_clear()
    yield
    get_config.cache_clear()


@pytest.fixture
def missing_config_yaml(monkeypatch, temp_project_dir):
    """Point the project's config.yaml at a file that does not exist."""
    monkeypatch.setattr("config.helpers.base.PATH_CONFIG_YAML", temp_project_dir / "config.yaml")
    return temp_project_dir / "config.yaml"


@pytest.fixture
def restore_root_logger():
    """Put the root logger's handlers and level back after the test."""
    root = logging.getLogger()
    handlers, level = list(root.handlers), root.level
    yield
    root.handlers[:] = handlers
    root.setLevel(level)
