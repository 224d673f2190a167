"""Test configuration and fixtures.

This file provides fixtures for the test suite, including:
- Environment variable reset to ensure clean test state
- Package logger reset, since the CLI installs its own handler
- A seeded random stream and a click test runner
"""

import logging
import os

import numpy as np
import pytest
from click.testing import CliRunner

from bell_gamma_toolkit.logging_utils import PACKAGE_LOGGER


@pytest.fixture(autouse=True)
def reset_env(monkeypatch: pytest.MonkeyPatch) -> None:
    """Reset environment variables for each test."""
    for name in list(os.environ):
        if name.upper().startswith("BELL_GAMMA_"):
            monkeypatch.delenv(name, raising=False)
    # Keep a developer's .env out of the settings under test
    monkeypatch.chdir(os.path.dirname(__file__))


@pytest.fixture(autouse=True)
def reset_package_logger():
    """Undo handlers and propagation changes made by setup_logging."""
    pkg_logger = logging.getLogger(PACKAGE_LOGGER)
    yield
    pkg_logger.handlers.clear()
    pkg_logger.setLevel(logging.NOTSET)
    pkg_logger.propagate = True


@pytest.fixture
def rng() -> np.random.Generator:
    """A seeded Philox stream."""
    return np.random.Generator(np.random.Philox(20240601))


@pytest.fixture
def runner() -> CliRunner:
    """Click test runner; stdout and stderr are captured separately."""
    return CliRunner()
