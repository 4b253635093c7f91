"""
Shared fixtures for the Record Lab test suite.
"""

import os

import pytest

from src.models import make_bernoulli_walk, make_lattice
from src.utils import ConfigManager, use_settings

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


@pytest.fixture(autouse=True)
def default_settings(monkeypatch):
    """Every test starts from the repository config and a single worker."""
    monkeypatch.delenv("RECORD_LAB_WORKERS", raising=False)
    manager = ConfigManager(os.path.join(ROOT, "config", "config.yaml"))
    use_settings(manager)
    yield manager


@pytest.fixture
def simple_walk():
    return make_bernoulli_walk(0.5)


@pytest.fixture
def down_walk():
    return make_bernoulli_walk(1.0 / 3.0)


@pytest.fixture
def up_walk():
    return make_bernoulli_walk(2.0 / 3.0)


@pytest.fixture
def three_point():
    return make_lattice({-1: 0.4, 0: 0.2, 2: 0.4}, name="three_point")
