"""Shared fixtures."""

import numpy as np
import pytest

from simplehom.config import load_settings
from simplehom.pantsrep import pants_rep


@pytest.fixture(scope="session")
def rep7():
    """The representation at p = 7 with the default embedding."""
    return pants_rep(7)


@pytest.fixture(scope="session")
def rep5():
    return pants_rep(5)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(autouse=True)
def fresh_settings(monkeypatch, tmp_path):
    """Run every test from an empty directory with uncached settings."""
    monkeypatch.chdir(tmp_path)
    for name in ("SIMPLEHOM_SEARCH__BFS_CAP", "SIMPLEHOM_REPRESENTATION__P", "SIMPLEHOM_OUTPUT__FORMAT"):
        monkeypatch.delenv(name, raising=False)
    load_settings.cache_clear()
    yield
    load_settings.cache_clear()
