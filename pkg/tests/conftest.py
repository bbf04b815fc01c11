"""Shared fixtures."""

import pytest
import tistar.core.config as config_module
from tistar.utils.parallel import configure_workers


@pytest.fixture(autouse=True)
def isolated_config(tmp_path, monkeypatch):
    """Point the config directory at a temporary location and drop cached config."""
    monkeypatch.setenv("XDG_CONFIG_HOME", str(tmp_path / "xdg"))
    monkeypatch.setattr(config_module, "_config_manager", None)
    monkeypatch.setattr(config_module, "_config", None)
    yield tmp_path / "xdg" / "tistar"
    configure_workers(1)
