from __future__ import annotations

import logging

import pytest
from pydantic import ValidationError

from crossgl.config import Settings, configure_logging, debug_enabled, load_settings, truthy


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for name in ("CROSSGL_LOG_LEVEL", "CROSSGL_DEBUG", "CROSSGL_HOST", "CROSSGL_PORT", "CROSSGL_WORKERS", "NO_COLOR"):
        monkeypatch.delenv(name, raising=False)


@pytest.mark.parametrize(("raw", "expected"), [("1", True), ("Yes", True), (" on ", True), ("0", False), ("", False), (None, False)])
def test_truthy(raw, expected):
    assert truthy(raw) is expected


def test_defaults():
    s = load_settings()
    assert s == Settings()
    assert s.log_level == "warning"
    assert s.port == 8080
    assert s.workers == 1
    assert s.color is True


def test_environment_overrides(monkeypatch):
    monkeypatch.setenv("CROSSGL_LOG_LEVEL", " DEBUG ")
    monkeypatch.setenv("CROSSGL_DEBUG", "true")
    monkeypatch.setenv("CROSSGL_PORT", "9000")
    monkeypatch.setenv("CROSSGL_WORKERS", "4")
    monkeypatch.setenv("NO_COLOR", "")
    s = load_settings()
    assert s.log_level == "debug"
    assert s.debug is True
    assert debug_enabled()
    assert s.port == 9000
    assert s.workers == 4
    assert s.color is False


def test_malformed_numbers_fall_back(monkeypatch, caplog):
    monkeypatch.setenv("CROSSGL_PORT", "eighty")
    monkeypatch.setenv("CROSSGL_WORKERS", "-3")
    with caplog.at_level(logging.WARNING, logger="crossgl.config"):
        s = load_settings()
    assert s.port == 8080
    assert s.workers == 1
    assert "CROSSGL_PORT" in caplog.text


def test_settings_are_validated_and_frozen():
    with pytest.raises(ValidationError):
        Settings(port=0)
    s = Settings()
    with pytest.raises(ValidationError):
        s.port = 1234


def test_configure_logging_sets_package_level():
    configure_logging(Settings(log_level="info"))
    assert logging.getLogger("crossgl").level == logging.INFO
    configure_logging(Settings(log_level="nonsense"))
    assert logging.getLogger("crossgl").level == logging.WARNING
