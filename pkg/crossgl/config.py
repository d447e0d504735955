"""Runtime settings.

All knobs come from the environment; nothing is read from files.

  CROSSGL_LOG_LEVEL   root level for the crossgl.* loggers (default: warning)
  CROSSGL_DEBUG=1     include exception details in service errors, tracebacks in the CLI
  CROSSGL_HOST/PORT   translation service bind address (default: 127.0.0.1:8080)
  CROSSGL_WORKERS     conformance cell parallelism (default: 1, sequential)
  NO_COLOR            disable ANSI colour in conformance tables
"""

from __future__ import annotations

import logging
import os

from pydantic import BaseModel, ConfigDict, Field


def truthy(value: str | None) -> bool:
    v = (value or "").strip().lower()
    return v in {"1", "true", "yes", "y", "on"}


def debug_enabled() -> bool:
    return truthy(os.getenv("CROSSGL_DEBUG"))


class Settings(BaseModel):
    model_config = ConfigDict(frozen=True)

    log_level: str = "warning"
    debug: bool = False
    color: bool = True
    host: str = "127.0.0.1"
    port: int = Field(default=8080, ge=1, le=65535)
    workers: int = Field(default=1, ge=1)


def load_settings() -> Settings:
    """Build Settings from the current environment.

    Malformed numeric values fall back to defaults rather than failing the CLI.
    """

    def _int(name: str, default: int) -> int:
        raw = (os.getenv(name) or "").strip()
        try:
            return int(raw) if raw else default
        except ValueError:
            logging.getLogger("crossgl.config").warning("ignoring non-integer %s=%r", name, raw)
            return default

    return Settings(
        log_level=(os.getenv("CROSSGL_LOG_LEVEL") or "warning").strip().lower(),
        debug=debug_enabled(),
        color="NO_COLOR" not in os.environ,
        host=os.getenv("CROSSGL_HOST", "127.0.0.1"),
        port=_int("CROSSGL_PORT", 8080),
        workers=max(1, _int("CROSSGL_WORKERS", 1)),
    )


def configure_logging(settings: Settings) -> None:
    level = getattr(logging, settings.log_level.upper(), logging.WARNING)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    logging.getLogger("crossgl").setLevel(level)
