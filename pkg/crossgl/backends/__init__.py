"""Registry of code generators, one per target language."""

from __future__ import annotations

import logging
import threading
from enum import Enum
from typing import Iterator

from ..errors import DuplicateBackend, UnknownTarget
from ..ir import ShaderModule, TypeExpr
from .base import Backend, FeatureSupport, OutputUnit, Support

logger = logging.getLogger("crossgl.backends")


class TargetLanguage(str, Enum):
    CROSSGL = "crossgl"
    GLSL = "glsl"
    HLSL = "hlsl"
    METAL = "metal"
    CUDA = "cuda"
    RUST = "rust"


class BackendRegistry:
    """Target name -> backend, enumerated in registration order."""

    def __init__(self) -> None:
        self._backends: dict[str, Backend] = {}
        self._frozen = False

    def register(self, target: str | TargetLanguage, backend: Backend) -> "BackendRegistry":
        key = _key(target)
        if self._frozen:
            raise RuntimeError("backend registry is frozen")
        if key in self._backends:
            raise DuplicateBackend(key)
        self._backends[key] = backend
        logger.debug("registered backend %s", key)
        return self

    def freeze(self) -> None:
        self._frozen = True

    @property
    def frozen(self) -> bool:
        return self._frozen

    def get(self, target: str | TargetLanguage) -> Backend:
        key = _key(target)
        try:
            return self._backends[key]
        except KeyError:
            raise UnknownTarget(key, self.targets()) from None

    def targets(self) -> list[str]:
        return list(self._backends)

    def __contains__(self, target: object) -> bool:
        return isinstance(target, (str, TargetLanguage)) and _key(target) in self._backends

    def __iter__(self) -> Iterator[Backend]:
        return iter(list(self._backends.values()))

    def __len__(self) -> int:
        return len(self._backends)


def _key(target: str | TargetLanguage) -> str:
    return target.value if isinstance(target, TargetLanguage) else str(target).lower()


def default_registry() -> BackendRegistry:
    """A fresh registry holding the six built-in generators."""

    from .crossgl import CrossGLBackend
    from .cuda import CudaBackend
    from .glsl import GLSLBackend
    from .hlsl import HLSLBackend
    from .metal import MetalBackend
    from .rust import RustBackend

    registry = BackendRegistry()
    for target, backend in (
        (TargetLanguage.CROSSGL, CrossGLBackend()),
        (TargetLanguage.GLSL, GLSLBackend()),
        (TargetLanguage.HLSL, HLSLBackend()),
        (TargetLanguage.METAL, MetalBackend()),
        (TargetLanguage.CUDA, CudaBackend()),
        (TargetLanguage.RUST, RustBackend()),
    ):
        registry.register(target, backend)
    return registry


_registry: BackendRegistry | None = None
_registry_lock = threading.Lock()


def get_registry() -> BackendRegistry:
    """Process-wide registry, built and frozen on first use.

    Extra targets go into a registry from default_registry() that is passed
    explicitly (CLI main, create_app, run_conformance).
    """

    global _registry
    with _registry_lock:
        if _registry is None:
            registry = default_registry()
            registry.freeze()
            _registry = registry
    return _registry


def _resolve(registry: BackendRegistry | None) -> BackendRegistry:
    return registry if registry is not None else get_registry()


def register_backend(
    target: str | TargetLanguage, backend: Backend, registry: BackendRegistry | None = None
) -> BackendRegistry:
    return _resolve(registry).register(target, backend)


def generate(
    module: ShaderModule,
    target: str | TargetLanguage,
    registry: BackendRegistry | None = None,
    *,
    stem: str | None = None,
) -> list[OutputUnit]:
    backend = _resolve(registry).get(target)
    units = backend.generate(module, stem=stem)
    logger.debug("generated %d unit(s) of %s for %s", len(units), backend.name, module.name)
    return units


def map_type(t: TypeExpr, target: str | TargetLanguage, registry: BackendRegistry | None = None) -> str:
    return _resolve(registry).get(target).map_type(t)


__all__ = [
    "Backend",
    "BackendRegistry",
    "FeatureSupport",
    "OutputUnit",
    "Support",
    "TargetLanguage",
    "default_registry",
    "generate",
    "get_registry",
    "map_type",
    "register_backend",
]
