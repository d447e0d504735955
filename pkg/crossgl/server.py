"""HTTP surface over the translation pipeline.

Routes:
  GET  /healthz
  GET  /api/v1/targets
  POST /api/v1/translate   {source, filename | source_language, target}
  POST /api/v1/eval        {source, function, args, uniforms}

Translation and evaluation failures come back in the error envelope with HTTP
200; malformed request bodies are rejected by FastAPI with 422. No request
results in an unhandled 500.
"""

from __future__ import annotations

import logging
from typing import Any

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field
from starlette.middleware.cors import CORSMiddleware

from . import __version__
from .backends import BackendRegistry, get_registry
from .config import debug_enabled
from .errors import CrossGLError, DiagnosticsError, error_from_exception
from .frontends import SourceLanguage
from .interpreter import eval_function, format_value, parse_value, value_to_json
from .pipeline import load_crossgl, load_source
from .responses import fail, ok

log = logging.getLogger("crossgl.server")

_DEFAULT_FILENAMES = {
    SourceLanguage.CROSSGL: "request.cgl",
    SourceLanguage.GLSL: "request.glsl",
    SourceLanguage.CUDA: "request.cu",
}


class TranslateBody(BaseModel):
    source: str
    target: str
    filename: str | None = None
    source_language: SourceLanguage | None = None


class EvalBody(BaseModel):
    source: str
    function: str
    args: list[str] = Field(default_factory=list)
    uniforms: dict[str, str] = Field(default_factory=dict)


def _failure(exc: Exception) -> dict[str, Any]:
    if isinstance(exc, DiagnosticsError):
        error = exc.as_error()
        error["details"] = {"diagnostics": [d.format() for d in exc.diagnostics]}
        return fail(error)
    return fail(error_from_exception(exc, debug=debug_enabled()))


def create_app(registry: BackendRegistry | None = None) -> FastAPI:
    app = FastAPI(
        title="crossgl translator",
        version=__version__,
        docs_url=None,
        redoc_url=None,
        openapi_url=None,
    )
    app.state.registry = registry if registry is not None else get_registry()  # type: ignore[attr-defined]

    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.middleware("http")
    async def _exception_guard(request: Request, call_next):
        """Unexpected exceptions become an error envelope instead of a framework 500."""

        try:
            response: Response = await call_next(request)
            return response
        except Exception as exc:  # noqa: BLE001
            log.exception("unhandled error on %s %s", request.method, request.url.path)
            return JSONResponse(fail(error_from_exception(exc, debug=debug_enabled())), status_code=200)

    @app.get("/healthz")
    def healthz():
        return ok({"status": "ok"})

    @app.get("/api/v1/targets")
    def targets():
        reg: BackendRegistry = app.state.registry  # type: ignore[attr-defined]
        return ok({"targets": [{"name": b.name, "extensions": list(b.extensions)} for b in reg]})

    @app.post("/api/v1/translate")
    def translate(body: TranslateBody):
        reg: BackendRegistry = app.state.registry  # type: ignore[attr-defined]
        filename = body.filename or _DEFAULT_FILENAMES[body.source_language or SourceLanguage.CROSSGL]
        try:
            backend = reg.get(body.target)
            program = load_source(body.source, file=filename, language=body.source_language)
            units = backend.generate(program.module)
        except CrossGLError as exc:
            return _failure(exc)
        payload = {"units": [u.model_dump() for u in units]}
        return ok(payload, warnings=program.warnings)

    @app.post("/api/v1/eval")
    def evaluate(body: EvalBody):
        try:
            program = load_crossgl(body.source, "request.cgl")
            args = [parse_value(a)[0] for a in body.args]
            uniforms = {name: parse_value(text)[0] for name, text in body.uniforms.items()}
            value = eval_function(program.module, body.function, args, uniforms=uniforms, check_types=True)
        except CrossGLError as exc:
            return _failure(exc)
        return ok({"value": value_to_json(value), "text": format_value(value)}, warnings=program.warnings)

    return app
