"""CrossGL transpiler package.

Pipeline: frontends (CrossGL, GLSL, CUDA) -> validated, typechecked IR ->
backends (CrossGL, GLSL, HLSL, Metal, CUDA, Rust source), with a reference
interpreter used as the semantic oracle for conformance runs.
"""

from __future__ import annotations

__all__ = ["__version__"]
__version__ = "0.1.0"
