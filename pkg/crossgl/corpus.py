"""Conformance corpus: a directory of `.cgl` programs and what each one exercises.

Metadata is derived from the program itself, so any directory of CrossGL
sources is a valid corpus. The programs shipped with the package live in
`crossgl/corpus/`.
"""

from __future__ import annotations

import logging
from pathlib import Path

from pydantic import BaseModel, ConfigDict

from .backends.base import uniform_uses
from .ir import (
    VOID,
    ArrayType,
    Break,
    Continue,
    For,
    If,
    IndexAccess,
    SamplerType,
    ShaderModule,
    Stage,
    TernaryConditional,
    TypeExpr,
    VarDecl,
    While,
    contains_sampler,
    walk_all_exprs,
    walk_stmts,
)
from .pipeline import Program, load_crossgl

log = logging.getLogger("crossgl.corpus")

BUNDLED_CORPUS = Path(__file__).parent / "corpus"


class CorpusProgram(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str
    path: Path
    features: frozenset[str]
    pure_functions: tuple[str, ...]
    compute_only: bool


def _is_array(t: TypeExpr) -> bool:
    return isinstance(t, ArrayType)


def program_features(module: ShaderModule) -> frozenset[str]:
    """Feature-matrix rows the module exercises."""

    structs = module.struct_map()
    tags = {"basic_syntax"}
    if module.structs:
        tags.add("structures")
    if module.helpers():
        tags.add("functions")
    if any(f.stage in (Stage.VERTEX, Stage.FRAGMENT) for f in module.functions):
        tags.add("shaders")
    if module.entries(Stage.COMPUTE):
        tags.add("compute_kernels")
    types: list[TypeExpr] = [g.type for g in module.globals]
    types += [m.type for s in module.structs for m in s.members]
    for f in module.functions:
        types += [p.type for p in f.params]
        for st in walk_stmts(f.body):
            if isinstance(st, (If, For, While, Break, Continue)):
                tags.add("control_flow")
            elif isinstance(st, VarDecl):
                types.append(st.type)
        for e in walk_all_exprs(f.body):
            if isinstance(e, TernaryConditional):
                tags.add("control_flow")
            elif isinstance(e, IndexAccess) and _is_array(e.base.ty):
                tags.add("arrays")
    if any(_is_array(t) for t in types):
        tags.add("arrays")
    if any(isinstance(t, SamplerType) or contains_sampler(t, structs) for t in types):
        tags.add("textures")
    return frozenset(tags)


def pure_functions(module: ShaderModule) -> tuple[str, ...]:
    """Helpers whose result depends only on their arguments.

    A helper qualifies when it returns a value, reads no uniform (directly
    or through a callee) and takes no sampler.
    """

    structs = module.struct_map()
    uses = uniform_uses(module)
    return tuple(
        f.key
        for f in module.helpers()
        if f.return_type != VOID
        and not uses.get(f.key)
        and not any(contains_sampler(p.type, structs) for p in f.params)
    )


def describe(path: Path, program: Program) -> CorpusProgram:
    module = program.module
    return CorpusProgram(
        name=path.stem,
        path=path,
        features=program_features(module),
        pure_functions=pure_functions(module),
        compute_only=bool(module.functions) and all(f.stage in (None, Stage.COMPUTE) for f in module.functions)
        and bool(module.entries(Stage.COMPUTE)),
    )


def corpus_files(directory: Path) -> list[Path]:
    return sorted(p for p in directory.glob("*.cgl") if p.is_file())


def load_program(path: Path) -> tuple[CorpusProgram, Program]:
    program = load_crossgl(path.read_text(encoding="utf-8"), str(path))
    return describe(path, program), program


def load_corpus(directory: Path = BUNDLED_CORPUS) -> list[CorpusProgram]:
    """Describe every program in `directory`; programs that fail to load are skipped with a warning."""

    out: list[CorpusProgram] = []
    for path in corpus_files(directory):
        try:
            out.append(load_program(path)[0])
        except Exception as exc:  # noqa: BLE001
            log.warning("skipping corpus program %s: %s", path.name, exc)
    return out
