"""Builtin function table shared by the typechecker, interpreter and backends."""

from __future__ import annotations

from dataclasses import dataclass

from .ir import FLOAT, INT, SAMPLER2D, VEC2, VEC3, VEC4, TypeExpr

GEN_FLOAT: tuple[TypeExpr, ...] = (FLOAT, VEC2, VEC3, VEC4)
_VECTORS: tuple[TypeExpr, ...] = (VEC2, VEC3, VEC4)


@dataclass(frozen=True, slots=True)
class Signature:
    params: tuple[TypeExpr, ...]
    result: TypeExpr

    def __str__(self) -> str:
        return f"({', '.join(str(p) for p in self.params)}) -> {self.result}"


def _unary(result_scalar: bool = False) -> tuple[Signature, ...]:
    return tuple(Signature((g,), FLOAT if result_scalar else g) for g in GEN_FLOAT)


def _binary_gen() -> tuple[Signature, ...]:
    return tuple(Signature((g, g), g) for g in GEN_FLOAT)


INTRINSICS: dict[str, tuple[Signature, ...]] = {
    "dot": tuple(Signature((g, g), FLOAT) for g in GEN_FLOAT),
    "cross": (Signature((VEC3, VEC3), VEC3),),
    "normalize": _unary(),
    "length": _unary(result_scalar=True),
    "max": _binary_gen() + tuple(Signature((v, FLOAT), v) for v in _VECTORS) + (Signature((INT, INT), INT),),
    "min": _binary_gen() + tuple(Signature((v, FLOAT), v) for v in _VECTORS) + (Signature((INT, INT), INT),),
    "pow": _binary_gen(),
    "sqrt": _unary(),
    "mix": tuple(Signature((g, g, g), g) for g in GEN_FLOAT)
    + tuple(Signature((v, v, FLOAT), v) for v in _VECTORS),
    "clamp": tuple(Signature((g, g, g), g) for g in GEN_FLOAT)
    + tuple(Signature((v, FLOAT, FLOAT), v) for v in _VECTORS)
    + (Signature((INT, INT, INT), INT),),
    "abs": _unary() + (Signature((INT,), INT),),
    "floor": _unary(),
    "sin": _unary(),
    "cos": _unary(),
    "texture": (Signature((SAMPLER2D, VEC2), VEC4),),
}


def _accepts(param: TypeExpr, arg: TypeExpr, promote: bool) -> bool:
    return arg == param or (promote and arg == INT and param == FLOAT)


def resolve_intrinsic(name: str, arg_types: list[TypeExpr]) -> Signature | None:
    """Pick the overload for `name`: exact match first, then with int->float promotion."""

    overloads = INTRINSICS.get(name)
    if not overloads:
        return None
    for promote in (False, True):
        for sig in overloads:
            if len(sig.params) == len(arg_types) and all(
                _accepts(p, a, promote) for p, a in zip(sig.params, arg_types)
            ):
                return sig
    return None
