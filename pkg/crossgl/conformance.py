"""Conformance harness: every corpus program through every registered target.

Each (program, target) cell generates code and then checks it:

  crossgl   re-parse, structural equality with the source, interpreter oracle
  glsl      re-import, typecheck, interpreter oracle
  cuda      re-import of compute-only programs, kernel names and arities
  otherwise token smoke checks (non-empty, balanced braces, names present)

Failures never raise; they become report rows. The report is a programs x
targets matrix plus a feature matrix built from backend capability metadata
and the features the passing programs exercise.
"""

from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from enum import Enum
from pathlib import Path
from typing import Any, Iterable, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from .backends import BackendRegistry, OutputUnit, Support, get_registry
from .backends.base import FEATURES
from .corpus import CorpusProgram, corpus_files, load_program
from .errors import EvalError, error_from_exception
from .frontends import glsl_stage
from .interpreter import Value, copy_value, eval_function, standard_sample, values_close
from .ir import ShaderModule, Stage
from .pipeline import load_crossgl, load_cuda, load_glsl
from .validate import ast_equal

log = logging.getLogger("crossgl.conformance")

ORACLE_TOLERANCE = 1e-6
# Rows the bundled corpus is expected to cover; textures are tracked but optional.
IN_SCOPE_FEATURES: tuple[str, ...] = tuple(f for f in FEATURES if f != "textures")


class CellStatus(str, Enum):
    PASS = "pass"
    FAIL = "fail"


class FeatureStatus(str, Enum):
    SUPPORTED = "supported"
    DEGRADED = "degraded"
    UNSUPPORTED = "unsupported"
    NOT_EXERCISED = "not_exercised"


class CellResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["cell"] = "cell"
    program: str
    target: str
    status: CellStatus
    checks: list[str] = Field(default_factory=list)
    units: int = 0
    oracle_functions: int = 0
    oracle_max_delta: float | None = None
    error_type: str | None = None
    error: dict[str, Any] | None = None


class FeatureCell(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["feature"] = "feature"
    feature: str
    target: str
    status: FeatureStatus
    note: str = ""
    exercised_by: list[str] = Field(default_factory=list)


class ConformanceReport(BaseModel):
    programs: list[str]
    targets: list[str]
    cells: list[CellResult]
    features: list[FeatureCell]
    seconds: float = 0.0

    @property
    def passed(self) -> int:
        return sum(1 for c in self.cells if c.status == CellStatus.PASS)

    @property
    def ok(self) -> bool:
        return self.passed == len(self.cells)

    def cell(self, program: str, target: str) -> CellResult:
        for c in self.cells:
            if c.program == program and c.target == target:
                return c
        raise KeyError((program, target))

    def feature(self, feature: str, target: str) -> FeatureCell:
        for f in self.features:
            if f.feature == feature and f.target == target:
                return f
        raise KeyError((feature, target))


class CheckFailed(Exception):
    """A conformance check did not hold; the message names the check."""


# --------------------------------------------------------------------------- oracle


def _flat(v: Value) -> list[float]:
    if isinstance(v, np.ndarray):
        return [float(x) for x in v.ravel()]
    if isinstance(v, list):
        return [x for item in v for x in _flat(item)]
    if isinstance(v, dict):
        return [x for k in sorted(v) for x in _flat(v[k])]
    if isinstance(v, (bool, int, float)):
        return [float(v)]
    return []


def relative_delta(a: Value, b: Value) -> float:
    x, y = np.asarray(_flat(a), dtype=float), np.asarray(_flat(b), dtype=float)
    if x.shape != y.shape:
        return float("inf")
    if x.size == 0:
        return 0.0
    with np.errstate(all="ignore"):
        both_nan = np.isnan(x) & np.isnan(y)
        same = (x == y) | both_nan
        scale = np.maximum(np.maximum(np.abs(x), np.abs(y)), 1e-12)
        delta = np.where(same, 0.0, np.abs(x - y) / scale)
    delta = np.nan_to_num(delta, nan=float("inf"))
    return float(delta.max())


def _outcome(module: ShaderModule, name: str, args: list[Value]) -> Value | EvalError:
    try:
        return eval_function(module, name, [copy_value(a) for a in args])
    except EvalError as exc:
        return exc


def compare_functions(
    original: ShaderModule,
    other: ShaderModule,
    names: Iterable[str],
    *,
    rel: float = ORACLE_TOLERANCE,
) -> tuple[int, float]:
    """Evaluate `names` in both modules on the standard sample; return (count, max delta).

    Runtime errors agree when both sides raise the same kind.
    """

    structs = original.struct_map()
    count, worst = 0, 0.0
    for name in names:
        f = original.function(name)
        if f is None:
            continue
        if other.function(name) is None:
            raise CheckFailed(f"oracle: {name} missing after round trip")
        for args in standard_sample(f, structs):
            a = _outcome(original, name, args)
            b = _outcome(other, name, args)
            if isinstance(a, EvalError) or isinstance(b, EvalError):
                ka = a.kind if isinstance(a, EvalError) else "value"
                kb = b.kind if isinstance(b, EvalError) else "value"
                if ka != kb:
                    raise CheckFailed(f"oracle: {name} gave {ka} before and {kb} after round trip")
                continue
            if not values_close(a, b, rel=rel):
                raise CheckFailed(f"oracle: {name} differs by {relative_delta(a, b):.3g}")
            worst = max(worst, relative_delta(a, b))
        count += 1
    return count, worst


# --------------------------------------------------------------------------- per-target checks


def balanced(text: str) -> bool:
    depth = 0
    for ch in text:
        if ch in "{([":
            depth += 1
        elif ch in "})]":
            depth -= 1
            if depth < 0:
                return False
    return depth == 0


def smoke_check(module: ShaderModule, units: list[OutputUnit]) -> list[str]:
    if not units or any(not u.text.strip() for u in units):
        raise CheckFailed("smoke: empty output")
    for u in units:
        if not balanced(u.text):
            raise CheckFailed(f"smoke: unbalanced brackets in {u.suggested_filename}")
    text = "\n".join(u.text for u in units)
    for f in module.functions:
        if f.stage in (Stage.VERTEX, Stage.FRAGMENT) and f.name == "main":
            continue
        if f.name not in text:
            raise CheckFailed(f"smoke: {f.name} not found in output")
    return ["smoke"]


def _kernels(module: ShaderModule) -> list[tuple[str, int]]:
    return [(f.name, len(f.params)) for f in module.entries(Stage.COMPUTE)]


class CellRunner:
    """Runs one cell from the program source, so cells share no mutable IR."""

    def __init__(self, program: CorpusProgram, source: str, registry: BackendRegistry) -> None:
        self.program = program
        self.source = source
        self.registry = registry

    def run(self, target: str) -> CellResult:
        checks: list[str] = []
        units: list[OutputUnit] = []
        oracle = (0, None)
        try:
            module = load_crossgl(self.source, str(self.program.path)).module
            units = self.registry.get(target).generate(module, stem=self.program.name)
            checks.append("generate")
            oracle = self.check(target, module, units, checks)
        except Exception as exc:  # noqa: BLE001
            log.debug("cell %s/%s failed: %s", self.program.name, target, exc)
            error = {"code": "CHECK_FAILED", "message": str(exc), "details": None}
            if not isinstance(exc, CheckFailed):
                error = error_from_exception(exc, debug=True)
            return CellResult(
                program=self.program.name,
                target=target,
                status=CellStatus.FAIL,
                checks=checks,
                units=len(units),
                error_type=type(exc).__name__,
                error=error,
            )
        return CellResult(
            program=self.program.name,
            target=target,
            status=CellStatus.PASS,
            checks=checks,
            units=len(units),
            oracle_functions=oracle[0],
            oracle_max_delta=oracle[1],
        )

    def check(
        self, target: str, module: ShaderModule, units: list[OutputUnit], checks: list[str]
    ) -> tuple[int, float | None]:
        if target == "crossgl":
            reparsed = load_crossgl(units[0].text, units[0].suggested_filename).module
            checks.append("reparse")
            if not ast_equal(module, reparsed):
                raise CheckFailed("round trip: re-parsed program differs from the source")
            checks.append("ast_equal")
            count, delta = compare_functions(module, reparsed, self.program.pure_functions)
            checks.append("oracle")
            return count, delta
        if target == "glsl":
            imported = load_glsl(
                [(glsl_stage(u.suggested_filename), u.text, u.suggested_filename) for u in units]
            ).module
            checks += ["reimport", "typecheck"]
            count, delta = compare_functions(module, imported, self.program.pure_functions)
            checks.append("oracle")
            return count, delta
        checks += smoke_check(module, units)
        if target == "cuda" and self.program.compute_only:
            imported = load_cuda(units[0].text, units[0].suggested_filename).module
            checks.append("reimport")
            if _kernels(imported) != _kernels(module):
                raise CheckFailed(f"round trip: kernels {_kernels(imported)} != {_kernels(module)}")
            checks.append("kernels")
        return 0, None


# --------------------------------------------------------------------------- report


def feature_matrix(
    programs: list[CorpusProgram], cells: list[CellResult], registry: BackendRegistry
) -> list[FeatureCell]:
    passed = {(c.program, c.target) for c in cells if c.status == CellStatus.PASS}
    out: list[FeatureCell] = []
    for feature in FEATURES:
        for target in registry.targets():
            support = registry.get(target).feature(feature)
            users = [p.name for p in programs if feature in p.features and (p.name, target) in passed]
            if support.status == Support.UNSUPPORTED:
                status = FeatureStatus.UNSUPPORTED
            elif not users:
                status = FeatureStatus.NOT_EXERCISED
            elif support.status == Support.DEGRADED:
                status = FeatureStatus.DEGRADED
            else:
                status = FeatureStatus.SUPPORTED
            out.append(FeatureCell(feature=feature, target=target, status=status, note=support.note, exercised_by=users))
    return out


def run_conformance(
    corpus_dir: Path,
    *,
    registry: BackendRegistry | None = None,
    workers: int = 1,
) -> ConformanceReport:
    """Build the programs x targets matrix for every `.cgl` file in `corpus_dir`."""

    started = time.perf_counter()
    registry = registry if registry is not None else get_registry()
    targets = registry.targets()
    programs: list[CorpusProgram] = []
    cells: list[CellResult] = []
    jobs: list[tuple[CellRunner, str]] = []
    for path in corpus_files(corpus_dir):
        try:
            program, _ = load_program(path)
        except Exception as exc:  # noqa: BLE001
            log.warning("corpus program %s does not load: %s", path.name, exc)
            cells += [
                CellResult(
                    program=path.stem,
                    target=t,
                    status=CellStatus.FAIL,
                    error_type=type(exc).__name__,
                    error=error_from_exception(exc, debug=True),
                )
                for t in targets
            ]
            continue
        programs.append(program)
        runner = CellRunner(program, path.read_text(encoding="utf-8"), registry)
        jobs += [(runner, t) for t in targets]

    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            cells += list(pool.map(lambda job: job[0].run(job[1]), jobs))
    else:
        cells += [runner.run(t) for runner, t in jobs]

    order = {t: i for i, t in enumerate(targets)}
    cells.sort(key=lambda c: (c.program, order[c.target]))
    names = sorted({c.program for c in cells})
    report = ConformanceReport(
        programs=names,
        targets=targets,
        cells=cells,
        features=feature_matrix(programs, cells, registry),
        seconds=round(time.perf_counter() - started, 3),
    )
    log.info("conformance: %d/%d cells passed in %.2fs", report.passed, len(cells), report.seconds)
    return report


_GREEN, _RED, _YELLOW, _RESET = "\x1b[32m", "\x1b[31m", "\x1b[33m", "\x1b[0m"


def _paint(text: str, width: int, colour: str | None) -> str:
    padded = text.ljust(width)
    return f"{colour}{padded}{_RESET}" if colour else padded


def format_report(report: ConformanceReport, *, color: bool = True) -> str:
    """Human-readable matrices followed by one line per failing cell."""

    if not report.cells:
        return "no corpus programs found\n"
    first = max([len("program"), len("feature"), *(len(p) for p in report.programs), *(len(f) for f in FEATURES)]) + 2
    width = max(14, *(len(t) + 2 for t in report.targets))
    lines = ["program".ljust(first) + "".join(t.ljust(width) for t in report.targets)]
    for program in report.programs:
        row = program.ljust(first)
        for target in report.targets:
            c = report.cell(program, target)
            ok = c.status == CellStatus.PASS
            row += _paint("PASS" if ok else "FAIL", width, (_GREEN if ok else _RED) if color else None)
        lines.append(row)
    lines.append("")
    lines.append("feature".ljust(first) + "".join(t.ljust(width) for t in report.targets))
    shades = {
        FeatureStatus.SUPPORTED: _GREEN,
        FeatureStatus.DEGRADED: _YELLOW,
        FeatureStatus.UNSUPPORTED: _RED,
        FeatureStatus.NOT_EXERCISED: None,
    }
    for feature in FEATURES:
        row = feature.ljust(first)
        for target in report.targets:
            f = report.feature(feature, target)
            row += _paint(f.status.value, width, shades[f.status] if color else None)
        lines.append(row)
    lines.append("")
    for c in report.cells:
        if c.status == CellStatus.FAIL:
            message = (c.error or {}).get("message", "")
            lines.append(f"{c.program}/{c.target}: {c.error_type}: {message}")
    lines.append(f"{report.passed}/{len(report.cells)} cells passed in {report.seconds:.2f}s")
    return "\n".join(lines) + "\n"


def write_jsonl(report: ConformanceReport, path: Path) -> None:
    """One JSON record per matrix cell, then one per feature cell."""

    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as fh:
        for record in [*report.cells, *report.features]:
            fh.write(record.model_dump_json() + "\n")
