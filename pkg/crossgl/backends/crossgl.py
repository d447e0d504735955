"""CrossGL pretty-printer. Its output re-parses to a structurally equal module."""

from __future__ import annotations

from ..ir import FunctionDecl, GlobalDecl, Qualifier, ShaderModule, TypeExpr, VOID
from .base import Backend, CLikeEmitter, OutputUnit, attribute_text, header_comment


def _attrs(attrs) -> str:
    return "".join(attribute_text(a) + " " for a in attrs)


class CrossGLEmitter(CLikeEmitter):
    target = "crossgl"

    def function_name(self, name: str) -> str:
        return name

    def params_text(self, f: FunctionDecl) -> str:
        return ", ".join(_attrs(p.attributes) + self.declarator(p.type, p.name) for p in f.params)

    def signature(self, f: FunctionDecl) -> str:
        ret = "void" if f.return_type == VOID else self.type_name(f.return_type)
        return f"{_attrs(f.attributes)}{ret} {f.name}({self.params_text(f)})"

    def global_decl(self, g: GlobalDecl) -> None:
        prefix = {Qualifier.UNIFORM: "uniform ", Qualifier.CONST: "const ", Qualifier.PLAIN: ""}[g.qualifier]
        text = f"{_attrs(g.attributes)}{prefix}{self.declarator(g.type, g.name)}"
        if g.init is not None:
            text += f" = {self.expr(g.init)}"
        self.w.line(text + ";")

    def emit(self) -> str:
        m = self.module
        self.w.line(f"// {header_comment(m, 'CrossGL')}")
        with self.w.block(f"shader {m.name}"):
            for s in m.structs:
                with self.w.block(f"{_attrs(s.attributes)}struct {s.name}"):
                    for mem in s.members:
                        self.w.line(f"{_attrs(mem.attributes)}{self.declarator(mem.type, mem.name)};")
                self.w.blank()
            for g in m.globals:
                self.global_decl(g)
            self.w.blank()
            for f in m.functions:
                if f.stage is None:
                    self.function(f)
                else:
                    with self.w.block(f.stage.value):
                        self.function(f)
                self.w.blank()
        return self.w.text()


class CrossGLBackend(Backend):
    name = "crossgl"
    extensions = (".cgl",)

    def map_type(self, t: TypeExpr) -> str:
        return str(t)

    def generate(self, module: ShaderModule, *, stem: str | None = None) -> list[OutputUnit]:
        text = CrossGLEmitter(module, self).emit()
        return [OutputUnit(suggested_filename=f"{stem or module.name}.cgl", target=self.name, text=text)]
