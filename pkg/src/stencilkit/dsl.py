"""Object model for parsed ``.stpy`` source units, plus the pretty-printer.

The surface syntax is a restricted, decorator-based language: ``@st.kernel``
and ``@st.target`` function definitions, module-level ``st.grid(...)``
declarations, and an optional ``st.launch(...)`` invocation.  Equality on
the model ignores source positions so that parse -> print -> parse is a
fixed point.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from stencilkit.affine import Affine

# ---------------------------------------------------------------------------
# expressions

BINARY_OPS = ("+", "-", "*", "/")
UNARY_OPS = ("neg",)


class Expr:
    """Base class for kernel expressions."""

    __slots__ = ()


@dataclass(frozen=True)
class Const(Expr):
    value: float


@dataclass(frozen=True)
class Read(Expr):
    """A relative grid read: ``grid.at(o1, o2[, o3])``."""

    grid: str
    offset: tuple[int, ...]


@dataclass(frozen=True)
class Var(Expr):
    """Reference to a kernel-local temporary or a scalar parameter."""

    name: str


@dataclass(frozen=True)
class Unary(Expr):
    op: str  # "neg"
    operand: Expr


@dataclass(frozen=True)
class Binary(Expr):
    op: str  # one of BINARY_OPS
    left: Expr
    right: Expr


def walk_expr(expr: Expr):
    """Yield every node of an expression tree, preorder (iterative: the
    fully expanded corpus kernels nest hundreds of levels deep)."""
    stack = [expr]
    while stack:
        node = stack.pop()
        yield node
        if isinstance(node, Unary):
            stack.append(node.operand)
        elif isinstance(node, Binary):
            stack.append(node.right)
            stack.append(node.left)


# ---------------------------------------------------------------------------
# map argument values (kept symbolic until binding)


@dataclass(frozen=True)
class ShapeRef:
    """``<grid>.shape`` used as a map extent."""

    grid: str


MapValue = Union[Affine, ShapeRef, tuple]  # tuple of Affine, arity 2 or 4


# ---------------------------------------------------------------------------
# declarations and statements


@dataclass(frozen=True)
class GridDecl:
    name: str
    dtype: str  # "f32" | "f64"
    shape: tuple[int, ...]
    order: int
    pos: tuple[int, int] = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class Update:
    """One ``dest.at(...).set(expr)`` statement."""

    dest: str
    offset: tuple[int, ...]
    expr: Expr


@dataclass(frozen=True)
class KernelDecl:
    name: str
    params: tuple[tuple[str, str], ...]  # (name, "grid"|"f32"|"f64"|"i32")
    locals: tuple[tuple[str, Expr], ...]
    updates: tuple[Update, ...]
    pos: tuple[int, int] = field(default=(0, 0), compare=False)

    def dims(self) -> int:
        """Offset arity used by this kernel (0 if it never reads or writes)."""
        for upd in self.updates:
            return len(upd.offset)
        return 0


class TargetStmt:
    __slots__ = ()


@dataclass(frozen=True)
class ForRange(TargetStmt):
    var: str
    count: Affine  # literal or a scalar parameter symbol
    body: tuple["TargetStmt", ...]


@dataclass(frozen=True)
class MapInvoke(TargetStmt):
    spec: tuple[tuple[str, MapValue], ...]  # kwargs in source order
    kernel: str
    args: tuple[Union[str, int, float], ...]
    pos: tuple[int, int] = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class Swap(TargetStmt):
    first: str
    second: str


@dataclass(frozen=True)
class TargetDecl:
    name: str
    params: tuple[tuple[str, str], ...]
    body: tuple[TargetStmt, ...]
    pos: tuple[int, int] = field(default=(0, 0), compare=False)


BACKEND_KINDS = ("seq", "omp", "gpu", "dataflow")

ParamValue = Union[str, int, float, bool, tuple]


@dataclass(frozen=True)
class LaunchDecl:
    kind: str  # one of BACKEND_KINDS
    params: tuple[tuple[str, ParamValue], ...]
    target: str
    args: tuple[Union[str, int, float], ...]
    pos: tuple[int, int] = field(default=(0, 0), compare=False)

    def param_map(self) -> dict[str, ParamValue]:
        return dict(self.params)


@dataclass(frozen=True)
class SourceUnit:
    grids: tuple[GridDecl, ...]
    kernels: tuple[KernelDecl, ...]
    targets: tuple[TargetDecl, ...]
    launch: Optional[LaunchDecl]
    file: str = field(default="<input>", compare=False)

    def grid(self, name: str) -> GridDecl:
        for g in self.grids:
            if g.name == name:
                return g
        raise KeyError(name)

    def kernel(self, name: str) -> KernelDecl:
        for k in self.kernels:
            if k.name == name:
                return k
        raise KeyError(name)

    def target(self, name: str) -> TargetDecl:
        for t in self.targets:
            if t.name == name:
                return t
        raise KeyError(name)


# ---------------------------------------------------------------------------
# pretty-printer

_PREC = {"+": 10, "-": 10, "*": 20, "/": 20}


def _const_str(value: float) -> str:
    return repr(value)


def expr_str(expr: Expr, parent_prec: int = 0, right_side: bool = False) -> str:
    if isinstance(expr, Const):
        text = _const_str(expr.value)
        # a leading minus must not merge with a binary operator ambiguously;
        # python's parser handles "a - -5" fine, so no parens needed
        return text
    if isinstance(expr, Var):
        return expr.name
    if isinstance(expr, Read):
        offs = ", ".join(str(o) for o in expr.offset)
        return f"{expr.grid}.at({offs})"
    if isinstance(expr, Unary):
        inner = expr_str(expr.operand, 100)
        if isinstance(expr.operand, (Binary, Unary)):
            inner = f"({inner})"
        return f"-{inner}"
    if isinstance(expr, Binary):
        prec = _PREC[expr.op]
        left = expr_str(expr.left, prec, False)
        rightt = expr_str(expr.right, prec, True)
        if isinstance(expr.left, Binary) and _PREC[expr.left.op] < prec:
            left = f"({left})"
        if isinstance(expr.right, Binary) and _PREC[expr.right.op] <= prec:
            rightt = f"({rightt})"
        return f"{left} {expr.op} {rightt}"
    raise TypeError(f"unknown expression node {expr!r}")


def _map_value_str(value: MapValue) -> str:
    if isinstance(value, ShapeRef):
        return f"{value.grid}.shape"
    if isinstance(value, tuple):
        return "(" + ", ".join(str(v) for v in value) + ")"
    return str(value)


def _param_value_str(value: ParamValue) -> str:
    if isinstance(value, bool):
        return "True" if value else "False"
    if isinstance(value, str):
        return repr(value)
    if isinstance(value, tuple):
        return "(" + ", ".join(str(v) for v in value) + ")"
    return str(value)


def _stmt_lines(stmt: TargetStmt, indent: str) -> list[str]:
    if isinstance(stmt, ForRange):
        lines = [f"{indent}for {stmt.var} in range({stmt.count}):"]
        for inner in stmt.body:
            lines.extend(_stmt_lines(inner, indent + "    "))
        return lines
    if isinstance(stmt, MapInvoke):
        spec = ", ".join(f"{k}={_map_value_str(v)}" for k, v in stmt.spec)
        args = ", ".join(str(a) for a in stmt.args)
        return [f"{indent}st.map({spec})({stmt.kernel})({args})"]
    if isinstance(stmt, Swap):
        return [f"{indent}({stmt.first}, {stmt.second}) = ({stmt.second}, {stmt.first})"]
    raise TypeError(f"unknown target statement {stmt!r}")


def print_source(unit: SourceUnit) -> str:
    """Render a SourceUnit back to canonical DSL text."""
    from stencilkit._util import deep_recursion

    with deep_recursion():
        return _print_source(unit)


def _print_source(unit: SourceUnit) -> str:
    out: list[str] = ["import stencilpy as st", ""]
    for kernel in unit.kernels:
        params = ", ".join(f"{n}: st.{t}" for n, t in kernel.params)
        out.append("@st.kernel")
        out.append(f"def {kernel.name}({params}):")
        for name, expr in kernel.locals:
            out.append(f"    {name} = {expr_str(expr)}")
        for upd in kernel.updates:
            offs = ", ".join(str(o) for o in upd.offset)
            out.append(f"    {upd.dest}.at({offs}).set({expr_str(upd.expr)})")
        out.append("")
    for target in unit.targets:
        params = ", ".join(f"{n}: st.{t}" for n, t in target.params)
        out.append("@st.target")
        out.append(f"def {target.name}({params}):")
        for stmt in target.body:
            out.extend(_stmt_lines(stmt, "    "))
        out.append("")
    for grid in unit.grids:
        shape = ", ".join(str(e) for e in grid.shape)
        if len(grid.shape) == 1:
            shape += ","
        out.append(
            f"{grid.name} = st.grid(dtype=st.{grid.dtype}, shape=({shape}), order={grid.order})"
        )
    if unit.launch is not None:
        ln = unit.launch
        out.append("st.launch(")
        if ln.params:
            out.append(f"    backend=st.{ln.kind}(")
            for key, value in ln.params:
                out.append(f"        {key}={_param_value_str(value)},")
            out.append("    )")
        else:
            out.append(f"    backend=st.{ln.kind}()")
        args = ", ".join(str(a) for a in ln.args)
        out.append(f")({ln.target})({args})")
    return "\n".join(out).rstrip("\n") + "\n"
