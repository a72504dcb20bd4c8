"""Shared emission utilities: flattened index arithmetic, C expression
rendering, and loop-nest text."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from stencilkit.dsl import Binary, Const, Expr, GridDecl, Read, Unary, Var

C_TYPES = {"f32": "float", "f64": "double"}


@dataclass(frozen=True)
class IndexScheme:
    """Row-major flattening with the halo part of physical memory.

    flat(i) = lead_pad + sum_d (i_d + order) * stride_d, strides taken from
    the padded extents with the last dimension contiguous.
    """

    shape: tuple[int, ...]
    order: int
    lead_pad: int = 0

    @property
    def padded(self) -> tuple[int, ...]:
        return tuple(e + 2 * self.order for e in self.shape)

    @property
    def strides(self) -> tuple[int, ...]:
        padded = self.padded
        strides = [1] * len(padded)
        for d in range(len(padded) - 2, -1, -1):
            strides[d] = strides[d + 1] * padded[d + 1]
        return tuple(strides)

    @property
    def padded_size(self) -> int:
        n = 1
        for e in self.padded:
            n *= e
        return self.lead_pad + n

    def flat(self, index: Sequence[int]) -> int:
        """Python-side flattening, used by index-soundness checks."""
        total = self.lead_pad
        for i, stride in zip(index, self.strides):
            total += (i + self.order) * stride
        return total

    def c_index(self, terms: Sequence[str]) -> str:
        """C index text for per-dimension expressions in logical coordinates."""
        parts = []
        for term, stride in zip(terms, self.strides):
            if stride == 1:
                scaled = term
            elif " " in term:
                scaled = f"({term}) * {stride}"
            else:
                scaled = f"{term} * {stride}"
            parts.append(scaled)
        if self.lead_pad:
            parts.append(str(self.lead_pad))
        return " + ".join(parts)

    def c_read(self, var: str, loop_vars: Sequence[str], offset: Sequence[int]) -> str:
        terms = [
            f"{iv} + {self.order + off}" if self.order + off else iv
            for iv, off in zip(loop_vars, offset)
        ]
        return f"{var}[{self.c_index(terms)}]"

    @staticmethod
    def of(grid: GridDecl, lead_pad: int = 0) -> "IndexScheme":
        return IndexScheme(grid.shape, grid.order, lead_pad)


def c_literal(value: float) -> str:
    text = repr(float(value))
    if text == "inf":
        return "INFINITY"
    if text == "-inf":
        return "-INFINITY"
    return text


def c_expr(expr: Expr, render_read: Callable[[Read], str]) -> str:
    """Render an expression tree as C, preserving evaluation structure.

    Numeric literals are emitted as double constants, so a whole point
    update evaluates in double and is rounded once at the store.
    """
    if isinstance(expr, Const):
        return c_literal(expr.value)
    if isinstance(expr, Var):
        return f"t_{expr.name}"
    if isinstance(expr, Read):
        return render_read(expr)
    if isinstance(expr, Unary):
        return f"-({c_expr(expr.operand, render_read)})"
    if isinstance(expr, Binary):
        left = c_expr(expr.left, render_read)
        right = c_expr(expr.right, render_read)
        if expr.op in ("*", "/"):
            if isinstance(expr.left, Binary) and expr.left.op in ("+", "-"):
                left = f"({left})"
            if isinstance(expr.right, Binary) or isinstance(expr.right, Unary):
                right = f"({right})"
        elif isinstance(expr.right, Binary) and expr.right.op in ("+", "-"):
            right = f"({right})"
        return f"{left} {expr.op} {right}"
    raise TypeError(f"cannot render {expr!r}")


def loop_nest(
    loop_vars: Sequence[str],
    bounds: Sequence[tuple[object, object]],
    body: list[str],
    indent: str = "    ",
    pragmas_outer: Sequence[str] = (),
) -> list[str]:
    """Nested C for-loops over half-open bounds, body lines pre-indented."""
    lines: list[str] = []
    depth = 0
    for n, (var, (lo, hi)) in enumerate(zip(loop_vars, bounds)):
        pad = indent * depth
        if n == 0:
            for pragma in pragmas_outer:
                lines.append(f"{pad}{pragma}")
        lines.append(f"{pad}for (long {var} = {lo}; {var} < {hi}; ++{var}) {{")
        depth += 1
    pad = indent * depth
    lines.extend(f"{pad}{line}" if line else "" for line in body)
    for d in range(depth - 1, -1, -1):
        lines.append(f"{indent * d}}}")
    return lines


def scalar_param_decls(scalar_args: Sequence[tuple[str, float]]) -> list[str]:
    return [f"    const double t_{name} = {c_literal(value)};" for name, value in scalar_args]
