"""Serial C generation: per-region loop nests over flattened grids."""

from __future__ import annotations

from typing import Sequence

from stencilkit.analysis import BoundFor, BoundMap, BoundStmt, BoundSwap, BoundTarget
from stencilkit.codegen.common import C_TYPES, IndexScheme, c_expr, c_literal, loop_nest
from stencilkit.dsl import Read, SourceUnit
from stencilkit.executor import peel_constant_divisor, split_semi_terms


def _loop_vars(n: int) -> list[str]:
    return [f"i{d}" for d in range(n)]


def emit_map_function(
    unit: SourceUnit,
    bmap: BoundMap,
    name: str,
    pragmas: Sequence[str] = (),
    blocking=None,
    semi: bool = False,
    task_pragma: str = "",
) -> str:
    """One static C function executing a single map over its regions."""
    grid_decls = {g.name: g for g in unit.grids}
    schemes = {param: IndexScheme.of(grid_decls[g]) for param, g in bmap.grid_args}
    ctype = C_TYPES[grid_decls[bmap.grid_args[0][1]].dtype]

    params = []
    for pname, _ in bmap.grid_args:
        qualifier = "" if any(u.dest == pname for u in bmap.kernel.updates) else "const "
        params.append(f"{qualifier}{ctype} *{pname}")
    if semi:
        params.append("double *partial_sum")  # forward partial sums stay double
    lines = [f"static void {name}({', '.join(params)}) {{"]
    for pname, value in bmap.scalar_args:
        lines.append(f"    const double t_{pname} = {c_literal(value)};")

    dims = bmap.info.dims
    loop_vars = _loop_vars(dims)

    def render_read(node: Read) -> str:
        return schemes[node.grid].c_read(node.grid, loop_vars, node.offset)

    def point_body() -> list[str]:
        body: list[str] = []
        for lname, lexpr in bmap.kernel.locals:
            body.append(f"const double t_{lname} = {c_expr(lexpr, render_read)};")
        for update in bmap.kernel.updates:
            dest = schemes[update.dest].c_read(update.dest, loop_vars, update.offset)
            body.append(f"{dest} = ({ctype})({c_expr(update.expr, render_read)});")
        return body

    def semi_bodies() -> tuple[list[str], list[str]]:
        update = bmap.kernel.updates[0]
        expr, divisor = peel_constant_divisor(update.expr)
        forward, backward = split_semi_terms(expr)

        def acc(terms) -> str:
            parts = []
            for sign, term in terms:
                text = c_expr(term, render_read)
                if parts:
                    parts.append(f" {'+' if sign > 0 else '-'} {text}")
                else:
                    parts.append(text if sign > 0 else f"-({text})")
            return "".join(parts) if parts else "0.0"

        partial_at = schemes[update.dest].c_read("partial_sum", loop_vars, update.offset)
        dest = schemes[update.dest].c_read(update.dest, loop_vars, update.offset)
        fwd = [f"{partial_at} = {acc(forward)};"]
        combined = f"{partial_at} + {acc(backward)}"
        if divisor is not None:
            combined = f"({combined}) / {c_literal(divisor)}"
        bwd = [f"{dest} = ({ctype})({combined});"]
        return fwd, bwd

    for region in bmap.regions:
        lines.append(f"    /* region {region.tag}: size {region.size} */")
        if semi:
            fwd, bwd = semi_bodies()
            lines.append("    /* forward pass: negative-offset contributions */")
            lines.extend(_region_loops(loop_vars, region, fwd, pragmas, blocking, task_pragma))
            lines.append("    /* backward pass: center and positive contributions */")
            lines.extend(_region_loops(loop_vars, region, bwd, pragmas, blocking, task_pragma))
        else:
            lines.extend(
                _region_loops(loop_vars, region, point_body(), pragmas, blocking, task_pragma)
            )
    lines.append("}")
    return "\n".join(lines)


def _region_loops(loop_vars, region, body, pragmas, blocking, task_pragma) -> list[str]:
    indent = "    "
    if blocking is None:
        nested = loop_nest(loop_vars, region.bounds, body, pragmas_outer=pragmas)
        return [f"{indent}{line}" if line else "" for line in nested]
    # block the outermost two dimensions; remaining dims loop inside
    bx, by = blocking
    (lo0, hi0), (lo1, hi1) = region.bounds[0], region.bounds[1]
    rest = region.bounds[2:]
    lines = []
    for pragma in pragmas:
        lines.append(f"{indent}{pragma}")
    lines.append(f"{indent}for (long b0 = {lo0}; b0 < {hi0}; b0 += {bx}) {{")
    lines.append(f"{indent}    for (long b1 = {lo1}; b1 < {hi1}; b1 += {by}) {{")
    if task_pragma:
        lines.append(f"{indent}        {task_pragma}")
    lines.append(f"{indent}        {{")
    inner_bounds = [
        ("b0", f"(b0 + {bx} < {hi0} ? b0 + {bx} : {hi0})"),
        ("b1", f"(b1 + {by} < {hi1} ? b1 + {by} : {hi1})"),
        *rest,
    ]
    nested = loop_nest(loop_vars, inner_bounds, body)
    lines.extend(f"{indent}        {line}" if line else "" for line in nested)
    lines.append(f"{indent}        }}")
    lines.append(f"{indent}    }}")
    lines.append(f"{indent}}}")
    return lines


def emit_entry(
    unit: SourceUnit,
    bound: BoundTarget,
    map_names: dict[int, str],
    entry: str,
    time_loop_pragmas: Sequence[str] = (),
    master_pragma: bool = False,
    taskwait: bool = False,
    semi_partial: bool = False,
) -> str:
    """The entry function: time loop, map calls, and pointer swaps."""
    grid_decls = {g.name: g for g in unit.grids}
    ctype = C_TYPES[grid_decls[bound.grid_params[0][1]].dtype]
    scalar_types = {
        name: ("int64_t" if ptype == "i32" else "double")
        for name, ptype in unit.target(bound.name).params
        if ptype != "grid"
    }
    params = [f"{ctype} *{g}" for _, g in bound.grid_params]
    params += [f"{scalar_types[s]} {s}" for s, _ in bound.scalar_params]
    lines = [f"void {entry}({', '.join(params)}) {{"]
    for _, g in bound.grid_params:
        lines.append(f"    {ctype} *g_{g} = {g};")
    if semi_partial:
        scheme = IndexScheme.of(grid_decls[bound.grid_params[0][1]])
        lines.append(
            f"    double *partial_sum = (double *)calloc({scheme.padded_size}, sizeof(double));"
        )

    counter = [0]

    def emit_stmts(stmts: tuple[BoundStmt, ...], depth: int) -> list[str]:
        pad = "    " * depth
        out: list[str] = []
        for stmt in stmts:
            if isinstance(stmt, BoundSwap):
                out.append(f"{pad}{{ {ctype} *swap_tmp = g_{stmt.first}; g_{stmt.first} = g_{stmt.second}; g_{stmt.second} = swap_tmp; }}")
            elif isinstance(stmt, BoundFor):
                bound_text = str(stmt.count)
                var = f"t{counter[0]}"
                counter[0] += 1
                for pragma in time_loop_pragmas:
                    out.append(f"{pad}{pragma}")
                if master_pragma:
                    out.append(f"{pad}#pragma omp master")
                    out.append(f"{pad}{{")
                    pad_inner = pad + "    "
                else:
                    pad_inner = pad
                out.append(f"{pad_inner}for (int64_t {var} = 0; {var} < {bound_text}; ++{var}) {{")
                out.extend(emit_stmts(stmt.body, depth + (2 if master_pragma else 1)))
                if taskwait:
                    out.append(f"{pad_inner}    #pragma omp taskwait")
                out.append(f"{pad_inner}}}")
                if master_pragma:
                    out.append(f"{pad}}}")
            elif isinstance(stmt, BoundMap):
                name = map_names[id(stmt)]
                args = ", ".join(f"g_{g}" for _, g in stmt.grid_args)
                if semi_partial:
                    args += ", partial_sum"
                out.append(f"{pad}{name}({args});")
        return out

    lines.extend(emit_stmts(bound.stmts, 1))
    if _has_swap(bound.stmts):
        lines.append("    /* after swaps, land each buffer's final contents under its name */")
        lines.append("    {")
        for _, g in bound.grid_params:
            scheme = IndexScheme.of(grid_decls[g])
            lines.append(
                f"        {ctype} *final_{g} = ({ctype} *)malloc({scheme.padded_size} * sizeof({ctype}));"
            )
            lines.append(f"        memcpy(final_{g}, g_{g}, {scheme.padded_size} * sizeof({ctype}));")
        for _, g in bound.grid_params:
            scheme = IndexScheme.of(grid_decls[g])
            lines.append(f"        memcpy({g}, final_{g}, {scheme.padded_size} * sizeof({ctype}));")
            lines.append(f"        free(final_{g});")
        lines.append("    }")
    if semi_partial:
        lines.append("    free(partial_sum);")
    lines.append("}")
    return "\n".join(lines)


def _has_swap(stmts: tuple[BoundStmt, ...]) -> bool:
    for stmt in stmts:
        if isinstance(stmt, BoundSwap):
            return True
        if isinstance(stmt, BoundFor) and _has_swap(stmt.body):
            return True
    return False


def generate_serial(unit: SourceUnit, bound: BoundTarget) -> tuple[str, str]:
    """Returns (entry symbol, C source text)."""
    entry = f"run_{bound.name}"
    maps = _collect_maps(bound.stmts)
    map_names = {id(m): f"map_{n}" for n, m in enumerate(maps)}
    pieces = [
        "/* generated serial stencil code */",
        "#include <stdint.h>",
        "#include <stdlib.h>",
        "#include <string.h>",
        "",
    ]
    for n, bmap in enumerate(maps):
        pieces.append(emit_map_function(unit, bmap, f"map_{n}"))
        pieces.append("")
    pieces.append(emit_entry(unit, bound, map_names, entry))
    source = "\n".join(pieces) + "\n"
    return entry, source


def _collect_maps(stmts: tuple[BoundStmt, ...]) -> list[BoundMap]:
    out: list[BoundMap] = []
    for stmt in stmts:
        if isinstance(stmt, BoundMap):
            out.append(stmt)
        elif isinstance(stmt, BoundFor):
            out.extend(_collect_maps(stmt.body))
    return out
