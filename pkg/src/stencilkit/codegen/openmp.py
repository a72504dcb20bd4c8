"""OpenMP C generation: the serial body restructured per strategy template."""

from __future__ import annotations

from stencilkit.analysis import BoundTarget
from stencilkit.codegen.serial import _collect_maps, emit_entry, emit_map_function
from stencilkit.dsl import SourceUnit
from stencilkit.planning import OmpPlan

PARALLEL_FOR = "#pragma omp parallel for default(shared) schedule(runtime)"
PARALLEL = "#pragma omp parallel default(shared)"


def generate_openmp(unit: SourceUnit, bound: BoundTarget, plan: OmpPlan) -> tuple[str, str]:
    """Returns (entry symbol, C source text) for the chosen template."""
    entry = f"run_{bound.name}"
    semi = plan.algorithm == "semi"
    maps = _collect_maps(bound.stmts)
    map_names = {id(m): f"map_{n}" for n, m in enumerate(maps)}

    if plan.template == "loop":
        map_kw = dict(pragmas=[PARALLEL_FOR])
        entry_kw: dict = {}
    elif plan.template == "loop_blocking":
        map_kw = dict(pragmas=[PARALLEL_FOR], blocking=plan.block)
        entry_kw = {}
    elif plan.template == "loop_blocking_collapse":
        map_kw = dict(pragmas=[PARALLEL_FOR + " collapse(2)"], blocking=plan.block)
        entry_kw = {}
    elif plan.template == "tasks_blocking":
        # parallel + master around the time loop, one task per block,
        # taskwait at the end of each timestep
        map_kw = dict(pragmas=[], blocking=plan.block, task_pragma="#pragma omp task")
        entry_kw = dict(time_loop_pragmas=[PARALLEL], master_pragma=True, taskwait=True)
    elif plan.template == "taskloop":
        map_kw = dict(pragmas=[PARALLEL, "#pragma omp single", "#pragma omp taskloop"])
        entry_kw = {}
    else:
        raise ValueError(f"unknown OpenMP template '{plan.template}'")

    pieces = [
        f"/* generated OpenMP stencil code: template {plan.template}, algorithm {plan.algorithm} */",
        "#include <stdint.h>",
        "#include <stdlib.h>",
        "#include <string.h>",
        "#include <omp.h>",
        "",
    ]
    for n, bmap in enumerate(maps):
        pieces.append(emit_map_function(unit, bmap, f"map_{n}", semi=semi, **map_kw))
        pieces.append("")
    pieces.append(emit_entry(unit, bound, map_names, entry, semi_partial=semi, **entry_kw))
    return entry, "\n".join(pieces) + "\n"
