"""Command-line driver: compile, inspect, run, simulate, diff.

Exit codes: 0 success, 1 diagnostics, 2 tolerance failure, 3 internal error.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path
from typing import Optional

from stencilkit.analysis import (
    AnalysisError,
    BoundTarget,
    bind_target,
    dump_analysis,
)
from stencilkit.codegen import generate
from stencilkit.codegen.dataflow_format import build_dataflow_program
from stencilkit.dataflow import DataflowError, dump_dataflow
from stencilkit.diagnostics import DslError
from stencilkit.dsl import SourceUnit, print_source
from stencilkit.executor import (
    ExecutionError,
    ProfileReport,
    run_semi,
    run_target,
    run_tile_plan,
)
from stencilkit.grids import GridBuffer, compare, fill_loguniform, load_grid, save_grid
from stencilkit.parser import parse_source, validate
from stencilkit.planning import PlanError, dump_plan, plan_gpu, plan_omp
from stencilkit.simulator import SimulationError, load_program

DEFAULT_MAX_TOL = 1e-7
DEFAULT_RMSD_TOL = 1e-8


class ToleranceExceeded(Exception):
    pass


class CliError(Exception):
    """User-facing problem; printed as a diagnostic, exit code 1."""


def _load_unit(path: str) -> SourceUnit:
    text = Path(path).read_text()
    unit = parse_source(text, path)
    diags = validate(unit)
    errors = [d for d in diags if d.severity == "error"]
    for diag in diags:
        print(diag.render(), file=sys.stderr)
    if errors:
        raise DslError(errors)
    return unit


def _int_tuple(text: str) -> tuple[int, ...]:
    return tuple(int(part) for part in text.split(","))


def _backend_params(unit: SourceUnit, args: argparse.Namespace, backend: str) -> dict:
    """Launch-block parameters overridden by command-line flags."""
    params: dict = {}
    if unit.launch is not None and unit.launch.kind == backend:
        params.update(unit.launch.param_map())
    if getattr(args, "template", None):
        params["template"] = args.template
    if getattr(args, "algorithm", None):
        params["algorithm"] = args.algorithm
    if getattr(args, "block", None):
        key = "threadsPerBlock" if backend == "gpu" else "blockDims"
        params[key] = _int_tuple(args.block)
    if getattr(args, "plane", None):
        params["planeDims"] = _int_tuple(args.plane)
    if getattr(args, "mem_type", None):
        params["memType"] = args.mem_type
    if getattr(args, "prefetch", False):
        params["prefetch"] = True
    if getattr(args, "async_memcpy", False):
        params["asyncMemcpy"] = True
    if getattr(args, "capability", None):
        params["computeCapability"] = args.capability
    if getattr(args, "scheme", None):
        params["scheme"] = args.scheme
    return params


def _launch_args(unit: SourceUnit, target_name: str, iters: Optional[int]) -> Optional[list]:
    if unit.launch is None or unit.launch.target != target_name:
        return None
    args = list(unit.launch.args)
    if iters is not None:
        target = unit.target(target_name)
        scalar_slots = [i for i, (_, t) in enumerate(target.params) if t != "grid"]
        if len(scalar_slots) != 1:
            raise CliError("--iters needs a target with exactly one scalar parameter")
        args[scalar_slots[0]] = iters
    return args


def _bind(unit: SourceUnit, args: argparse.Namespace, backend: str, freeze: bool) -> BoundTarget:
    target_name = getattr(args, "target", None)
    if target_name is None:
        if unit.launch is not None:
            target_name = unit.launch.target
        elif len(unit.targets) == 1:
            target_name = unit.targets[0].name
        else:
            raise CliError("multiple targets; select one with --target")
    call_args = _launch_args(unit, target_name, getattr(args, "iters", None))
    scheme = getattr(args, "scheme", None)
    if scheme is None and unit.launch is not None:
        scheme = unit.launch.param_map().get("scheme")
    return bind_target(unit, target_name, call_args, scheme, freeze_loop_bounds=freeze)


def _resolve_plan(unit: SourceUnit, bound: BoundTarget, backend: str, params: dict):
    if backend not in ("omp", "gpu"):
        return None
    maps = [s for s in _walk_bound(bound)]
    if not maps:
        raise CliError("target has no map invocation to plan")
    info = maps[0].info
    return plan_gpu(info, params) if backend == "gpu" else plan_omp(info, params)


def _walk_bound(bound: BoundTarget):
    from stencilkit.analysis import BoundFor, BoundMap

    def rec(stmts):
        for stmt in stmts:
            if isinstance(stmt, BoundMap):
                yield stmt
            elif isinstance(stmt, BoundFor):
                yield from rec(stmt.body)

    return rec(bound.stmts)


# ---------------------------------------------------------------------------
# commands


def cmd_compile(args: argparse.Namespace) -> int:
    t0 = time.perf_counter()
    unit = _load_unit(args.file)
    backend = args.backend or (unit.launch.kind if unit.launch else "seq")
    bound = _bind(unit, args, backend, freeze=(backend == "dataflow"))
    params = _backend_params(unit, args, backend)
    t1 = time.perf_counter()

    dataflow_program = None
    plan = None
    if backend == "dataflow":
        fabric = _int_tuple(args.fabric) if args.fabric else (757, 996)
        dataflow_program = build_dataflow_program(unit, bound, fabric)  # type: ignore[arg-type]
    else:
        plan = _resolve_plan(unit, bound, backend, params)
    artifact = generate(unit, bound, backend, plan, dataflow_program)
    t2 = time.perf_counter()

    outdir = Path(args.outdir)
    written = artifact.write(outdir)
    stem = bound.name.removeprefix("target_")
    if args.save_temps:
        (outdir / f"{stem}.vhir.txt").write_text(print_source(unit))
        (outdir / f"{stem}.hir.txt").write_text(dump_analysis(unit, bound))
        if plan is not None:
            (outdir / f"{stem}.plan.txt").write_text(dump_plan(plan))
        if dataflow_program is not None:
            (outdir / f"{stem}.dfir.txt").write_text(
                dump_dataflow(
                    dataflow_program.patterns,
                    dataflow_program.order,
                    dataflow_program.schedule,
                    dataflow_program.machine,
                    dataflow_program.layout,
                )
            )
    if args.print_code:
        for rel, text in artifact.files:
            print(f"// --- {rel} ---" if not rel.endswith(".df") else f"# --- {rel} ---")
            print(text, end="")
    for path in written:
        print(f"wrote {path}", file=sys.stderr)
    if plan is not None:
        for warning in plan.warnings:
            print(f"warning: {warning}", file=sys.stderr)
    if args.profile:
        report = ProfileReport(t1 - t0, t2 - t1, 0.0)
        print(report.render())
    return 0


def cmd_inspect(args: argparse.Namespace) -> int:
    unit = _load_unit(args.file)
    backend = args.backend or (unit.launch.kind if unit.launch else "seq")
    bound = _bind(unit, args, backend, freeze=True)
    print(dump_analysis(unit, bound), end="")
    if args.plan and backend in ("omp", "gpu"):
        params = _backend_params(unit, args, backend)
        plan = _resolve_plan(unit, bound, backend, params)
        print(dump_plan(plan), end="")
    if args.dfir:
        program = build_dataflow_program(unit, bound)
        print(
            dump_dataflow(
                program.patterns, program.order, program.schedule, program.machine, program.layout
            ),
            end="",
        )
    return 0


def _initial_grids(unit: SourceUnit, args: argparse.Namespace) -> dict[str, GridBuffer]:
    grids: dict[str, GridBuffer] = {}
    for decl in unit.grids:
        grids[decl.name] = GridBuffer.zeros(decl.shape, decl.order, decl.dtype)
    for spec in args.grid or []:
        name, _, path = spec.partition("=")
        if not path:
            raise CliError(f"--grid expects name=path, got '{spec}'")
        if name not in grids:
            raise CliError(f"unknown grid '{name}'")
        loaded = load_grid(path)
        decl = unit.grid(name)
        if loaded.shape != decl.shape or loaded.order != decl.order:
            raise CliError(
                f"grid file {path} is shape {loaded.shape}/order {loaded.order}, "
                f"declared {decl.shape}/order {decl.order}"
            )
        grids[name] = loaded
    if args.random_init is not None:
        bound_args = unit.launch.args if unit.launch else ()
        first = next((a for a in bound_args if isinstance(a, str) and a in grids), None)
        if first is None:
            first = unit.grids[0].name
        fill_loguniform(grids[first], args.random_init)
    return grids


def cmd_run(args: argparse.Namespace) -> int:
    t0 = time.perf_counter()
    unit = _load_unit(args.file)
    backend = args.backend or (unit.launch.kind if unit.launch else "seq")
    if backend == "dataflow":
        raise CliError("use the 'simulate' command for dataflow programs")
    bound = _bind(unit, args, backend, freeze=True)
    params = _backend_params(unit, args, backend)
    plan = _resolve_plan(unit, bound, backend, params)
    t1 = time.perf_counter()

    grids = _initial_grids(unit, args)
    if backend == "seq":
        if getattr(args, "algorithm", None) == "semi":
            result = run_semi(bound, grids)
        else:
            result = run_target(bound, grids)
    else:
        result = run_tile_plan(bound, plan, grids)
    t2 = time.perf_counter()

    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    for name, buf in sorted(result.items()):
        save_grid(outdir / f"{name}.grid", buf)
        print(f"wrote {outdir / f'{name}.grid'}", file=sys.stderr)

    code = 0
    if args.oracle:
        reference = run_target(bound, grids)
        main = bound.grid_params[0][1]
        report = compare(reference[main], result[main])
        print(report.render())
        if not report.within(args.max_tol, args.rmsd_tol):
            code = 2
    if args.profile:
        print(ProfileReport(t1 - t0, 0.0, t2 - t1).render())
    return code


def cmd_simulate(args: argparse.Namespace) -> int:
    directory = Path(args.dir)
    grid: Optional[GridBuffer] = None
    if args.grid:
        grid = load_grid(args.grid)
    if grid is None:
        raise CliError("simulate needs --grid <path> with the input grid")
    simulator = load_program(directory, grid)
    grids_out, trace = simulator.run_to_exit()
    outdir = Path(args.outdir) if args.outdir else directory
    outdir.mkdir(parents=True, exist_ok=True)
    for name, buf in sorted(grids_out.items()):
        save_grid(outdir / f"{name}.out.grid", buf)
        print(f"wrote {outdir / f'{name}.out.grid'}", file=sys.stderr)
    print(f"states entered: {len(trace.steps)}; timer steps: {trace.timer_steps}")
    if args.trace:
        lines = [
            f"step {n}: {rec.state} sends={len(rec.sends)} receives={len(rec.receives)} "
            f"dropped={rec.dropped_payloads}"
            for n, rec in enumerate(trace.steps)
        ]
        (outdir / "trace.txt").write_text("\n".join(lines) + "\n")
        print(f"wrote {outdir / 'trace.txt'}", file=sys.stderr)
    return 0


def cmd_diff(args: argparse.Namespace) -> int:
    a = load_grid(args.a)
    b = load_grid(args.b)
    report = compare(a, b)
    print(report.render())
    if args.max_tol is not None or args.rmsd_tol is not None:
        max_tol = args.max_tol if args.max_tol is not None else DEFAULT_MAX_TOL
        rmsd_tol = args.rmsd_tol if args.rmsd_tol is not None else DEFAULT_RMSD_TOL
        if not report.within(max_tol, rmsd_tol):
            return 2
    return 0


# ---------------------------------------------------------------------------
# argument parsing


def _add_backend_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--backend", choices=["seq", "omp", "gpu", "dataflow"])
    sub.add_argument("--target", help="target to compile when several exist")
    sub.add_argument("--template", help="backend template name")
    sub.add_argument("--algorithm", choices=["conventional", "semi"])
    sub.add_argument("--block", help="block dims, e.g. 16,8,8")
    sub.add_argument("--plane", help="plane dims for 2.5D streaming, e.g. 32,32")
    sub.add_argument("--mem-type", choices=["auto", "registers", "shared"], dest="mem_type")
    sub.add_argument("--prefetch", action="store_true")
    sub.add_argument("--async-memcpy", action="store_true", dest="async_memcpy")
    sub.add_argument("--capability", help="GPU compute capability, e.g. 9.0")
    sub.add_argument("--scheme", choices=["unified", "cross_product", "slab7"])
    sub.add_argument("--iters", type=int, help="override the iteration count argument")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stencilkit", description=__doc__)
    commands = parser.add_subparsers(dest="command", required=True)

    c = commands.add_parser("compile", help="emit backend source for a .stpy file")
    c.add_argument("file")
    _add_backend_flags(c)
    c.add_argument("--fabric", help="dataflow fabric dims, e.g. 757,996")
    c.add_argument("-o", "--outdir", default="out")
    c.add_argument("--print-code", action="store_true", dest="print_code")
    c.add_argument("--save-temps", action="store_true", dest="save_temps")
    c.add_argument("--profile", action="store_true")
    c.set_defaults(func=cmd_compile)

    i = commands.add_parser("inspect", help="dump stencil analysis, plans, and dataflow IR")
    i.add_argument("file")
    _add_backend_flags(i)
    i.add_argument("--plan", action="store_true")
    i.add_argument("--dfir", action="store_true")
    i.set_defaults(func=cmd_inspect)

    r = commands.add_parser("run", help="execute via the reference executor / plan emulator")
    r.add_argument("file")
    _add_backend_flags(r)
    r.add_argument("--grid", action="append", help="name=path of an input grid file")
    r.add_argument("--random-init", type=int, dest="random_init", help="seed for log-uniform input")
    r.add_argument("--oracle", action="store_true", help="compare against the reference executor")
    r.add_argument("--max-tol", type=float, default=DEFAULT_MAX_TOL, dest="max_tol")
    r.add_argument("--rmsd-tol", type=float, default=DEFAULT_RMSD_TOL, dest="rmsd_tol")
    r.add_argument("-o", "--outdir", default="out")
    r.add_argument("--profile", action="store_true")
    r.set_defaults(func=cmd_run)

    s = commands.add_parser("simulate", help="run a compiled dataflow program")
    s.add_argument("dir", help="directory containing layout.df and program.df")
    s.add_argument("--grid", help="path of the input grid file")
    s.add_argument("--trace", action="store_true")
    s.add_argument("-o", "--outdir")
    s.set_defaults(func=cmd_simulate)

    d = commands.add_parser("diff", help="compare two grid files")
    d.add_argument("a")
    d.add_argument("b")
    d.add_argument("--max-tol", type=float, default=None, dest="max_tol")
    d.add_argument("--rmsd-tol", type=float, default=None, dest="rmsd_tol")
    d.set_defaults(func=cmd_diff)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DslError as exc:
        for diag in exc.diagnostics:
            print(diag.render(), file=sys.stderr)
        return 1
    except (AnalysisError, PlanError, DataflowError, ExecutionError, CliError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SimulationError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 3
    except Exception as exc:  # pragma: no cover - last resort
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
