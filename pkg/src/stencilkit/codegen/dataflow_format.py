"""Neutral dataflow-program format: ``layout.df`` + ``program.df``.

The layout file describes fabric placement; the program file carries the
pattern set, communication schedule, state machine, and SSA column ops.
Both are line-oriented, deterministic, and parsed back by the simulator.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from stencilkit.analysis import BoundFor, BoundMap, BoundSwap, BoundTarget
from stencilkit.dataflow import (
    CommStep,
    DataflowError,
    Margins,
    Operand,
    PatternId,
    PatternSet,
    PeLayout,
    QuadrantAction,
    SsaOp,
    SsaProgram,
    StateMachine,
    annotate_zmax,
    build_comm_schedule,
    build_state_machine,
    lower_to_ssa,
    map_grid_to_fabric,
    sort_dependencies,
    QUADRANTS,
)
from stencilkit.dsl import SourceUnit


@dataclass(frozen=True)
class DataflowProgram:
    kernel: str
    dims: int
    radius: int
    halo_order: int
    dtype: str
    nz: int
    iterations: int
    grid_in: str
    grid_out: str
    patterns: PatternSet
    order: tuple[PatternId, ...]
    schedule: tuple[CommStep, ...]
    machine: StateMachine
    ssa: SsaProgram
    layout: PeLayout


def build_dataflow_program(
    unit: SourceUnit,
    bound: BoundTarget,
    fabric: tuple[int, int] = (757, 996),
    margins: Margins = Margins(),
    memory_budget: Optional[int] = None,
) -> DataflowProgram:
    """Lower a canonical time-loop target into a dataflow program."""
    if len(bound.stmts) != 1 or not isinstance(bound.stmts[0], BoundFor):
        raise DataflowError(
            "dataflow backend expects a target of shape 'for _ in range(T): map; swap'"
        )
    loop = bound.stmts[0]
    if not isinstance(loop.count, int):
        raise DataflowError(
            f"dataflow backend requires a compile-time iteration count, got '{loop.count}'"
        )
    body = loop.body
    if len(body) != 2 or not isinstance(body[0], BoundMap) or not isinstance(body[1], BoundSwap):
        raise DataflowError("dataflow backend expects the loop body to be one map then one swap")
    bmap = body[0]
    if len(bmap.grid_args) != 2:
        raise DataflowError("dataflow backend supports kernels over one input and one output grid")
    dest_param = bmap.kernel.updates[0].dest
    grid_out = dict(bmap.grid_args)[dest_param]
    grid_in = next(g for p, g in bmap.grid_args if p != dest_param)
    read_params = {g for g, _ in bmap.info.offsets}
    if read_params - {p for p, _ in bmap.grid_args if dict(bmap.grid_args)[p] == grid_in}:
        raise DataflowError("dataflow backend requires the kernel to read only its input grid")
    if len(bmap.regions) != 1:
        raise DataflowError("dataflow backend supports single-region maps")
    decl = unit.grid(grid_in)
    region = bmap.regions[0]
    if tuple(region.bounds) != tuple((0, e) for e in decl.shape):
        raise DataflowError("dataflow backend maps must span the whole grid")

    info = bmap.info
    if info.radius > 9:
        raise DataflowError("pattern identifiers support radii up to 9")
    patterns = annotate_zmax(info.all_offsets())
    order = tuple(sort_dependencies(patterns))
    schedule = tuple(build_comm_schedule(order))
    machine = build_state_machine(schedule, loop.count)
    ssa = lower_to_ssa(bmap.kernel, patterns)
    kwargs = {} if memory_budget is None else {"memory_budget": memory_budget}
    layout = map_grid_to_fabric(decl.shape, decl.dtype, fabric, margins, patterns, **kwargs)
    nz = decl.shape[2] if len(decl.shape) == 3 else 1
    return DataflowProgram(
        bmap.kernel.name,
        info.dims,
        info.radius,
        decl.order,
        decl.dtype,
        nz,
        loop.count,
        grid_in,
        grid_out,
        patterns,
        order,
        schedule,
        machine,
        ssa,
        layout,
    )


# ---------------------------------------------------------------------------
# emission


def render_layout(program: DataflowProgram, program_file: str = "program.df") -> str:
    lay = program.layout
    m = lay.margins
    lines = [
        "dflayout v1",
        f"fabric {lay.fabric[0]} {lay.fabric[1]}",
        f"margins north={m.north} east={m.east} south={m.south} west={m.west}",
        f"active {lay.active[0]} {lay.active[1]}",
        f"nz {lay.nz}",
        f"dtype {lay.dtype}",
        f"program {program_file}",
        f"symbol {program.grid_in} grid-in",
        f"symbol {program.grid_out} grid-out",
        "symbol iterations scalar",
    ]
    return "\n".join(lines) + "\n"


def _render_op(op: SsaOp) -> str:
    parts = [f"ssa t{op.dest} = {op.opcode}"]
    if op.const is not None:
        parts.append(repr(op.const))
    parts.extend(o.render() for o in op.operands)
    if op.opcode == "mul_const":
        parts.append(f"side={op.const_side}")
    if op.opcode == "fma":
        parts.append(f"side={op.mul_side}")
    return " ".join(parts)


def render_program(program: DataflowProgram) -> str:
    lines = [
        "dfprogram v1",
        f"kernel {program.kernel}",
        f"dims {program.dims}",
        f"radius {program.radius}",
        f"halo {program.halo_order}",
        f"dtype {program.dtype}",
        f"nz {program.nz}",
        f"iterations {program.iterations}",
        f"grid-in {program.grid_in}",
        f"grid-out {program.grid_out}",
    ]
    for pid, z in program.patterns.zmax:
        lines.append(f"pattern {pid.render()} zmax={z}")
    for pid in program.patterns.relay_only:
        lines.append(f"relay {pid.render()}")
    lines.append("order " + " ".join(p.render() for p in program.order))
    for n, step in enumerate(program.schedule, start=1):
        for quadrant, action in step.actions:
            if action is None:
                lines.append(f"step {n} {quadrant} idle")
            else:
                lines.append(
                    f"step {n} {quadrant} send={action.send_source.render()} "
                    f"dir={action.send_dir} recv={action.recv_from} into={action.recv_into.render()}"
                )
    for state in program.machine.states:
        succ = program.machine.successors(state)
        lines.append(f"state {state} next={','.join(succ) if succ else '-'}")
    for op in program.ssa.ops:
        lines.append(_render_op(op))
    lines.append(f"result {program.ssa.result.render()}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# parsing (the simulator's loader)


def _parse_operand(text: str) -> Operand:
    if text.startswith("P:"):
        _, pid, z = text.split(":")
        return Operand("pattern", pattern=PatternId.parse(pid), zshift=int(z.removeprefix("z=")))
    if text.startswith("t"):
        return Operand("temp", temp=int(text[1:]))
    return Operand("const", value=float(text))


def parse_program(text: str) -> DataflowProgram:
    fields: dict[str, str] = {}
    zmax: list[tuple[PatternId, int]] = []
    relay: list[PatternId] = []
    order: list[PatternId] = []
    steps: dict[int, dict[str, Optional[QuadrantAction]]] = {}
    states: list[str] = []
    transitions: list[tuple[str, tuple[str, ...]]] = []
    ops: list[SsaOp] = []
    result: Optional[Operand] = None

    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != "dfprogram v1":
        raise DataflowError("not a dataflow program file")
    for line in lines[1:]:
        tokens = line.split()
        head = tokens[0]
        if head in ("kernel", "dims", "radius", "halo", "dtype", "nz", "iterations", "grid-in", "grid-out"):
            fields[head] = tokens[1]
        elif head == "pattern":
            zmax.append((PatternId.parse(tokens[1]), int(tokens[2].removeprefix("zmax="))))
        elif head == "relay":
            relay.append(PatternId.parse(tokens[1]))
        elif head == "order":
            order = [PatternId.parse(t) for t in tokens[1:]]
        elif head == "step":
            n, quadrant = int(tokens[1]), tokens[2]
            steps.setdefault(n, {})
            if tokens[3] == "idle":
                steps[n][quadrant] = None
            else:
                kv = dict(t.split("=", 1) for t in tokens[3:])
                steps[n][quadrant] = QuadrantAction(
                    PatternId.parse(kv["send"]), kv["dir"], kv["recv"], PatternId.parse(kv["into"])
                )
        elif head == "state":
            name = tokens[1]
            succ_text = tokens[2].removeprefix("next=")
            succ = tuple(s for s in succ_text.split(",") if s and s != "-")
            states.append(name)
            transitions.append((name, succ))
        elif head == "ssa":
            dest = int(tokens[1][1:])
            opcode = tokens[3]
            rest = tokens[4:]
            const = None
            const_side = "L"
            mul_side = "L"
            if opcode in ("mul_const", "div_const", "fma"):
                const = float(rest[0])
                rest = rest[1:]
            operands = []
            for tok in rest:
                if tok.startswith("side="):
                    if opcode == "fma":
                        mul_side = tok.removeprefix("side=")
                    else:
                        const_side = tok.removeprefix("side=")
                else:
                    operands.append(_parse_operand(tok))
            ops.append(SsaOp(dest, opcode, const, tuple(operands), const_side, mul_side))
        elif head == "result":
            result = _parse_operand(tokens[1])
        else:
            raise DataflowError(f"unknown program line: {line}")

    if result is None:
        raise DataflowError("program has no result line")
    pattern_ids = tuple(p for p, _ in zmax if not p.is_center)
    patterns = PatternSet(pattern_ids, tuple(zmax), tuple(relay))
    schedule = []
    for n in sorted(steps):
        actions = tuple((q, steps[n].get(q)) for q in QUADRANTS)
        present = [a for _, a in actions if a is not None]
        rank = present[0].recv_into.rank if present else (0, 0)
        schedule.append(CommStep(rank, actions))
    machine = StateMachine(tuple(states), tuple(transitions), int(fields["iterations"]))
    n_temps = max((op.dest for op in ops), default=-1) + 1
    ssa = SsaProgram(tuple(ops), result, n_temps)
    placeholder_layout = PeLayout((0, 0), (0, 0), Margins(), int(fields["nz"]), fields["dtype"], 0)
    return DataflowProgram(
        fields["kernel"],
        int(fields["dims"]),
        int(fields["radius"]),
        int(fields["halo"]),
        fields["dtype"],
        int(fields["nz"]),
        int(fields["iterations"]),
        fields["grid-in"],
        fields["grid-out"],
        patterns,
        tuple(order),
        tuple(schedule),
        machine,
        ssa,
        placeholder_layout,
    )


def parse_layout(text: str) -> PeLayout:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != "dflayout v1":
        raise DataflowError("not a dataflow layout file")
    fields: dict[str, list[str]] = {}
    for line in lines[1:]:
        tokens = line.split()
        fields.setdefault(tokens[0], []).append(" ".join(tokens[1:]))
    fabric = tuple(int(v) for v in fields["fabric"][0].split())
    active = tuple(int(v) for v in fields["active"][0].split())
    mkv = dict(part.split("=") for part in fields["margins"][0].split())
    margins = Margins(int(mkv["north"]), int(mkv["east"]), int(mkv["south"]), int(mkv["west"]))
    nz = int(fields["nz"][0])
    dtype = fields["dtype"][0]
    return PeLayout(fabric, active, margins, nz, dtype, 0)  # type: ignore[arg-type]


def generate_dataflow_files(program: DataflowProgram) -> list[tuple[str, str]]:
    return [
        ("layout.df", render_layout(program)),
        ("program.df", render_program(program)),
    ]
