"""Dataflow lowering for PE-grid execution.

A stencil's 2D offset projection is renamed into quadrant index patterns
(N/E/S/W plus a center), annotated with the deepest z reach per pattern,
ordered by their relay dependencies, and turned into a per-iteration
communication schedule plus a state machine.  The update expression is
lowered to single-assignment vector ops over z-columns.

The schedule's perpendicular-send direction follows the worked
communication table (N sends east, E south, S west, W north): on a
lock-step SPMD grid each receive must be fed by the neighbor's send toward
the opposite direction, which pins the mapping.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from stencilkit._util import deep_recursion
from stencilkit.dsl import Binary, Const, Expr, KernelDecl, Read, Unary, Var

QUADRANTS = ("N", "E", "S", "W")
DIRECTIONS = ("N", "E", "S", "W")
OPPOSITE = {"N": "S", "E": "W", "S": "N", "W": "E"}
# the perpendicular send direction used for corner relays (quadrant -> direction)
PERPENDICULAR = {"N": "E", "E": "S", "S": "W", "W": "N"}
DIRECTION_NAMES = {"N": "North", "E": "East", "S": "South", "W": "West"}


class DataflowError(ValueError):
    """Raised when a kernel or layout cannot be lowered for the PE grid."""


# ---------------------------------------------------------------------------
# pattern identifiers (Algorithm: offset -> quadrant/i/j renaming)


@dataclass(frozen=True)
class PatternId:
    quadrant: Optional[str]  # None for the center pattern
    i: int = 0
    j: int = 0

    @property
    def sort_key(self) -> tuple[str, int, int]:
        return (self.quadrant or "", self.i, self.j)

    def render(self) -> str:
        if self.quadrant is None:
            return "0"
        return f"{self.quadrant}{self.i}{self.j}"

    @property
    def is_center(self) -> bool:
        return self.quadrant is None

    @property
    def rank(self) -> tuple[int, int]:
        """Per-quadrant step key: ascending (j, i)."""
        return (self.j, self.i)

    @staticmethod
    def parse(text: str) -> "PatternId":
        if text == "0":
            return CENTER
        if len(text) != 3 or text[0] not in QUADRANTS:
            raise DataflowError(f"malformed pattern id '{text}'")
        return PatternId(text[0], int(text[1]), int(text[2]))


CENTER = PatternId(None)


def pattern_id_of(x: int, y: int) -> PatternId:
    """Rename a 2D offset into its quadrant pattern identifier."""
    if x == 0 and y == 0:
        return CENTER
    if x >= 0 and y > 0:
        return PatternId("N", y, x)
    if x > 0 and y <= 0:
        return PatternId("E", x, -y)
    if x <= 0 and y < 0:
        return PatternId("S", -y, -x)
    return PatternId("W", -x, y)


def offset_of_pattern(pid: PatternId) -> tuple[int, int]:
    """Inverse of pattern_id_of for non-center patterns."""
    if pid.is_center:
        return (0, 0)
    if pid.quadrant == "N":
        return (pid.j, pid.i)
    if pid.quadrant == "E":
        return (pid.i, -pid.j)
    if pid.quadrant == "S":
        return (-pid.j, -pid.i)
    return (-pid.i, pid.j)


# ---------------------------------------------------------------------------
# pattern sets and the z-depth annotation


@dataclass(frozen=True)
class PatternSet:
    patterns: tuple[PatternId, ...]  # sorted, center excluded
    zmax: tuple[tuple[PatternId, int], ...]  # includes the center when read
    relay_only: tuple[PatternId, ...] = field(default=())

    def zmax_of(self, pid: PatternId) -> int:
        for p, z in self.zmax:
            if p == pid:
                return z
        return 0

    def all_buffers(self) -> tuple[PatternId, ...]:
        """Non-center buffers a PE must hold (communicated + relay)."""
        merged = set(self.patterns) | set(self.relay_only)
        return tuple(sorted(merged, key=lambda p: p.sort_key))


def _close_ranks(ranks: set[tuple[int, int]]) -> set[tuple[int, int]]:
    """Close a set of (j, i) step ranks under relay requirements.

    Delivering (i, j) relays through (i-1, j), and a corner hop (1, j)
    through the axis pattern (j, 0).
    """
    closed = set(ranks)
    work = list(ranks)
    while work:
        j, i = work.pop()
        need = None
        if i > 1:
            need = (j, i - 1)
        elif j != 0:
            need = (0, j)
        if need is not None and need not in closed:
            closed.add(need)
            work.append(need)
    return closed


def annotate_zmax(offsets: Sequence[tuple[int, ...]]) -> PatternSet:
    """Project offsets to patterns and record the max |z| reach of each.

    Offsets may be 2D (treated as z = 0) or 3D.  Center-projecting offsets
    need no communication but still contribute to the center's z reach.
    The pattern set is closed under relay requirements and quadrant
    rotation: every PE runs the same program, so a step rank that exists in
    one quadrant stages sends in all four, and a payload relayed through a
    buffer the kernel never reads still allocates that buffer (relay-only).
    """
    zmax: dict[PatternId, int] = {}
    for off in offsets:
        if len(off) == 2:
            x, y, z = off[0], off[1], 0
        elif len(off) == 3:
            x, y, z = off
        else:
            raise DataflowError(f"dataflow lowering supports 2D/3D offsets, got {off}")
        pid = pattern_id_of(x, y)
        zmax[pid] = max(zmax.get(pid, 0), abs(z))
    patterns = tuple(sorted((p for p in zmax if not p.is_center), key=lambda p: p.sort_key))
    ranks = _close_ranks({p.rank for p in patterns})
    relay = {
        PatternId(q, i, j)
        for q in QUADRANTS
        for (j, i) in ranks
        if PatternId(q, i, j) not in zmax
    }
    return PatternSet(
        patterns,
        tuple(sorted(zmax.items(), key=lambda item: item[0].sort_key)),
        tuple(sorted(relay, key=lambda p: p.sort_key)),
    )


# ---------------------------------------------------------------------------
# dependency ordering


def sort_dependencies(patterns: PatternSet) -> list[PatternId]:
    """Total order of non-center patterns: ascending (j, i) within each
    quadrant, quadrants interleaved per step rank."""
    pats = sorted(patterns.all_buffers(), key=lambda p: (p.rank, QUADRANTS.index(p.quadrant)))
    return pats


def step_ranks(ordered: Sequence[PatternId]) -> list[tuple[int, int]]:
    ranks: list[tuple[int, int]] = []
    for pid in ordered:
        if pid.rank not in ranks:
            ranks.append(pid.rank)
    return ranks


# ---------------------------------------------------------------------------
# communication schedule


@dataclass(frozen=True)
class QuadrantAction:
    send_source: PatternId  # CENTER or a previously received pattern
    send_dir: str  # direction the payload leaves toward
    recv_from: str  # direction the incoming payload arrives from
    recv_into: PatternId

    def send_text(self) -> str:
        return f"Send {self.send_source.render()} to {DIRECTION_NAMES[self.send_dir]}"

    def recv_text(self) -> str:
        return f"Receive from {DIRECTION_NAMES[self.recv_from]} into {self.recv_into.render()}"


@dataclass(frozen=True)
class CommStep:
    rank: tuple[int, int]  # (j, i) of the patterns handled this step
    actions: tuple[tuple[str, Optional[QuadrantAction]], ...]  # quadrant order N,E,S,W

    def action(self, quadrant: str) -> Optional[QuadrantAction]:
        for q, a in self.actions:
            if q == quadrant:
                return a
        return None

    @property
    def state_id(self) -> str:
        j, i = self.rank
        return f"{i}{j}"


def _send_for(pid: PatternId) -> tuple[PatternId, str]:
    """Source buffer and direction for a pattern's delivering send."""
    d = pid.quadrant
    assert d is not None
    if pid.i == 1 and pid.j == 0:
        return CENTER, OPPOSITE[d]
    if pid.i == 1 and pid.j != 0:
        return PatternId(d, pid.j, 0), PERPENDICULAR[d]
    return PatternId(d, pid.i - 1, pid.j), OPPOSITE[d]


def build_comm_schedule(ordered: Sequence[PatternId]) -> list[CommStep]:
    """One lock-step communication step per per-quadrant rank."""
    steps: list[CommStep] = []
    for rank in step_ranks(ordered):
        actions: list[tuple[str, Optional[QuadrantAction]]] = []
        for quadrant in QUADRANTS:
            pid = PatternId(quadrant, rank[1], rank[0])
            if pid not in ordered:
                actions.append((quadrant, None))
                continue
            source, direction = _send_for(pid)
            actions.append(
                (quadrant, QuadrantAction(source, direction, quadrant, pid))
            )
        steps.append(CommStep(rank, tuple(actions)))
    return steps


# ---------------------------------------------------------------------------
# state machine


STATE_SETUP = "STATE_SETUP"
STATE_TEARDOWN = "STATE_TEARDOWN"
STATE_EXIT = "STATE_EXIT"
STATE_UPDATE = "STATE_UPDATE_STENCIL"
STATE_CHECK = "STATE_ITERATION_CHECK"


@dataclass(frozen=True)
class StateMachine:
    states: tuple[str, ...]
    transitions: tuple[tuple[str, tuple[str, ...]], ...]
    iterations: int

    def successors(self, state: str) -> tuple[str, ...]:
        for name, succ in self.transitions:
            if name == state:
                return succ
        raise KeyError(state)

    @property
    def first_comm_state(self) -> str:
        for name in self.states:
            if name.startswith("STATE_PREP_TRANS_"):
                return name
        return STATE_UPDATE


def build_state_machine(schedule: Sequence[CommStep], iterations: int) -> StateMachine:
    """Lifecycle states, one PREP/TRANS pair per schedule step, and the
    update/iteration-check loop with a compile-time bound."""
    if iterations < 1:
        raise DataflowError(f"iteration count must be >= 1, got {iterations}")
    states: list[str] = [STATE_SETUP]
    for step in schedule:
        states.append(f"STATE_PREP_TRANS_{step.state_id}")
        states.append(f"STATE_TRANS_{step.state_id}")
    states.extend([STATE_UPDATE, STATE_CHECK, STATE_TEARDOWN, STATE_EXIT])

    loop_head = states[1] if schedule else STATE_UPDATE
    transitions: list[tuple[str, tuple[str, ...]]] = []
    for idx, name in enumerate(states):
        if name == STATE_CHECK:
            transitions.append((name, (loop_head, STATE_TEARDOWN)))
        elif name == STATE_EXIT:
            transitions.append((name, ()))
        else:
            transitions.append((name, (states[idx + 1],)))
    return StateMachine(tuple(states), tuple(transitions), iterations)


# ---------------------------------------------------------------------------
# SSA lowering of the update expression over z-columns


@dataclass(frozen=True)
class Operand:
    kind: str  # "pattern" | "temp" | "const"
    pattern: Optional[PatternId] = None
    zshift: int = 0
    temp: int = -1
    value: float = 0.0

    def render(self) -> str:
        if self.kind == "pattern":
            return f"P:{self.pattern.render()}:z={self.zshift}"
        if self.kind == "temp":
            return f"t{self.temp}"
        return repr(self.value)


@dataclass(frozen=True)
class SsaOp:
    dest: int
    opcode: str  # mul_const | div_const | add | sub | fma | neg
    const: Optional[float]
    operands: tuple[Operand, ...]
    const_side: str = "L"  # which side the constant sat on, for re-expansion
    mul_side: str = "L"  # for fma: which add operand held the multiply

    def render(self) -> str:
        parts = [f"t{self.dest} = {self.opcode}"]
        if self.const is not None:
            parts.append(repr(self.const))
        parts.extend(op.render() for op in self.operands)
        return " ".join(parts)


@dataclass(frozen=True)
class SsaProgram:
    ops: tuple[SsaOp, ...]
    result: Operand
    n_temps: int


def _substitute_locals(kernel: KernelDecl) -> Expr:
    """Inline kernel locals into the (single) update expression."""
    if len(kernel.updates) != 1:
        raise DataflowError("dataflow lowering supports kernels with exactly one update")
    env: dict[str, Expr] = {}

    def subst(expr: Expr) -> Expr:
        if isinstance(expr, Var):
            if expr.name not in env:
                raise DataflowError(
                    f"dataflow lowering cannot bind scalar '{expr.name}'; use literal coefficients"
                )
            return env[expr.name]
        if isinstance(expr, Unary):
            return Unary(expr.op, subst(expr.operand))
        if isinstance(expr, Binary):
            return Binary(expr.op, subst(expr.left), subst(expr.right))
        return expr

    for name, expr in kernel.locals:
        env[name] = subst(expr)
    return subst(kernel.updates[0].expr)


def lower_to_ssa(kernel: KernelDecl, patterns: PatternSet) -> SsaProgram:
    """Flatten the update expression into single-assignment column ops.

    Re-expanding the program reproduces the (local-inlined) expression tree
    exactly; fused multiply-adds record which side held the multiply.
    """
    with deep_recursion():
        return _lower_to_ssa(kernel, patterns)


def _lower_to_ssa(kernel: KernelDecl, patterns: PatternSet) -> SsaProgram:
    expr = _substitute_locals(kernel)
    ops: list[SsaOp] = []
    counter = [0]

    def fresh() -> int:
        counter[0] += 1
        return counter[0] - 1

    def emit(opcode: str, const: Optional[float], operands: tuple[Operand, ...], **kw) -> Operand:
        dest = fresh()
        ops.append(SsaOp(dest, opcode, const, operands, **kw))
        return Operand("temp", temp=dest)

    def as_operand(expr: Expr) -> Operand:
        if isinstance(expr, Const):
            raise DataflowError("constant-only subexpressions are not supported in dataflow kernels")
        if isinstance(expr, Read):
            off = expr.offset if len(expr.offset) == 3 else (*expr.offset, 0)
            pid = pattern_id_of(off[0], off[1])
            buffers = {CENTER, *patterns.all_buffers()}
            if pid not in buffers:
                raise DataflowError(f"read {expr.offset} has no pattern buffer")
            return Operand("pattern", pattern=pid, zshift=off[2])
        if isinstance(expr, Unary):
            return emit("neg", None, (as_operand(expr.operand),))
        if isinstance(expr, Binary):
            return lower_binary(expr)
        raise DataflowError(f"unsupported expression node {expr!r}")

    def lower_binary(expr: Binary) -> Operand:
        if expr.op == "*":
            if isinstance(expr.left, Const):
                return emit("mul_const", expr.left.value, (as_operand(expr.right),), const_side="L")
            if isinstance(expr.right, Const):
                return emit("mul_const", expr.right.value, (as_operand(expr.left),), const_side="R")
            raise DataflowError("dataflow lowering requires one constant multiplicand")
        if expr.op == "/":
            if isinstance(expr.right, Const):
                return emit("div_const", expr.right.value, (as_operand(expr.left),))
            raise DataflowError("dataflow lowering supports constant divisors only")
        if expr.op == "+":
            # fuse <const * x> on either side into an fma
            if isinstance(expr.left, Binary) and expr.left.op == "*" and isinstance(expr.left.left, Const):
                mul = expr.left
                return emit(
                    "fma", mul.left.value, (as_operand(mul.right), as_operand(expr.right)), mul_side="L"
                )
            if isinstance(expr.right, Binary) and expr.right.op == "*" and isinstance(expr.right.left, Const):
                mul = expr.right
                return emit(
                    "fma", mul.left.value, (as_operand(mul.right), as_operand(expr.left)), mul_side="R"
                )
            return emit("add", None, (as_operand(expr.left), as_operand(expr.right)))
        if expr.op == "-":
            return emit("sub", None, (as_operand(expr.left), as_operand(expr.right)))
        raise DataflowError(f"unsupported operator '{expr.op}'")

    result = as_operand(expr)
    return SsaProgram(tuple(ops), result, counter[0])


def expand_ssa(program: SsaProgram) -> Expr:
    """Rebuild the expression tree the SSA program encodes."""
    with deep_recursion():
        return _expand_ssa(program)


def _expand_ssa(program: SsaProgram) -> Expr:
    built: dict[int, Expr] = {}

    def of(op: Operand) -> Expr:
        if op.kind == "temp":
            return built[op.temp]
        if op.kind == "const":
            return Const(op.value)
        assert op.pattern is not None
        x, y = offset_of_pattern(op.pattern)
        # expansion is used on 2D or 3D kernels; arity recovered from zshift use
        return Read("", (x, y, op.zshift))

    for op in program.ops:
        if op.opcode == "mul_const":
            inner = of(op.operands[0])
            expr = (
                Binary("*", Const(op.const), inner)
                if op.const_side == "L"
                else Binary("*", inner, Const(op.const))
            )
        elif op.opcode == "div_const":
            expr = Binary("/", of(op.operands[0]), Const(op.const))
        elif op.opcode == "neg":
            expr = Unary("neg", of(op.operands[0]))
        elif op.opcode == "add":
            expr = Binary("+", of(op.operands[0]), of(op.operands[1]))
        elif op.opcode == "sub":
            expr = Binary("-", of(op.operands[0]), of(op.operands[1]))
        elif op.opcode == "fma":
            mul = Binary("*", Const(op.const), of(op.operands[0]))
            other = of(op.operands[1])
            expr = Binary("+", mul, other) if op.mul_side == "L" else Binary("+", other, mul)
        else:
            raise DataflowError(f"unknown opcode '{op.opcode}'")
        built[op.dest] = expr
    return of(program.result)


def ssa_matches(program: SsaProgram, kernel: KernelDecl) -> bool:
    """Structural equality of the re-expanded SSA with the kernel update."""
    with deep_recursion():
        return _expand_ssa(program) == _normalize_reads(_substitute_locals(kernel))


def normalize_reads(expr: Expr) -> Expr:
    """Strip grid names and pad offsets to 3D for structural comparison."""
    with deep_recursion():
        return _normalize_reads(expr)


def _normalize_reads(expr: Expr) -> Expr:
    if isinstance(expr, Read):
        off = expr.offset if len(expr.offset) == 3 else (*expr.offset, 0)
        return Read("", off)
    if isinstance(expr, Unary):
        return Unary(expr.op, _normalize_reads(expr.operand))
    if isinstance(expr, Binary):
        return Binary(expr.op, _normalize_reads(expr.left), _normalize_reads(expr.right))
    return expr


# ---------------------------------------------------------------------------
# PE-grid layout


@dataclass(frozen=True)
class Margins:
    north: int = 3
    east: int = 1
    south: int = 4
    west: int = 1


DEFAULT_FABRIC = (757, 996)
DEFAULT_PE_MEMORY = 48 * 1024  # bytes of private PE memory


@dataclass(frozen=True)
class PeLayout:
    fabric: tuple[int, int]
    active: tuple[int, int]  # (Nx, Ny)
    margins: Margins
    nz: int
    dtype: str
    column_buffers: int  # z-columns resident per PE (grids + patterns + staging)

    @property
    def bytes_per_pe(self) -> int:
        itemsize = 4 if self.dtype == "f32" else 8
        return self.column_buffers * self.nz * itemsize


def map_grid_to_fabric(
    extents: Sequence[int],
    dtype: str,
    fabric: tuple[int, int] = DEFAULT_FABRIC,
    margins: Margins = Margins(),
    patterns: Optional[PatternSet] = None,
    memory_budget: int = DEFAULT_PE_MEMORY,
) -> PeLayout:
    """Place a grid onto the PE fabric: X/Y across PEs, Z in PE memory.

    The X extent plus the north/south buffer margins must fit the first
    fabric axis and the Y extent plus east/west margins the second.
    """
    if len(extents) == 2:
        nx, ny, nz = extents[0], extents[1], 1
    elif len(extents) == 3:
        nx, ny, nz = extents
    else:
        raise DataflowError(f"dataflow mapping needs a 2D or 3D grid, got {tuple(extents)}")
    need_x = nx + margins.north + margins.south
    need_y = ny + margins.east + margins.west
    if need_x > fabric[0] or need_y > fabric[1]:
        raise DataflowError(
            f"grid {tuple(extents)} plus margins needs a {need_x}x{need_y} fabric, "
            f"only {fabric[0]}x{fabric[1]} available"
        )
    n_buffers = 2 + 2  # in + out grid columns, send/receive staging
    if patterns is not None:
        n_buffers += len(patterns.all_buffers())
    layout = PeLayout(tuple(fabric), (nx, ny), margins, nz, dtype, n_buffers)
    if layout.bytes_per_pe > memory_budget:
        raise DataflowError(
            f"z-column of length {nz} needs {layout.bytes_per_pe} bytes per PE, "
            f"budget is {memory_budget}"
        )
    return layout


# ---------------------------------------------------------------------------
# deterministic DFIR dump


def dump_dataflow(
    patterns: PatternSet,
    ordered: Sequence[PatternId],
    schedule: Sequence[CommStep],
    machine: StateMachine,
    layout: Optional[PeLayout] = None,
) -> str:
    lines = ["dataflow ir"]
    rendered = " ".join(p.render() for p in patterns.patterns)
    lines.append(f"  patterns: {rendered or '(none)'}")
    if patterns.relay_only:
        lines.append("  relay-only: " + " ".join(p.render() for p in patterns.relay_only))
    for pid, z in patterns.zmax:
        lines.append(f"  zmax {pid.render()}: {z}")
    lines.append("  order: " + " ".join(p.render() for p in ordered))
    lines.append("  schedule:")
    header = "    step |" + "|".join(f" {q}: send / receive " for q in QUADRANTS)
    lines.append(header)
    for n, step in enumerate(schedule, start=1):
        cells = []
        for quadrant in QUADRANTS:
            action = step.action(quadrant)
            cells.append(f" {action.send_text()} / {action.recv_text()} " if action else " - ")
        lines.append(f"    {n:4d} |" + "|".join(cells))
    lines.append(f"  states ({len(machine.states)}):")
    for state in machine.states:
        succ = machine.successors(state)
        lines.append(f"    {state} -> {', '.join(succ) if succ else '(end)'}")
    if layout is not None:
        lines.append(
            f"  layout: fabric={layout.fabric[0]}x{layout.fabric[1]} "
            f"active={layout.active[0]}x{layout.active[1]} nz={layout.nz} "
            f"margins=N{layout.margins.north}/E{layout.margins.east}/S{layout.margins.south}/W{layout.margins.west}"
        )
    return "\n".join(lines) + "\n"
