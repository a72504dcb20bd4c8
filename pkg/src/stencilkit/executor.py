"""Reference execution of targets, the semi-stencil split, and GPU-plan
emulation.

Every mode evaluates each point's expression in float64 and rounds once
when storing into the grid's element type.  The conventional path follows
the parsed expression order exactly, so block/tile/streaming emulations
that move data through scratch copies without reassociating reproduce it
bit for bit; only the semi split reassociates (forward partial sums first,
then the remaining contributions).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

import numpy as np

from stencilkit._util import deep_recursion
from stencilkit.analysis import (
    BoundFor,
    BoundMap,
    BoundStmt,
    BoundSwap,
    BoundTarget,
    Region,
    bind_target,
)
from stencilkit.dsl import Binary, Const, Expr, Read, SourceUnit, Unary, Var
from stencilkit.grids import DTYPES, GridBuffer
from stencilkit.planning import GpuPlan, OmpPlan, plan_blocks


class ExecutionError(ValueError):
    pass


@dataclass(frozen=True)
class ProfileReport:
    frontend: float
    codegen: float
    execution: float

    def render(self) -> str:
        return (
            f"frontend={self.frontend:.6f}s codegen={self.codegen:.6f}s "
            f"execution={self.execution:.6f}s"
        )


# ---------------------------------------------------------------------------
# expression evaluation over a region


class _MapContext:
    """Read snapshots and bindings for one map invocation."""

    def __init__(self, bmap: BoundMap, state: dict[str, GridBuffer]):
        self.bmap = bmap
        self.state = state
        self.grid_of = dict(bmap.grid_args)  # kernel param -> state key
        self.scalars = dict(bmap.scalar_args)
        self.locals: dict[str, np.ndarray] = {}
        # float64 snapshots of every read grid (astype always copies)
        self.sources = {
            param: state[name].padded.astype(np.float64)
            for param, name in bmap.grid_args
        }
        self.orders = {param: state[name].order for param, name in bmap.grid_args}

    def read(self, node: Read, bounds: Sequence[tuple[int, int]]) -> np.ndarray:
        src = self.sources[node.grid]
        order = self.orders[node.grid]
        sl = tuple(
            slice(order + lo + off, order + hi + off)
            for (lo, hi), off in zip(bounds, node.offset)
        )
        return src[sl]

    def eval(self, expr: Expr, bounds: Sequence[tuple[int, int]]) -> np.ndarray:
        if isinstance(expr, Const):
            extents = tuple(hi - lo for lo, hi in bounds)
            return np.full(extents, expr.value, np.float64)
        if isinstance(expr, Read):
            return self.read(expr, bounds)
        if isinstance(expr, Var):
            if expr.name in self.locals:
                return self.locals[expr.name]
            if expr.name in self.scalars:
                extents = tuple(hi - lo for lo, hi in bounds)
                return np.full(extents, self.scalars[expr.name], np.float64)
            raise ExecutionError(f"unbound name '{expr.name}' in kernel expression")
        if isinstance(expr, Unary):
            return -self.eval(expr.operand, bounds)
        if isinstance(expr, Binary):
            left = self.eval(expr.left, bounds)
            right = self.eval(expr.right, bounds)
            if expr.op == "+":
                return left + right
            if expr.op == "-":
                return left - right
            if expr.op == "*":
                return left * right
            return left / right
        raise ExecutionError(f"unsupported expression {expr!r}")

    def store(self, update, bounds: Sequence[tuple[int, int]], values: np.ndarray) -> None:
        """Write one update's results, guarding against halo writes."""
        dest = self.state[self.grid_of[update.dest]]
        sl = tuple(
            slice(dest.order + lo + off, dest.order + hi + off)
            for (lo, hi), off in zip(bounds, update.offset)
        )
        if any(
            s.start < dest.order or s.stop > dim - dest.order
            for s, dim in zip(sl, dest.padded.shape)
        ):
            raise ExecutionError(
                f"update destination offset {update.offset} writes outside the interior"
            )
        dest.padded[sl] = values.reshape(tuple(s.stop - s.start for s in sl)).astype(
            DTYPES[dest.dtype]
        )

    def eval_locals(self, bounds: Sequence[tuple[int, int]]) -> None:
        self.locals = {}
        for name, local_expr in self.bmap.kernel.locals:
            self.locals[name] = self.eval(local_expr, bounds)

    def run_region(self, bounds: Sequence[tuple[int, int]], eval_update: Callable) -> None:
        """Evaluate every update over one index box and store the results."""
        if any(hi <= lo for lo, hi in bounds):
            return
        for update in self.bmap.kernel.updates:
            self.eval_locals(bounds)
            values = eval_update(self, update.expr, bounds)
            self.store(update, bounds, values)


def _eval_conventional(ctx: _MapContext, expr: Expr, bounds) -> np.ndarray:
    return ctx.eval(expr, bounds)


# ---------------------------------------------------------------------------
# the semi split: forward (negative offsets) then backward (rest)


def peel_constant_divisor(expr: Expr):
    """Split ``<sum> / <const>`` so the semi passes work on the sum."""
    if isinstance(expr, Binary) and expr.op == "/" and isinstance(expr.right, Const):
        return expr.left, expr.right.value
    return expr, None


def split_semi_terms(expr: Expr) -> tuple[list[tuple[int, Expr]], list[tuple[int, Expr]]]:
    """Split an additive expression into forward/backward signed terms.

    Forward terms read only negative offsets; backward terms read only
    non-negative offsets (the center included).  Raises when a term mixes
    both or the expression is not a sum.
    """
    terms: list[tuple[int, Expr]] = []

    def collect(node: Expr, sign: int) -> None:
        if isinstance(node, Binary) and node.op in ("+", "-"):
            collect(node.left, sign)
            collect(node.right, sign if node.op == "+" else -sign)
        else:
            terms.append((sign, node))

    collect(expr, 1)
    if len(terms) < 2:
        raise ExecutionError("semi execution requires a weighted-sum update expression")


    forward: list[tuple[int, Expr]] = []
    backward: list[tuple[int, Expr]] = []
    for sign, term in terms:
        reads = [n for n in _walk(term) if isinstance(n, Read)]
        negatives = [r for r in reads if any(c < 0 for c in r.offset)]
        positives = [r for r in reads if any(c > 0 for c in r.offset) or not any(r.offset)]
        if negatives and positives:
            raise ExecutionError(
                "semi execution needs each additive term to touch one offset sign only"
            )
        (forward if negatives else backward).append((sign, term))
    return forward, backward


def _walk(expr: Expr):
    yield expr
    if isinstance(expr, Unary):
        yield from _walk(expr.operand)
    elif isinstance(expr, Binary):
        yield from _walk(expr.left)
        yield from _walk(expr.right)


def _eval_semi(ctx: _MapContext, expr: Expr, bounds) -> np.ndarray:
    if ctx.bmap.kernel.locals:
        raise ExecutionError("semi execution does not support kernel locals")
    expr, divisor = peel_constant_divisor(expr)
    forward, backward = split_semi_terms(expr)
    extents = tuple(hi - lo for lo, hi in bounds)
    partial = np.zeros(extents, np.float64)
    for sign, term in forward:  # forward pass fills the partial-result array
        values = ctx.eval(term, bounds)
        partial += values if sign > 0 else -values
    for sign, term in backward:  # backward pass adds center/positive reach
        values = ctx.eval(term, bounds)
        partial += values if sign > 0 else -values
    if divisor is not None:
        partial = partial / divisor
    return partial


# ---------------------------------------------------------------------------
# statement execution


def _exec_stmts(
    stmts: Sequence[BoundStmt],
    state: dict[str, GridBuffer],
    run_map: Callable[[BoundMap, dict[str, GridBuffer]], None],
    bindings: dict[str, float],
) -> None:
    for stmt in stmts:
        if isinstance(stmt, BoundSwap):
            state[stmt.first], state[stmt.second] = state[stmt.second], state[stmt.first]
        elif isinstance(stmt, BoundFor):
            if isinstance(stmt.count, int):
                count = stmt.count
            else:
                if stmt.count not in bindings:
                    raise ExecutionError(f"runtime loop bound '{stmt.count}' is unbound")
                count = int(bindings[stmt.count])
            for _ in range(count):
                _exec_stmts(stmt.body, state, run_map, bindings)
        elif isinstance(stmt, BoundMap):
            run_map(stmt, state)
            _check_finite(stmt, state)
        else:
            raise ExecutionError(f"unsupported statement {stmt!r}")


def _check_finite(bmap: BoundMap, state: dict[str, GridBuffer]) -> None:
    for update in bmap.kernel.updates:
        dest = state[dict(bmap.grid_args)[update.dest]]
        if not np.isfinite(dest.interior).all():
            warnings.warn(
                f"kernel '{bmap.kernel.name}' produced non-finite values", RuntimeWarning
            )


def _prepare(
    unit_or_bound: Union[SourceUnit, BoundTarget],
    target: Optional[str],
    args,
    scheme: Optional[str],
) -> BoundTarget:
    if isinstance(unit_or_bound, BoundTarget):
        return unit_or_bound
    return bind_target(unit_or_bound, target, args, scheme)


def run_target(
    unit: Union[SourceUnit, BoundTarget],
    grids: dict[str, GridBuffer],
    bindings: Optional[dict[str, float]] = None,
    target: Optional[str] = None,
    args=None,
    scheme: Optional[str] = None,
) -> dict[str, GridBuffer]:
    """Execute a target naively: region by region, reading pre-update buffers."""
    bound = _prepare(unit, target, args, scheme)
    state = {name: buf.copy() for name, buf in grids.items()}

    def run_map(bmap: BoundMap, st: dict[str, GridBuffer]) -> None:
        ctx = _MapContext(bmap, st)
        for region in bmap.regions:
            ctx.run_region(region.bounds, _eval_conventional)

    with deep_recursion():
        _exec_stmts(bound.stmts, state, run_map, bindings or {})
    return state


def run_semi(
    unit: Union[SourceUnit, BoundTarget],
    grids: dict[str, GridBuffer],
    bindings: Optional[dict[str, float]] = None,
    target: Optional[str] = None,
    args=None,
    scheme: Optional[str] = None,
) -> dict[str, GridBuffer]:
    """Execute with the forward/backward split (star-shaped kernels only)."""
    bound = _prepare(unit, target, args, scheme)
    state = {name: buf.copy() for name, buf in grids.items()}

    def run_map(bmap: BoundMap, st: dict[str, GridBuffer]) -> None:
        if bmap.info.shape != "star":
            raise ExecutionError("semi execution supports star-shaped stencils only")
        if bmap.kernel.locals:
            raise ExecutionError("semi execution does not support kernel locals")
        ctx = _MapContext(bmap, st)
        for region in bmap.regions:
            ctx.run_region(region.bounds, _eval_semi)

    with deep_recursion():
        _exec_stmts(bound.stmts, state, run_map, bindings or {})
    return state


# ---------------------------------------------------------------------------
# GPU plan emulation


def _blocked_runner(bmap: BoundMap, state, block: tuple[int, ...], eval_update, shared: bool):
    ctx = _MapContext(bmap, state)
    for region in bmap.regions:
        for box in plan_blocks(block, region):
            if shared:
                _run_tile_box(ctx, box, eval_update)
            else:
                ctx.run_region(box, eval_update)


def _run_tile_box(ctx: _MapContext, box, eval_update) -> None:
    """Stage each read grid's block + halo into a scratch tile, then compute
    from the tile (emulating a cooperative shared-memory load + barrier)."""
    saved_sources = ctx.sources
    saved_orders = ctx.orders
    tiles: dict[str, np.ndarray] = {}
    for param, src in saved_sources.items():
        order = saved_orders[param]
        sl = tuple(slice(order + lo - order, order + hi + order) for lo, hi in box)
        tiles[param] = src[sl].copy()  # barrier point: tile fully loaded
    local_box = tuple((0, hi - lo) for lo, hi in box)
    try:
        ctx.sources = tiles
        ctx.orders = {param: saved_orders[param] for param in tiles}
        # compute against the tile, then store into the true destination
        for update in ctx.bmap.kernel.updates:
            ctx.eval_locals(local_box)
            values = eval_update(ctx, update.expr, local_box)
            ctx.store(update, box, values)
    finally:
        ctx.sources = saved_sources
        ctx.orders = saved_orders


def _f4_runner(bmap: BoundMap, state, block: tuple[int, ...], eval_update):
    """Process the innermost axis in 4-wide vector groups."""
    ctx = _MapContext(bmap, state)
    for region in bmap.regions:
        lo, hi = region.bounds[-1]
        if (hi - lo) % 4 != 0:
            raise ExecutionError(
                f"f4 emulation needs the innermost region extent divisible by 4, got {hi - lo}"
            )
        for box in plan_blocks(block, Region(region.bounds[:-1], region.tag)) if len(region.bounds) > 1 else [()]:
            for start in range(lo, hi, 4):
                bounds = (*box, (start, start + 4))
                ctx.run_region(bounds, eval_update)


class _PlaneWindow:
    """Streaming window over the outermost dimension.

    Holds full padded cross-sections of every read grid for stream offsets
    in [-r, +r]; ``shift`` rotates the copies, ``unroll`` reindexes a
    modular buffer.  Either way the compute step reads window copies only.
    """

    def __init__(self, ctx: _MapContext, radius: int, mode: str, prefetch: bool, async_memcpy: bool):
        self.ctx = ctx
        self.radius = radius
        self.mode = mode
        self.prefetch = prefetch
        self.async_memcpy = async_memcpy
        self.depth = 2 * radius + 1
        self.planes: dict[str, list[np.ndarray]] = {}
        self.base = 0  # stream index currently at window center
        self.staged: dict[str, np.ndarray] = {}

    def _load_plane(self, param: str, stream_index: int) -> np.ndarray:
        src = self.ctx.sources[param]
        order = self.ctx.orders[param]
        return src[order + stream_index].copy()

    def fill(self, start: int) -> None:
        self.base = start
        self.planes = {
            param: [self._load_plane(param, start + dz) for dz in range(-self.radius, self.radius + 1)]
            for param in self.ctx.sources
        }

    def plane(self, param: str, dz: int) -> np.ndarray:
        idx = dz + self.radius
        if self.mode == "unroll":
            # stationary modular buffer: same plane objects, rotated indexing
            idx = (self.base + dz) % self.depth
            return self._unroll_buf[param][idx]
        return self.planes[param][idx]

    def init_unroll(self, start: int) -> None:
        self.base = start
        self._unroll_buf = {
            param: [None] * self.depth for param in self.ctx.sources
        }
        for dz in range(-self.radius, self.radius + 1):
            for param in self.ctx.sources:
                self._unroll_buf[param][(start + dz) % self.depth] = self._load_plane(param, start + dz)

    def advance(self, new_center: int) -> None:
        incoming = new_center + self.radius
        if self.prefetch or self.async_memcpy:
            # the staged copy was produced while the previous plane computed
            staged = self.staged or {
                param: self._load_plane(param, incoming) for param in self.ctx.sources
            }
        else:
            staged = {param: self._load_plane(param, incoming) for param in self.ctx.sources}
        if self.mode == "unroll":
            self.base = new_center
            for param in self.ctx.sources:
                self._unroll_buf[param][(new_center + self.radius) % self.depth] = staged[param]
        else:
            self.base = new_center
            for param in self.ctx.sources:
                rotated = self.planes[param]
                rotated.pop(0)  # shift: every plane slides one slot
                rotated.append(staged[param])
        self.staged = {}

    def stage_next(self, next_center: int) -> None:
        if not (self.prefetch or self.async_memcpy):
            return
        incoming = next_center + self.radius
        # async copies are committed and waited on before use; data identical
        self.staged = {param: self._load_plane(param, incoming) for param in self.ctx.sources}


def _streaming_runner(bmap: BoundMap, state, plan: GpuPlan, eval_update):
    ctx = _MapContext(bmap, state)
    radius = bmap.info.radius
    for region in bmap.regions:
        (s_lo, s_hi) = region.bounds[0]
        rest = region.bounds[1:]
        if s_hi <= s_lo:
            continue
        window = _PlaneWindow(ctx, radius, plan.template if plan.template != "semi" else "shift",
                              plan.prefetch, plan.async_memcpy)
        if plan.template == "unroll":
            window.init_unroll(s_lo)
        else:
            window.fill(s_lo)
        for s in range(s_lo, s_hi):
            if s + 1 < s_hi:
                window.stage_next(s + 1)  # overlaps with this plane's compute
            _compute_plane(ctx, window, s, rest, eval_update)
            if s + 1 < s_hi:
                window.advance(s + 1)


def _compute_plane(ctx: _MapContext, window: _PlaneWindow, s: int, rest, eval_update) -> None:
    """Evaluate all updates for stream plane ``s`` reading window copies."""

    saved_read = ctx.read

    def window_read(node: Read, bounds) -> np.ndarray:
        order = ctx.orders[node.grid]
        plane = window.plane(node.grid, node.offset[0])
        sl = tuple(
            slice(order + lo + off, order + hi + off)
            for (lo, hi), off in zip(bounds, node.offset[1:])
        )
        return plane[sl]

    try:
        ctx.read = window_read  # type: ignore[method-assign]
        for update in ctx.bmap.kernel.updates:
            ctx.eval_locals(rest)
            values = eval_update(ctx, update.expr, rest)
            ctx.store(update, ((s, s + 1), *rest), values[np.newaxis, ...])
    finally:
        ctx.read = saved_read  # type: ignore[method-assign]


def run_tile_plan(
    unit: Union[SourceUnit, BoundTarget],
    plan: Union[GpuPlan, OmpPlan],
    grids: dict[str, GridBuffer],
    bindings: Optional[dict[str, float]] = None,
    target: Optional[str] = None,
    args=None,
    scheme: Optional[str] = None,
) -> dict[str, GridBuffer]:
    """Emulate a resolved backend plan as an abstract machine.

    The emulation moves data through the plan's buffer structure (blocks,
    scratch tiles, streamed plane windows, partial arrays) so indexing or
    halo mistakes surface as wrong numbers, while per-point arithmetic
    follows the same float64-accumulate/round-once rule as run_target.
    """
    bound = _prepare(unit, target, args, scheme)
    state = {name: buf.copy() for name, buf in grids.items()}

    if isinstance(plan, OmpPlan):
        eval_update = _eval_semi if plan.algorithm == "semi" else _eval_conventional
        block = plan.block

        def run_map_omp(bmap: BoundMap, st: dict[str, GridBuffer]) -> None:
            if plan.algorithm == "semi" and bmap.info.shape != "star":
                raise ExecutionError("semi execution supports star-shaped stencils only")
            if block is not None:
                two_d = (*block, *[10**9] * max(bmap.info.dims - 2, 0))
                _blocked_runner(bmap, st, two_d[: bmap.info.dims], eval_update, shared=False)
            else:
                ctx = _MapContext(bmap, st)
                for region in bmap.regions:
                    ctx.run_region(region.bounds, eval_update)

        with deep_recursion():
            _exec_stmts(bound.stmts, state, run_map_omp, bindings or {})
        return state

    if not isinstance(plan, GpuPlan):
        raise ExecutionError(f"cannot emulate plan {plan!r}")

    eval_update = _eval_semi if plan.template == "semi" else _eval_conventional

    def run_map(bmap: BoundMap, st: dict[str, GridBuffer]) -> None:
        dims = bmap.info.dims
        if plan.dims != dims:
            raise ExecutionError(f"plan is {plan.dims}D but kernel '{bmap.kernel.name}' is {dims}D")
        if plan.template == "semi" and bmap.info.shape != "star":
            raise ExecutionError("semi execution supports star-shaped stencils only")
        # plan.block is (Dx, Dy, Dz) with Dx innermost; logical dims are
        # outermost-first, so the tuple reverses
        logical_block = plan.block[:dims][::-1]
        if plan.template == "gmem":
            _blocked_runner(bmap, st, logical_block, eval_update, shared=False)
        elif plan.template == "smem":
            _blocked_runner(bmap, st, logical_block, eval_update, shared=True)
        elif plan.template == "f4":
            block = logical_block[: dims - 1] if dims > 1 else ()
            _f4_runner(bmap, st, block, eval_update)
        else:  # shift / unroll / semi: streaming over the outermost dimension
            if dims < 2:
                raise ExecutionError("streaming templates need a 2D or 3D kernel")
            _streaming_runner(bmap, st, plan, eval_update)

    with deep_recursion():
        _exec_stmts(bound.stmts, state, run_map, bindings or {})
    return state
