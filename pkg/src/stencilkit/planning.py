"""Backend planning: symbol tables, blocking strategy, OpenMP and GPU plans.

Plans are resolved, validated parameter bundles; code generation and the
tile-plan emulator both consume them.  Resolution is deterministic and
independent of parameter-map iteration order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional

from stencilkit.analysis import Region, StencilInfo
from stencilkit.dsl import KernelDecl

GPU_TEMPLATES = ("gmem", "smem", "f4", "shift", "unroll", "semi")
GPU_3D_TEMPLATES = ("gmem", "smem", "f4")
GPU_STREAMING_TEMPLATES = ("shift", "unroll", "semi")
OMP_TEMPLATES = ("loop", "loop_blocking", "loop_blocking_collapse", "tasks_blocking", "taskloop")
OMP_BLOCKING_TEMPLATES = ("loop_blocking", "loop_blocking_collapse", "tasks_blocking")
ALGORITHMS = ("conventional", "semi")

DEFAULT_BLOCK = (16, 8, 8)
DEFAULT_PLANE = (32, 32)
ASYNC_MEMCPY_MIN_CAPABILITY = (8, 0)


class PlanError(ValueError):
    """Raised when a launch configuration cannot be resolved into a plan."""


# ---------------------------------------------------------------------------
# symbol table


@dataclass(frozen=True)
class Symbol:
    kind: str  # "grid" | "scalar" | "temp"
    is_stencil_update_dest: bool
    is_top_level: bool


@dataclass(frozen=True)
class SymbolTable:
    entries: tuple[tuple[str, Symbol], ...]

    def __getitem__(self, name: str) -> Symbol:
        for n, sym in self.entries:
            if n == name:
                return sym
        raise KeyError(name)

    def names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.entries)


def build_symbol_table(kernel: KernelDecl) -> SymbolTable:
    dests = {u.dest for u in kernel.updates}
    entries: list[tuple[str, Symbol]] = []
    for name, ptype in kernel.params:
        kind = "grid" if ptype == "grid" else "scalar"
        entries.append((name, Symbol(kind, name in dests, True)))
    for name, _ in kernel.locals:
        entries.append((name, Symbol("temp", False, False)))
    return SymbolTable(tuple(entries))


# ---------------------------------------------------------------------------
# blocking


@dataclass(frozen=True)
class BlockingPlan:
    kind: str  # blocking_3d | streaming_2_5d | blocking_2d | streaming_1_5d
    streaming_dim: Optional[int] = None  # outermost dimension when streaming


def blocking_for(dims: int, template: Optional[str]) -> BlockingPlan:
    streaming = template in GPU_STREAMING_TEMPLATES
    if dims == 3:
        return BlockingPlan("streaming_2_5d", 0) if streaming else BlockingPlan("blocking_3d")
    if dims == 2:
        return BlockingPlan("streaming_1_5d", 0) if streaming else BlockingPlan("blocking_2d")
    if dims == 1:
        return BlockingPlan("blocking_2d")  # degenerate single loop
    raise PlanError(f"unsupported kernel dimensionality {dims}")


@dataclass(frozen=True)
class MirPlan:
    symbols: SymbolTable
    blocking: BlockingPlan


def build_mir(info: StencilInfo, kernel: KernelDecl, template: Optional[str] = None) -> MirPlan:
    """Symbol table plus default blocking strategy for a launch template."""
    return MirPlan(build_symbol_table(kernel), blocking_for(info.dims, template))


# ---------------------------------------------------------------------------
# GPU plan


@dataclass(frozen=True)
class GpuPlan:
    template: str
    block: tuple[int, ...]  # (Dx, Dy, Dz) for 3D templates, one fewer in 2D
    plane: tuple[int, ...]  # (Dx, Dy) for 2.5D streaming, (Dx,) in 1.5D
    mem_type: str  # "registers" | "shared" after resolution
    prefetch: bool
    async_memcpy: bool
    compute_capability: str
    dims: int
    padding: int = 0  # accepted for configuration parity; never applied
    warnings: tuple[str, ...] = field(default=(), compare=False)

    @property
    def is_streaming(self) -> bool:
        return self.template in GPU_STREAMING_TEMPLATES


def _parse_capability(text: str) -> tuple[int, int]:
    try:
        parts = str(text).split(".")
        major = int(parts[0])
        minor = int(parts[1]) if len(parts) > 1 else 0
        return (major, minor)
    except (ValueError, IndexError):
        raise PlanError(f"malformed compute capability '{text}'") from None


def _int_tuple(value, n: int, what: str) -> tuple[int, ...]:
    if isinstance(value, int):
        value = (value,)
    if not isinstance(value, tuple) or not all(isinstance(v, int) for v in value):
        raise PlanError(f"{what} must be a tuple of integers")
    if len(value) < n:
        raise PlanError(f"{what} needs at least {n} entries, got {value}")
    out = tuple(int(v) for v in value[:n])
    if any(v < 1 for v in out):
        raise PlanError(f"{what} entries must be >= 1, got {value}")
    return out


def plan_gpu(info: StencilInfo, params: Mapping[str, object]) -> GpuPlan:
    """Resolve GPU launch parameters against a stencil summary."""
    params = dict(params)
    params.pop("scheme", None)
    warnings: list[str] = []

    template = str(params.pop("template", "gmem"))
    if template not in GPU_TEMPLATES:
        raise PlanError(
            f"unknown GPU template '{template}'; valid templates: {', '.join(GPU_TEMPLATES)}"
        )
    if template == "semi" and info.shape != "star":
        raise PlanError("the semi template supports star-shaped stencils only")

    dims = info.dims
    block = _int_tuple(params.pop("threadsPerBlock", DEFAULT_BLOCK), min(dims, 3), "threadsPerBlock")
    plane = _int_tuple(params.pop("planeDims", DEFAULT_PLANE), max(dims - 1, 1), "planeDims")

    mem_type = str(params.pop("memType", "auto"))
    if mem_type not in ("auto", "registers", "shared"):
        raise PlanError(f"unknown memType '{mem_type}'")
    if mem_type == "auto":
        mem_type = "registers" if info.shape == "star" else "shared"

    capability = str(params.pop("computeCapability", "8.0"))
    cap = _parse_capability(capability)
    async_memcpy = bool(params.pop("asyncMemcpy", False))
    if async_memcpy and cap < ASYNC_MEMCPY_MIN_CAPABILITY:
        raise PlanError(
            "asyncMemcpy requires compute capability >= "
            f"{ASYNC_MEMCPY_MIN_CAPABILITY[0]}.{ASYNC_MEMCPY_MIN_CAPABILITY[1]}, got {capability}"
        )
    prefetch = bool(params.pop("prefetch", False))
    padding = int(params.pop("padding", 0))  # parsed but inert
    if padding:
        warnings.append("padding is accepted but not applied by the generator")

    if template == "f4":
        if info.dest_extents is None:
            raise PlanError("f4 template needs known grid extents to check divisibility")
        innermost = info.dest_extents[-1]
        if innermost % 4 != 0:
            raise PlanError(f"f4 template requires the innermost extent to be divisible by 4, got {innermost}")

    if params:
        raise PlanError(f"unknown GPU parameters: {', '.join(sorted(map(str, params)))}")
    return GpuPlan(
        template,
        block,
        plane,
        mem_type,
        prefetch,
        async_memcpy,
        capability,
        dims,
        padding,
        tuple(warnings),
    )


# ---------------------------------------------------------------------------
# OpenMP plan


@dataclass(frozen=True)
class OmpPlan:
    template: str
    algorithm: str  # "conventional" | "semi"
    block: Optional[tuple[int, int]]  # present iff the template blocks
    dims: int
    warnings: tuple[str, ...] = field(default=(), compare=False)


def plan_omp(info: StencilInfo, params: Mapping[str, object]) -> OmpPlan:
    params = dict(params)
    params.pop("scheme", None)
    warnings: list[str] = []

    template = str(params.pop("template", "loop"))
    if template not in OMP_TEMPLATES:
        raise PlanError(
            f"unknown OpenMP template '{template}'; valid templates: {', '.join(OMP_TEMPLATES)}"
        )
    algorithm = str(params.pop("algorithm", "conventional"))
    if algorithm not in ALGORITHMS:
        raise PlanError(f"unknown algorithm '{algorithm}'")
    if algorithm == "semi" and info.shape != "star":
        raise PlanError("the semi algorithm supports star-shaped stencils only")

    block_raw = params.pop("blockDims", None)
    block: Optional[tuple[int, int]] = None
    if template in OMP_BLOCKING_TEMPLATES:
        if block_raw is None:
            raise PlanError(f"template '{template}' needs blockDims=(bx, by)")
        bx, by = _int_tuple(block_raw, 2, "blockDims")[:2]
        block = (bx, by)
    elif block_raw is not None:
        warnings.append(f"blockDims ignored by template '{template}'")

    if params:
        raise PlanError(f"unknown OpenMP parameters: {', '.join(sorted(map(str, params)))}")
    return OmpPlan(template, algorithm, block, info.dims, tuple(warnings))


# ---------------------------------------------------------------------------
# block enumeration shared by the emulator and coverage checks


def plan_blocks(block: tuple[int, ...], region: Region) -> list[tuple[tuple[int, int], ...]]:
    """Clamped block index boxes covering a region, lexicographic order."""
    axes: list[list[tuple[int, int]]] = []
    for (lo, hi), width in zip(region.bounds, block):
        spans = []
        start = lo
        while start < hi:
            spans.append((start, min(start + width, hi)))
            start += width
        axes.append(spans)
    out: list[tuple[tuple[int, int], ...]] = []

    def rec(axis: int, acc: list[tuple[int, int]]):
        if axis == len(axes):
            out.append(tuple(acc))
            return
        for span in axes[axis]:
            rec(axis + 1, acc + [span])

    rec(0, [])
    return out


# ---------------------------------------------------------------------------
# deterministic dump


def dump_plan(plan) -> str:
    if isinstance(plan, GpuPlan):
        lines = [
            "gpu plan",
            f"  template: {plan.template}",
            f"  block: {plan.block}",
            f"  plane: {plan.plane}",
            f"  mem_type: {plan.mem_type}",
            f"  prefetch: {plan.prefetch}",
            f"  async_memcpy: {plan.async_memcpy}",
            f"  compute_capability: {plan.compute_capability}",
            f"  dims: {plan.dims}",
        ]
    elif isinstance(plan, OmpPlan):
        lines = [
            "omp plan",
            f"  template: {plan.template}",
            f"  algorithm: {plan.algorithm}",
            f"  block: {plan.block}",
            f"  dims: {plan.dims}",
        ]
    elif isinstance(plan, MirPlan):
        lines = ["mir plan", f"  blocking: {plan.blocking.kind}"]
        if plan.blocking.streaming_dim is not None:
            lines.append(f"  streaming_dim: {plan.blocking.streaming_dim}")
        for name, sym in plan.symbols.entries:
            lines.append(
                f"  symbol {name}: kind={sym.kind} dest={sym.is_stencil_update_dest} top={sym.is_top_level}"
            )
    else:
        raise TypeError(f"cannot dump {plan!r}")
    for w in getattr(plan, "warnings", ()):
        lines.append(f"  warning: {w}")
    return "\n".join(lines) + "\n"
