"""Stencil analysis: offset sets, shape classes, map desugaring, regions.

This layer turns a validated kernel into a StencilInfo (shape, radius,
arithmetic cost) and a target's map invocations into concrete loop domains
decomposed into disjoint regions.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

from stencilkit.affine import Affine
from stencilkit.dsl import (
    Binary,
    ForRange,
    GridDecl,
    KernelDecl,
    MapInvoke,
    MapValue,
    Read,
    ShapeRef,
    SourceUnit,
    Swap,
    Unary,
    walk_expr,
)

DIM_NAMES = ("i", "j", "k")
SCHEMES = ("unified", "cross_product", "slab7")


class AnalysisError(ValueError):
    """Raised for malformed map specs or unsupported analysis requests."""


# ---------------------------------------------------------------------------
# kernel analysis


@dataclass(frozen=True)
class StencilInfo:
    """Structural summary of one kernel."""

    dims: int
    radius: int
    shape: str  # "star" | "box" | "other"
    offsets: tuple[tuple[str, tuple[tuple[int, ...], ...]], ...]  # per read grid
    flops_per_point: int
    dest: str
    dest_extents: Optional[tuple[int, ...]] = None
    dtype: str = "f32"

    def all_offsets(self) -> tuple[tuple[int, ...], ...]:
        merged = {off for _, offs in self.offsets for off in offs}
        return tuple(sorted(merged))


def _classify(offsets: Sequence[tuple[int, ...]], dims: int, radius: int) -> str:
    if all(sum(1 for c in off if c != 0) <= 1 for off in offsets):
        return "star"
    cube = set(itertools.product(range(-radius, radius + 1), repeat=dims))
    if set(offsets) == cube:
        return "box"
    return "other"


def analyze_kernel(
    kernel: KernelDecl, grids: Optional[dict[str, GridDecl]] = None
) -> StencilInfo:
    """Build the stencil summary for a validated kernel.

    ``grids`` optionally binds grid parameter names to declarations so the
    destination extents and dtype can be recorded for later planning.
    """
    per_grid: dict[str, set[tuple[int, ...]]] = {}
    flops = 0
    exprs = [expr for _, expr in kernel.locals] + [u.expr for u in kernel.updates]
    for expr in exprs:
        for node in walk_expr(expr):
            if isinstance(node, Read):
                per_grid.setdefault(node.grid, set()).add(node.offset)
            elif isinstance(node, (Binary, Unary)):
                flops += 1

    union = sorted({off for offs in per_grid.values() for off in offs})
    dims = kernel.dims() or (len(union[0]) if union else 0)
    radius = max((max(abs(c) for c in off) for off in union), default=0)
    shape = _classify(union, dims, radius) if union else "star"

    dest = kernel.updates[0].dest if kernel.updates else ""
    dest_extents = None
    dtype = "f32"
    if grids:
        decl = grids.get(dest)
        if decl is not None:
            dest_extents = decl.shape
            dtype = decl.dtype

    offsets = tuple(
        (grid, tuple(sorted(offs))) for grid, offs in sorted(per_grid.items())
    )
    return StencilInfo(dims, radius, shape, offsets, flops, dest, dest_extents, dtype)


# ---------------------------------------------------------------------------
# map desugaring


@dataclass(frozen=True)
class MapSpec:
    """Per-dimension half-open decomposition boundaries (a0, a1, a2, a3)."""

    dims: tuple[tuple[Affine, Affine, Affine, Affine], ...]

    @property
    def ndim(self) -> int:
        return len(self.dims)

    def substitute(self, bindings: dict[str, int]) -> "MapSpec":
        return MapSpec(
            tuple(tuple(a.substitute(bindings) for a in dim) for dim in self.dims)  # type: ignore[arg-type]
        )

    def concrete(self) -> tuple[tuple[int, int, int, int], ...]:
        dims = []
        for axis, dim in enumerate(self.dims):
            try:
                values = tuple(a.as_int() for a in dim)
            except ValueError:
                raise AnalysisError(
                    f"map bounds for dimension {DIM_NAMES[axis]} are not fully bound: "
                    + ", ".join(str(a) for a in dim)
                ) from None
            a0, a1, a2, a3 = values
            if not (0 <= a0 <= a1 and a2 <= a3):
                raise AnalysisError(
                    f"map bounds for dimension {DIM_NAMES[axis]} must satisfy 0 <= a0 <= a1 and a2 <= a3, got {values}"
                )
            if a1 > a3 or a2 < a0:
                raise AnalysisError(
                    f"map bounds for dimension {DIM_NAMES[axis]} are out of order: {values}"
                )
            dims.append(values)
        return tuple(dims)

    def empty_inner_dims(self) -> tuple[int, ...]:
        """Indices of dimensions whose middle interval is empty (a1 >= a2)."""
        out = []
        for axis, dim in enumerate(self.concrete()):
            if dim[1] >= dim[2]:
                out.append(axis)
        return tuple(out)


def _value_arity(value: MapValue) -> str:
    if isinstance(value, ShapeRef):
        return "shape"
    if isinstance(value, tuple):
        return f"tuple{len(value)}"
    return "scalar"


def resolve_shape_refs(
    spec: Sequence[tuple[str, MapValue]], grids: Optional[dict[str, GridDecl]]
) -> list[tuple[str, MapValue]]:
    """Replace ``g.shape`` extents with concrete or symbolic per-dim values."""
    out: list[tuple[str, MapValue]] = []
    for key, value in spec:
        if isinstance(value, ShapeRef):
            decl = grids.get(value.grid) if grids else None
            if decl is not None:
                value = tuple(Affine.of(e) for e in decl.shape)
            else:
                value = tuple(Affine.of(f"{value.grid}.shape{d}") for d in range(3))
        out.append((key, value))
    return out


def desugar_map(spec: Sequence[tuple[str, MapValue]]) -> MapSpec:
    """Expand map shorthand to explicit per-dimension 4-tuples.

    Accepts the six shorthand forms plus the explicit form; ShapeRef values
    must have been resolved to extent tuples first.
    """
    keys = [k for k, _ in spec]
    if len(set(keys)) != len(keys):
        raise AnalysisError(f"duplicate map keywords in {keys}")
    values = dict(spec)
    dim_keys = [k for k in DIM_NAMES if k in values]
    extra = [k for k in keys if k not in DIM_NAMES and k not in ("e", "w")]
    if extra:
        raise AnalysisError(f"unknown map keywords {extra}")
    if dim_keys != [k for k in keys if k in DIM_NAMES]:
        raise AnalysisError("map dimensions must be given in i, j, k order")

    def scalar(value: MapValue, what: str) -> Affine:
        if isinstance(value, Affine):
            return value
        raise AnalysisError(f"{what} must be a scalar")

    if "e" in values and not dim_keys:
        # whole-extent forms: map(e=(x, y)) and map(e=(x, y), w=p)
        extents = values["e"]
        if not isinstance(extents, tuple):
            raise AnalysisError("map extent 'e' must be a tuple of per-dimension extents")
        width = scalar(values["w"], "map width 'w'") if "w" in values else None
        return _from_extents(list(extents), width)

    if not dim_keys:
        raise AnalysisError("map needs dimension keywords or an extent tuple 'e'")

    arities = {_value_arity(values[k]) for k in dim_keys}
    if len(arities) != 1:
        raise AnalysisError(f"inconsistent arity between map dimensions: {sorted(arities)}")
    arity = arities.pop()

    if arity == "scalar":
        # map(i=x, j=y) and map(i=x, j=y, w=p)
        if "e" in values:
            raise AnalysisError("'e' cannot be combined with scalar dimension extents")
        width = scalar(values["w"], "map width 'w'") if "w" in values else None
        return _from_extents([values[k] for k in dim_keys], width)

    if arity == "tuple2":
        # map(i=(x1, x2), ...) and map(i=(x1, x2), ..., e=p)
        if "w" in values:
            raise AnalysisError("'w' cannot be combined with interval dimensions; use 'e'")
        width = scalar(values["e"], "map width 'e'") if "e" in values else None
        dims = []
        for k in dim_keys:
            lo, hi = values[k]  # type: ignore[misc]
            if width is None:
                dims.append((lo, lo, hi, hi))
            else:
                dims.append((lo, lo + width, hi - width, hi))
        return MapSpec(tuple(dims))

    if arity == "tuple4":
        if "e" in values or "w" in values:
            raise AnalysisError("explicit 4-tuples cannot be combined with 'e' or 'w'")
        return MapSpec(tuple(tuple(v) for v in (values[k] for k in dim_keys)))  # type: ignore[arg-type]

    raise AnalysisError(f"unsupported map value arity '{arity}'")


def _from_extents(extents: list, width: Optional[Affine]) -> MapSpec:
    dims = []
    for extent in extents:
        if not isinstance(extent, Affine):
            raise AnalysisError("map extents must be scalars")
        zero = Affine.of(0)
        if width is None:
            dims.append((zero, zero, extent, extent))
        else:
            dims.append((zero, width, extent - width, extent))
    return MapSpec(tuple(dims))


# ---------------------------------------------------------------------------
# region decomposition


@dataclass(frozen=True)
class Region:
    """A half-open index box tagged as inner or boundary:<position code>."""

    bounds: tuple[tuple[int, int], ...]
    tag: str

    @property
    def extents(self) -> tuple[int, ...]:
        return tuple(hi - lo for lo, hi in self.bounds)

    @property
    def size(self) -> int:
        n = 1
        for e in self.extents:
            n *= e
        return n

    def contains(self, point: tuple[int, ...]) -> bool:
        return all(lo <= p < hi for p, (lo, hi) in zip(point, self.bounds))


@dataclass(frozen=True)
class LoopNest:
    """Loop bounds and flattened-array strides for one region."""

    starts: tuple[int, ...]
    stops: tuple[int, ...]
    strides: tuple[int, ...]

    @property
    def extents(self) -> tuple[int, ...]:
        return tuple(hi - lo for lo, hi in zip(self.starts, self.stops))

    @property
    def iteration_count(self) -> int:
        n = 1
        for e in self.extents:
            n *= e
        return n

    @staticmethod
    def from_region(region: Region, strides: Optional[tuple[int, ...]] = None) -> "LoopNest":
        if strides is None:
            strides = row_major_strides(region.extents)
        starts = tuple(lo for lo, _ in region.bounds)
        stops = tuple(hi for _, hi in region.bounds)
        return LoopNest(starts, stops, strides)


def row_major_strides(extents: Sequence[int]) -> tuple[int, ...]:
    strides = [1] * len(extents)
    for d in range(len(extents) - 2, -1, -1):
        strides[d] = strides[d + 1] * extents[d + 1]
    return tuple(strides)


def decompose_regions(
    spec: Union[MapSpec, tuple], scheme: str = "cross_product"
) -> list[Region]:
    """Split the map domain into disjoint covering regions.

    Returns the inner region first, then boundary regions in lexicographic
    position-code order; empty regions are dropped.
    """
    dims = spec.concrete() if isinstance(spec, MapSpec) else tuple(spec)
    if scheme not in SCHEMES:
        raise AnalysisError(f"unknown decomposition scheme '{scheme}'")

    if scheme == "unified":
        bounds = tuple((a0, a3) for a0, _, _, a3 in dims)
        if any(hi <= lo for lo, hi in bounds):
            return []
        return [Region(bounds, "inner")]

    if scheme == "cross_product":
        per_dim = []
        for a0, a1, a2, a3 in dims:
            # an oversized width empties the middle; the high slab then
            # starts where the low slab ends so the cover stays exact
            hi_start = max(a1, a2)
            intervals = [(a0, a1, "0"), (a1, a2, "1"), (hi_start, a3, "2")]
            per_dim.append([iv for iv in intervals if iv[1] > iv[0]])
        regions = []
        for combo in itertools.product(*per_dim):
            code = "".join(c for _, _, c in combo)
            tag = "inner" if set(code) == {"1"} else f"boundary:{code}"
            regions.append(Region(tuple((lo, hi) for lo, hi, _ in combo), tag))
        inner = [r for r in regions if r.tag == "inner"]
        boundary = sorted((r for r in regions if r.tag != "inner"), key=lambda r: r.tag)
        return inner + boundary

    # slab7: z slabs span full x/y, y slabs exclude them, x slabs exclude both
    if len(dims) != 3:
        raise AnalysisError("slab7 decomposition requires a 3D map")
    (x0, x1, x2, x3), (y0, y1, y2, y3), (z0, z1, z2, z3) = dims
    full_x, full_y = (x0, x3), (y0, y3)
    mid_x, mid_y, mid_z = (x1, x2), (y1, y2), (z1, z2)
    hx, hy, hz = max(x1, x2), max(y1, y2), max(z1, z2)
    candidates = [
        Region((mid_x, mid_y, mid_z), "inner"),
        Region(((x0, x1), mid_y, mid_z), "boundary:x0"),
        Region(((hx, x3), mid_y, mid_z), "boundary:x1"),
        Region((full_x, (y0, y1), mid_z), "boundary:y0"),
        Region((full_x, (hy, y3), mid_z), "boundary:y1"),
        Region((full_x, full_y, (z0, z1)), "boundary:z0"),
        Region((full_x, full_y, (hz, z3)), "boundary:z1"),
    ]
    regions = [r for r in candidates if all(hi > lo for lo, hi in r.bounds)]
    inner = [r for r in regions if r.tag == "inner"]
    boundary = sorted((r for r in regions if r.tag != "inner"), key=lambda r: r.tag)
    return inner + boundary


# ---------------------------------------------------------------------------
# target binding: resolve a target + argument list into executable statements


@dataclass(frozen=True)
class BoundMap:
    kernel: KernelDecl
    info: StencilInfo
    grid_args: tuple[tuple[str, str], ...]  # kernel param -> module grid name
    scalar_args: tuple[tuple[str, float], ...]
    spec: MapSpec
    regions: tuple[Region, ...]


@dataclass(frozen=True)
class BoundFor:
    var: str
    count: Union[int, str]  # int when compile-time, symbol name otherwise
    body: tuple["BoundStmt", ...]


@dataclass(frozen=True)
class BoundSwap:
    first: str
    second: str


BoundStmt = Union[BoundMap, BoundFor, BoundSwap]


@dataclass(frozen=True)
class BoundTarget:
    name: str
    stmts: tuple[BoundStmt, ...]
    grid_params: tuple[tuple[str, str], ...]  # target param -> module grid name
    scalar_params: tuple[tuple[str, float], ...]
    scheme: str
    warnings: tuple[str, ...] = field(default=())


def bind_target(
    unit: SourceUnit,
    target_name: Optional[str] = None,
    args: Optional[Sequence[Union[str, int, float]]] = None,
    scheme: Optional[str] = None,
    freeze_loop_bounds: bool = True,
) -> BoundTarget:
    """Resolve a target invocation to concrete regions and bindings.

    Defaults come from the unit's launch declaration; explicit arguments
    override it (the CLI path).
    """
    launch = unit.launch
    if target_name is None:
        if launch is None:
            if len(unit.targets) != 1:
                raise AnalysisError("no launch declaration and multiple targets; name one")
            target_name = unit.targets[0].name
        else:
            target_name = launch.target
    target = unit.target(target_name)
    if args is None:
        if launch is not None and launch.target == target_name:
            args = launch.args
        else:
            raise AnalysisError(f"target '{target_name}' needs an argument list")
    if scheme is None:
        scheme = "cross_product"
        if launch is not None:
            scheme = str(launch.param_map().get("scheme", scheme))
    if len(args) != len(target.params):
        raise AnalysisError(
            f"target '{target_name}' takes {len(target.params)} arguments, got {len(args)}"
        )

    grid_decls = {g.name: g for g in unit.grids}
    grid_params: list[tuple[str, str]] = []
    scalar_params: list[tuple[str, float]] = []
    scalar_values: dict[str, int] = {}
    for (pname, ptype), arg in zip(target.params, args):
        if ptype == "grid":
            if not isinstance(arg, str) or arg not in grid_decls:
                raise AnalysisError(f"argument for grid parameter '{pname}' must name a declared grid")
            grid_params.append((pname, arg))
        else:
            if not isinstance(arg, (int, float)):
                raise AnalysisError(f"argument for scalar parameter '{pname}' must be numeric")
            scalar_params.append((pname, float(arg)))
            if float(arg).is_integer():
                scalar_values[pname] = int(arg)

    param_to_grid = dict(grid_params)
    warnings: list[str] = []

    def bind_stmts(stmts) -> tuple[BoundStmt, ...]:
        out: list[BoundStmt] = []
        for stmt in stmts:
            if isinstance(stmt, Swap):
                out.append(
                    BoundSwap(
                        param_to_grid.get(stmt.first, stmt.first),
                        param_to_grid.get(stmt.second, stmt.second),
                    )
                )
            elif isinstance(stmt, ForRange):
                count = stmt.count.substitute(scalar_values)
                bound: Union[int, str]
                if count.is_const and (freeze_loop_bounds or stmt.count.is_const):
                    bound = count.as_int()
                elif count.is_const:
                    bound = str(stmt.count)  # keep the parameter runtime-valued
                else:
                    bound = str(count)
                out.append(BoundFor(stmt.var, bound, bind_stmts(stmt.body)))
            elif isinstance(stmt, MapInvoke):
                out.append(bind_map(stmt))
            else:
                raise AnalysisError(f"unsupported target statement {stmt!r}")
        return tuple(out)

    def bind_map(stmt: MapInvoke) -> BoundMap:
        kernel = unit.kernel(stmt.kernel)
        garg: list[tuple[str, str]] = []
        sarg: list[tuple[str, float]] = []
        kernel_grids: dict[str, GridDecl] = {}
        for (pname, ptype), arg in zip(kernel.params, stmt.args):
            if ptype == "grid":
                name = param_to_grid.get(arg, arg) if isinstance(arg, str) else arg
                if not isinstance(name, str) or name not in grid_decls:
                    raise AnalysisError(
                        f"map argument '{arg}' for kernel '{kernel.name}' is not a grid"
                    )
                garg.append((pname, name))
                kernel_grids[pname] = grid_decls[name]
            else:
                if isinstance(arg, str):
                    value = dict(scalar_params).get(arg)
                    if value is None:
                        raise AnalysisError(f"unbound scalar argument '{arg}'")
                else:
                    value = float(arg)
                sarg.append((pname, value))
        info = analyze_kernel(kernel, kernel_grids)
        # resolve shape refs against the grids visible at this call site
        visible = dict(grid_decls)
        for p, g in param_to_grid.items():
            visible[p] = grid_decls[g]
        resolved = resolve_shape_refs(stmt.spec, visible)
        spec = desugar_map(resolved).substitute(scalar_values)
        local_scheme = scheme
        if local_scheme == "slab7" and spec.ndim != 3:
            raise AnalysisError("slab7 decomposition requires a 3D map")
        empty = spec.empty_inner_dims()
        if empty:
            warnings.append(
                f"map for kernel '{kernel.name}': empty inner interval in dimension(s) "
                + ", ".join(DIM_NAMES[d] for d in empty)
            )
        regions = tuple(decompose_regions(spec, local_scheme))
        return BoundMap(kernel, info, tuple(garg), tuple(sarg), spec, regions)

    stmts = bind_stmts(target.body)
    return BoundTarget(
        target.name,
        stmts,
        tuple(grid_params),
        tuple(scalar_params),
        scheme,
        tuple(warnings),
    )


def iteration_bound(bound: BoundTarget) -> Optional[int]:
    """The compile-time top-level iteration count, or None if runtime-valued."""
    for stmt in bound.stmts:
        if isinstance(stmt, BoundFor):
            return stmt.count if isinstance(stmt.count, int) else None
    return 1


# ---------------------------------------------------------------------------
# deterministic dump for `inspect`


def dump_analysis(unit: SourceUnit, bound: Optional[BoundTarget] = None) -> str:
    lines: list[str] = []
    grid_decls = {g.name: g for g in unit.grids}
    for kernel in unit.kernels:
        info = analyze_kernel(kernel, _launch_kernel_grids(unit, kernel, grid_decls))
        lines.append(f"kernel {kernel.name}")
        lines.append(f"  dims: {info.dims}")
        lines.append(f"  radius: {info.radius}")
        lines.append(f"  shape: {info.shape}")
        lines.append(f"  flops_per_point: {info.flops_per_point}")
        lines.append(f"  dest: {info.dest}")
        for grid, offs in info.offsets:
            rendered = " ".join("(" + ",".join(str(c) for c in off) + ")" for off in offs)
            lines.append(f"  reads {grid}: {rendered}")
    if bound is not None:
        lines.append(f"target {bound.name} scheme={bound.scheme}")
        for i, stmt in enumerate(_flat_maps(bound.stmts)):
            lines.append(f"  map[{i}] kernel={stmt.kernel.name}")
            for region in stmt.regions:
                spans = " ".join(f"[{lo},{hi})" for lo, hi in region.bounds)
                lines.append(f"    region {region.tag}: {spans} size={region.size}")
    return "\n".join(lines) + "\n"


def _flat_maps(stmts: tuple[BoundStmt, ...]):
    for stmt in stmts:
        if isinstance(stmt, BoundMap):
            yield stmt
        elif isinstance(stmt, BoundFor):
            yield from _flat_maps(stmt.body)


def _launch_kernel_grids(
    unit: SourceUnit, kernel: KernelDecl, grid_decls: dict[str, GridDecl]
) -> dict[str, GridDecl]:
    """Best-effort binding of kernel grid params for standalone inspection."""
    try:
        bound = bind_target(unit)
    except (AnalysisError, KeyError):
        return {}
    for stmt in _flat_maps(bound.stmts):
        if stmt.kernel.name == kernel.name:
            return {p: grid_decls[g] for p, g in stmt.grid_args}
    return {}
