"""GPU kernel-source generation in a CUDA-style dialect.

One source dialect is emitted: block/thread index builtins, ``__shared__``
scratch declarations, ``float4`` vector accesses, and the pipelined
async-copy intrinsics when gated on.  The host stub is documentation-only
scaffolding; numeric semantics of every template are verified through the
plan emulator, not by compiling this text.
"""

from __future__ import annotations

from typing import Sequence

from stencilkit.analysis import BoundMap, BoundTarget, Region
from stencilkit.codegen.common import C_TYPES, IndexScheme, c_expr, c_literal
from stencilkit.codegen.serial import _collect_maps
from stencilkit.dsl import Read, SourceUnit
from stencilkit.executor import peel_constant_divisor, split_semi_terms
from stencilkit.planning import GpuPlan

_AXIS = ("x", "y", "z")  # thread axis per logical dim, innermost first


def _plus(base: str, off: int) -> str:
    if off == 0:
        return base
    return f"{base} + {off}" if off > 0 else f"{base} - {-off}"


def _thread_index_lines(dims: int, region: Region, vec4: bool = False) -> list[str]:
    """Map block/thread coordinates onto logical indices (innermost -> x)."""
    lines = []
    for d in range(dims):
        axis = _AXIS[dims - 1 - d]
        lo = region.bounds[d][0]
        expr = f"blockIdx.{axis} * blockDim.{axis} + threadIdx.{axis}"
        if vec4 and d == dims - 1:
            expr = f"4 * ({expr})"
        lines.append(f"    const long i{d} = {lo} + {expr};" if lo else f"    const long i{d} = {expr};")
    guards = " || ".join(f"i{d} >= {region.bounds[d][1]}" for d in range(dims))
    lines.append(f"    if ({guards}) return;  /* clamp partial blocks */")
    return lines


def _kernel_params(bmap: BoundMap, ctype: str) -> str:
    params = []
    for pname, _ in bmap.grid_args:
        if any(u.dest == pname for u in bmap.kernel.updates):
            params.append(f"{ctype} * __restrict__ {pname}")
        else:
            params.append(f"const {ctype} * __restrict__ {pname}")
    params.extend(f"const double t_{name}" for name, _ in bmap.scalar_args)
    return ", ".join(params)


def _point_updates(bmap: BoundMap, schemes, ctype, render_read, loop_vars) -> list[str]:
    lines = []
    for lname, lexpr in bmap.kernel.locals:
        lines.append(f"    const double t_{lname} = {c_expr(lexpr, render_read)};")
    for update in bmap.kernel.updates:
        dest = schemes[update.dest].c_read(update.dest, loop_vars, update.offset)
        lines.append(f"    {dest} = ({ctype})({c_expr(update.expr, render_read)});")
    return lines


def _emit_gmem(bmap: BoundMap, schemes, ctype, name: str, region: Region) -> list[str]:
    dims = bmap.info.dims
    loop_vars = [f"i{d}" for d in range(dims)]

    def render_read(node: Read) -> str:
        return schemes[node.grid].c_read(node.grid, loop_vars, node.offset)

    lines = [f"__global__ void {name}({_kernel_params(bmap, ctype)}) {{"]
    lines += _thread_index_lines(dims, region)
    lines += _point_updates(bmap, schemes, ctype, render_read, loop_vars)
    lines.append("}")
    return lines


def _emit_smem(bmap: BoundMap, schemes, ctype, name: str, region: Region, plan: GpuPlan) -> list[str]:
    dims = bmap.info.dims
    radius = bmap.info.radius
    block = tuple(reversed(plan.block[:dims]))  # logical order, outermost first
    tile_ext = tuple(b + 2 * radius for b in block)
    loop_vars = [f"i{d}" for d in range(dims)]
    read_grids = [p for p, _ in bmap.grid_args if not any(u.dest == p for u in bmap.kernel.updates)]

    lines = [f"__global__ void {name}({_kernel_params(bmap, ctype)}) {{"]
    for g in read_grids:
        dims_text = "".join(f"[{e}]" for e in tile_ext)
        lines.append(f"    __shared__ {ctype} tile_{g}{dims_text};")
    for d in range(dims):
        axis = _AXIS[dims - 1 - d]
        lines.append(f"    const long o{d} = {region.bounds[d][0]} + blockIdx.{axis} * blockDim.{axis};")
    # cooperative load of block + halo, then one barrier before compute
    if plan.async_memcpy:
        lines.append("    /* pipelined copy of the shared tiles */")
    for g in read_grids:
        depth = 1
        for d in range(dims):
            axis = _AXIS[dims - 1 - d]
            pad = "    " * depth
            lines.append(
                f"{pad}for (long l{d} = threadIdx.{axis}; l{d} < {tile_ext[d]}; l{d} += blockDim.{axis}) {{"
            )
            depth += 1
        pad = "    " * depth
        # partial blocks at the region edge load only the halo they can reach
        guard = " && ".join(
            f"o{d} + l{d} < {region.bounds[d][1] + 2 * radius}" for d in range(dims)
        )
        lines.append(f"{pad}if ({guard}) {{")
        tile_at = "".join(f"[l{d}]" for d in range(dims))
        src = schemes[g].c_read(
            g, [f"o{d} + l{d} - {radius}" for d in range(dims)], (0,) * dims
        )
        if plan.async_memcpy:
            lines.append(f"{pad}    __pipeline_memcpy_async(&tile_{g}{tile_at}, &{src}, sizeof({ctype}));")
        else:
            lines.append(f"{pad}    tile_{g}{tile_at} = {src};")
        lines.append(f"{pad}}}")
        for d in range(dims - 1, -1, -1):
            lines.append("    " * (d + 1) + "}")
    if plan.async_memcpy:
        lines.append("    __pipeline_commit();")
        lines.append("    __pipeline_wait_prior(0);")
    lines.append("    __syncthreads();  /* tile fully loaded */")

    for d in range(dims):
        axis = _AXIS[dims - 1 - d]
        lines.append(f"    const long i{d} = o{d} + threadIdx.{axis};")
    guards = " || ".join(f"i{d} >= {region.bounds[d][1]}" for d in range(dims))
    lines.append(f"    if ({guards}) return;  /* clamp partial blocks */")

    def render_read(node: Read) -> str:
        if node.grid in read_grids:
            axes = []
            for d in range(dims):
                axis = _AXIS[dims - 1 - d]
                axes.append(f"[threadIdx.{axis} + {radius + node.offset[d]}]")
            return f"tile_{node.grid}" + "".join(axes)
        return schemes[node.grid].c_read(node.grid, loop_vars, node.offset)

    lines += _point_updates(bmap, schemes, ctype, render_read, loop_vars)
    lines.append("}")
    return lines


def _emit_f4(bmap: BoundMap, schemes, ctype, name: str, region: Region) -> list[str]:
    dims = bmap.info.dims
    loop_vars = [f"i{d}" for d in range(dims)]
    read_grids = [p for p, _ in bmap.grid_args if not any(u.dest == p for u in bmap.kernel.updates)]
    lanes = ("x", "y", "z", "w")

    lines = [f"__global__ void {name}({_kernel_params(bmap, ctype)}) {{"]
    lines += _thread_index_lines(dims, region, vec4=True)
    for g in read_grids:
        center = schemes[g].c_read(g, loop_vars, (0,) * dims)
        lines.append(f"    const float4 c_{g} = *(const float4 *)&{center};")
    update = bmap.kernel.updates[0]
    lines.append("    float4 result;")
    for lane_idx, lane in enumerate(lanes):

        def render_read(node: Read, lane_idx=lane_idx, lane=lane) -> str:
            # the vector lane shifts the innermost index; lane-0 center
            # components come straight from the float4 load
            if all(o == 0 for o in node.offset) and node.grid in read_grids and lane_idx == 0:
                return f"c_{node.grid}.x"
            if (
                node.grid in read_grids
                and all(o == 0 for o in node.offset[:-1])
                and 0 <= node.offset[-1] + lane_idx <= 3
            ):
                return f"c_{node.grid}.{lanes[node.offset[-1] + lane_idx]}"
            shifted = (*node.offset[:-1], node.offset[-1] + lane_idx)
            return schemes[node.grid].c_read(node.grid, loop_vars, shifted)

        for lname, lexpr in bmap.kernel.locals:
            lines.append(f"    const double t_{lname}_{lane} = {c_expr(lexpr, render_read)};")
        expr_text = c_expr(update.expr, render_read)
        for lname, _ in bmap.kernel.locals:
            expr_text = expr_text.replace(f"t_{lname}", f"t_{lname}_{lane}")
        lines.append(f"    result.{lane} = ({ctype})({expr_text});")
    dest = schemes[update.dest].c_read(update.dest, loop_vars, update.offset)
    lines.append(f"    *(float4 *)&{dest} = result;")
    lines.append("}")
    return lines


def _streaming_reads(bmap: BoundMap):
    """Partition reads into streaming-axis-aligned and in-plane/global."""
    axis_reads = set()
    for grid, offs in bmap.info.offsets:
        for off in offs:
            if all(o == 0 for o in off[1:]):
                axis_reads.add((grid, off))
    return axis_reads


def _emit_streaming(
    bmap: BoundMap, schemes, ctype, name: str, region: Region, plan: GpuPlan
) -> list[str]:
    dims = bmap.info.dims
    radius = bmap.info.radius
    depth = 2 * radius + 1
    plane_dims = dims - 1
    (s_lo, s_hi) = region.bounds[0]
    rest = region.bounds[1:]
    axis_reads = _streaming_reads(bmap)
    read_grids = [p for p, _ in bmap.grid_args if not any(u.dest == p for u in bmap.kernel.updates)]
    use_regs = plan.mem_type == "registers"
    tile_ext = tuple(
        tuple(reversed(plan.block[:plane_dims]))[d] + 2 * radius for d in range(plane_dims)
    )

    lines = [f"__global__ void {name}({_kernel_params(bmap, ctype)}) {{"]
    for d in range(plane_dims):
        axis = _AXIS[plane_dims - 1 - d]
        lo = rest[d][0]
        base = f"blockIdx.{axis} * blockDim.{axis}"
        lines.append(f"    const long q{d} = {_plus(base, lo) if lo else base};")
        lines.append(f"    const long p{d} = q{d} + threadIdx.{axis};")
    guards = " || ".join(f"p{d} >= {rest[d][1]}" for d in range(plane_dims))

    plane_vars = [f"p{d}" for d in range(plane_dims)]

    def global_at(grid: str, stream_expr: str, offset: Sequence[int]) -> str:
        terms = [stream_expr, *plane_vars]
        return schemes[grid].c_read(grid, terms, offset)

    def coop_plane_load(g: str, slot: str, stream_expr: str, indent: str, use_async: bool) -> list[str]:
        """Cooperative load of one full halo plane into a shared slot."""
        out = []
        depth_pad = indent
        for d in range(plane_dims):
            axis = _AXIS[plane_dims - 1 - d]
            out.append(
                f"{depth_pad}for (long l{d} = threadIdx.{axis}; l{d} < {tile_ext[d]}; l{d} += blockDim.{axis}) {{"
            )
            depth_pad += "    "
        guard = " && ".join(
            f"q{d} + l{d} < {rest[d][1] + 2 * radius}" for d in range(plane_dims)
        )
        tile_at = f"[{slot}]" + "".join(f"[l{d}]" for d in range(plane_dims))
        src = schemes[g].c_read(
            g, [stream_expr, *[f"q{d} + l{d} - {radius}" for d in range(plane_dims)]], (0,) * dims
        )
        out.append(f"{depth_pad}if ({guard}) {{")
        if use_async:
            out.append(f"{depth_pad}    __pipeline_memcpy_async(&plane_{g}{tile_at}, &{src}, sizeof({ctype}));")
        else:
            out.append(f"{depth_pad}    plane_{g}{tile_at} = {src};")
        out.append(f"{depth_pad}}}")
        for d in range(plane_dims - 1, -1, -1):
            out.append(indent + "    " * d + "}")
        return out

    if use_regs:
        lines.append(f"    if ({guards}) return;")
        lines.append(f"    /* streaming-axis window kept in registers ({depth} planes deep) */")
        for g in read_grids:
            regs = ", ".join(f"w_{g}_{k}" for k in range(depth))
            lines.append(f"    {ctype} {regs};")
        for g in read_grids:
            for k in range(depth):
                lines.append(f"    w_{g}_{k} = {global_at(g, str(s_lo + k - radius), (0,) * dims)};")
        if plan.prefetch or plan.async_memcpy:
            for g in read_grids:
                lines.append(f"    {ctype} next_{g};  /* prefetch staging overlaps compute */")
    else:
        # barriers require all threads alive; guard stores, not the launch
        lines.append(f"    const int active = !({guards});")
        lines.append(f"    /* streaming window staged through shared memory ({depth} planes deep) */")
        for g in read_grids:
            tiles = "".join(f"[{e}]" for e in tile_ext)
            lines.append(f"    __shared__ {ctype} plane_{g}[{depth}]{tiles};")
        for g in read_grids:
            for k in range(depth):
                lines.extend(coop_plane_load(g, str(k), str(s_lo + k - radius), "    ", plan.async_memcpy))
        if plan.async_memcpy:
            lines.append("    __pipeline_commit();")
            lines.append("    __pipeline_wait_prior(0);")
        lines.append("    __syncthreads();")

    def render_read_at(node: Read, window_index) -> str:
        in_window = node.grid in read_grids
        if use_regs:
            if (node.grid, node.offset) in axis_reads and in_window:
                return f"w_{node.grid}_{window_index(node.offset[0])}"
            return global_at(node.grid, _plus("s", node.offset[0]), (0, *node.offset[1:]))
        if in_window:
            sub = "".join(
                f"[threadIdx.{_AXIS[plane_dims - 1 - d]} + {radius + node.offset[1 + d]}]"
                for d in range(plane_dims)
            )
            return f"plane_{node.grid}[{window_index(node.offset[0])}]{sub}"
        return global_at(node.grid, _plus("s", node.offset[0]), (0, *node.offset[1:]))

    def emit_update_body(indent: str, window_index) -> list[str]:
        body = []

        def rr(node: Read) -> str:
            return render_read_at(node, window_index)

        update = bmap.kernel.updates[0]
        dest_at = global_at(update.dest, _plus("s", update.offset[0]), (0, *update.offset[1:]))
        if plan.template == "semi":
            expr, divisor = peel_constant_divisor(update.expr)
            forward, backward = split_semi_terms(expr)

            def chain(terms):
                parts = []
                for sign, term in terms:
                    text = c_expr(term, rr)
                    parts.append(
                        (f" {'+' if sign > 0 else '-'} {text}") if parts else (text if sign > 0 else f"-({text})")
                    )
                return "".join(parts) if parts else "0.0"

            body.append(f"{indent}/* forward pass: negative-offset contributions */")
            body.append(f"{indent}const double partial_sum = {chain(forward)};")
            body.append(f"{indent}/* backward pass: center and positive contributions */")
            combined = f"partial_sum + {chain(backward)}"
            if divisor is not None:
                combined = f"({combined}) / {c_literal(divisor)}"
            body.append(f"{indent}{dest_at} = ({ctype})({combined});")
        else:
            for lname, lexpr in bmap.kernel.locals:
                body.append(f"{indent}const double t_{lname} = {c_expr(lexpr, rr)};")
            body.append(f"{indent}{dest_at} = ({ctype})({c_expr(update.expr, rr)});")
        if not use_regs:
            body = [f"{indent}if (active) {{"] + ["    " + ln for ln in body] + [f"{indent}}}"]
        return body

    def emit_rotation(indent: str, incoming_slot: str, stream_expr: str) -> list[str]:
        rot = []
        if use_regs:
            stage_src = {g: global_at(g, stream_expr, (0,) * dims) for g in read_grids}
            if plan.async_memcpy:
                rot.append(f"{indent}/* async staging of the incoming plane */")
                for g in read_grids:
                    rot.append(f"{indent}__pipeline_memcpy_async(&next_{g}, &{stage_src[g]}, sizeof({ctype}));")
                rot.append(f"{indent}__pipeline_commit();")
                rot.append(f"{indent}__pipeline_wait_prior(0);")
            elif plan.prefetch:
                for g in read_grids:
                    rot.append(f"{indent}next_{g} = {stage_src[g]};")
            rot.append(f"{indent}/* shift the register window toward the next plane */")
            for g in read_grids:
                for k in range(depth - 1):
                    rot.append(f"{indent}w_{g}_{k} = w_{g}_{k + 1};")
                incoming = f"next_{g}" if (plan.prefetch or plan.async_memcpy) else stage_src[g]
                rot.append(f"{indent}w_{g}_{depth - 1} = {incoming};")
        else:
            rot.append(f"{indent}__syncthreads();  /* compute done before planes move */")
            rot.append(f"{indent}/* shift the shared planes toward the next plane */")
            sub_loops: list[str] = []
            depth_pad = indent
            for d in range(plane_dims):
                axis = _AXIS[plane_dims - 1 - d]
                sub_loops.append(
                    f"{depth_pad}for (long l{d} = threadIdx.{axis}; l{d} < {tile_ext[d]}; l{d} += blockDim.{axis}) {{"
                )
                depth_pad += "    "
            at = "".join(f"[l{d}]" for d in range(plane_dims))
            rot.extend(sub_loops)
            for g in read_grids:
                for k in range(depth - 1):
                    rot.append(f"{depth_pad}plane_{g}[{k}]{at} = plane_{g}[{k + 1}]{at};")
            for d in range(plane_dims - 1, -1, -1):
                rot.append(indent + "    " * d + "}")
            rot.append(f"{indent}__syncthreads();")
            for g in read_grids:
                rot.extend(coop_plane_load(g, incoming_slot, stream_expr, indent, plan.async_memcpy))
            if plan.async_memcpy:
                rot.append(f"{indent}__pipeline_commit();")
                rot.append(f"{indent}__pipeline_wait_prior(0);")
            rot.append(f"{indent}__syncthreads();")
        return rot

    if plan.template == "unroll":
        lines.append(f"    /* streaming loop unrolled over the {depth}-plane ring: data stays fixed,")
        lines.append("       indices rotate */")
        lines.append(f"    long s = {s_lo};")
        lines.append(f"    for (; s + {depth} <= {s_hi}; ) {{")
        for phase in range(depth):
            lines.append(f"        /* ring phase {phase} */")

            def window_index(d0: int, phase=phase) -> int:
                return (phase + radius + d0) % depth

            lines.extend(emit_update_body("        ", window_index))
            incoming_slot = phase % depth
            if use_regs:
                for g in read_grids:
                    src = global_at(g, f"s + {1 + radius}", (0,) * dims)
                    lines.append(f"        w_{g}_{incoming_slot} = {src};")
            else:
                lines.append("        __syncthreads();")
                for g in read_grids:
                    lines.extend(coop_plane_load(g, str(incoming_slot), f"s + {1 + radius}", "        ", False))
                lines.append("        __syncthreads();")
            lines.append("        ++s;")
        lines.append("    }")
        lines.append(f"    /* remainder planes read directly from global memory */")
        lines.append(f"    for (; s < {s_hi}; ++s) {{")
        lines.extend(_remainder_body(bmap, ctype, plan, global_at, use_regs))
        lines.append("    }")
    else:
        lines.append(f"    for (long s = {s_lo}; s < {s_hi}; ++s) {{")

        def window_index_static(d0: int) -> int:
            return radius + d0

        lines.extend(emit_update_body("        ", window_index_static))
        lines.append(f"        if (s + 1 < {s_hi}) {{")
        lines.extend(emit_rotation("            ", str(depth - 1), f"s + {1 + radius}"))
        lines.append("        }")
        lines.append("    }")
    lines.append("}")
    return lines


def _remainder_body(bmap, ctype, plan, global_at, use_regs) -> list[str]:
    """Ring-remainder body: short tail served straight from global memory."""
    body = []

    def rr(node: Read) -> str:
        return global_at(node.grid, _plus("s", node.offset[0]), (0, *node.offset[1:]))

    update = bmap.kernel.updates[0]
    dest_at = global_at(update.dest, _plus("s", update.offset[0]), (0, *update.offset[1:]))
    if plan.template == "semi":
        expr, divisor = peel_constant_divisor(update.expr)
        forward, backward = split_semi_terms(expr)
        fwd = " + ".join(c_expr(t, rr) if s > 0 else f"-({c_expr(t, rr)})" for s, t in forward) or "0.0"
        bwd = " + ".join(c_expr(t, rr) if s > 0 else f"-({c_expr(t, rr)})" for s, t in backward) or "0.0"
        body.append(f"        const double partial_sum = {fwd};")
        combined = f"partial_sum + {bwd}"
        if divisor is not None:
            combined = f"({combined}) / {c_literal(divisor)}"
        body.append(f"        {dest_at} = ({ctype})({combined});")
    else:
        body.append(f"        {dest_at} = ({ctype})({c_expr(update.expr, rr)});")
    if not use_regs:
        body = ["        if (active) {"] + ["    " + ln for ln in body] + ["        }"]
    return body


def _host_stub(bound: BoundTarget, plan: GpuPlan, kernel_names: list[str], ctype: str) -> list[str]:
    lines = [
        "/*",
        " * Host launch stub (documentation only).",
        f" * template={plan.template} block={plan.block} plane={plan.plane}",
        f" * mem_type={plan.mem_type} prefetch={plan.prefetch} async_memcpy={plan.async_memcpy}",
        f" * compute_capability={plan.compute_capability}",
        " *",
        " * Launch shape per region: blockDim from the plan, gridDim = ceil of the",
        " * region extents over the block; the time loop swaps device buffers:",
        " *",
    ]
    for name in kernel_names:
        lines.append(f" *   {name}<<<grid, block>>>(d_u, d_v);")
    lines.append(" *   swap(d_u, d_v);")
    lines.append(" */")
    return lines


def generate_gpu(unit: SourceUnit, bound: BoundTarget, plan: GpuPlan) -> tuple[str, str]:
    """Returns (entry symbol, kernel source text)."""
    grid_decls = {g.name: g for g in unit.grids}
    maps = _collect_maps(bound.stmts)
    pieces = [
        f"/* generated GPU stencil code: template {plan.template} */",
        "#include <stdint.h>",
    ]
    if plan.async_memcpy:
        pieces.append("#include <cuda_pipeline.h>")
    pieces.append("")
    kernel_names: list[str] = []
    for mi, bmap in enumerate(maps):
        schemes = {param: IndexScheme.of(grid_decls[g]) for param, g in bmap.grid_args}
        ctype = C_TYPES[grid_decls[bmap.grid_args[0][1]].dtype]
        for ri, region in enumerate(bmap.regions):
            name = f"{bmap.kernel.name}_{plan.template}_m{mi}r{ri}"
            kernel_names.append(name)
            pieces.append(f"/* map {mi}, region {region.tag} */")
            if plan.template == "gmem":
                pieces.extend(_emit_gmem(bmap, schemes, ctype, name, region))
            elif plan.template == "smem":
                pieces.extend(_emit_smem(bmap, schemes, ctype, name, region, plan))
            elif plan.template == "f4":
                pieces.extend(_emit_f4(bmap, schemes, ctype, name, region))
            else:
                pieces.extend(_emit_streaming(bmap, schemes, ctype, name, region, plan))
            pieces.append("")
    ctype = C_TYPES[grid_decls[bound.grid_params[0][1]].dtype]
    pieces.extend(_host_stub(bound, plan, kernel_names, ctype))
    entry = f"run_{bound.name}"
    return entry, "\n".join(pieces) + "\n"
