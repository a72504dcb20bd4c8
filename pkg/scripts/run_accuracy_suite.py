#!/usr/bin/env python3
"""Run the numerical-accuracy sweep and print one line per combination.

Compares every applicable plan variant against the reference executor on
float32 grids with log-uniform values in [1e-4, 1e5].
"""

from __future__ import annotations

import sys
import time
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO / "src"))

from stencilkit import corpus  # noqa: E402
from stencilkit.analysis import analyze_kernel  # noqa: E402
from stencilkit.executor import run_semi, run_target, run_tile_plan  # noqa: E402
from stencilkit.grids import GridBuffer, compare, fill_loguniform  # noqa: E402
from stencilkit.parser import parse_source, validate  # noqa: E402
from stencilkit.planning import plan_gpu, plan_omp  # noqa: E402

MAX_TOL, RMSD_TOL = 1e-7, 1e-8


def main() -> int:
    failures = 0
    total = 0
    start = time.perf_counter()
    for kernel in corpus.TABLE_KERNELS:
        shape = (64, 64) if kernel.dims == 2 else (16, 16, 16)
        unit = parse_source(corpus.source_text(kernel.name, shape=shape, iters=3))
        assert not validate(unit)
        decls = {g.name: g for g in unit.grids}
        info = analyze_kernel(unit.kernels[0], {"u": decls["u"], "v": decls["v"]})
        grids = {n: GridBuffer.zeros(g.shape, g.order, g.dtype) for n, g in decls.items()}
        fill_loguniform(grids["u"], 7)
        reference = run_target(unit, grids)

        variants = [("gpu", t) for t in ("gmem", "smem", "f4", "shift", "unroll")]
        if kernel.shape == "star":
            variants.append(("gpu", "semi"))
            variants.append(("semi", "-"))
        variants += [("omp", "loop"), ("omp", "tasks_blocking")]
        for backend, template in variants:
            if backend == "semi":
                result = run_semi(unit, grids)
            elif backend == "gpu":
                plan = plan_gpu(info, {"template": template, "threadsPerBlock": (8, 4, 4)})
                result = run_tile_plan(unit, plan, grids)
            else:
                params = {"template": template}
                if template == "tasks_blocking":
                    params["blockDims"] = (8, 8)
                result = run_tile_plan(unit, plan_omp(info, params), grids)
            rep = compare(reference["u"], result["u"])
            ok = rep.max_relative <= MAX_TOL and rep.rmsd_relative <= RMSD_TOL
            total += 1
            failures += 0 if ok else 1
            status = "ok " if ok else "FAIL"
            print(f"{status} {kernel.display:<11} {backend:<4} {template:<16} {rep.render()}")
    elapsed = time.perf_counter() - start
    print(f"\n{total - failures}/{total} combinations within tolerance in {elapsed:.1f}s")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
