"""Backend source emission: serial C, OpenMP C, GPU kernels, dataflow programs."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

from stencilkit._util import deep_recursion
from stencilkit.analysis import BoundTarget
from stencilkit.codegen.dataflow_format import (
    DataflowProgram,
    build_dataflow_program,
    generate_dataflow_files,
)
from stencilkit.codegen.gpu import generate_gpu
from stencilkit.codegen.openmp import generate_openmp
from stencilkit.codegen.serial import generate_serial
from stencilkit.dataflow import Margins
from stencilkit.dsl import SourceUnit
from stencilkit.planning import GpuPlan, OmpPlan, dump_plan


@dataclass(frozen=True)
class GeneratedArtifact:
    """Emitted files plus identity: byte-deterministic for identical inputs."""

    files: tuple[tuple[str, str], ...]  # (relative path, text), newline-terminated
    entry: str
    backend: str
    fingerprint: str

    def write(self, outdir: Union[str, Path]) -> list[Path]:
        outdir = Path(outdir)
        outdir.mkdir(parents=True, exist_ok=True)
        written = []
        for rel, text in self.files:
            path = outdir / rel
            path.write_text(text)
            written.append(path)
        return written

    def file_text(self, rel: str) -> str:
        for name, text in self.files:
            if name == rel:
                return text
        raise KeyError(rel)


def _fingerprint(parts: list[str]) -> str:
    digest = hashlib.sha256()
    for part in parts:
        digest.update(part.encode())
        digest.update(b"\x00")
    return digest.hexdigest()[:12]


def _stem(bound: BoundTarget) -> str:
    name = bound.name
    return name.removeprefix("target_")


def generate(
    unit: SourceUnit,
    bound: BoundTarget,
    backend: str,
    plan: Optional[Union[GpuPlan, OmpPlan]] = None,
    dataflow_program: Optional[DataflowProgram] = None,
    fabric: tuple[int, int] = (757, 996),
    margins: Margins = Margins(),
    memory_budget: Optional[int] = None,
) -> GeneratedArtifact:
    """Emit the artifact for one backend; every file ends with a newline."""
    with deep_recursion():
        return _generate(
            unit, bound, backend, plan, dataflow_program, fabric, margins, memory_budget
        )


def _generate(unit, bound, backend, plan, dataflow_program, fabric, margins, memory_budget):
    stem = _stem(bound)
    if backend == "seq":
        entry, source = generate_serial(unit, bound)
        files = ((f"kernel_{stem}_seq_default.c", source),)
        plan_text = "seq"
    elif backend == "omp":
        assert isinstance(plan, OmpPlan)
        entry, source = generate_openmp(unit, bound, plan)
        slug = plan.template + ("_semi" if plan.algorithm == "semi" else "")
        files = ((f"kernel_{stem}_omp_{slug}.c", source),)
        plan_text = dump_plan(plan)
    elif backend == "gpu":
        assert isinstance(plan, GpuPlan)
        entry, source = generate_gpu(unit, bound, plan)
        files = ((f"kernel_{stem}_gpu_{plan.template}.cu", source),)
        plan_text = dump_plan(plan)
    elif backend == "dataflow":
        program = dataflow_program or build_dataflow_program(
            unit, bound, fabric, margins, memory_budget
        )
        files = tuple(generate_dataflow_files(program))
        entry = program.kernel
        plan_text = "dataflow"
    else:
        raise ValueError(f"unknown backend '{backend}'")
    fingerprint = _fingerprint([plan_text, *[t for _, t in files]])
    return GeneratedArtifact(files, entry, backend, fingerprint)
