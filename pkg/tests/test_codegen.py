from __future__ import annotations

import itertools
from collections import Counter
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from stencilkit.analysis import bind_target
from stencilkit.codegen import generate
from stencilkit.codegen.common import IndexScheme
from stencilkit.codegen.dataflow_format import parse_layout, parse_program
from stencilkit.parser import parse_source
from stencilkit.planning import plan_gpu, plan_omp

from conftest import kernel_info, make_unit
from golden_cases import golden_artifacts

GOLDEN = Path(__file__).parent / "golden"


def _pragmas(text: str) -> Counter:
    return Counter(line.strip() for line in text.splitlines() if line.strip().startswith("#pragma"))


@pytest.mark.parametrize("case,artifact", list(golden_artifacts()), ids=lambda v: v if isinstance(v, str) else "")
def test_golden_snapshots(case, artifact):
    outdir = GOLDEN / case
    expected_files = sorted(p.name for p in outdir.iterdir())
    assert sorted(rel for rel, _ in artifact.files) == expected_files
    for rel, text in artifact.files:
        assert text == (outdir / rel).read_text(), f"{case}/{rel} drifted"
        assert text.endswith("\n")


def test_generation_is_byte_deterministic():
    first = {case: artifact for case, artifact in golden_artifacts()}
    second = {case: artifact for case, artifact in golden_artifacts()}
    for case in first:
        assert first[case].files == second[case].files
        assert first[case].fingerprint == second[case].fingerprint


# -- pragma placement ---------------------------------------------------------

PARALLEL_FOR = "#pragma omp parallel for default(shared) schedule(runtime)"

EXPECTED_PRAGMAS = {
    "loop": Counter({PARALLEL_FOR: 1}),
    "loop_blocking": Counter({PARALLEL_FOR: 1}),
    "loop_blocking_collapse": Counter({PARALLEL_FOR + " collapse(2)": 1}),
    "tasks_blocking": Counter(
        {
            "#pragma omp parallel default(shared)": 1,
            "#pragma omp master": 1,
            "#pragma omp task": 1,
            "#pragma omp taskwait": 1,
        }
    ),
    "taskloop": Counter(
        {
            "#pragma omp parallel default(shared)": 1,
            "#pragma omp single": 1,
            "#pragma omp taskloop": 1,
        }
    ),
}


@pytest.mark.parametrize("template", sorted(EXPECTED_PRAGMAS))
def test_pragma_multiset_per_template(template):
    unit = make_unit("star3d2r", shape=(12, 12, 12))
    bound = bind_target(unit, freeze_loop_bounds=False)
    params = {"template": template}
    if "blocking" in template:
        params["blockDims"] = (8, 8)
    plan = plan_omp(kernel_info(unit), params)
    artifact = generate(unit, bound, "omp", plan)
    assert _pragmas(artifact.files[0][1]) == EXPECTED_PRAGMAS[template]


def test_async_memcpy_intrinsics_gated():
    unit = make_unit("box3d2r", shape=(12, 12, 12))
    bound = bind_target(unit, freeze_loop_bounds=False)
    info = kernel_info(unit)
    on = generate(
        unit,
        bound,
        "gpu",
        plan_gpu(info, {"template": "smem", "asyncMemcpy": True, "computeCapability": "9.0"}),
    ).files[0][1]
    for marker in ("__pipeline_memcpy_async", "__pipeline_commit()", "__pipeline_wait_prior(0)"):
        assert marker in on
    off = generate(unit, bound, "gpu", plan_gpu(info, {"template": "smem"})).files[0][1]
    assert "__pipeline" not in off


def test_gpu_template_markers():
    unit = make_unit("star3d2r", shape=(12, 12, 12))
    bound = bind_target(unit, freeze_loop_bounds=False)
    info = kernel_info(unit)

    gmem = generate(unit, bound, "gpu", plan_gpu(info, {"template": "gmem"})).files[0][1]
    assert "blockIdx" in gmem and "__shared__" not in gmem
    assert "clamp partial blocks" in gmem

    smem = generate(unit, bound, "gpu", plan_gpu(info, {"template": "smem"})).files[0][1]
    assert "__shared__" in smem and "__syncthreads" in smem

    f4 = generate(unit, bound, "gpu", plan_gpu(info, {"template": "f4"})).files[0][1]
    assert "float4" in f4 and ".w = " in f4

    shift = generate(unit, bound, "gpu", plan_gpu(info, {"template": "shift"})).files[0][1]
    assert "w_u_0 = w_u_1;" in shift  # plane-rotation assignments

    unroll = generate(unit, bound, "gpu", plan_gpu(info, {"template": "unroll"})).files[0][1]
    assert "ring phase 0" in unroll and "ring phase 4" in unroll

    semi = generate(unit, bound, "gpu", plan_gpu(info, {"template": "semi"})).files[0][1]
    assert "forward pass" in semi and "backward pass" in semi


def test_serial_region_count_slab7():
    unit = make_unit("star3d1r", shape=(12, 12, 12), map_width=3)
    bound = bind_target(unit, freeze_loop_bounds=False, scheme="slab7")
    artifact = generate(unit, bound, "seq")
    text = artifact.files[0][1]
    assert text.count("/* region ") == 7
    # one triple loop nest per region
    assert text.count("for (long i0") == 7


def test_serial_identity_kernel_assignment():
    text = """import stencilpy as st

@st.kernel
def ident(u: st.grid, v: st.grid):
    v.at(0, 0).set(u.at(0, 0))

@st.target
def t(u: st.grid, v: st.grid):
    st.map(e=u.shape)(ident)(u, v)

u = st.grid(dtype=st.f32, shape=(8, 8), order=1)
v = st.grid(dtype=st.f32, shape=(8, 8), order=1)
st.launch(backend=st.seq())(t)(u, v)
"""
    unit = parse_source(text)
    bound = bind_target(unit)
    out = generate(unit, bound, "seq").files[0][1]
    assert "v[(i0 + 1) * 10 + i1 + 1] = (float)(u[(i0 + 1) * 10 + i1 + 1]);" in out


# -- index scheme ----------------------------------------------------------------


@given(
    shape=st.lists(st.integers(1, 6), min_size=1, max_size=3),
    order=st.integers(0, 3),
    lead=st.sampled_from([0, 8]),
)
@settings(max_examples=50, deadline=None)
def test_flattening_is_bijective_over_padded_box(shape, order, lead):
    scheme = IndexScheme(tuple(shape), order, lead)
    seen = set()
    for idx in itertools.product(*(range(-order, e + order) for e in shape)):
        flat = scheme.flat(idx)
        assert lead <= flat < scheme.padded_size
        seen.add(flat)
    assert len(seen) == scheme.padded_size - lead


def test_flat_matches_numpy_layout():
    scheme = IndexScheme((5, 7), 2)
    arr = np.arange(scheme.padded_size).reshape(scheme.padded)
    for i in range(-2, 7):
        for j in range(-2, 9):
            assert scheme.flat((i, j)) == arr[i + 2, j + 2]


# -- dataflow program file round trip ------------------------------------------


def test_dataflow_files_parse_back():
    case = dict(golden_artifacts())["dataflow_box3d2r"]
    layout = parse_layout(case.file_text("layout.df"))
    program = parse_program(case.file_text("program.df"))
    assert layout.active == (8, 8)
    assert layout.nz == 4
    assert layout.margins.north == 3 and layout.margins.south == 4
    assert program.iterations == 3
    assert program.kernel == "kernel_box3d2r"
    assert len(program.schedule) == 6
    assert len(program.machine.states) == 17
    assert len(program.patterns.patterns) == 24
    assert program.ssa.ops
    # schedule table matches the dataflow dump cell-for-cell
    from stencilkit.codegen.dataflow_format import build_dataflow_program

    unit = make_unit("box3d2r", shape=(8, 8, 4), backend="dataflow")
    rebuilt = build_dataflow_program(unit, bind_target(unit))
    assert rebuilt.schedule == program.schedule
    assert rebuilt.machine == program.machine
    assert rebuilt.ssa == program.ssa


def test_dataflow_pure_center_kernel():
    text = """import stencilpy as st

@st.kernel
def zonly(u: st.grid, v: st.grid):
    v.at(0, 0, 0).set(0.5 * u.at(0, 0, 0) + 0.25 * u.at(0, 0, -1))

@st.target
def t(u: st.grid, v: st.grid):
    for _i in range(4):
        st.map(e=u.shape)(zonly)(u, v)
        (v, u) = (u, v)

u = st.grid(dtype=st.f32, shape=(6, 6, 4), order=1)
v = st.grid(dtype=st.f32, shape=(6, 6, 4), order=1)
st.launch(backend=st.dataflow())(t)(u, v)
"""
    unit = parse_source(text)
    artifact = generate(unit, bind_target(unit), "dataflow")
    program = parse_program(artifact.file_text("program.df"))
    assert program.schedule == ()
    assert len(program.machine.states) == 5


def test_dataflow_state_count_star3d4r():
    unit = make_unit("star3d4r", shape=(9, 9, 6), backend="dataflow")
    artifact = generate(unit, bind_target(unit), "dataflow")
    program = parse_program(artifact.file_text("program.df"))
    # 4 per-quadrant step ranks -> 8 PREP/TRANS states + 5 lifecycle/compute
    assert len(program.machine.states) == 13


def test_entry_symbol_and_backend_recorded():
    unit = make_unit("star2d1r", shape=(8, 8))
    bound = bind_target(unit, freeze_loop_bounds=False)
    artifact = generate(unit, bound, "seq")
    assert artifact.entry == "run_target_star2d1r"
    assert artifact.backend == "seq"
    assert len(artifact.fingerprint) == 12
