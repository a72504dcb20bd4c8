from __future__ import annotations

import numpy as np
import pytest

from stencilkit import corpus
from stencilkit.analysis import bind_target
from stencilkit.codegen import generate
from stencilkit.dataflow import DataflowError, offset_of_pattern
from stencilkit.executor import run_target
from stencilkit.grids import GridBuffer, compare, fill_loguniform
from stencilkit.simulator import STATE_UPDATE, SimulationError, load_program

from conftest import make_unit


def build_sim(name, shape, iters, seed=42, backend="dataflow"):
    unit = make_unit(name, shape=shape, iters=iters, backend=backend)
    artifact = generate(unit, bind_target(unit), "dataflow")
    radius = corpus.by_name(name).radius
    grid = GridBuffer.zeros(shape, radius, "f32")
    fill_loguniform(grid, seed)
    sim = load_program(
        artifact.file_text("program.df"), grid, layout_text=artifact.file_text("layout.df")
    )
    return unit, grid, sim


def test_load_box3d2r_dimensions():
    _, _, sim = build_sim("box3d2r", (8, 8, 4), 3)
    assert (sim.nx, sim.ny, sim.nz) == (8, 8, 4)
    assert len(sim.buffers) == 24
    assert all(buf.shape == (8, 8, 4) for buf in sim.buffers.values())


def test_grid_layout_mismatch_rejected():
    unit = make_unit("box3d2r", shape=(8, 8, 4), backend="dataflow")
    artifact = generate(unit, bind_target(unit), "dataflow")
    wrong = GridBuffer.zeros((9, 8, 4), 2, "f32")
    with pytest.raises(DataflowError, match="does not match"):
        load_program(
            artifact.file_text("program.df"), wrong, layout_text=artifact.file_text("layout.df")
        )


@pytest.mark.parametrize(
    "name",
    ["star3d1r", "star3d2r", "star3d3r", "star3d4r", "box3d1r", "box3d2r", "box3d3r", "box3d4r"],
)
def test_spmd_delivery_correctness(name):
    """After the comm phase, every PE's buffer for pattern p holds the
    column of the PE at p's offset (zero when off-grid)."""
    shape = (9, 9, 4)
    _, grid, sim = build_sim(name, shape, 2)
    while sim.state != STATE_UPDATE:
        sim.step()
    u = sim.columns[sim.program.grid_in]
    nx, ny = shape[0], shape[1]
    for pid, buffer in sim.buffers.items():
        dx, dy = offset_of_pattern(pid)
        for x in range(nx):
            for y in range(ny):
                sx, sy = x + dx, y + dy
                if 0 <= sx < nx and 0 <= sy < ny:
                    expected = u[sx, sy]
                else:
                    expected = np.zeros(shape[2], np.float32)
                assert np.array_equal(buffer[x, y], expected), (pid.render(), x, y)


def test_update_entered_exactly_t_times():
    for T in (1, 3, 5):
        _, _, sim = build_sim("star3d2r", (8, 8, 4), T)
        _, trace = sim.run_to_exit()
        assert trace.updates_entered() == T


def test_lockstep_determinism():
    _, _, sim1 = build_sim("box3d2r", (8, 8, 4), 3)
    _, _, sim2 = build_sim("box3d2r", (8, 8, 4), 3)
    out1, trace1 = sim1.run_to_exit()
    out2, trace2 = sim2.run_to_exit()
    assert trace1.steps == trace2.steps
    for name in out1:
        assert np.array_equal(out1[name].padded, out2[name].padded)


def test_link_conservation():
    _, _, sim = build_sim("box3d2r", (8, 8, 4), 2)
    while sim.state != "STATE_EXIT":
        sim.step()
        if sim.state.startswith("STATE_PREP_TRANS_"):
            continue
        # outside a PREP->TRANS pair no payload is in flight
        if not sim.state.startswith("STATE_TRANS_"):
            assert sim.staged == {}


def test_identity_kernel_columns_unchanged():
    text = """import stencilpy as st

@st.kernel
def ident(u: st.grid, v: st.grid):
    v.at(0, 0, 0).set(u.at(0, 0, 0))

@st.target
def t(u: st.grid, v: st.grid):
    for _i in range(1):
        st.map(e=u.shape)(ident)(u, v)
        (v, u) = (u, v)

u = st.grid(dtype=st.f32, shape=(6, 6, 3), order=0)
v = st.grid(dtype=st.f32, shape=(6, 6, 3), order=0)
st.launch(backend=st.dataflow())(t)(u, v)
"""
    from stencilkit.parser import parse_source

    unit = parse_source(text)
    artifact = generate(unit, bind_target(unit), "dataflow")
    grid = GridBuffer.zeros((6, 6, 3), 0, "f32")
    fill_loguniform(grid, 3)
    sim = load_program(
        artifact.file_text("program.df"), grid, layout_text=artifact.file_text("layout.df")
    )
    out, _ = sim.run_to_exit()
    assert np.array_equal(out["u"].interior, grid.interior)


def test_all_zero_linear_kernel_stays_zero():
    unit = make_unit("box3d2r", shape=(8, 8, 4), iters=3, backend="dataflow")
    artifact = generate(unit, bind_target(unit), "dataflow")
    grid = GridBuffer.zeros((8, 8, 4), 2, "f32")
    sim = load_program(
        artifact.file_text("program.df"), grid, layout_text=artifact.file_text("layout.df")
    )
    out, _ = sim.run_to_exit()
    assert not out["u"].padded.any()


@pytest.mark.parametrize(
    "name,shape,iters",
    [
        ("box3d2r", (8, 8, 4), 3),
        ("star3d2r", (9, 9, 6), 5),
        ("box3d4r", (9, 9, 6), 3),
        ("j3d27pt", (8, 8, 4), 3),
    ],
)
def test_end_to_end_matches_reference(name, shape, iters):
    unit, grid, sim = build_sim(name, shape, iters)
    out, _ = sim.run_to_exit()
    radius = corpus.by_name(name).radius
    ref = run_target(unit, {"u": grid, "v": GridBuffer.zeros(shape, radius, "f32")})
    report = compare(ref["u"], out["u"])
    assert report.max_relative <= 1e-7
    assert report.rmsd_relative <= 1e-8


def test_step_after_exit_rejected():
    _, _, sim = build_sim("star3d1r", (8, 8, 4), 1)
    sim.run_to_exit()
    with pytest.raises(SimulationError):
        sim.step()


def test_deadlock_guard():
    _, _, sim = build_sim("star3d1r", (8, 8, 4), 1)
    sim._step_limit = 2
    with pytest.raises(SimulationError, match="deadlock"):
        sim.run_to_exit()
