"""Deterministic lock-step simulation of a dataflow program on a PE grid.

Every PE holds one z-column; the four router links move full columns
between cardinal neighbors.  All PEs advance through the state machine in
lock-step, so the whole fabric is represented by dense arrays:
``shift by one PE`` is an array translation with zero fill at the edges,
which is exactly the drop-at-edge / zero-halo link rule.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

import numpy as np

from stencilkit.codegen.dataflow_format import DataflowProgram, parse_layout, parse_program
from stencilkit.dataflow import (
    CENTER,
    CommStep,
    DataflowError,
    Operand,
    PatternId,
    PeLayout,
    STATE_CHECK,
    STATE_EXIT,
    STATE_SETUP,
    STATE_TEARDOWN,
    STATE_UPDATE,
)
from stencilkit.grids import DTYPES, GridBuffer

# direction -> (dx, dy) on the PE grid; the N quadrant looks toward +y
_DELTA = {"N": (0, 1), "E": (1, 0), "S": (0, -1), "W": (-1, 0)}
_OPPOSITE = {"N": "S", "E": "W", "S": "N", "W": "E"}


class SimulationError(RuntimeError):
    pass


@dataclass(frozen=True)
class StepRecord:
    state: str
    sends: tuple[str, ...]  # identical on every PE (SPMD)
    receives: tuple[str, ...]
    dropped_payloads: int  # sends that fell off the fabric edge


@dataclass
class SimulationTrace:
    steps: list[StepRecord] = field(default_factory=list)
    timer_steps: int = 0  # steps between SETUP and TEARDOWN

    def updates_entered(self) -> int:
        return sum(1 for s in self.steps if s.state == STATE_UPDATE)


def _shift(arr: np.ndarray, dx: int, dy: int) -> np.ndarray:
    """out[x, y] = arr[x + dx, y + dy], zero where the source is off-grid."""
    out = np.zeros_like(arr)
    nx, ny = arr.shape[0], arr.shape[1]
    xs_src = slice(max(dx, 0), nx + min(dx, 0))
    ys_src = slice(max(dy, 0), ny + min(dy, 0))
    xs_dst = slice(max(-dx, 0), nx + min(-dx, 0))
    ys_dst = slice(max(-dy, 0), ny + min(-dy, 0))
    out[xs_dst, ys_dst] = arr[xs_src, ys_src]
    return out


def _zshift(col: np.ndarray, dz: int) -> np.ndarray:
    """out[.., z] = col[.., z + dz], zero past the column ends."""
    if dz == 0:
        return col
    out = np.zeros_like(col)
    nz = col.shape[-1]
    if dz > 0:
        out[..., : nz - dz] = col[..., dz:]
    else:
        out[..., -dz:] = col[..., : nz + dz]
    return out


class Simulator:
    """One fabric executing one program on one input grid."""

    def __init__(self, program: DataflowProgram, layout: PeLayout, grid: GridBuffer):
        nx, ny = layout.active
        expected = (nx, ny, layout.nz) if layout.nz > 1 or len(grid.shape) == 3 else (nx, ny)
        if tuple(grid.shape) != expected:
            raise DataflowError(
                f"grid shape {grid.shape} does not match the program layout {expected}"
            )
        if grid.dtype != program.dtype:
            raise DataflowError(f"grid dtype {grid.dtype} does not match program {program.dtype}")
        self.program = program
        self.layout = layout
        self.nx, self.ny, self.nz = nx, ny, layout.nz
        np_dtype = DTYPES[program.dtype]
        interior = grid.interior.astype(np_dtype)
        if interior.ndim == 2:
            interior = interior[:, :, np.newaxis]
        self.columns: dict[str, np.ndarray] = {
            program.grid_in: interior.copy(),
            program.grid_out: np.zeros((nx, ny, self.nz), np_dtype),
        }
        buffer_ids = set(program.patterns.all_buffers())
        self.buffers: dict[PatternId, np.ndarray] = {
            pid: np.zeros((nx, ny, self.nz), np_dtype) for pid in buffer_ids
        }
        self.staged: dict[str, tuple[str, np.ndarray]] = {}  # quadrant -> (dir, payload)
        self.state = STATE_SETUP
        self.iterations_done = 0
        self.trace = SimulationTrace()
        self._steps_by_id: dict[str, CommStep] = {step.state_id: step for step in program.schedule}
        self._step_guard = 0
        self._step_limit = max(len(program.machine.states) * program.iterations * 4, 64)

    # -- state handlers ------------------------------------------------------

    def _record(self, sends=(), receives=(), dropped=0) -> None:
        self.trace.steps.append(StepRecord(self.state, tuple(sends), tuple(receives), dropped))

    def _comm_step(self, state: str) -> CommStep:
        step_id = state.rsplit("_", 1)[1]
        try:
            return self._steps_by_id[step_id]
        except KeyError:
            raise SimulationError(f"state {state} has no schedule step") from None

    def step(self) -> None:
        """Advance every PE one state in lock-step."""
        if self.state == STATE_EXIT:
            raise SimulationError("stepping a finished simulation")
        self._step_guard += 1
        if self._step_guard > self._step_limit:
            raise SimulationError(f"deadlock guard tripped after {self._step_guard} steps")

        machine = self.program.machine
        state = self.state
        if state == STATE_SETUP:
            self.trace.timer_steps = 0  # timer starts here
            self._record()
            self.state = machine.successors(state)[0]
        elif state.startswith("STATE_PREP_TRANS_"):
            step = self._comm_step(state)
            sends = []
            for quadrant, action in step.actions:
                if action is None:
                    continue
                source = (
                    self.columns[self.program.grid_in]
                    if action.send_source == CENTER
                    else self.buffers[action.send_source]
                )
                self.staged[quadrant] = (action.send_dir, source.copy())
                sends.append(f"{quadrant}:{action.send_text()}")
            self._record(sends=sends)
            self.trace.timer_steps += 1
            self.state = machine.successors(state)[0]
        elif state.startswith("STATE_TRANS_"):
            step = self._comm_step(state)
            payload_toward: dict[str, np.ndarray] = {}
            for quadrant, action in step.actions:
                if action is None:
                    continue
                if quadrant not in self.staged:
                    raise SimulationError(f"{state}: quadrant {quadrant} has no staged payload")
                direction, payload = self.staged.pop(quadrant)
                payload_toward[direction] = payload
            receives = []
            dropped = 0
            for quadrant, action in step.actions:
                if action is None:
                    continue
                feeder = _OPPOSITE[action.recv_from]
                if feeder not in payload_toward:
                    raise SimulationError(
                        f"{state}: receive from {action.recv_from} has no feeding send (empty link)"
                    )
                dx, dy = _DELTA[action.recv_from]
                self.buffers[action.recv_into] = _shift(payload_toward[feeder], dx, dy)
                # payloads leaving the active rectangle are dropped at the edge
                edge_width = abs(dx) * self.ny + abs(dy) * self.nx
                dropped += edge_width
                receives.append(f"{quadrant}:{action.recv_text()}")
            self._record(receives=receives, dropped=dropped)
            self.trace.timer_steps += 1
            self.state = machine.successors(state)[0]
        elif state == STATE_UPDATE:
            self._run_ssa()
            out, inn = self.program.grid_out, self.program.grid_in
            self.columns[out], self.columns[inn] = self.columns[inn], self.columns[out]
            self.iterations_done += 1
            self._record()
            self.trace.timer_steps += 1
            self.state = machine.successors(state)[0]
        elif state == STATE_CHECK:
            loop_head, teardown = machine.successors(state)
            self._record()
            self.trace.timer_steps += 1
            self.state = loop_head if self.iterations_done < self.program.iterations else teardown
        elif state == STATE_TEARDOWN:
            self._record()  # timer stops; result buffers are already in place
            self.state = machine.successors(state)[0]
        else:
            raise SimulationError(f"unknown state {state}")

    def _operand_value(self, op: Operand, temps: dict[int, np.ndarray]) -> np.ndarray:
        if op.kind == "temp":
            return temps[op.temp]
        if op.kind == "const":
            return np.full((self.nx, self.ny, self.nz), op.value, np.float64)
        assert op.pattern is not None
        if op.pattern == CENTER:
            col = self.columns[self.program.grid_in].astype(np.float64)
        else:
            col = self.buffers[op.pattern].astype(np.float64)
        return _zshift(col, op.zshift)

    def _run_ssa(self) -> None:
        """Vector ops over the z-columns of all PEs, float64 then one round."""
        temps: dict[int, np.ndarray] = {}
        for op in self.program.ssa.ops:
            vals = [self._operand_value(o, temps) for o in op.operands]
            if op.opcode == "mul_const":
                result = op.const * vals[0] if op.const_side == "L" else vals[0] * op.const
            elif op.opcode == "div_const":
                result = vals[0] / op.const
            elif op.opcode == "neg":
                result = -vals[0]
            elif op.opcode == "add":
                result = vals[0] + vals[1]
            elif op.opcode == "sub":
                result = vals[0] - vals[1]
            elif op.opcode == "fma":
                mul = op.const * vals[0]
                result = mul + vals[1] if op.mul_side == "L" else vals[1] + mul
            else:
                raise SimulationError(f"unknown opcode {op.opcode}")
            temps[op.dest] = result
        final = self._operand_value(self.program.ssa.result, temps)
        np_dtype = DTYPES[self.program.dtype]
        self.columns[self.program.grid_out][...] = final.astype(np_dtype)

    # -- public API ----------------------------------------------------------

    def run_to_exit(self) -> tuple[dict[str, GridBuffer], SimulationTrace]:
        while self.state != STATE_EXIT:
            self.step()
        return self.grids(), self.trace

    def grids(self) -> dict[str, GridBuffer]:
        out = {}
        for name, col in self.columns.items():
            values = col if self.program.dims == 3 else col[:, :, 0]
            out[name] = GridBuffer.from_interior(values, self.program.halo_order, self.program.dtype)
        return out


def load_program(
    source: Union[str, Path, tuple[str, str]],
    grid: GridBuffer,
    layout_text: Optional[str] = None,
) -> Simulator:
    """Build a simulator from layout/program files or their text.

    ``source`` is either a directory containing ``layout.df`` and
    ``program.df``, or the program text when ``layout_text`` is given.
    """
    if layout_text is not None:
        program_text = source  # type: ignore[assignment]
    else:
        directory = Path(source)  # type: ignore[arg-type]
        layout_text = (directory / "layout.df").read_text()
        program_text = (directory / "program.df").read_text()
    layout = parse_layout(layout_text)
    program = parse_program(program_text)  # type: ignore[arg-type]
    if layout.nz != program.nz or layout.dtype != program.dtype:
        raise DataflowError("layout and program files disagree on nz/dtype")
    return Simulator(program, layout, grid)
