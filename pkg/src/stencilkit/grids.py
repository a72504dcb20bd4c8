"""Halo-padded grid buffers, file I/O, and grid comparison."""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np

DTYPES = {"f32": np.float32, "f64": np.float64}
_DTYPE_CODES = {"f32": 1, "f64": 2}
_CODE_DTYPES = {v: k for k, v in _DTYPE_CODES.items()}
_MAGIC = b"STG1"

VALUE_RANGE = (1e-4, 1e5)  # magnitude range used for randomized inputs


@dataclass
class GridBuffer:
    """A logical grid plus a halo of ``order`` ghost cells on every side.

    Values live in one flattened row-major array of shape
    ``tuple(e + 2*order for e in shape)``; the halo defaults to zero and is
    never written by map execution.
    """

    dtype: str
    shape: tuple[int, ...]
    order: int
    data: np.ndarray

    @staticmethod
    def zeros(shape: tuple[int, ...], order: int, dtype: str = "f32") -> "GridBuffer":
        padded = tuple(e + 2 * order for e in shape)
        return GridBuffer(dtype, tuple(shape), order, np.zeros(padded, DTYPES[dtype]))

    @staticmethod
    def from_interior(values: np.ndarray, order: int, dtype: str = "f32") -> "GridBuffer":
        grid = GridBuffer.zeros(values.shape, order, dtype)
        grid.interior[...] = values
        return grid

    @property
    def padded(self) -> np.ndarray:
        return self.data

    @property
    def interior(self) -> np.ndarray:
        if self.order == 0:
            return self.data
        sl = tuple(slice(self.order, -self.order) for _ in self.shape)
        return self.data[sl]

    def copy(self) -> "GridBuffer":
        return GridBuffer(self.dtype, self.shape, self.order, self.data.copy())

    def halo_bytes(self) -> bytes:
        """The halo contents, for immutability checks."""
        mask = np.ones(self.data.shape, bool)
        sl = tuple(slice(self.order, dim - self.order) for dim in self.data.shape)
        mask[sl] = False
        return self.data[mask].tobytes()


def fill_loguniform(grid: GridBuffer, seed: int) -> None:
    """Fill the interior with positive values log-uniform in [1e-4, 1e5]."""
    rng = np.random.default_rng(seed)
    lo, hi = np.log10(VALUE_RANGE[0]), np.log10(VALUE_RANGE[1])
    values = 10.0 ** rng.uniform(lo, hi, size=grid.shape)
    grid.interior[...] = values.astype(DTYPES[grid.dtype])


# ---------------------------------------------------------------------------
# file formats


def save_grid(path: Union[str, Path], grid: GridBuffer) -> None:
    """Binary format: magic, dtype code, ndim, order, extents, padded values (LE)."""
    path = Path(path)
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<BBBB", _DTYPE_CODES[grid.dtype], len(grid.shape), grid.order, 0))
        fh.write(struct.pack(f"<{len(grid.shape)}I", *grid.shape))
        fh.write(np.ascontiguousarray(grid.data).astype("<" + DTYPES[grid.dtype]().dtype.str[1:]).tobytes())


def load_grid(path: Union[str, Path]) -> GridBuffer:
    path = Path(path)
    raw = path.read_bytes()
    if raw[:4] == _MAGIC:
        dtype_code, ndim, order, _ = struct.unpack_from("<BBBB", raw, 4)
        dtype = _CODE_DTYPES.get(dtype_code)
        if dtype is None:
            raise ValueError(f"{path}: unknown dtype code {dtype_code}")
        shape = struct.unpack_from(f"<{ndim}I", raw, 8)
        offset = 8 + 4 * ndim
        padded = tuple(e + 2 * order for e in shape)
        count = int(np.prod(padded))
        values = np.frombuffer(raw, dtype="<" + ("f4" if dtype == "f32" else "f8"), count=count, offset=offset)
        data = values.astype(DTYPES[dtype]).reshape(padded).copy()
        return GridBuffer(dtype, tuple(shape), order, data)
    return _load_grid_text(path)


def _load_grid_text(path: Path) -> GridBuffer:
    """Text loader for tiny fixtures.

    Header line: ``gridtext <dtype> order=<n> shape=<e1,e2,...>``, followed
    by whitespace-separated interior values in row-major order.
    """
    text = path.read_text()
    lines = text.split("\n")
    header = lines[0].split()
    if not header or header[0] != "gridtext":
        raise ValueError(f"{path}: not a grid file (bad magic and no text header)")
    dtype = header[1]
    fields = dict(part.split("=", 1) for part in header[2:])
    order = int(fields["order"])
    shape = tuple(int(e) for e in fields["shape"].split(","))
    values = np.array([float(tok) for tok in " ".join(lines[1:]).split()])
    if values.size != int(np.prod(shape)):
        raise ValueError(f"{path}: expected {int(np.prod(shape))} values, got {values.size}")
    return GridBuffer.from_interior(values.reshape(shape).astype(DTYPES[dtype]), order, dtype)


def save_grid_text(path: Union[str, Path], grid: GridBuffer) -> None:
    shape = ",".join(str(e) for e in grid.shape)
    body = " ".join(repr(float(v)) for v in grid.interior.ravel())
    Path(path).write_text(f"gridtext {grid.dtype} order={grid.order} shape={shape}\n{body}\n")


# ---------------------------------------------------------------------------
# comparison


@dataclass(frozen=True)
class ComparisonReport:
    max_error: float
    rmsd: float
    worst_index: tuple[int, ...]
    scale: float  # max interior magnitude of the reference side

    @property
    def max_relative(self) -> float:
        return self.max_error / self.scale if self.scale > 0 else self.max_error

    @property
    def rmsd_relative(self) -> float:
        return self.rmsd / self.scale if self.scale > 0 else self.rmsd

    def render(self) -> str:
        idx = ",".join(str(i) for i in self.worst_index)
        return f"max={self.max_error:.9e} rmsd={self.rmsd:.9e} at=({idx})"

    def within(self, max_tol: float, rmsd_tol: float, normalized: bool = True) -> bool:
        if normalized:
            return self.max_relative <= max_tol and self.rmsd_relative <= rmsd_tol
        return self.max_error <= max_tol and self.rmsd <= rmsd_tol


def compare(a: GridBuffer, b: GridBuffer) -> ComparisonReport:
    """Max absolute error and RMSD over interior points."""
    if a.shape != b.shape or a.order != b.order:
        raise ValueError(f"shape mismatch: {a.shape}/{a.order} vs {b.shape}/{b.order}")
    ai = a.interior.astype(np.float64)
    bi = b.interior.astype(np.float64)
    diff = np.abs(ai - bi)
    max_error = float(diff.max()) if diff.size else 0.0
    rmsd = float(np.sqrt(np.mean(diff * diff))) if diff.size else 0.0
    worst = tuple(int(i) for i in np.unravel_index(int(diff.argmax()), diff.shape)) if diff.size else ()
    scale = float(np.abs(ai).max()) if ai.size else 0.0
    return ComparisonReport(max_error, rmsd, worst, scale)
