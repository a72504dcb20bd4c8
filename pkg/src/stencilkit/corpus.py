"""Canonical stencil kernel suite used as test fixtures and CLI demos.

The star/box kernels are fully expanded weighted sums (one coefficient per
stencil point), so their arithmetic-operator count is 2P - 1 for P points.
star2d4r reuses the coefficient constants of the classic 2D order-4 demo
kernel; every other kernel draws positive coefficients from a fixed-seed
RNG so the suite is byte-reproducible.  The four Jacobi-style kernels are
weighted sums divided by a constant and are excluded from the
operator-count checks.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

COEFF_SEED = 20240817


@dataclass(frozen=True)
class CorpusKernel:
    name: str  # identifier-safe name
    display: str  # table name (may contain '-')
    shape: str  # "star" | "box"
    dims: int
    radius: int
    flops: int
    jacobi: bool = False


def _rows() -> tuple[CorpusKernel, ...]:
    rows: list[CorpusKernel] = []
    for dims in (2, 3):
        for r in (1, 2, 3, 4):
            points = 2 * dims * r + 1
            rows.append(CorpusKernel(f"star{dims}d{r}r", f"star{dims}d{r}r", "star", dims, r, 2 * points - 1))
    for dims in (2, 3):
        for r in (1, 2, 3, 4):
            points = (2 * r + 1) ** dims
            rows.append(CorpusKernel(f"box{dims}d{r}r", f"box{dims}d{r}r", "box", dims, r, 2 * points - 1))
    rows.append(CorpusKernel("j2d5pt", "j2d5pt", "star", 2, 1, 10, jacobi=True))
    rows.append(CorpusKernel("j2d9pt_gol", "j2d9pt-gol", "box", 2, 1, 18, jacobi=True))
    rows.append(CorpusKernel("j2d9pt", "j2d9pt", "star", 2, 2, 18, jacobi=True))
    rows.append(CorpusKernel("j3d27pt", "j3d27pt", "box", 3, 1, 54, jacobi=True))
    return tuple(rows)


TABLE_KERNELS: tuple[CorpusKernel, ...] = _rows()
STAR_BOX_KERNELS: tuple[CorpusKernel, ...] = tuple(k for k in TABLE_KERNELS if not k.jacobi)


def by_name(name: str) -> CorpusKernel:
    for kernel in TABLE_KERNELS:
        if kernel.name == name or kernel.display == name:
            return kernel
    raise KeyError(name)


# coefficients of the classic 2D order-4 star kernel, center first then
# (offset, coefficient) pairs mirrored onto both signs of each axis entry
_STAR2D4R_CENTER = 0.25005
_STAR2D4R_PAIRS = (
    ((-4, 0), 0.11111),
    ((-3, 0), 0.06251),
    ((-2, 0), 0.06255),
    ((-1, 0), 0.06245),
    ((0, -1), 0.06248),
    ((0, -2), 0.06243),
    ((0, -3), 0.06253),
    ((0, -4), -0.22220),
)


def offsets_of(kernel: CorpusKernel) -> tuple[tuple[int, ...], ...]:
    """Stencil point offsets, center first, then sorted."""
    if kernel.shape == "star":
        rest = []
        for axis in range(kernel.dims):
            for m in range(1, kernel.radius + 1):
                for sign in (-1, 1):
                    off = [0] * kernel.dims
                    off[axis] = sign * m
                    rest.append(tuple(off))
        return ((0,) * kernel.dims, *sorted(rest))
    cube = itertools.product(range(-kernel.radius, kernel.radius + 1), repeat=kernel.dims)
    rest = sorted(off for off in cube if any(off))
    return ((0,) * kernel.dims, *rest)


def coefficients(kernel: CorpusKernel) -> tuple[tuple[tuple[int, ...], float], ...]:
    """Per-offset coefficients, aligned with offsets_of()."""
    offsets = offsets_of(kernel)
    if kernel.name == "star2d4r":
        table = {(0, 0): _STAR2D4R_CENTER}
        for (ox, oy), c in _STAR2D4R_PAIRS:
            table[(ox, oy)] = c
            table[(-ox, -oy)] = c
        return tuple((off, table[off]) for off in offsets)
    rng = np.random.default_rng([COEFF_SEED, *kernel.name.encode()])
    return tuple((off, round(float(rng.uniform(0.05, 0.95)), 5)) for off in offsets)


def divisor_of(kernel: CorpusKernel) -> float:
    rng = np.random.default_rng([COEFF_SEED + 1, *kernel.name.encode()])
    return round(float(rng.uniform(2.0, 9.0)), 5)


def update_expr_text(kernel: CorpusKernel) -> str:
    """The update expression for ``v.at(0...).set(<expr>)``."""
    terms = [
        f"{coef!r} * u.at({', '.join(str(c) for c in off)})"
        for off, coef in coefficients(kernel)
    ]
    weighted = " + ".join(terms)
    if kernel.jacobi:
        return f"({weighted}) / {divisor_of(kernel)!r}"
    return weighted


def default_shape(kernel: CorpusKernel) -> tuple[int, ...]:
    return (64, 64) if kernel.dims == 2 else (16, 16, 16)


def source_text(
    name: str,
    shape: Optional[Sequence[int]] = None,
    order: Optional[int] = None,
    iters: int = 4,
    dtype: str = "f32",
    backend: str = "seq",
    backend_params: Optional[dict] = None,
    map_width: int = 0,
) -> str:
    """Full .stpy source for one corpus kernel."""
    kernel = by_name(name)
    shape = tuple(shape) if shape is not None else default_shape(kernel)
    if len(shape) != kernel.dims:
        raise ValueError(f"{kernel.name} is {kernel.dims}D, shape {shape} given")
    order = kernel.radius if order is None else order
    zeros = ", ".join(["0"] * kernel.dims)
    shape_text = ", ".join(str(e) for e in shape)
    map_spec = f"e=u.shape, w={map_width}" if map_width else "e=u.shape"
    params = dict(backend_params or {})
    param_lines = "".join(
        f"        {key}={value!r},\n" if not isinstance(value, tuple) else f"        {key}={value},\n"
        for key, value in params.items()
    )
    backend_text = (
        f"st.{backend}(\n{param_lines}    )" if param_lines else f"st.{backend}()"
    )
    return f"""import stencilpy as st

@st.kernel
def kernel_{kernel.name}(u: st.grid, v: st.grid):
    v.at({zeros}).set({update_expr_text(kernel)})

@st.target
def target_{kernel.name}(u: st.grid, v: st.grid, iter: st.i32):
    for _t in range(iter):
        st.map({map_spec})(kernel_{kernel.name})(u, v)
        (v, u) = (u, v)

u = st.grid(dtype=st.{dtype}, shape=({shape_text}), order={order})
v = st.grid(dtype=st.{dtype}, shape=({shape_text}), order={order})
st.launch(
    backend={backend_text}
)(target_{kernel.name})(u, v, {iters})
"""


# the 2D order-4 star stencil exactly as written in the original listing;
# kept verbatim as a frontend fixture
LISTING_STAR2D4R = """import stencilpy as st

@st.kernel
def kernel_star2d4r(u: st.grid, v: st.grid):
  v.at(0, 0).set(0.25005 * u.at(0, 0)
    + 0.11111 * (u.at(-4, 0) + u.at(4, 0))
    + 0.06251 * (u.at(-3, 0) + u.at(3, 0))
    + 0.06255 * (u.at(-2, 0) + u.at(2, 0))
    + 0.06245 * (u.at(-1, 0) + u.at(1, 0))
    + 0.06248 * (u.at(0, -1) + u.at(0, 1))
    + 0.06243 * (u.at(0, -2) + u.at(0, 2))
    + 0.06253 * (u.at(0, -3) + u.at(0, 3))
    - 0.22220 * (u.at(0, -4) + u.at(0, 4)))

@st.target
def target_star2d4r(u: st.grid, v: st.grid, iter:st.i32):
  for _t in range(iter):
    st.map(e=u.shape)(kernel_star2d4r)(u, v)
    (v, u) = (u, v)

u = st.grid(dtype=st.f32, shape=(1000,1000), order=4)
v = st.grid(dtype=st.f32, shape=(1000,1000), order=4)
# data initialization omitted for brevity
st.launch(
    backend=st.cuda(
        computeCapability="9.0",
        threadsPerBlock=(16, 8, 8),
        template=st.CUDABackend.Template.gmem,
    )
)(target_star2d4r)(u, v, 1000)
"""
