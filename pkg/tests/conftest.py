from __future__ import annotations

import pytest

from stencilkit import corpus
from stencilkit.analysis import analyze_kernel
from stencilkit.grids import GridBuffer, fill_loguniform
from stencilkit.parser import parse_source, validate


def make_unit(name: str, shape=None, iters: int = 3, **kwargs):
    """Parsed + validated source unit for one corpus kernel."""
    text = corpus.source_text(name, shape=shape, iters=iters, **kwargs)
    unit = parse_source(text, f"{name}.stpy")
    diags = validate(unit)
    assert not diags, diags
    return unit


def make_grids(unit, seed: int = 7):
    """Zero grids per the unit's declarations, input filled log-uniformly."""
    grids = {g.name: GridBuffer.zeros(g.shape, g.order, g.dtype) for g in unit.grids}
    first = unit.launch.args[0] if unit.launch else unit.grids[0].name
    fill_loguniform(grids[first], seed)
    return grids


def kernel_info(unit):
    kernel = unit.kernels[0]
    grid_params = [n for n, t in kernel.params if t == "grid"]
    binding = {p: g for p, g in zip(grid_params, unit.grids)}
    return analyze_kernel(kernel, binding)


@pytest.fixture
def listing_unit():
    unit = parse_source(corpus.LISTING_STAR2D4R, "listing.stpy")
    assert validate(unit) == []
    return unit
