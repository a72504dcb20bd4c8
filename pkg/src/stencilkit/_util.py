"""Small internal helpers."""

from __future__ import annotations

import sys
from contextlib import contextmanager


@contextmanager
def deep_recursion(limit: int = 50000):
    """Temporarily raise the recursion limit.

    Fully expanded high-order box stencils produce expression chains
    hundreds of operators deep; recursive walks need the headroom.
    """
    old = sys.getrecursionlimit()
    if old < limit:
        sys.setrecursionlimit(limit)
    try:
        yield
    finally:
        sys.setrecursionlimit(old)
