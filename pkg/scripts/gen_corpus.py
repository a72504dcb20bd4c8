#!/usr/bin/env python3
"""Write the kernel corpus as .stpy files under corpus/."""

from __future__ import annotations

import sys
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO / "src"))

from stencilkit import corpus  # noqa: E402


def main() -> None:
    outdir = REPO / "corpus"
    outdir.mkdir(exist_ok=True)
    (outdir / "listing_star2d4r.stpy").write_text(corpus.LISTING_STAR2D4R)
    for kernel in corpus.TABLE_KERNELS:
        (outdir / f"{kernel.name}.stpy").write_text(corpus.source_text(kernel.name))
    (outdir / "box3d2r_dataflow.stpy").write_text(
        corpus.source_text("box3d2r", shape=(8, 8, 4), iters=3, backend="dataflow")
    )
    print(f"wrote {len(list(outdir.glob('*.stpy')))} files to {outdir}")


if __name__ == "__main__":
    main()
