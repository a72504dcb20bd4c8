#!/usr/bin/env python3
"""Regenerate the golden snapshots under tests/golden/."""

from __future__ import annotations

import shutil
import sys
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO / "tests"))

from golden_cases import golden_artifacts  # noqa: E402


def main() -> None:
    golden = REPO / "tests" / "golden"
    if golden.exists():
        shutil.rmtree(golden)
    for case, artifact in golden_artifacts():
        outdir = golden / case
        outdir.mkdir(parents=True)
        for rel, text in artifact.files:
            (outdir / rel).write_text(text)
        print(f"{case}: {', '.join(rel for rel, _ in artifact.files)}")


if __name__ == "__main__":
    main()
