"""stencilkit: a compiler for a small stencil DSL.

Parses ``.stpy`` sources, analyzes stencil structure, plans backend
execution (serial / OpenMP / GPU tiles / dataflow PE grids), emits source
artifacts, and verifies every plan against a built-in reference executor
and a deterministic dataflow simulator.
"""

from stencilkit.diagnostics import Diagnostic, DslError
from stencilkit.parser import parse_source, validate

__version__ = "0.1.0"

__all__ = ["Diagnostic", "DslError", "parse_source", "validate", "__version__"]
