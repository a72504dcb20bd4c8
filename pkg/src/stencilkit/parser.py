"""Frontend: parse ``.stpy`` text into a SourceUnit and validate it.

The accepted language is a restricted subset of Python syntax: an
``import stencilpy as st`` line, ``@st.kernel`` / ``@st.target`` function
definitions, module-level ``st.grid(...)`` assignments, and one
``st.launch(...)`` invocation.  Anything else is rejected with a
position-carrying diagnostic.
"""

from __future__ import annotations

import ast
from typing import Optional

from stencilkit._util import deep_recursion
from stencilkit.affine import Affine
from stencilkit.diagnostics import Diagnostic, DslError, error
from stencilkit.dsl import (
    Binary,
    Const,
    Expr,
    ForRange,
    GridDecl,
    KernelDecl,
    LaunchDecl,
    MapInvoke,
    MapValue,
    Read,
    ShapeRef,
    SourceUnit,
    Swap,
    TargetDecl,
    TargetStmt,
    Unary,
    Update,
    Var,
    walk_expr,
)

_PARAM_TYPES = ("grid", "f32", "f64", "i32")
_MAP_KEYS = ("i", "j", "k", "e", "w")
_BACKEND_ALIASES = {
    "seq": "seq",
    "omp": "omp",
    "gpu": "gpu",
    "cuda": "gpu",
    "hip": "gpu",
    "sycl": "gpu",
    "dataflow": "dataflow",
    "csl": "dataflow",
}

# launch parameter keys accepted per backend kind
KNOWN_LAUNCH_KEYS = {
    "seq": {"scheme"},
    "omp": {"template", "algorithm", "blockDims", "scheme"},
    "gpu": {
        "computeCapability",
        "threadsPerBlock",
        "planeDims",
        "template",
        "memType",
        "prefetch",
        "asyncMemcpy",
        "padding",
        "scheme",
    },
    "dataflow": {"fabricDims", "margins", "memoryBudget"},
}


class _Parser:
    def __init__(self, text: str, file: str):
        self.text = text
        self.file = file
        self.diags: list[Diagnostic] = []
        self.alias = "st"

    # -- helpers ------------------------------------------------------------

    def err(self, node: ast.AST, message: str) -> None:
        self.diags.append(
            error(getattr(node, "lineno", 0), getattr(node, "col_offset", 0) + 1, message, self.file)
        )

    def _is_st(self, node: ast.AST, attr: Optional[str] = None) -> bool:
        """True if node is ``st`` or ``st.<attr>`` for the recorded alias."""
        if attr is None:
            return isinstance(node, ast.Name) and node.id == self.alias
        return (
            isinstance(node, ast.Attribute)
            and node.attr == attr
            and self._is_st(node.value)
        )

    def _st_attr(self, node: ast.AST) -> Optional[str]:
        if isinstance(node, ast.Attribute) and self._is_st(node.value):
            return node.attr
        return None

    def _int_literal(self, node: ast.AST) -> Optional[int]:
        if isinstance(node, ast.Constant) and type(node.value) is int:
            return node.value
        if (
            isinstance(node, ast.UnaryOp)
            and isinstance(node.op, ast.USub)
            and isinstance(node.operand, ast.Constant)
            and type(node.operand.value) is int
        ):
            return -node.operand.value
        return None

    # -- top level ----------------------------------------------------------

    def parse(self) -> SourceUnit:
        try:
            tree = ast.parse(self.text)
        except SyntaxError as exc:
            raise DslError(
                [error(exc.lineno or 0, exc.offset or 0, f"syntax error: {exc.msg}", self.file)]
            ) from None

        grids: list[GridDecl] = []
        kernels: list[KernelDecl] = []
        targets: list[TargetDecl] = []
        launch: Optional[LaunchDecl] = None

        for node in tree.body:
            if isinstance(node, ast.Import):
                self._parse_import(node)
            elif isinstance(node, ast.Expr) and isinstance(node.value, ast.Constant) and isinstance(
                node.value.value, str
            ):
                continue  # module docstring
            elif isinstance(node, ast.FunctionDef):
                kind = self._decorator_kind(node)
                if kind == "kernel":
                    parsed = self._parse_kernel(node)
                    if parsed is not None:
                        kernels.append(parsed)
                elif kind == "target":
                    parsed_t = self._parse_target(node)
                    if parsed_t is not None:
                        targets.append(parsed_t)
                else:
                    self.err(node, f"unknown construct: function '{node.name}' lacks an @st.kernel or @st.target decorator")
            elif isinstance(node, ast.Assign):
                grid = self._parse_grid(node)
                if grid is not None:
                    grids.append(grid)
            elif isinstance(node, ast.Expr) and isinstance(node.value, ast.Call):
                parsed_l = self._parse_launch(node.value)
                if parsed_l is not None:
                    if launch is not None:
                        self.err(node, "multiple launch invocations; only one is allowed")
                    launch = parsed_l
            else:
                self.err(node, "unknown construct at module level")

        if self.diags:
            raise DslError(self.diags)
        return SourceUnit(tuple(grids), tuple(kernels), tuple(targets), launch, self.file)

    def _parse_import(self, node: ast.Import) -> None:
        if len(node.names) == 1 and node.names[0].name == "stencilpy":
            self.alias = node.names[0].asname or "stencilpy"
        else:
            self.err(node, "only 'import stencilpy as <alias>' is supported")

    def _decorator_kind(self, node: ast.FunctionDef) -> Optional[str]:
        if len(node.decorator_list) != 1:
            return None
        return self._st_attr(node.decorator_list[0])

    # -- parameters ----------------------------------------------------------

    def _parse_params(self, node: ast.FunctionDef) -> tuple[tuple[str, str], ...]:
        args = node.args
        if args.posonlyargs or args.kwonlyargs or args.vararg or args.kwarg or args.defaults:
            self.err(node, f"'{node.name}' may only take plain positional parameters")
        params: list[tuple[str, str]] = []
        for arg in args.args:
            if arg.annotation is None:
                self.err(arg, f"parameter '{arg.arg}' lacks a required type hint")
                continue
            tname = self._st_attr(arg.annotation)
            if tname not in _PARAM_TYPES:
                self.err(arg, f"parameter '{arg.arg}' has unsupported type annotation")
                continue
            params.append((arg.arg, tname))
        return tuple(params)

    # -- kernels ---------------------------------------------------------------

    def _parse_kernel(self, node: ast.FunctionDef) -> Optional[KernelDecl]:
        params = self._parse_params(node)
        grid_params = {n for n, t in params if t == "grid"}
        scalar_names = {n for n, t in params if t != "grid"}
        local_names: set[str] = set()
        locals_: list[tuple[str, Expr]] = []
        updates: list[Update] = []
        before = len(self.diags)

        for stmt in node.body:
            if isinstance(stmt, ast.Expr) and isinstance(stmt.value, ast.Constant):
                continue  # docstring
            if isinstance(stmt, ast.Assign):
                if len(stmt.targets) == 1 and isinstance(stmt.targets[0], ast.Name):
                    name = stmt.targets[0].id
                    expr = self._parse_expr(stmt.value, grid_params, scalar_names | local_names)
                    if expr is not None:
                        locals_.append((name, expr))
                        local_names.add(name)
                    continue
                self.err(stmt, "unsupported assignment in kernel body")
                continue
            update = self._match_update(stmt, grid_params, scalar_names | local_names)
            if update is None:
                self.err(stmt, "unsupported statement in kernel body (expected '<grid>.at(...).set(...)')")
            else:
                updates.append(update)

        kernel = KernelDecl(
            node.name, params, tuple(locals_), tuple(updates), (node.lineno, node.col_offset + 1)
        )
        arities = {len(u.offset) for u in updates}
        for _, expr in locals_:
            arities |= {len(n.offset) for n in walk_expr(expr) if isinstance(n, Read)}
        for u in updates:
            arities |= {len(n.offset) for n in walk_expr(u.expr) if isinstance(n, Read)}
        if len(arities) > 1:
            self.err(node, f"offset arity mismatch in kernel '{node.name}': found arities {sorted(arities)}")
        if len(self.diags) > before:
            return None
        return kernel

    def _match_update(
        self, stmt: ast.stmt, grid_params: set[str], value_names: set[str]
    ) -> Optional[Update]:
        if not (isinstance(stmt, ast.Expr) and isinstance(stmt.value, ast.Call)):
            return None
        call = stmt.value
        func = call.func
        if not (isinstance(func, ast.Attribute) and func.attr == "set"):
            return None
        at_call = func.value
        if not (
            isinstance(at_call, ast.Call)
            and isinstance(at_call.func, ast.Attribute)
            and at_call.func.attr == "at"
            and isinstance(at_call.func.value, ast.Name)
        ):
            return None
        dest = at_call.func.value.id
        if dest not in grid_params:
            self.err(stmt, f"update destination '{dest}' is not a grid parameter")
        offset = self._parse_offset(at_call)
        if len(call.args) != 1 or call.keywords:
            self.err(stmt, "set(...) takes exactly one expression")
            return None
        expr = self._parse_expr(call.args[0], grid_params, value_names)
        if offset is None or expr is None:
            return None
        return Update(dest, offset, expr)

    def _parse_offset(self, at_call: ast.Call) -> Optional[tuple[int, ...]]:
        if at_call.keywords or not 1 <= len(at_call.args) <= 3:
            self.err(at_call, "at(...) takes 1 to 3 integer offsets")
            return None
        offset: list[int] = []
        for arg in at_call.args:
            value = self._int_literal(arg)
            if value is None:
                self.err(arg, "stencil offsets must be integer literals")
                return None
            offset.append(value)
        return tuple(offset)

    def _parse_expr(
        self, node: ast.expr, grid_params: set[str], value_names: set[str]
    ) -> Optional[Expr]:
        if isinstance(node, ast.Constant) and type(node.value) in (int, float):
            return Const(float(node.value))
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
            inner = self._parse_expr(node.operand, grid_params, value_names)
            if inner is None:
                return None
            if isinstance(inner, Const):
                return Const(-inner.value)
            return Unary("neg", inner)
        if isinstance(node, ast.BinOp):
            ops = {ast.Add: "+", ast.Sub: "-", ast.Mult: "*", ast.Div: "/"}
            op = ops.get(type(node.op))
            if op is None:
                self.err(node, "unsupported operator in kernel expression")
                return None
            left = self._parse_expr(node.left, grid_params, value_names)
            right = self._parse_expr(node.right, grid_params, value_names)
            if left is None or right is None:
                return None
            return Binary(op, left, right)
        if isinstance(node, ast.Call):
            func = node.func
            if (
                isinstance(func, ast.Attribute)
                and func.attr == "at"
                and isinstance(func.value, ast.Name)
            ):
                grid = func.value.id
                if grid not in grid_params:
                    self.err(node, f"'{grid}' is not a grid parameter")
                    return None
                offset = self._parse_offset(node)
                if offset is None:
                    return None
                return Read(grid, offset)
            self.err(node, "unsupported call in kernel expression")
            return None
        if isinstance(node, ast.Name):
            if node.id in value_names:
                return Var(node.id)
            self.err(node, f"unknown name '{node.id}' in kernel expression")
            return None
        self.err(node, "unsupported expression in kernel")
        return None

    # -- targets -----------------------------------------------------------

    def _parse_target(self, node: ast.FunctionDef) -> Optional[TargetDecl]:
        params = self._parse_params(node)
        before = len(self.diags)
        body = self._parse_target_body(node.body, params)
        if len(self.diags) > before:
            return None
        return TargetDecl(node.name, params, body, (node.lineno, node.col_offset + 1))

    def _parse_target_body(
        self, stmts: list[ast.stmt], params: tuple[tuple[str, str], ...]
    ) -> tuple[TargetStmt, ...]:
        out: list[TargetStmt] = []
        for stmt in stmts:
            if isinstance(stmt, ast.Expr) and isinstance(stmt.value, ast.Constant):
                continue  # docstring
            if isinstance(stmt, ast.For):
                out.append(self._parse_for(stmt, params))
            elif isinstance(stmt, ast.Assign):
                swap = self._match_swap(stmt)
                if swap is not None:
                    out.append(swap)
                else:
                    self.err(stmt, "unsupported statement in target (expected swap '(a, b) = (b, a)')")
            elif isinstance(stmt, ast.Expr) and isinstance(stmt.value, ast.Call):
                invoke = self._match_map(stmt.value)
                if invoke is not None:
                    out.append(invoke)
                else:
                    self.err(stmt, "unsupported call in target body (expected st.map(...)(kernel)(args))")
            else:
                self.err(stmt, "unsupported statement in target body")
        return tuple(out)

    def _parse_for(self, stmt: ast.For, params: tuple[tuple[str, str], ...]) -> TargetStmt:
        ok = (
            isinstance(stmt.target, ast.Name)
            and isinstance(stmt.iter, ast.Call)
            and isinstance(stmt.iter.func, ast.Name)
            and stmt.iter.func.id == "range"
            and len(stmt.iter.args) == 1
            and not stmt.iter.keywords
            and not stmt.orelse
        )
        if not ok:
            self.err(stmt, "only 'for <var> in range(<count>):' loops are supported in targets")
            return ForRange("_", Affine.of(0), ())
        count = self._parse_affine(stmt.iter.args[0])
        if count is None:
            self.err(stmt.iter, "range bound must be an integer literal or scalar parameter")
            count = Affine.of(0)
        body = self._parse_target_body(stmt.body, params)
        return ForRange(stmt.target.id, count, body)

    def _parse_affine(self, node: ast.expr) -> Optional[Affine]:
        value = self._int_literal(node)
        if value is not None:
            return Affine.of(value)
        if isinstance(node, ast.Name):
            return Affine.of(node.id)
        if isinstance(node, ast.BinOp) and isinstance(node.op, (ast.Add, ast.Sub)):
            left = self._parse_affine(node.left)
            right = self._parse_affine(node.right)
            if left is None or right is None:
                return None
            return left + right if isinstance(node.op, ast.Add) else left - right
        return None

    def _parse_map_value(self, node: ast.expr) -> Optional[MapValue]:
        if isinstance(node, ast.Attribute) and node.attr == "shape" and isinstance(node.value, ast.Name):
            return ShapeRef(node.value.id)
        if isinstance(node, ast.Tuple):
            elts = [self._parse_affine(e) for e in node.elts]
            if any(e is None for e in elts) or len(elts) not in (2, 4):
                self.err(node, "map interval tuples must have 2 or 4 integer entries")
                return None
            return tuple(elts)
        return self._parse_affine(node)

    def _match_map(self, call: ast.Call) -> Optional[MapInvoke]:
        # shape: st.map(<kwargs>)(<kernel>)(<args>)
        if not (isinstance(call.func, ast.Call) and isinstance(call.func.func, ast.Call)):
            return None
        map_call = call.func.func
        if not self._is_st(map_call.func, "map"):
            return None
        if map_call.args:
            self.err(map_call, "st.map takes keyword arguments only")
            return None
        spec: list[tuple[str, MapValue]] = []
        for kw in map_call.keywords:
            if kw.arg not in _MAP_KEYS:
                self.err(map_call, f"unknown map keyword '{kw.arg}'")
                continue
            value = self._parse_map_value(kw.value)
            if value is None:
                self.err(kw.value, f"unsupported value for map keyword '{kw.arg}'")
                continue
            spec.append((kw.arg, value))
        kernel_call = call.func
        if len(kernel_call.args) != 1 or not isinstance(kernel_call.args[0], ast.Name):
            self.err(kernel_call, "st.map(...) must be applied to a single kernel name")
            return None
        kernel = kernel_call.args[0].id
        args: list = []
        for arg in call.args:
            if isinstance(arg, ast.Name):
                args.append(arg.id)
            elif isinstance(arg, ast.Constant) and type(arg.value) in (int, float):
                args.append(arg.value)
            else:
                self.err(arg, "map arguments must be names or numeric literals")
        return MapInvoke(tuple(spec), kernel, tuple(args), (call.lineno, call.col_offset + 1))

    def _match_swap(self, stmt: ast.Assign) -> Optional[Swap]:
        if len(stmt.targets) != 1:
            return None
        target, value = stmt.targets[0], stmt.value
        if not (isinstance(target, ast.Tuple) and isinstance(value, ast.Tuple)):
            return None
        if len(target.elts) != 2 or len(value.elts) != 2:
            return None
        names = []
        for elt in (*target.elts, *value.elts):
            if not isinstance(elt, ast.Name):
                return None
            names.append(elt.id)
        a, b, c, d = names
        if (a, b) != (d, c):
            self.err(stmt, "tuple assignment in targets must be a swap '(a, b) = (b, a)'")
            return None
        return Swap(a, b)

    # -- grids and launch ------------------------------------------------------

    def _parse_grid(self, node: ast.Assign) -> Optional[GridDecl]:
        if len(node.targets) != 1 or not isinstance(node.targets[0], ast.Name):
            self.err(node, "unknown construct at module level")
            return None
        call = node.value
        if not (isinstance(call, ast.Call) and self._is_st(call.func, "grid")):
            self.err(node, "unknown construct at module level (expected st.grid(...))")
            return None
        name = node.targets[0].id
        dtype: Optional[str] = None
        shape: Optional[tuple[int, ...]] = None
        order: Optional[int] = None
        for kw in call.keywords:
            if kw.arg == "dtype":
                dtype = self._st_attr(kw.value)
                if dtype not in ("f32", "f64"):
                    self.err(kw.value, "grid dtype must be st.f32 or st.f64")
                    dtype = None
            elif kw.arg == "shape":
                if isinstance(kw.value, ast.Tuple):
                    extents = [self._int_literal(e) for e in kw.value.elts]
                    if any(e is None for e in extents):
                        self.err(kw.value, "grid shape entries must be integer literals")
                    else:
                        shape = tuple(extents)  # type: ignore[arg-type]
                else:
                    self.err(kw.value, "grid shape must be a tuple of extents")
            elif kw.arg == "order":
                order = self._int_literal(kw.value)
                if order is None:
                    self.err(kw.value, "grid order must be an integer literal")
            else:
                self.err(call, f"unknown st.grid keyword '{kw.arg}'")
        if dtype is None or shape is None or order is None:
            self.err(node, f"grid '{name}' needs dtype, shape, and order")
            return None
        if not 1 <= len(shape) <= 3:
            self.err(node, f"grid '{name}' must have 1 to 3 dimensions")
            return None
        if any(e < 1 for e in shape):
            self.err(node, f"grid '{name}' extents must be positive")
            return None
        if order < 0:
            self.err(node, f"grid '{name}' order must be non-negative")
            return None
        return GridDecl(name, dtype, shape, order, (node.lineno, node.col_offset + 1))

    def _parse_launch(self, call: ast.Call) -> Optional[LaunchDecl]:
        # shape: st.launch(backend=st.<kind>(<params>))(<target>)(<args>)
        if not (isinstance(call.func, ast.Call) and isinstance(call.func.func, ast.Call)):
            self.err(call, "unknown construct at module level")
            return None
        launch_call = call.func.func
        if not self._is_st(launch_call.func, "launch"):
            self.err(call, "unknown construct at module level")
            return None
        if launch_call.args or len(launch_call.keywords) != 1 or launch_call.keywords[0].arg != "backend":
            self.err(launch_call, "st.launch takes exactly one keyword argument 'backend'")
            return None
        backend = launch_call.keywords[0].value
        if not (isinstance(backend, ast.Call)):
            self.err(backend, "backend must be a call such as st.gpu(...)")
            return None
        kind_name = self._st_attr(backend.func)
        kind = _BACKEND_ALIASES.get(kind_name or "")
        if kind is None:
            self.err(backend, f"unknown backend kind '{kind_name}'")
            return None
        params: list[tuple[str, object]] = []
        for kw in backend.keywords:
            value = self._parse_param_value(kw.value)
            if value is None:
                self.err(kw.value, f"unsupported value for backend parameter '{kw.arg}'")
                continue
            params.append((kw.arg or "?", value))
        target_call = call.func
        if len(target_call.args) != 1 or not isinstance(target_call.args[0], ast.Name):
            self.err(target_call, "st.launch(...) must be applied to a single target name")
            return None
        args: list = []
        for arg in call.args:
            if isinstance(arg, ast.Name):
                args.append(arg.id)
            elif isinstance(arg, ast.Constant) and type(arg.value) in (int, float):
                args.append(arg.value)
            else:
                self.err(arg, "launch arguments must be names or numeric literals")
        return LaunchDecl(
            kind,
            tuple(params),  # type: ignore[arg-type]
            target_call.args[0].id,
            tuple(args),
            (call.lineno, call.col_offset + 1),
        )

    def _parse_param_value(self, node: ast.expr) -> Optional[object]:
        if isinstance(node, ast.Constant) and type(node.value) in (str, int, float, bool):
            return node.value
        value = self._int_literal(node)
        if value is not None:
            return value
        if isinstance(node, ast.Tuple):
            elts = [self._int_literal(e) for e in node.elts]
            if all(e is not None for e in elts):
                return tuple(elts)
            return None
        if isinstance(node, ast.Attribute):
            # dotted enum such as st.CUDABackend.Template.gmem -> "gmem"
            return node.attr
        return None


def parse_source(text: str, file: str = "<input>") -> SourceUnit:
    """Parse DSL text into a SourceUnit.  Raises DslError on any defect."""
    with deep_recursion():
        return _Parser(text, file).parse()


# ---------------------------------------------------------------------------
# semantic validation


def _kernel_grid_reads(kernel: KernelDecl):
    """Yield (grid param name, offset) for every read in the kernel."""
    exprs = [expr for _, expr in kernel.locals] + [u.expr for u in kernel.updates]
    for expr in exprs:
        for node in walk_expr(expr):
            if isinstance(node, Read):
                yield node.grid, node.offset


def _resolve_launch_env(unit: SourceUnit) -> dict[str, dict[str, str]]:
    """Map target name -> {param name -> module grid name} via the launch args."""
    env: dict[str, dict[str, str]] = {}
    if unit.launch is None:
        return env
    try:
        target = unit.target(unit.launch.target)
    except KeyError:
        return env
    binding: dict[str, str] = {}
    grid_names = {g.name for g in unit.grids}
    for (pname, ptype), arg in zip(target.params, unit.launch.args):
        if ptype == "grid" and isinstance(arg, str) and arg in grid_names:
            binding[pname] = arg
    env[target.name] = binding
    return env


def validate(unit: SourceUnit) -> list[Diagnostic]:
    """Check unit-level invariants.  Returns [] iff the unit is well formed."""
    diags: list[Diagnostic] = []
    file = unit.file

    def err(pos: tuple[int, int], message: str) -> None:
        diags.append(error(pos[0], pos[1], message, file))

    seen: dict[str, tuple[int, int]] = {}
    for decl in (*unit.kernels, *unit.targets):
        if decl.name in seen:
            err(decl.pos, f"duplicate declaration of '{decl.name}'")
        seen[decl.name] = decl.pos
    for grid in unit.grids:
        if grid.name in seen:
            err(grid.pos, f"grid '{grid.name}' clashes with another declaration")
        seen[grid.name] = grid.pos

    grid_decls = {g.name: g for g in unit.grids}
    kernels = {k.name: k for k in unit.kernels}
    launch_env = _resolve_launch_env(unit)

    for target in unit.targets:
        param_types = dict(target.params)
        bindings = launch_env.get(target.name, {})

        def resolve_grid(name: str) -> Optional[GridDecl]:
            if name in grid_decls:
                return grid_decls[name]
            if name in bindings:
                return grid_decls.get(bindings[name])
            return None

        for stmt in _walk_stmts(target.body):
            if isinstance(stmt, Swap):
                for name in (stmt.first, stmt.second):
                    if param_types.get(name) != "grid" and name not in grid_decls:
                        err(target.pos, f"swap operand '{name}' is not a grid")
            if not isinstance(stmt, MapInvoke):
                continue
            kernel = kernels.get(stmt.kernel)
            if kernel is None:
                err(stmt.pos, f"unknown kernel '{stmt.kernel}'")
                continue
            if len(stmt.args) != len(kernel.params):
                err(
                    stmt.pos,
                    f"kernel '{kernel.name}' takes {len(kernel.params)} arguments, got {len(stmt.args)}",
                )
                continue
            dims = kernel.dims()
            dim_keys = [k for k, _ in stmt.spec if k in ("i", "j", "k")]
            if dim_keys and len(dim_keys) != dims:
                err(stmt.pos, f"map names {len(dim_keys)} dimensions but kernel '{kernel.name}' is {dims}D")
            # bind kernel grid params to argument grids where resolvable
            bound_dtypes: set[str] = set()
            for (pname, ptype), arg in zip(kernel.params, stmt.args):
                if ptype != "grid":
                    continue
                if not isinstance(arg, str):
                    err(stmt.pos, f"argument for grid parameter '{pname}' must be a grid name")
                    continue
                if param_types.get(arg) != "grid" and arg not in grid_decls:
                    err(stmt.pos, f"argument '{arg}' is not a declared grid or grid parameter")
                    continue
                decl = resolve_grid(arg)
                if decl is None:
                    continue
                bound_dtypes.add(decl.dtype)
                if len(decl.shape) != dims and dims > 0:
                    err(stmt.pos, f"grid '{decl.name}' is {len(decl.shape)}D but kernel '{kernel.name}' is {dims}D")
                    continue
                for gname, offset in _kernel_grid_reads(kernel):
                    if gname != pname:
                        continue
                    if any(abs(c) > decl.order for c in offset):
                        err(
                            stmt.pos,
                            f"offset {offset} of kernel '{kernel.name}' exceeds halo order {decl.order} of grid '{decl.name}'",
                        )
            if len(bound_dtypes) > 1:
                err(stmt.pos, f"kernel '{kernel.name}' is mapped over mixed f32/f64 grids")

    if unit.launch is not None:
        launch = unit.launch
        if launch.target not in {t.name for t in unit.targets}:
            err(launch.pos, f"unknown launch target '{launch.target}'")
        else:
            target = unit.target(launch.target)
            if len(launch.args) != len(target.params):
                err(
                    launch.pos,
                    f"target '{target.name}' takes {len(target.params)} arguments, got {len(launch.args)}",
                )
        known = KNOWN_LAUNCH_KEYS[launch.kind]
        for key, _ in launch.params:
            if key not in known:
                err(launch.pos, f"unknown parameter '{key}' for backend '{launch.kind}'")
        if launch.kind == "dataflow":
            diags.extend(check_compile_time_bounds(unit, launch))

    return sorted(diags)


def check_compile_time_bounds(unit: SourceUnit, launch: LaunchDecl) -> list[Diagnostic]:
    """Dataflow programs need every loop bound known at compile time."""
    diags: list[Diagnostic] = []
    try:
        target = unit.target(launch.target)
    except KeyError:
        return diags
    scalars: dict[str, int] = {}
    for (pname, ptype), arg in zip(target.params, launch.args):
        if ptype != "grid" and isinstance(arg, (int, float)) and float(arg).is_integer():
            scalars[pname] = int(arg)
    for stmt in _walk_stmts(target.body):
        if isinstance(stmt, ForRange):
            bound = stmt.count.substitute(scalars)
            if not bound.is_const:
                diags.append(
                    error(
                        target.pos[0],
                        target.pos[1],
                        f"dataflow backend requires compile-time iteration counts; "
                        f"loop bound '{stmt.count}' is not a constant",
                        unit.file,
                    )
                )
    return diags


def _walk_stmts(body: tuple[TargetStmt, ...]):
    for stmt in body:
        yield stmt
        if isinstance(stmt, ForRange):
            yield from _walk_stmts(stmt.body)
