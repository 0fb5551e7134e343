"""Autonomous first-order ODE systems and their tree-indexed derivatives.

Systems are written in a small declaration language::

    vars p, q
    param a = 1/2
    p' = (2 - q)*p
    q' = a*(p - 1)*q

``vars`` comes first and fixes component order; ``param`` lines bind exact
rational parameters usable in the right-hand sides; every declared variable
needs exactly one ``name' = expression`` line.  Statements are separated by
newlines or semicolons, ``#`` starts a comment.

From a parsed system, :class:`DiffCache` computes the elementary
differential of any rooted tree — the tree-shaped contraction of partial
derivative tensors of the right-hand side against itself — sharing partial
derivatives and subtree results across calls.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from itertools import product
from typing import Optional

from .coefficients import parse_arithmetic
from .errors import CoefficientError, ParseError
from .expressions import (
    Expression,
    add_all,
    const,
    differentiate,
    eval_expression,
    mul_all,
    power,
    variable,
)
from .rationals import Rat, is_rational, rat
from .series import TruncatedBSeries
from .trees import RootedTree

_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")
_RESERVED = {"vars", "param"}


@dataclass(frozen=True)
class ODESystem:
    """An autonomous system y' = f(y) with exact rational parameters."""

    variables: tuple[str, ...]
    rhs: tuple[Expression, ...]
    parameters: dict[str, Rat] = field(default_factory=dict)

    @property
    def dimension(self) -> int:
        return len(self.variables)

    def rhs_text(self) -> tuple[str, ...]:
        from .expressions import format_expression

        return tuple(format_expression(e, self.variables) for e in self.rhs)


class _OdeAlgebra:
    """Expression-building callbacks for the shared arithmetic parser."""

    def __init__(self, variables: tuple[str, ...], params: dict[str, Rat]):
        self._vars = {name: i for i, name in enumerate(variables)}
        self._params = params

    def from_int(self, value: int) -> Expression:
        return const(value)

    def from_name(self, name: str, line: int, column: int) -> Expression:
        index = self._vars.get(name)
        if index is not None:
            return variable(index)
        if name in self._params:
            return const(self._params[name])
        raise ParseError(
            f"unknown identifier {name!r}", line=line, column=column
        )

    def add(self, a, b):
        return add_all((a, b))

    def sub(self, a, b):
        return add_all((a, -b))

    def mul(self, a, b):
        return mul_all((a, b))

    def div(self, a, b):
        return mul_all((a, power(b, -1)))

    def neg(self, a):
        return -a

    def pow(self, a, exponent: int):
        return power(a, exponent)


class _RatAlgebra:
    """Plain rational arithmetic, for ``param`` right-hand sides."""

    def from_int(self, value: int):
        return rat(value)

    def from_name(self, name: str, line: int, column: int):
        raise ParseError(
            f"parameter values must be numeric, found {name!r}",
            line=line,
            column=column,
        )

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def div(self, a, b):
        if b == 0:
            raise CoefficientError("division by zero in parameter value")
        return a / b

    def neg(self, a):
        return -a

    def pow(self, a, exponent: int):
        if a == 0 and exponent < 0:
            raise CoefficientError("zero raised to a negative power")
        return a ** exponent


def _statements(text: str):
    """Yield (line_number, column_offset, statement) with comments stripped."""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        start = 0
        for piece in line.split(";"):
            stripped = piece.strip()
            if stripped:
                col = start + piece.index(stripped[0])
                yield lineno, col, stripped
            start += len(piece) + 1


def parse_ode(text: str) -> ODESystem:
    """Parse the declaration language into an :class:`ODESystem`."""
    variables: Optional[tuple[str, ...]] = None
    params: dict[str, Rat] = {}
    equations: dict[str, Expression] = {}

    for lineno, col, stmt in _statements(text):
        if stmt == "vars" or (stmt.startswith("vars") and stmt[4].isspace()):
            tail = stmt[4:]
            if variables is not None:
                raise ParseError("duplicate vars declaration", line=lineno, column=col + 1)
            if params or equations:
                raise ParseError(
                    "vars must be declared before params and equations",
                    line=lineno,
                    column=col + 1,
                )
            names = [p.strip() for p in tail.split(",")]
            if names == [""]:
                raise ParseError("vars declares no variables", line=lineno, column=col + 1)
            for name in names:
                if not _NAME_RE.fullmatch(name):
                    raise ParseError(
                        f"bad variable name {name!r}", line=lineno, column=col + 1
                    )
                if name in _RESERVED:
                    raise ParseError(
                        f"{name!r} is a reserved word", line=lineno, column=col + 1
                    )
            if len(set(names)) != len(names):
                raise ParseError("duplicate variable name", line=lineno, column=col + 1)
            variables = tuple(names)
            continue

        if variables is None:
            raise ParseError(
                "vars declaration must come first", line=lineno, column=col + 1
            )

        if stmt.startswith("param") and (len(stmt) == 5 or stmt[5].isspace()):
            m = re.fullmatch(r"param\s+([A-Za-z_][A-Za-z_0-9]*)\s*=\s*(.+)", stmt)
            if m is None:
                raise ParseError(
                    "expected: param <name> = <rational>", line=lineno, column=col + 1
                )
            name = m.group(1)
            if name in _RESERVED or name in variables or name in params:
                raise ParseError(
                    f"parameter name {name!r} is taken", line=lineno, column=col + 1
                )
            value = parse_arithmetic(
                m.group(2),
                _RatAlgebra(),
                line=lineno,
                col_offset=col + m.start(2),
            )
            if not is_rational(value):  # pragma: no cover - algebra is closed
                raise ParseError("parameter value is not rational", line=lineno)
            params[name] = rat(value)
            continue

        m = re.match(r"([A-Za-z_][A-Za-z_0-9]*)\s*'\s*=", stmt)
        if m is None:
            raise ParseError(f"bad statement {stmt!r}", line=lineno, column=col + 1)
        name = m.group(1)
        if name not in variables:
            raise ParseError(
                f"equation for undeclared variable {name!r}",
                line=lineno,
                column=col + 1,
            )
        if name in equations:
            raise ParseError(
                f"duplicate equation for {name!r}", line=lineno, column=col + 1
            )
        equations[name] = parse_arithmetic(
            stmt[m.end():],
            _OdeAlgebra(variables, params),
            line=lineno,
            col_offset=col + m.end(),
        )

    if variables is None:
        raise ParseError("missing vars declaration")
    missing = [name for name in variables if name not in equations]
    if missing:
        raise ParseError(f"missing equation for {missing[0]!r}")
    return ODESystem(
        variables=variables,
        rhs=tuple(equations[name] for name in variables),
        parameters=params,
    )


class DiffCache:
    """Shared store of partial-derivative tensors and per-tree differentials.

    Mixed partials commute for the expression class at hand, so tensors are
    keyed by *sorted* index tuples; asking for ``(2, 0, 1)`` and ``(0, 1, 2)``
    builds one entry.  ``tensor_builds`` and ``tree_builds`` count actual
    constructions, not lookups — tests use them to pin the sharing.
    """

    def __init__(self, system: ODESystem):
        self.system = system
        self._partials: dict[tuple[int, tuple[int, ...]], Expression] = {}
        self._trees: dict[bytes, tuple[Expression, ...]] = {}
        self.tensor_builds = 0
        self.tree_builds = 0

    def partial(self, component: int, indices: tuple[int, ...]) -> Expression:
        """d^m f_component / dy_{i1} ... dy_{im}, indices sorted ascending."""
        indices = tuple(sorted(indices))
        key = (component, indices)
        out = self._partials.get(key)
        if out is None:
            if indices:
                prefix = self.partial(component, indices[:-1])
                out = differentiate(prefix, indices[-1])
            else:
                out = self.system.rhs[component]
            self.tensor_builds += 1
            self._partials[key] = out
        return out

    def elementary(self, tree: RootedTree) -> tuple[Expression, ...]:
        """The tree's elementary differential, one expression per component."""
        key = tree._levels
        out = self._trees.get(key)
        if out is not None:
            return out
        n = self.system.dimension
        children = tree.children()
        if not children:
            out = self.system.rhs
        else:
            child_vals = [self.elementary(child) for child in children]
            m = len(children)
            components = []
            for j in range(n):
                terms = []
                for assignment in product(range(n), repeat=m):
                    factors = [self.partial(j, tuple(sorted(assignment)))]
                    for i, k in enumerate(assignment):
                        factors.append(child_vals[i][k])
                    terms.append(mul_all(factors))
                components.append(add_all(terms))
            out = tuple(components)
        self.tree_builds += 1
        self._trees[key] = out
        return out


def elementary_differential(
    system: ODESystem, tree: RootedTree, cache: Optional[DiffCache] = None
) -> tuple[Expression, ...]:
    """One-shot elementary differential; pass a cache to share work."""
    if cache is None:
        cache = DiffCache(system)
    elif cache.system is not system:
        raise ValueError("cache belongs to a different system")
    return cache.elementary(tree)


def series_vector_field(
    series: TruncatedBSeries,
    system: ODESystem,
    cache: Optional[DiffCache] = None,
) -> list[list[tuple[int, Expression]]]:
    """Expand a series over a concrete system into per-component terms.

    For each component j, returns a dense list of ``(degree, expression)``
    pairs for degrees 0..max_order: degree 0 carries ``empty * y_j`` and
    degree d >= 1 collects ``coeff(t)/symmetry(t) * F_j(t)`` over the trees
    of that order (the step size is *not* substituted — callers weight
    degree d by h**d themselves).  Series coefficients are evaluated at the
    system's parameters first; a symbol with no binding raises
    :class:`UnboundSymbolError`.
    """
    from .coefficients import coeff_eval, coeff_is_zero
    from .trees import trees_of_order

    if cache is None:
        cache = DiffCache(system)
    elif cache.system is not system:
        raise ValueError("cache belongs to a different system")

    bindings = {name: rat(v) for name, v in system.parameters.items()}
    out: list[list[tuple[int, Expression]]] = [[] for _ in system.variables]

    empty = coeff_eval(series.empty, bindings)
    for j in range(system.dimension):
        zero_deg = mul_all((const(empty), variable(j))) if empty != 0 else const(0)
        out[j].append((0, zero_deg))

    for order in range(1, series.max_order + 1):
        buckets: list[list[Expression]] = [[] for _ in system.variables]
        for tree in trees_of_order(order):
            c = coeff_eval(series[tree], bindings)
            if coeff_is_zero(c):
                continue
            weight = const(rat(c) / rat(tree.symmetry()))
            diff = cache.elementary(tree)
            for j in range(system.dimension):
                buckets[j].append(mul_all((weight, diff[j])))
        for j in range(system.dimension):
            out[j].append((order, add_all(buckets[j])))
    return out
