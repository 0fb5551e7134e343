"""Interned symbolic expressions for vector fields.

A tiny CAS: constants (exact rationals), numbered variables, n-ary sums and
products, and integer powers (negative powers stand for division).  Every
node is hash-consed — structurally equal expressions are the *same object* —
so equality is ``is``, dictionaries keyed by subexpressions are cheap, and
evaluation/differentiation memoize by identity.  The intern table lives for
the process; at the scale this package works at (vector fields of small ODE
systems differentiated a handful of times) that is the right trade.

Normalization at construction keeps the DAG small and canonical: sums and
products flatten and fold their constants, like terms in a sum collect
(``x + x`` is ``2*x``), repeated factors collect into powers, and zero/one
annihilate/disappear.  Products do *not* expand over sums.  Child order is
deterministic: nodes sort by kind and then by a structural digest, so the
same computation prints the same way in every run.
"""

from __future__ import annotations

import hashlib
from typing import Mapping, Sequence

from .errors import CoefficientError
from .rationals import Rat, is_rational, rat, rat_str

_intern: dict = {}


class Expression:
    """Base class; instances are interned, compare by identity."""

    __slots__ = ("_digest", "_rank")

    def _key(self):
        return (self._rank, self._digest)

    # arithmetic sugar; every route funnels into the normalizing builders
    def __add__(self, other):
        other = _as_expr(other)
        return NotImplemented if other is None else add_all((self, other))

    __radd__ = __add__

    def __neg__(self):
        return mul_all((_MINUS_ONE, self))

    def __sub__(self, other):
        other = _as_expr(other)
        return NotImplemented if other is None else add_all((self, -other))

    def __rsub__(self, other):
        other = _as_expr(other)
        return NotImplemented if other is None else add_all((other, -self))

    def __mul__(self, other):
        other = _as_expr(other)
        return NotImplemented if other is None else mul_all((self, other))

    __rmul__ = __mul__

    def __pow__(self, exponent):
        if not isinstance(exponent, int):
            return NotImplemented
        return power(self, exponent)

    def __truediv__(self, other):
        other = _as_expr(other)
        return NotImplemented if other is None else mul_all((self, power(other, -1)))

    def __rtruediv__(self, other):
        other = _as_expr(other)
        return NotImplemented if other is None else mul_all((other, power(self, -1)))


class Const(Expression):
    __slots__ = ("value",)

    def __repr__(self) -> str:
        return f"Const({rat_str(self.value)})"


class Var(Expression):
    __slots__ = ("index",)

    def __repr__(self) -> str:
        return f"Var({self.index})"


class Sum(Expression):
    __slots__ = ("terms",)

    def __repr__(self) -> str:
        return f"Sum({len(self.terms)} terms)"


class Prod(Expression):
    __slots__ = ("factors",)

    def __repr__(self) -> str:
        return f"Prod({len(self.factors)} factors)"


class Power(Expression):
    __slots__ = ("base", "exponent")

    def __repr__(self) -> str:
        return f"Power(exponent={self.exponent})"


def _digest(payload: bytes) -> bytes:
    return hashlib.blake2b(payload, digest_size=16).digest()


def _intern_node(key, build):
    node = _intern.get(key)
    if node is None:
        node = build()
        _intern[key] = node
    return node


def const(value) -> Const:
    value = rat(value)
    key = ("c", value)

    def build():
        node = Const.__new__(Const)
        node.value = value
        node._rank = 0
        node._digest = _digest(b"c" + rat_str(value).encode())
        return node

    return _intern_node(key, build)


def variable(index: int) -> Var:
    if index < 0:
        raise ValueError("variable index must be non-negative")
    key = ("v", index)

    def build():
        node = Var.__new__(Var)
        node.index = index
        node._rank = 1
        node._digest = _digest(b"v%d" % index)
        return node

    return _intern_node(key, build)


_ZERO = const(0)
_ONE = const(1)
_MINUS_ONE = const(-1)


def _as_expr(value):
    if isinstance(value, Expression):
        return value
    if is_rational(value):
        return const(value)
    return None


def add_all(parts: Sequence[Expression]) -> Expression:
    """Sum with flattening, constant folding, and like-term collection."""
    constant = rat(0)
    collected: dict[Expression, Rat] = {}
    order: list[Expression] = []

    def absorb(part: Expression, scale: Rat) -> None:
        nonlocal constant
        if isinstance(part, Const):
            constant += scale * part.value
            return
        if isinstance(part, Sum):
            for term in part.terms:
                absorb(term, scale)
            return
        if isinstance(part, Prod) and isinstance(part.factors[0], Const):
            coeff = scale * part.factors[0].value
            rest = part.factors[1:]
            body = rest[0] if len(rest) == 1 else _raw_prod(rest)
        else:
            coeff = scale
            body = part
        if body in collected:
            collected[body] += coeff
        else:
            collected[body] = coeff
            order.append(body)

    for part in parts:
        absorb(part, rat(1))

    terms: list[Expression] = []
    for body in order:
        coeff = collected[body]
        if coeff == 0:
            continue
        if coeff == 1:
            terms.append(body)
        elif isinstance(body, Prod):
            terms.append(_raw_prod((const(coeff),) + body.factors))
        else:
            terms.append(_raw_prod((const(coeff), body)))
    terms.sort(key=lambda t: t._key())
    if constant != 0:
        terms.append(const(constant))  # constants read best last: "p - 1"
    if not terms:
        return _ZERO
    if len(terms) == 1:
        return terms[0]
    key = ("s", tuple(terms))

    def build():
        node = Sum.__new__(Sum)
        node.terms = tuple(terms)
        node._rank = 4
        node._digest = _digest(b"s" + b"".join(t._digest for t in terms))
        return node

    return _intern_node(key, build)


def _raw_prod(factors: tuple[Expression, ...]) -> Expression:
    """Intern an already-normalized factor tuple (callers guarantee the
    invariants: no nested Prod, at most one leading Const, sorted rest)."""
    if len(factors) == 1:
        return factors[0]
    key = ("p", factors)

    def build():
        node = Prod.__new__(Prod)
        node.factors = factors
        node._rank = 3
        node._digest = _digest(b"p" + b"".join(f._digest for f in factors))
        return node

    return _intern_node(key, build)


def mul_all(parts: Sequence[Expression]) -> Expression:
    """Product with flattening, folding, and power collection."""
    constant = rat(1)
    powers: dict[Expression, int] = {}
    order: list[Expression] = []

    def absorb(part: Expression) -> None:
        nonlocal constant
        if isinstance(part, Const):
            constant *= part.value
            return
        if isinstance(part, Prod):
            for factor in part.factors:
                absorb(factor)
            return
        if isinstance(part, Power):
            base, e = part.base, part.exponent
        else:
            base, e = part, 1
        if base in powers:
            powers[base] += e
        else:
            powers[base] = e
            order.append(base)

    for part in parts:
        absorb(part)
    if constant == 0:
        return _ZERO

    factors: list[Expression] = []
    for base in order:
        e = powers[base]
        if e == 0:
            continue
        factors.append(base if e == 1 else _raw_power(base, e))
    factors.sort(key=lambda f: f._key())
    if constant != 1:
        factors.insert(0, const(constant))
    if not factors:
        return _ONE
    if len(factors) == 1:
        return factors[0]
    return _raw_prod(tuple(factors))


def _raw_power(base: Expression, exponent: int) -> Expression:
    key = ("w", base, exponent)

    def build():
        node = Power.__new__(Power)
        node.base = base
        node.exponent = exponent
        node._rank = 2
        node._digest = _digest(b"w" + base._digest + b"%d" % exponent)
        return node

    return _intern_node(key, build)


def power(base: Expression, exponent: int) -> Expression:
    if exponent == 0:
        return _ONE
    if exponent == 1:
        return base
    if isinstance(base, Const):
        if base.value == 0 and exponent < 0:
            raise CoefficientError("zero raised to a negative power")
        return const(rat(base.value) ** exponent)
    if isinstance(base, Power):
        return power(base.base, base.exponent * exponent)
    if isinstance(base, Prod):
        return mul_all([power(f, exponent) for f in base.factors])
    return _raw_power(base, exponent)


# ---------------------------------------------------------------------------
# calculus and evaluation
# ---------------------------------------------------------------------------

_diff_memo: dict[tuple[Expression, int], Expression] = {}


def differentiate(expr: Expression, index: int) -> Expression:
    """Partial derivative with respect to variable ``index``."""
    key = (expr, index)
    out = _diff_memo.get(key)
    if out is not None:
        return out
    if isinstance(expr, Const):
        out = _ZERO
    elif isinstance(expr, Var):
        out = _ONE if expr.index == index else _ZERO
    elif isinstance(expr, Sum):
        out = add_all([differentiate(t, index) for t in expr.terms])
    elif isinstance(expr, Prod):
        pieces = []
        for i, factor in enumerate(expr.factors):
            d = differentiate(factor, index)
            if d is _ZERO:
                continue
            rest = expr.factors[:i] + expr.factors[i + 1:]
            pieces.append(mul_all(rest + (d,)))
        out = add_all(pieces)
    elif isinstance(expr, Power):
        d = differentiate(expr.base, index)
        if d is _ZERO:
            out = _ZERO
        else:
            out = mul_all(
                (const(expr.exponent), power(expr.base, expr.exponent - 1), d)
            )
    else:  # pragma: no cover
        raise TypeError(f"not an expression: {expr!r}")
    _diff_memo[key] = out
    return out


def eval_expression(expr: Expression, values: Sequence) -> object:
    """Evaluate at a point.  Exact when every value is rational (ints and
    backend rationals); floating otherwise.  Division by zero raises
    ``ZeroDivisionError`` either way."""
    exact = all(not isinstance(v, float) for v in values)
    memo: dict[Expression, object] = {}

    def rec(node: Expression):
        out = memo.get(node)
        if out is not None:
            return out
        if isinstance(node, Const):
            out = rat(node.value) if exact else float(node.value)
        elif isinstance(node, Var):
            if node.index >= len(values):
                raise IndexError(
                    f"expression uses variable {node.index} but only "
                    f"{len(values)} values were given"
                )
            out = values[node.index]
        elif isinstance(node, Sum):
            out = rec(node.terms[0])
            for term in node.terms[1:]:
                out = out + rec(term)
        elif isinstance(node, Prod):
            out = rec(node.factors[0])
            for factor in node.factors[1:]:
                out = out * rec(factor)
        else:
            base = rec(node.base)
            if node.exponent < 0 and base == 0:
                raise ZeroDivisionError("zero base with negative exponent")
            out = base ** node.exponent
        memo[node] = out
        return out

    return rec(expr)


# ---------------------------------------------------------------------------
# printing
# ---------------------------------------------------------------------------

_GREEK_VARS = {
    "alpha", "beta", "gamma", "delta", "epsilon", "theta", "lambda", "mu",
    "sigma", "tau", "phi", "psi", "omega",
}


def _name_latex(name: str) -> str:
    return f"\\{name}" if name in _GREEK_VARS else name


def format_expression(
    expr: Expression, names: Sequence[str], fmt: str = "text"
) -> str:
    """Infix rendering; ``names`` supplies variable names by index.

    Text output uses ``*`` and ``^`` and parses back through the ODE
    expression grammar; LaTeX uses ``\\frac`` for fractional constants.
    """
    if fmt not in ("text", "latex"):
        raise ValueError(f"unknown expression format {fmt!r}")
    latex = fmt == "latex"

    def name_of(index: int) -> str:
        if index < len(names):
            return _name_latex(names[index]) if latex else names[index]
        return f"y{index}"

    def render(node: Expression, context: int) -> str:
        # context: 0 sum, 1 product, 2 power-base
        if isinstance(node, Const):
            if latex:
                from .coefficients import _rat_latex

                s = _rat_latex(node.value)
            else:
                s = rat_str(node.value)
            needs = node.value < 0 and context >= 1
            if context == 2 and rat(node.value).denominator != 1:
                needs = True
            return _paren(s, needs, latex)
        if isinstance(node, Var):
            return name_of(node.index)
        if isinstance(node, Power):
            base = render(node.base, 2)
            if latex:
                return f"{base}^{{{node.exponent}}}"
            return f"{base}^{node.exponent}"
        if isinstance(node, Prod):
            factors = node.factors
            neg = False
            if isinstance(factors[0], Const) and factors[0].value < 0:
                neg = True
                c = -rat(factors[0].value)
                factors = factors[1:] if c == 1 else (const(c),) + factors[1:]
            sep = " " if latex else "*"
            s = sep.join(render(f, 1) for f in factors)
            if neg:
                s = "-" + s
            return _paren(s, context == 2 or (neg and context == 1), latex)
        if isinstance(node, Sum):
            parts = []
            for term in node.terms:
                body = render(term, 0)
                if not parts:
                    parts.append(body)
                elif body.startswith("-"):
                    parts.append(f" - {body[1:]}")
                else:
                    parts.append(f" + {body}")
            return _paren("".join(parts), context >= 1, latex)
        raise TypeError(f"not an expression: {node!r}")  # pragma: no cover

    return render(expr, 0)


def _paren(s: str, needed: bool, latex: bool) -> str:
    if not needed:
        return s
    return f"\\left({s}\\right)" if latex else f"({s})"
