"""
Provides the scalar expression language.

Expressions define the vector fields ``f_i``, the Lyapunov functions ``V_i``,
the gain ``gamma`` and time-varying inputs. They are parsed with a lark LALR
grammar into an immutable tree of nodes that can be evaluated (on scalars or
numpy arrays) and differentiated symbolically.

.. code-block:: python

    from psiss.expr import parse_expression, evaluate, differentiate

    V = parse_expression("0.5*(x1^2 + 1.25*x2^2)", ["x1", "x2"])

    evaluate(V, {"x1": 1.0, "x2": 0.0})   # 0.5
    str(differentiate(V, "x1"))          # 'x1'

"""

from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from lark import Lark, Token, Tree
from lark.exceptions import UnexpectedCharacters, UnexpectedEOF, UnexpectedInput

from .exceptions import (
    DomainError,
    ExpressionSyntaxError,
    MissingBindingError,
    UnknownVariableError,
)

GRAMMAR = r"""
    ?start: sum

    ?sum: product
        | sum "+" product -> add
        | sum "-" product -> sub

    ?product: unary
        | product "*" unary -> mul
        | product "/" unary -> div

    ?unary: power
        | "-" unary -> neg
        | "+" unary

    ?power: atom
        | power "^" exponent -> pow

    ?exponent: atom
        | "-" exponent -> neg
        | "+" exponent

    ?atom: NUMBER -> number
        | NAME "(" sum ")" -> call
        | NAME -> var
        | "(" sum ")"

    NUMBER: /(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?/
    NAME: /[A-Za-z_][A-Za-z_0-9]*/

    %ignore /\s+/
"""

FUNCTIONS = ("sin", "cos", "exp", "ln", "abs", "sqrt")

_parser = Lark(GRAMMAR, parser="lalr", propagate_positions=True)

_NUMPY_FUNCTIONS = {
    "sin": np.sin,
    "cos": np.cos,
    "exp": np.exp,
    "ln": np.log,
    "abs": np.abs,
    "sqrt": np.sqrt,
}

# binding strength used when printing
_PREC_SUM = 1
_PREC_PRODUCT = 2
_PREC_UNARY = 3
_PREC_POWER = 4
_PREC_ATOM = 5


class Expr:
    """Base class of all expression nodes."""

    @property
    def variables(self) -> frozenset:
        """Free variable names of the expression."""
        return frozenset()

    @property
    def _precedence(self) -> int:
        return _PREC_ATOM


@dataclass(frozen=True)
class Const(Expr):
    """Numeric literal."""

    value: float

    @property
    def _precedence(self):
        return _PREC_UNARY if self.value < 0 else _PREC_ATOM

    def __str__(self):
        """Shortest repr of the value."""
        return repr(float(self.value))


@dataclass(frozen=True)
class Var(Expr):
    """Named variable."""

    name: str

    @property
    def variables(self):
        """Set holding the variable name."""
        return frozenset((self.name,))

    def __str__(self):
        """Variable name."""
        return self.name


@dataclass(frozen=True)
class Unary(Expr):
    """Negation (``op == "neg"``) or one of the named functions."""

    op: str
    arg: Expr

    @property
    def variables(self):
        """Variables of the argument."""
        return self.arg.variables

    @property
    def _precedence(self):
        return _PREC_UNARY if self.op == "neg" else _PREC_ATOM

    def __str__(self):
        """Prefix minus or function call notation."""
        if self.op == "neg":
            return "-" + _wrap(self.arg, self.arg._precedence < _PREC_UNARY)
        return f"{self.op}({self.arg})"


@dataclass(frozen=True)
class Binary(Expr):
    """One of ``add``, ``sub``, ``mul`` or ``div``."""

    op: str
    left: Expr
    right: Expr

    SYMBOLS = {"add": "+", "sub": "-", "mul": "*", "div": "/"}

    @property
    def variables(self):
        """Variables of both operands."""
        return self.left.variables | self.right.variables

    @property
    def _precedence(self):
        return _PREC_SUM if self.op in ("add", "sub") else _PREC_PRODUCT

    def __str__(self):
        """Infix notation with minimal parentheses."""
        prec = self._precedence
        left = _wrap(self.left, self.left._precedence < prec)
        right = _wrap(self.right, self.right._precedence <= prec)
        return f"{left} {Binary.SYMBOLS[self.op]} {right}"


@dataclass(frozen=True)
class Pow(Expr):
    """Power with a constant real exponent."""

    base: Expr
    exponent: float

    @property
    def variables(self):
        """Variables of the base."""
        return self.base.variables

    @property
    def _precedence(self):
        return _PREC_POWER

    def __str__(self):
        """Base, caret and constant exponent."""
        base = _wrap(self.base, self.base._precedence < _PREC_POWER)
        return f"{base}^{float(self.exponent)!r}"


def _wrap(node: Expr, parens: bool) -> str:
    return f"({node})" if parens else str(node)


def parse_expression(text: str, allowed_vars: Iterable[str]) -> Expr:
    """
    Parse expression text into an :class:`Expr`.

    :param text: Infix expression. ``^`` binds tighter than unary minus, which
        binds tighter than ``*`` and ``/``. Exponents must be constant.
    :param allowed_vars: Names the expression may reference.

    :raises ExpressionSyntaxError: with the 0-based character offset of the
        offending input (``len(text)`` when the input ends too early).
    :raises UnknownVariableError: naming the first undeclared variable.
    """

    if not isinstance(text, str):
        raise ValueError("expression text expected to be a string")
    if not text.strip():
        raise ExpressionSyntaxError("empty expression", 0)

    try:
        tree = _parser.parse(text)
    except UnexpectedEOF:
        raise ExpressionSyntaxError("unexpected end of input", len(text)) from None
    except UnexpectedCharacters as e:
        raise ExpressionSyntaxError("unexpected character", e.pos_in_stream) from None
    except UnexpectedInput as e:
        token = getattr(e, "token", None)
        if token is None or token.type == "$END":
            position = len(text)
        else:
            position = token.start_pos
        raise ExpressionSyntaxError("unexpected token", position) from None

    return _build(tree, frozenset(allowed_vars))


def _build(node, allowed: frozenset) -> Expr:
    """Walk a lark parse tree into expression nodes."""

    if isinstance(node, Token):
        # bare tokens only appear through inlined rules
        kind = "number" if node.type == "NUMBER" else "var"
        return _build(Tree(kind, [node]), allowed)

    kind = node.data
    children = node.children

    if kind == "number":
        return Const(float(children[0]))
    if kind == "var":
        name = str(children[0])
        if name not in allowed:
            raise UnknownVariableError(name)
        return Var(name)
    if kind == "call":
        name = str(children[0])
        if name not in FUNCTIONS:
            raise ExpressionSyntaxError(
                f"unknown function '{name}'", children[0].start_pos
            )
        return Unary(name, _build(children[1], allowed))
    if kind == "neg":
        return Unary("neg", _build(children[0], allowed))
    if kind in ("add", "sub", "mul", "div"):
        return Binary(kind, _build(children[0], allowed), _build(children[1], allowed))
    if kind == "pow":
        exponent = _build(children[1], allowed)
        if exponent.variables:
            position = getattr(children[1].meta, "start_pos", 0)
            raise ExpressionSyntaxError("exponent must be constant", position)
        return Pow(_build(children[0], allowed), _constant_value(exponent))

    raise ExpressionSyntaxError(f"unsupported construct '{kind}'", 0)


def _constant_value(node: Expr) -> float:
    try:
        with np.errstate(divide="raise", invalid="raise", over="raise", under="ignore"):
            return float(_eval(node, {}))
    except FloatingPointError as e:
        raise DomainError(f"constant exponent is undefined: {e}") from None


def evaluate(e: Expr, bindings: Mapping[str, object]):
    """
    Evaluate an expression.

    Bindings may be floats or numpy arrays; arrays broadcast against each other
    and the result is an array of the broadcast shape. With scalar bindings the
    result is a ``float``.

    :raises MissingBindingError: when a free variable is not bound.
    :raises DomainError: on ln/sqrt of a negative number, division by zero or
        overflow.
    """

    for name in sorted(e.variables):
        if name not in bindings:
            raise MissingBindingError(name)

    values = {name: np.asarray(value, dtype=float) for name, value in bindings.items()}

    try:
        with np.errstate(divide="raise", invalid="raise", over="raise", under="ignore"):
            result = _eval(e, values)
    except FloatingPointError as err:
        raise DomainError(f"cannot evaluate '{e}': {err}") from None

    shapes = [value.shape for value in values.values()]
    shape = np.broadcast_shapes(*shapes) if shapes else ()
    if shape == ():
        return float(result)

    return np.array(np.broadcast_to(result, shape), dtype=float)


def _eval(node: Expr, values):
    if isinstance(node, Const):
        return np.float64(node.value)
    if isinstance(node, Var):
        return values[node.name]
    if isinstance(node, Unary):
        arg = _eval(node.arg, values)
        if node.op == "neg":
            return -arg
        return _NUMPY_FUNCTIONS[node.op](arg)
    if isinstance(node, Binary):
        left = _eval(node.left, values)
        right = _eval(node.right, values)
        if node.op == "add":
            return left + right
        if node.op == "sub":
            return left - right
        if node.op == "mul":
            return left * right
        return np.divide(left, right)
    if isinstance(node, Pow):
        return np.power(_eval(node.base, values), node.exponent)

    raise TypeError(f"not an expression node: {node!r}")


ZERO = Const(0.0)
ONE = Const(1.0)


def _is_const(node, value=None):
    return isinstance(node, Const) and (value is None or node.value == value)


def _neg(a):
    if _is_const(a):
        return Const(-a.value)
    if isinstance(a, Unary) and a.op == "neg":
        return a.arg
    return Unary("neg", a)


def _add(a, b):
    if _is_const(a, 0.0):
        return b
    if _is_const(b, 0.0):
        return a
    if _is_const(a) and _is_const(b):
        return Const(a.value + b.value)
    return Binary("add", a, b)


def _sub(a, b):
    if _is_const(b, 0.0):
        return a
    if _is_const(a, 0.0):
        return _neg(b)
    if _is_const(a) and _is_const(b):
        return Const(a.value - b.value)
    return Binary("sub", a, b)


def _mul(a, b):
    if _is_const(b) and not _is_const(a):
        a, b = b, a
    if _is_const(a, 0.0) or _is_const(b, 0.0):
        return ZERO
    if _is_const(a, 1.0):
        return b
    if _is_const(a, -1.0):
        return _neg(b)
    if _is_const(a) and _is_const(b):
        return Const(a.value * b.value)
    if _is_const(a) and isinstance(b, Binary) and b.op == "mul" and _is_const(b.left):
        return _mul(Const(a.value * b.left.value), b.right)
    return Binary("mul", a, b)


def _div(a, b):
    if _is_const(a, 0.0):
        return ZERO
    if _is_const(b, 1.0):
        return a
    return Binary("div", a, b)


def _pow(base, exponent):
    if exponent == 0.0:
        return ONE
    if exponent == 1.0:
        return base
    return Pow(base, exponent)


def differentiate(e: Expr, var: str) -> Expr:
    """
    Differentiate an expression symbolically.

    Constants are folded while building the result, so differentiating with
    respect to a variable the expression does not contain gives ``Const(0.0)``.
    """

    if not isinstance(var, str) or not var.isidentifier():
        raise ValueError("var expected to be a variable name")

    return _diff(e, var)


def _diff(node: Expr, var: str) -> Expr:
    if var not in node.variables:
        return ZERO
    if isinstance(node, Var):
        return ONE

    if isinstance(node, Unary):
        u = node.arg
        du = _diff(u, var)
        if node.op == "neg":
            return _neg(du)
        if node.op == "sin":
            return _mul(Unary("cos", u), du)
        if node.op == "cos":
            return _neg(_mul(Unary("sin", u), du))
        if node.op == "exp":
            return _mul(node, du)
        if node.op == "ln":
            return _div(du, u)
        if node.op == "abs":
            return _mul(_div(u, node), du)
        if node.op == "sqrt":
            return _div(du, _mul(Const(2.0), node))

    if isinstance(node, Binary):
        u, v = node.left, node.right
        du, dv = _diff(u, var), _diff(v, var)
        if node.op == "add":
            return _add(du, dv)
        if node.op == "sub":
            return _sub(du, dv)
        if node.op == "mul":
            return _add(_mul(du, v), _mul(u, dv))
        if node.op == "div":
            return _div(_sub(_mul(du, v), _mul(u, dv)), _pow(v, 2.0))

    if isinstance(node, Pow):
        p = node.exponent
        return _mul(_mul(Const(p), _pow(node.base, p - 1.0)), _diff(node.base, var))

    raise TypeError(f"not an expression node: {node!r}")
