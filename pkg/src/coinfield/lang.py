"""Surface syntax for target amplitude ratios.

Grammar (precedence high to low: ^, unary -, * /, + -):

    expr   := term (('+'|'-') term)*
    term   := unary (('*'|'/') unary)*
    unary  := '-' unary | factor
    factor := atom ('^' ['-'] int)?
    atom   := int | 'p' | 'i' | 'sqrt2' | 't' | 'sqrt' '(' expr ')' | '(' expr ')'

Rational literals like 3/4 come out of the division operator. sqrt(...) is
only accepted during lowering when its argument is an exact square (possibly
after dividing by p/(1-p)); everything else is reported as outside the field.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .field import FieldElem, sqrt_in_scalar_field
from .polys import Poly, RatFn, SquareTest, square_test
from .scalars import Scalar

__all__ = [
    "Expr", "RationalConst", "I", "Sqrt2", "P", "T", "Add", "Sub", "Mul",
    "Div", "Pow", "Sqrt", "ParseError", "NotInFieldError", "parse",
    "print_expr", "lower", "field_sqrt", "eval_expr_numeric",
]


class Expr:
    """Base class for parsed expression nodes."""
    __slots__ = ()


@dataclass(frozen=True)
class RationalConst(Expr):
    value: Fraction

    def __post_init__(self):
        object.__setattr__(self, "value", Fraction(self.value))


@dataclass(frozen=True)
class I(Expr):
    """The imaginary unit."""


@dataclass(frozen=True)
class Sqrt2(Expr):
    """The constant sqrt2."""


@dataclass(frozen=True)
class P(Expr):
    """The coin bias variable p."""


@dataclass(frozen=True)
class T(Expr):
    """The coin amplitude ratio sqrt(p/(1-p))."""


@dataclass(frozen=True)
class Add(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Sub(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Mul(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Div(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Pow(Expr):
    base: Expr
    exp: int


@dataclass(frozen=True)
class Sqrt(Expr):
    child: Expr


class ParseError(ValueError):
    """Syntax error with the offending position."""

    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at position {pos})")
        self.pos = pos


class NotInFieldError(ValueError):
    """Lowering failure: the expression leaves the simulable field."""

    def __init__(self, message: str, odd_factors: tuple[Poly, ...] = (),
                 t_route_odd_factors: tuple[Poly, ...] = ()):
        super().__init__(message)
        self.odd_factors = odd_factors
        self.t_route_odd_factors = t_route_odd_factors


# -- tokenizer -------------------------------------------------------------

_OPS = set("+-*/^()")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    out = []
    k = 0
    n = len(text)
    while k < n:
        ch = text[k]
        if ch.isspace():
            k += 1
            continue
        if ch in _OPS:
            out.append(("op", ch, k))
            k += 1
            continue
        if ch.isdigit():
            start = k
            while k < n and text[k].isdigit():
                k += 1
            out.append(("int", text[start:k], start))
            continue
        if ch.isalpha() or ch == "_":
            start = k
            while k < n and (text[k].isalnum() or text[k] == "_"):
                k += 1
            out.append(("name", text[start:k], start))
            continue
        raise ParseError(f"unexpected character {ch!r}", k)
    out.append(("eof", "", n))
    return out


class _Parser:
    __slots__ = ("toks", "k")

    def __init__(self, toks):
        self.toks = toks
        self.k = 0

    def peek(self):
        return self.toks[self.k]

    def next(self):
        tok = self.toks[self.k]
        self.k += 1
        return tok

    def expect_op(self, op: str):
        kind, val, pos = self.peek()
        if kind != "op" or val != op:
            raise ParseError(f"expected {op!r}", pos)
        self.next()

    def expr(self) -> Expr:
        node = self.term()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.next()
                rhs = self.term()
                node = Add(node, rhs) if val == "+" else Sub(node, rhs)
            else:
                return node

    def term(self) -> Expr:
        node = self.unary()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "*/":
                self.next()
                rhs = self.unary()
                node = Mul(node, rhs) if val == "*" else Div(node, rhs)
            else:
                return node

    def unary(self) -> Expr:
        kind, val, _ = self.peek()
        if kind == "op" and val == "-":
            self.next()
            return Sub(RationalConst(Fraction(0)), self.unary())
        return self.factor()

    def factor(self) -> Expr:
        node = self.atom()
        kind, val, _ = self.peek()
        if kind == "op" and val == "^":
            self.next()
            sign = 1
            kind, val, pos = self.peek()
            if kind == "op" and val == "-":
                self.next()
                sign = -1
                kind, val, pos = self.peek()
            if kind != "int":
                raise ParseError("expected an integer exponent", pos)
            self.next()
            return Pow(node, sign * int(val))
        return node

    def atom(self) -> Expr:
        kind, val, pos = self.next()
        if kind == "int":
            return RationalConst(Fraction(int(val)))
        if kind == "name":
            if val == "p":
                return P()
            if val == "i":
                return I()
            if val == "sqrt2":
                return Sqrt2()
            if val == "t":
                return T()
            if val == "sqrt":
                self.expect_op("(")
                inner = self.expr()
                self.expect_op(")")
                return Sqrt(inner)
            raise ParseError(f"unknown identifier {val!r}", pos)
        if kind == "op" and val == "(":
            inner = self.expr()
            self.expect_op(")")
            return inner
        raise ParseError(f"unexpected {val!r}" if val else "unexpected end of input", pos)


def parse(text: str) -> Expr:
    """Parse a target-ratio expression."""
    parser = _Parser(_tokenize(text))
    node = parser.expr()
    kind, val, pos = parser.peek()
    if kind != "eof":
        raise ParseError(f"trailing input {val!r}", pos)
    return node


# -- printing --------------------------------------------------------------

_ADD, _MUL, _UNARY, _POW, _ATOM = 1, 2, 3, 4, 5


def _render(e: Expr) -> tuple[str, int]:
    if isinstance(e, RationalConst):
        v = e.value
        if v < 0:
            inner, _ = _render(RationalConst(-v))
            return f"-{inner}", _UNARY
        if v.denominator == 1:
            return str(v.numerator), _ATOM
        return f"{v.numerator}/{v.denominator}", _MUL
    if isinstance(e, P):
        return "p", _ATOM
    if isinstance(e, I):
        return "i", _ATOM
    if isinstance(e, Sqrt2):
        return "sqrt2", _ATOM
    if isinstance(e, T):
        return "t", _ATOM
    if isinstance(e, Sqrt):
        inner, _ = _render(e.child)
        return f"sqrt({inner})", _ATOM
    if isinstance(e, Pow):
        base, prec = _render(e.base)
        if prec < _ATOM:
            base = f"({base})"
        return f"{base}^{e.exp}", _POW
    if isinstance(e, Sub) and e.left == RationalConst(Fraction(0)):
        inner, prec = _render(e.right)
        if prec < _UNARY:
            inner = f"({inner})"
        return f"-{inner}", _UNARY
    if isinstance(e, (Add, Sub)):
        op = "+" if isinstance(e, Add) else "-"
        left, lp = _render(e.left)
        right, rp = _render(e.right)
        if lp < _ADD:
            left = f"({left})"
        if rp <= _ADD:
            # left-associative grammar: a same-level right child needs parens
            right = f"({right})"
        return f"{left} {op} {right}", _ADD
    if isinstance(e, (Mul, Div)):
        op = "*" if isinstance(e, Mul) else "/"
        left, lp = _render(e.left)
        right, rp = _render(e.right)
        if lp < _MUL:
            left = f"({left})"
        if rp <= _MUL:
            right = f"({right})"
        return f"{left}{op}{right}", _MUL
    raise TypeError(f"not an expression node: {e!r}")


def print_expr(e: Expr) -> str:
    """Render an expression; parse(print_expr(e)) == e for parser-produced trees."""
    return _render(e)[0]


# -- lowering into the field -----------------------------------------------

_P_RF = RatFn(Poly((0, 1)))
_TAU_INV = RatFn(Poly((1, -1)), Poly((0, 1)))  # (1-p)/p

def _sign_probe_points():
    yield Fraction(1, 2)
    denom = 4
    while True:
        yield Fraction(1, denom)
        yield Fraction(denom - 1, denom)
        denom *= 2


def _sign_fix(q: RatFn) -> RatFn:
    """Pick the square-root representative that is nonnegative at p = 1/2,
    breaking ties (zeros, poles) at points further out."""
    if q.is_zero():
        return q
    for x in _sign_probe_points():
        try:
            s = q.eval_exact(x).sign()
        except ZeroDivisionError:
            continue
        if s < 0:
            return -q
        if s > 0:
            return q
    raise AssertionError("unreachable: nonzero rational function with no sign")


def _scalar_scaled_root(res: SquareTest, u: RatFn) -> RatFn | None:
    """Root of u = lc * q(p)^2 where sqrt(lc) needs sqrt2 or i but still
    lands in the scalar field."""
    if res.odd_factors or res.lc_ratio is None or not res.lc_ratio:
        return None
    s = sqrt_in_scalar_field(res.lc_ratio)
    if s is None:
        return None
    base = square_test(u * RatFn.const(Scalar(1 / res.lc_ratio)))
    return RatFn.const(s) * _sign_fix(base.root)


def _lower_sqrt(child: FieldElem) -> FieldElem:
    if not child.s.is_zero():
        raise NotInFieldError(
            "sqrt argument must be a rational function of p alone "
            "(no t component)")
    u = child.r
    if not u.is_rational():
        raise NotInFieldError(
            "sqrt argument must have rational coefficients")
    direct = square_test(u)
    if direct.root is not None:
        return FieldElem(_sign_fix(direct.root))
    scaled = _scalar_scaled_root(direct, u)
    if scaled is not None:
        return FieldElem(scaled)
    via_t = square_test(u * _TAU_INV)
    if via_t.root is not None:
        return FieldElem(RatFn(Poly()), _sign_fix(via_t.root))
    scaled_t = _scalar_scaled_root(via_t, u * _TAU_INV)
    if scaled_t is not None:
        return FieldElem(RatFn(Poly()), scaled_t)
    odd = tuple(f.sign_normalized() for f in direct.odd_factors)
    odd_t = tuple(f.sign_normalized() for f in via_t.odd_factors)
    detail = ", ".join(str(f) for f in odd) if odd else "leading coefficient not a square"
    raise NotInFieldError(
        f"sqrt argument is not an exact square, directly or after dividing "
        f"by p/(1-p); odd-multiplicity factors: {{{detail}}}",
        odd_factors=odd, t_route_odd_factors=odd_t)


def field_sqrt(u: RatFn) -> FieldElem:
    """Square root of a real rational function inside the field: u = q^2
    gives q, u = q^2 * p/(1-p) gives q*t. Raises NotInFieldError otherwise."""
    return _lower_sqrt(FieldElem(u))


def lower(e: Expr) -> FieldElem:
    """Evaluate the tree inside the field; raises NotInFieldError when the
    expression falls outside it."""
    if isinstance(e, RationalConst):
        return FieldElem.const(e.value)
    if isinstance(e, I):
        return FieldElem.const(Scalar(0, 0, 1))
    if isinstance(e, Sqrt2):
        return FieldElem.const(Scalar(0, 1))
    if isinstance(e, P):
        return FieldElem(_P_RF)
    if isinstance(e, T):
        return FieldElem.coin()
    if isinstance(e, Add):
        return lower(e.left) + lower(e.right)
    if isinstance(e, Sub):
        return lower(e.left) - lower(e.right)
    if isinstance(e, Mul):
        return lower(e.left) * lower(e.right)
    if isinstance(e, Div):
        den = lower(e.right)
        if den.is_zero():
            raise ZeroDivisionError("division by the zero element")
        return lower(e.left) / den
    if isinstance(e, Pow):
        return lower(e.base) ** e.exp
    if isinstance(e, Sqrt):
        return _lower_sqrt(lower(e.child))
    raise TypeError(f"not an expression node: {e!r}")


def eval_expr_numeric(e: Expr, p0: float) -> complex:
    """Direct floating evaluation, the numeric oracle for lowering.
    Sqrt takes the principal branch, so compare squares when signs matter."""
    if isinstance(e, RationalConst):
        return complex(e.value)
    if isinstance(e, I):
        return 1j
    if isinstance(e, Sqrt2):
        return complex(math.sqrt(2))
    if isinstance(e, P):
        return complex(p0)
    if isinstance(e, T):
        return complex(math.sqrt(p0 / (1 - p0)))
    if isinstance(e, Add):
        return eval_expr_numeric(e.left, p0) + eval_expr_numeric(e.right, p0)
    if isinstance(e, Sub):
        return eval_expr_numeric(e.left, p0) - eval_expr_numeric(e.right, p0)
    if isinstance(e, Mul):
        return eval_expr_numeric(e.left, p0) * eval_expr_numeric(e.right, p0)
    if isinstance(e, Div):
        return eval_expr_numeric(e.left, p0) / eval_expr_numeric(e.right, p0)
    if isinstance(e, Pow):
        return eval_expr_numeric(e.base, p0) ** e.exp
    if isinstance(e, Sqrt):
        return complex(eval_expr_numeric(e.child, p0)) ** 0.5
    raise TypeError(f"not an expression node: {e!r}")
