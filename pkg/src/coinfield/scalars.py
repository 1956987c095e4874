"""Exact arithmetic in the scalar field Q(i, sqrt2).

A Scalar is a + b*sqrt2 + c*i + d*i*sqrt2 with Fraction components, kept in
lowest terms by Fraction itself.  This is the smallest field that contains
the rationals, the 1/sqrt2 appearing in gate entries, and the imaginary
unit needed for complex constant coins.
"""

from __future__ import annotations

import math
from fractions import Fraction


def _frac(x: int | Fraction) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"expected int or Fraction, got {type(x).__name__}")


def sqrt_fraction(q: Fraction) -> Fraction | None:
    """Exact square root of a nonnegative rational, or None."""
    if q < 0:
        return None
    rn = math.isqrt(q.numerator)
    rd = math.isqrt(q.denominator)
    if rn * rn == q.numerator and rd * rd == q.denominator:
        return Fraction(rn, rd)
    return None


class Scalar:
    """Element a + b*sqrt2 + c*i + d*i*sqrt2 of Q(i, sqrt2)."""

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a: int | Fraction = 0, b: int | Fraction = 0,
                 c: int | Fraction = 0, d: int | Fraction = 0):
        self.a = _frac(a)
        self.b = _frac(b)
        self.c = _frac(c)
        self.d = _frac(d)

    # -- structure ---------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Scalar(other)
        if not isinstance(other, Scalar):
            return NotImplemented
        return (self.a, self.b, self.c, self.d) == (other.a, other.b, other.c, other.d)

    def __hash__(self) -> int:
        return hash((self.a, self.b, self.c, self.d))

    def __bool__(self) -> bool:
        return bool(self.a or self.b or self.c or self.d)

    def is_rational(self) -> bool:
        return not (self.b or self.c or self.d)

    def is_real(self) -> bool:
        return not (self.c or self.d)

    def as_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.a

    # -- field operations --------------------------------------------------

    def __add__(self, other: "Scalar | int | Fraction") -> "Scalar":
        o = other if isinstance(other, Scalar) else Scalar(other)
        return Scalar(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)

    __radd__ = __add__

    def __neg__(self) -> "Scalar":
        return Scalar(-self.a, -self.b, -self.c, -self.d)

    def __sub__(self, other: "Scalar | int | Fraction") -> "Scalar":
        o = other if isinstance(other, Scalar) else Scalar(other)
        return Scalar(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d)

    def __rsub__(self, other: "Scalar | int | Fraction") -> "Scalar":
        return Scalar(other) - self

    def __mul__(self, other: "Scalar | int | Fraction") -> "Scalar":
        o = other if isinstance(other, Scalar) else Scalar(other)
        a1, b1, c1, d1 = self.a, self.b, self.c, self.d
        a2, b2, c2, d2 = o.a, o.b, o.c, o.d
        # fast paths for the common shapes (rational, rational+i)
        if not (b1 or c1 or d1):
            if not a1:
                return ZERO
            return Scalar(a1 * a2, a1 * b2, a1 * c2, a1 * d2)
        if not (b2 or c2 or d2):
            if not a2:
                return ZERO
            return Scalar(a1 * a2, b1 * a2, c1 * a2, d1 * a2)
        if not (b1 or d1 or b2 or d2):
            return Scalar(a1 * a2 - c1 * c2, 0, a1 * c2 + c1 * a2, 0)
        return Scalar(
            a1 * a2 + 2 * b1 * b2 - c1 * c2 - 2 * d1 * d2,
            a1 * b2 + b1 * a2 - c1 * d2 - d1 * c2,
            a1 * c2 + c1 * a2 + 2 * (b1 * d2 + d1 * b2),
            a1 * d2 + d1 * a2 + b1 * c2 + c1 * b2,
        )

    __rmul__ = __mul__

    def conj(self) -> "Scalar":
        """Complex conjugate: negates the i and i*sqrt2 components."""
        return Scalar(self.a, self.b, -self.c, -self.d)

    def inverse(self) -> "Scalar":
        if not self:
            raise ZeroDivisionError("division by zero scalar")
        if not (self.b or self.c or self.d):
            return Scalar(1 / self.a)
        # |z|^2 = u + v*sqrt2 is real and positive; invert it in Q(sqrt2).
        m = self.conj()
        n = self * m
        assert n.is_real()
        u, v = n.a, n.b
        det = u * u - 2 * v * v
        return m * Scalar(u / det, -v / det)

    def __truediv__(self, other: "Scalar | int | Fraction") -> "Scalar":
        o = other if isinstance(other, Scalar) else Scalar(other)
        return self * o.inverse()

    def __rtruediv__(self, other: "Scalar | int | Fraction") -> "Scalar":
        return Scalar(other) * self.inverse()

    def __pow__(self, n: int) -> "Scalar":
        if n < 0:
            return self.inverse() ** (-n)
        out = ONE
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    # -- order (real elements only) ---------------------------------------

    def sign(self) -> int:
        """Exact sign of a real scalar a + b*sqrt2."""
        if not self.is_real():
            raise ValueError(f"sign of non-real scalar {self}")
        a, b = self.a, self.b
        if a == 0 and b == 0:
            return 0
        if a >= 0 and b >= 0:
            return 1
        if a <= 0 and b <= 0:
            return -1
        # mixed signs: compare a^2 with 2 b^2
        diff = a * a - 2 * b * b
        if diff == 0:
            # sqrt2 is irrational, so a + b*sqrt2 = 0 forces a = b = 0
            raise AssertionError("unreachable")
        positive_side = a > 0
        return 1 if (diff > 0) == positive_side else -1

    def __lt__(self, other: "Scalar | int | Fraction") -> bool:
        o = other if isinstance(other, Scalar) else Scalar(other)
        return (self - o).sign() < 0

    def __le__(self, other: "Scalar | int | Fraction") -> bool:
        o = other if isinstance(other, Scalar) else Scalar(other)
        return (self - o).sign() <= 0

    def __gt__(self, other: "Scalar | int | Fraction") -> bool:
        return not self.__le__(other)

    def __ge__(self, other: "Scalar | int | Fraction") -> bool:
        return not self.__lt__(other)

    def abs_real(self) -> "Scalar":
        return -self if self.sign() < 0 else self

    # -- square root of a rational value -----------------------------------

    def is_square_rational(self) -> "Scalar | None":
        """Nonnegative rational square root if this is a rational square, else None."""
        if not self.is_rational():
            return None
        r = sqrt_fraction(self.a)
        return None if r is None else Scalar(r)

    # -- evaluation and rendering ------------------------------------------

    def to_complex(self) -> complex:
        s2 = math.sqrt(2.0)
        return complex(float(self.a) + float(self.b) * s2,
                       float(self.c) + float(self.d) * s2)

    def __str__(self) -> str:
        terms: list[str] = []
        for coeff, unit in ((self.a, ""), (self.b, "sqrt2"), (self.c, "i"), (self.d, "i*sqrt2")):
            if coeff == 0:
                continue
            if unit == "":
                terms.append(str(coeff))
            elif coeff == 1:
                terms.append(unit)
            elif coeff == -1:
                terms.append(f"-{unit}")
            else:
                terms.append(f"{coeff}*{unit}")
        if not terms:
            return "0"
        out = terms[0]
        for t in terms[1:]:
            out += f" - {t[1:]}" if t.startswith("-") else f" + {t}"
        return out

    def __repr__(self) -> str:
        return f"Scalar({self})"

    # -- serialization -----------------------------------------------------

    def to_json(self) -> list[str]:
        return [str(self.a), str(self.b), str(self.c), str(self.d)]

    @staticmethod
    def from_json(data: list[str]) -> "Scalar":
        return Scalar(*(Fraction(part) for part in data))


ZERO = Scalar(0)
ONE = Scalar(1)
SQRT2 = Scalar(0, 1)
I_UNIT = Scalar(0, 0, 1)
HALF_SQRT2 = Scalar(0, Fraction(1, 2))
