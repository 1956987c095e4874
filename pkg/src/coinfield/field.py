"""Elements r(p) + s(p)*t over the coin parameter, t^2 = p/(1-p).

Membership of a target ratio in this field is exactly what separates
simulable targets from unsimulable ones, so everything here is exact:
rational-function coefficients, no floating point in any decision path.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .polys import (ONE_POLY, AlgebraicPoint, Poly, RatFn, ZERO_RF,
                    _squarefree_part, poly_gcd, sturm_count)
from .scalars import Scalar, sqrt_fraction

# t^2 = p/(1-p); w = sqrt(p(1-p)) = t*(1-p) is the polynomial-friendly twin
TAU = RatFn(Poly((0, 1)), Poly((1, -1)))
W_SQUARED = Poly((0, 1, -1))

ONE_MINUS_P = Poly((1, -1))


class Infinity:
    """Projective point at infinity for amplitude ratios (zero |1> amplitude)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INFINITY"

    def __str__(self) -> str:
        return "inf"


INFINITY = Infinity()


class FieldElem:
    """r + s*t with rational-function r, s over the exact scalar field."""

    __slots__ = ("r", "s")

    def __init__(self, r: RatFn, s: RatFn = ZERO_RF):
        self.r = r
        self.s = s

    # -- constructors ------------------------------------------------------

    @staticmethod
    def const(x: Scalar | int | Fraction) -> "FieldElem":
        return FieldElem(RatFn.const(x))

    @staticmethod
    def coin() -> "FieldElem":
        return FieldElem(ZERO_RF, RatFn.const(1))

    @staticmethod
    def from_ratfn(f: RatFn) -> "FieldElem":
        return FieldElem(f)

    # -- structure ---------------------------------------------------------

    def is_zero(self) -> bool:
        return self.r.is_zero() and self.s.is_zero()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FieldElem):
            return NotImplemented
        return self.r == other.r and self.s == other.s

    def __hash__(self) -> int:
        return hash((self.r, self.s))

    def __bool__(self) -> bool:
        return not self.is_zero()

    # -- field operations --------------------------------------------------

    def __add__(self, other: "FieldElem") -> "FieldElem":
        return FieldElem(self.r + other.r, self.s + other.s)

    def __neg__(self) -> "FieldElem":
        return FieldElem(-self.r, -self.s)

    def __sub__(self, other: "FieldElem") -> "FieldElem":
        return self + (-other)

    def __mul__(self, other: "FieldElem") -> "FieldElem":
        r = self.r * other.r + self.s * other.s * TAU
        s = self.r * other.s + self.s * other.r
        return FieldElem(r, s)

    def inverse(self) -> "FieldElem":
        den = self.r * self.r - self.s * self.s * TAU
        if den.is_zero():
            raise ZeroDivisionError("inverse of the zero element")
        return FieldElem(self.r / den, -(self.s / den))

    def __truediv__(self, other: "FieldElem") -> "FieldElem":
        return self * other.inverse()

    def __pow__(self, n: int) -> "FieldElem":
        if n < 0:
            return self.inverse() ** (-n)
        out = FE_ONE
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def conj(self) -> "FieldElem":
        return FieldElem(self.r.conj(), self.s.conj())

    def mod_squared(self) -> "FieldElem":
        r = self.r * self.r.conj() + self.s * self.s.conj() * TAU
        s = self.r.conj() * self.s + self.r * self.s.conj()
        return FieldElem(r, s)

    # -- evaluation --------------------------------------------------------

    def eval(self, p0: Fraction | float) -> complex:
        x = float(p0)
        if not 0 < x < 1:
            raise ValueError("coin bias must lie strictly inside (0, 1)")
        t0 = (x / (1 - x)) ** 0.5
        return self.r.eval_complex(x) + self.s.eval_complex(x) * t0

    # -- rendering ---------------------------------------------------------

    def __str__(self) -> str:
        if self.s.is_zero():
            return str(self.r)
        s = str(self.s)
        if " " in s and not (s.startswith("(") and s.endswith(")")):
            s = f"({s})"
        tpart = "t" if s == "1" else f"{s}*t"
        if self.r.is_zero():
            return tpart
        return f"{self.r} + {tpart}"

    def __repr__(self) -> str:
        return f"FieldElem({self})"

    def to_json(self) -> dict:
        return {"r": self.r.to_json(), "s": self.s.to_json()}

    @staticmethod
    def from_json(data: dict) -> "FieldElem":
        return FieldElem(RatFn.from_json(data["r"]), RatFn.from_json(data["s"]))


FE_ZERO = FieldElem(ZERO_RF)
FE_ONE = FieldElem(RatFn.const(1))


# -- op-style wrappers -----------------------------------------------------

def fe_add(a: FieldElem, b: FieldElem) -> FieldElem:
    return a + b


def fe_mul(a: FieldElem, b: FieldElem) -> FieldElem:
    return a * b


def fe_inv(a: FieldElem) -> FieldElem:
    return a.inverse()


def fe_conj(a: FieldElem) -> FieldElem:
    return a.conj()


def fe_mod_squared(a: FieldElem) -> FieldElem:
    return a.mod_squared()


def fe_eval(a: FieldElem, p0: Fraction | float) -> complex:
    return a.eval(p0)


# -- square roots inside the scalar field ----------------------------------

def sqrt_in_scalar_field(q: Fraction) -> Scalar | None:
    """An exact square root of rational q inside the scalar field, or None.
    Positive reals land on r or r*sqrt2; negatives pick up a factor of i."""
    q = Fraction(q)
    if q < 0:
        inner = sqrt_in_scalar_field(-q)
        return None if inner is None else Scalar(0, 0, inner.a, inner.b)
    r = sqrt_fraction(q)
    if r is not None:
        return Scalar(r)
    r = sqrt_fraction(q / 2)
    if r is not None:
        return Scalar(0, r)
    return None


# -- order forms and vanishing orders --------------------------------------

class OrderForm:
    """(A + B*w)/C with polynomial A, B, C and w = sqrt(p(1-p)).

    Every field element has this shape after clearing denominators; it is the
    representation on which vanishing orders are read off."""

    __slots__ = ("A", "B", "C")

    def __init__(self, A: Poly, B: Poly, C: Poly):
        if C.is_zero():
            raise ZeroDivisionError("order form with zero denominator")
        if A.is_zero() and B.is_zero():
            self.A, self.B, self.C = Poly(), Poly(), ONE_POLY
            return
        g = poly_gcd(poly_gcd(A, B), C)
        if g.degree > 0:
            A, B, C = A // g, B // g, C // g
        self.A, self.B, self.C = A, B, C

    @staticmethod
    def from_field_elem(h: FieldElem) -> "OrderForm":
        # r + s*t = [rn*sd*(1-p) + sn*rd*w] / [rd*sd*(1-p)]
        rn, rd = h.r.num, h.r.den
        sn, sd = h.s.num, h.s.den
        return OrderForm(rn * sd * ONE_MINUS_P, sn * rd, rd * sd * ONE_MINUS_P)

    def to_field_elem(self) -> FieldElem:
        return FieldElem(RatFn(self.A, self.C), RatFn(self.B * ONE_MINUS_P, self.C))

    def is_zero(self) -> bool:
        return self.A.is_zero() and self.B.is_zero()

    def __mul__(self, other: "OrderForm") -> "OrderForm":
        A = self.A * other.A + self.B * other.B * W_SQUARED
        B = self.A * other.B + self.B * other.A
        return OrderForm(A, B, self.C * other.C)

    def equivalent(self, other: "OrderForm") -> bool:
        return (self.A * other.C == other.A * self.C
                and self.B * other.C == other.B * self.C)

    def __str__(self) -> str:
        a = str(self.A)
        b = str(self.B)
        if " " in a:
            a = f"({a})"
        if " " in b:
            b = f"({b})"
        num = a if self.B.is_zero() else f"{a} + {b}*w"
        if self.C.is_one():
            return num
        c = str(self.C)
        if " " in c:
            c = f"({c})"
        return f"({num})/{c}"

    def __repr__(self) -> str:
        return f"OrderForm({self})"


def _ord_at(poly: Poly, z: Fraction) -> int | None:
    """Multiplicity of rational z in a possibly complex polynomial; None if zero poly."""
    if poly.is_zero():
        return None
    return poly.order_at(z)


def _ext_is_zero(a: Scalar, b: Scalar, z: Fraction) -> bool:
    """Is a + b*sqrt(z(1-z)) zero? Exact, whether or not the root lies in the field."""
    q = z * (1 - z)
    w0 = sqrt_in_scalar_field(q)
    if w0 is not None:
        return not (a + b * w0)
    # w0 irrational over the scalar field: a + b*w0 = 0 forces a = b = 0
    return (not a) and (not b)


@dataclass(frozen=True)
class OrderResult:
    """Vanishing order at a point plus a certificate that the residual factor
    m(p) is nonzero there: order reads x = (p-z)^order * m(p), m(z) != 0."""
    order: Fraction
    residual: str


def vanishing_order(form: OrderForm, z: Fraction | int) -> OrderResult:
    """Order of vanishing at z in [0, 1]; half-integers at the endpoints,
    negative for poles."""
    z = Fraction(z)
    if not 0 <= z <= 1:
        raise ValueError("vanishing orders are read on [0, 1]")
    if form.is_zero():
        raise ValueError("vanishing order of the zero form")
    A, B, C = form.A, form.B, form.C
    ordC = _ord_at(C, z)
    if z == 0 or z == 1:
        # w itself vanishes to order 1/2 at each endpoint, and the integer
        # and half-integer contributions can never cancel
        na = _ord_at(A, z)
        nb = _ord_at(B, z)
        if na is None:
            n = Fraction(nb) + Fraction(1, 2)
            why = "A = 0; half-integer order from B alone"
        elif nb is None:
            n = Fraction(na)
            why = "B = 0; integer order from A alone"
        else:
            n = min(Fraction(na), Fraction(nb) + Fraction(1, 2))
            why = (f"min of integer order {na} from A and half-integer "
                   f"order {nb} + 1/2 from B; the two kinds cannot cancel")
        return OrderResult(n - ordC, why)
    divisor = Poly([-z, 1])

    def vanishes(poly: Poly) -> bool:
        return poly.is_zero() or not poly.eval_exact(z)

    shared = 0
    while vanishes(A) and vanishes(B):
        A = A // divisor if not A.is_zero() else A
        B = B // divisor if not B.is_zero() else B
        shared += 1
    if not _ext_is_zero(A.eval_exact(z), B.eval_exact(z), z):
        why = (f"after extracting (p - {z})^{shared}, "
               f"A(z) + B(z)*sqrt(z(1-z)) evaluates to a nonzero value")
        return OrderResult(Fraction(shared - ordC), why)
    # numerator still vanishes through cancellation against w; its conjugate
    # A - B*w cannot vanish too, so the product A^2 - B^2*p*(1-p) carries
    # exactly the remaining order
    prod = A * A - B * B * W_SQUARED
    extra = prod.order_at(z)
    why = (f"after extracting (p - {z})^{shared}, the numerator vanishes by "
           f"cancellation against the root; its conjugate does not, and "
           f"A^2 - B^2*p*(1-p) vanishes to order {extra}")
    return OrderResult(Fraction(shared + extra - ordC), why)


def vanishing_order_at_point(form: OrderForm, pt: AlgebraicPoint) -> OrderResult:
    """Vanishing order at an exactly represented irrational point in (0, 1)."""
    if form.is_zero():
        raise ValueError("vanishing order of the zero form")
    A, B, C = form.A, form.B, form.C
    kA = pt.multiplicity_in_complex(A)
    kB = pt.multiplicity_in_complex(B)
    if kA is None:
        k = kB
    elif kB is None:
        k = kA
    else:
        k = min(kA, kB)
    prod = A * A - B * B * W_SQUARED
    p_ord = pt.multiplicity_in_complex(prod)
    ordC = pt.multiplicity_in_complex(C) or 0
    if p_ord == 2 * k:
        n = k
        why = (f"shared order {k} in A and B; the conjugate product vanishes "
               f"to exactly 2k = {p_ord}, so both conjugates carry order k")
    else:
        assert p_ord > 2 * k, "conjugate orders cannot undershoot the shared part"
        # decide which of A + B*w, A - B*w carries the excess: compare their
        # moduli near the point via the sign of V = 2*Re(A*conj(B))
        V = (A * B.conj() + A.conj() * B).real_part()
        assert not V.is_zero(), "equal moduli would force p_ord == 2k"
        Vs = _squarefree_part(V)
        allowed = 1 if pt.is_root_of(Vs) else 0
        while sturm_count(Vs, pt.lo, pt.hi) > allowed:
            pt.refine()
        below = V.eval_exact(pt.point_below()).sign()
        above = V.eval_exact(pt.point_above()).sign()
        n = p_ord - k if (below < 0 and above < 0) else k
        why = (f"conjugate product vanishes to order {p_ord} > 2k = {2 * k}; "
               f"the modulus-comparison sign ({below}, {above}) assigns the "
               f"excess to {'this' if n > k else 'the conjugate'} branch")
    return OrderResult(Fraction(n - ordC), why)
