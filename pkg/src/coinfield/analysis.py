"""Decision procedures: simulability of target ratios, square-root witnesses
for probability functions, and the CC/QC/QQ classifier with certificates.

Probability functions enter either as a single rational function or as a
piecewise-rational function on a rational partition of [0,1]. Certificates
(poly-bound witness n, SPB zero/one lists with order, k, delta, c) are
designed to be re-checked by independent code paths.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction

from .field import (FE_ZERO, FieldElem, INFINITY, Infinity, OrderForm,
                    fe_eval, fe_mod_squared, sqrt_in_scalar_field,
                    vanishing_order, vanishing_order_at_point)
from .lang import Expr, NotInFieldError, field_sqrt, lower, parse
from .polys import (AlgebraicPoint, ONE_POLY, Poly, RatFn, certify_nonneg,
                    isolate_roots, sturm_count)
from .polys import P as P_POLY
from .polys import ONE_RF
from .scalars import Scalar

__all__ = [
    "PiecewiseFn", "parse_piecewise", "RatioDecision", "decide_qq_ratio",
    "CorollaryResult", "decide_real_corollary", "check_phased_witness",
    "CCReport", "classify_cc", "SPBEntry", "QCReport", "classify_qc",
    "verify_spb", "QQReport", "classify_qq", "ClassReport", "classify",
]


# -- piecewise probability functions ---------------------------------------

class PiecewiseFn:
    """Real rational pieces on a rational partition of [0,1]; intervals are
    closed-open except the last, which is closed. Pieces must be pole-free
    on the closure of their interval."""

    __slots__ = ("pieces",)

    def __init__(self, pieces):
        pieces = tuple((Fraction(a), Fraction(b), f) for a, b, f in pieces)
        if not pieces:
            raise ValueError("piecewise function needs at least one piece")
        if pieces[0][0] != 0 or pieces[-1][1] != 1:
            raise ValueError("pieces must cover [0,1]")
        for (a, b, f), (a2, _, _) in zip(pieces, pieces[1:] + ((None,) * 3,)):
            if not a < b:
                raise ValueError(f"empty interval [{a},{b})")
            if a2 is not None and a2 != b:
                raise ValueError(f"gap or overlap at p = {b}")
            if not f.is_real():
                raise ValueError("pieces must be real rational functions")
            if not f.den.eval_exact(a) or not f.den.eval_exact(b) \
                    or sturm_count(f.den, a, b) > 0:
                raise ValueError(f"piece on [{a},{b}] has a pole")
        self.pieces = pieces

    @staticmethod
    def from_ratfn(f: RatFn) -> "PiecewiseFn":
        return PiecewiseFn(((Fraction(0), Fraction(1), f),))

    def piece_at(self, x: Fraction) -> RatFn:
        for a, b, f in self.pieces:
            if a <= x < b:
                return f
        return self.pieces[-1][2]

    def single_ratfn(self) -> RatFn | None:
        """The common rational function when every piece agrees, else None."""
        first = self.pieces[0][2]
        if all(f == first for _, _, f in self.pieces[1:]):
            return first
        return None

    def is_constant(self) -> bool:
        first = self.pieces[0][2]
        return first.is_constant() and self.single_ratfn() is not None

    def eval_exact(self, x: Fraction) -> Scalar:
        return self.piece_at(Fraction(x)).eval_exact(Fraction(x))

    def eval_float(self, x: float) -> float:
        xf = Fraction(x).limit_denominator(10 ** 15)
        v = self.piece_at(xf).eval_complex(complex(x))
        return v.real

    def __eq__(self, other) -> bool:
        return isinstance(other, PiecewiseFn) and self.pieces == other.pieces

    def __str__(self) -> str:
        out = []
        for i, (a, b, f) in enumerate(self.pieces):
            close = "]" if i == len(self.pieces) - 1 else ")"
            out.append(f"[{a},{b}{close} {f}")
        return "\n".join(out)


_PIECE_LINE = re.compile(r"^\[\s*([^,\s]+)\s*,\s*([^\s\])]+)\s*([\])])\s*(.+)$")


def parse_piecewise(text: str) -> PiecewiseFn:
    """Parse lines of the form "[a,b) expr"; rational endpoints, last line
    closed with a bracket. Expressions must lower to real rational pieces."""
    pieces = []
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    for ln in lines:
        m = _PIECE_LINE.match(ln)
        if m is None:
            raise ValueError(f"bad piece line: {ln!r}")
        a, b = Fraction(m.group(1)), Fraction(m.group(2))
        h = lower(parse(m.group(4)))
        if not h.s.is_zero() or not h.r.is_real():
            raise ValueError(f"piece {m.group(4)!r} is not a real rational "
                             "function of p")
        pieces.append((a, b, h.r))
        closed = m.group(3) == "]"
        if closed != (ln is lines[-1]):
            raise ValueError("only the last interval is closed on the right")
    return PiecewiseFn(pieces)


# -- simulability of a target ratio (the field membership test) ------------

@dataclass(frozen=True)
class RatioDecision:
    simulable: bool
    witness: tuple[Poly, Poly, Poly, Poly] | None  # (g1, g2, g3, g4)
    element: FieldElem | None
    diagnosis: str

    def to_json(self) -> dict:
        out = {"simulable": self.simulable, "diagnosis": self.diagnosis}
        if self.witness is not None:
            g1, g2, g3, g4 = self.witness
            out["witness"] = {"g1": str(g1), "g2": str(g2),
                             "g3": str(g3), "g4": str(g4)}
            out["element"] = str(self.element)
        return out


def decide_qq_ratio(e: Expr | str) -> RatioDecision:
    """A target ratio is simulable from the coin exactly when it lies in the
    field: lowering succeeds. The witness reads off the canonical element,
    g1/g2 the t part and g3/g4 the rational part."""
    if isinstance(e, str):
        e = parse(e)
    try:
        h = lower(e)
    except NotInFieldError as err:
        return RatioDecision(False, None, None, str(err))
    witness = (h.s.num, h.s.den, h.r.num, h.r.den)
    return RatioDecision(True, witness, h, "")


# -- square-root witnesses for probability functions -----------------------

@dataclass(frozen=True)
class CorollaryResult:
    simulable: bool
    h: FieldElem | Infinity | None
    reason: str

    def to_json(self) -> dict:
        return {"simulable": self.simulable,
                "h": None if self.h is None else str(self.h),
                "reason": self.reason}


def decide_real_corollary(f: RatFn) -> CorollaryResult:
    """Decide membership for a real probability function via real square
    roots: f is realizable from real-form ratios iff u = f/(1-f) is q^2 or
    q^2 * p/(1-p). The returned h satisfies |h|^2 = u exactly."""
    if not f.is_real():
        raise ValueError("the real decision takes a real rational function")
    if not f.den.eval_exact(0) or not f.den.eval_exact(1) \
            or sturm_count(f.den, 0, 1) > 0:
        raise ValueError("f must be pole-free on [0,1]")
    if not certify_nonneg(f.num * f.den, 0, 1):
        raise ValueError("range violation: f is negative somewhere on [0,1]")
    if not certify_nonneg((f.den - f.num) * f.den, 0, 1):
        raise ValueError("range violation: f exceeds 1 somewhere on [0,1]")
    if f == ONE_RF:
        return CorollaryResult(True, INFINITY,
                               "f is identically 1: degenerate ratio, state |0>")
    if f.is_zero():
        return CorollaryResult(True, FE_ZERO,
                               "f is identically 0: the zero ratio, state |1>")
    u = f / (ONE_RF - f)
    try:
        h = field_sqrt(u)
    except NotInFieldError as err:
        return CorollaryResult(False, None, str(err))
    route = "q*t with q = " + str(h.s) if h.r.is_zero() else "q = " + str(h.r)
    return CorollaryResult(True, h, f"f/(1-f) is a square via {route}")


def check_phased_witness(h: FieldElem, f: RatFn) -> bool:
    """True iff |h|^2 = f/(1-f) exactly, making f the success probability of
    the coin with ratio h. Sound one-sided membership test: phases of h drop
    out of the measurement statistics."""
    if not f.is_real():
        raise ValueError("probability functions are real")
    if f == ONE_RF:
        return False
    u = f / (ONE_RF - f)
    return fe_mod_squared(h) == FieldElem(u)


# -- classifier: CC part ---------------------------------------------------

@dataclass(frozen=True)
class CCReport:
    verdict: str            # "yes" | "no" | "no_witness_found"
    witness_n: int | None
    reason: str

    @property
    def in_cc(self) -> bool:
        return self.verdict == "yes"

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "witness_n": self.witness_n,
                "reason": self.reason}


def _certify_piece_bound(f: RatFn, bound: Poly, lo: Fraction, hi: Fraction) -> bool:
    # f - bound >= 0 and (1 - f) - bound >= 0 on [lo, hi], cleared by den^2
    num, den = f.num, f.den
    lower_ok = certify_nonneg((num - bound * den) * den, lo, hi)
    upper_ok = certify_nonneg(((den - num) - bound * den) * den, lo, hi)
    return lower_ok and upper_ok


def classify_cc(f: PiecewiseFn, n_max: int = 64) -> CCReport:
    """Classical-to-classical membership: continuity plus the polynomial
    bound min(f, 1-f) >= min(p^n, (1-p)^n) for some witness n. Constant f
    short-circuits to yes; an interior zero or one of a nonconstant f is a
    definitive no."""
    for (a, b, f1), (_, _, f2) in zip(f.pieces, f.pieces[1:]):
        if f1.eval_exact(b) != f2.eval_exact(b):
            return CCReport("no", None, f"discontinuous at p = {b}")
    for a, b, piece in f.pieces:
        if not certify_nonneg(piece.num * piece.den, a, b):
            return CCReport("no", None, f"f < 0 somewhere on [{a},{b}]")
        if not certify_nonneg((piece.den - piece.num) * piece.den, a, b):
            return CCReport("no", None, f"f > 1 somewhere on [{a},{b}]")
    if f.is_constant():
        return CCReport("yes", None, "constant function")

    # interior zeros or ones are fatal for the polynomial bound
    for x in [b for _, b, _ in f.pieces[:-1]]:
        if 0 < x < 1:
            v = f.eval_exact(x)
            if not v:
                return CCReport("no", None, f"interior zero at p = {x}")
            if v == Scalar(1):
                return CCReport("no", None, f"interior one at p = {x}")
    for a, b, piece in f.pieces:
        for g, what in ((piece.num, "zero"), (piece.den - piece.num, "one")):
            if g.is_zero():
                return CCReport("no", None,
                                f"constant {what} piece on [{a},{b}] of a "
                                "nonconstant function")
            if sturm_count(g, a, b) > 0:
                return CCReport("no", None,
                                f"interior {what} inside ({a},{b})")

    half = Fraction(1, 2)
    one_minus_p = Poly((1, -1))
    for n in range(1, n_max + 1):
        ok = True
        for a, b, piece in f.pieces:
            if a < half:
                if not _certify_piece_bound(piece, P_POLY ** n, a, min(b, half)):
                    ok = False
                    break
            if b > half:
                if not _certify_piece_bound(piece, one_minus_p ** n,
                                            max(a, half), b):
                    ok = False
                    break
        if ok:
            return CCReport("yes", n, f"min(f,1-f) >= min(p^{n},(1-p)^{n})")
    return CCReport("no_witness_found", None,
                    f"no polynomial bound witness with n <= {n_max}")


# -- classifier: QC part (SPB certificates) --------------------------------

@dataclass(frozen=True)
class SPBEntry:
    """One zero (of f) or one (of f) with its certified local behavior:
    order is the vanishing order of f resp. 1-f at the point, and
    f resp. 1-f is bounded below by c*(p-z)^(2k) within delta."""
    point: Fraction | AlgebraicPoint
    kind: str               # "zero" | "one"
    order: Fraction
    k: int
    delta: float
    c: float
    residual: str

    def position(self) -> float:
        return float(self.point) if isinstance(self.point, Fraction) \
            else self.point.approx()

    def to_json(self) -> dict:
        if isinstance(self.point, Fraction):
            pt = str(self.point)
        else:
            pt = {"poly": str(self.point.g),
                  "interval": [str(self.point.lo), str(self.point.hi)],
                  "approx": self.point.approx()}
        return {"point": pt, "kind": self.kind, "order": str(self.order),
                "k": self.k, "delta": self.delta, "c": self.c,
                "residual": self.residual}


@dataclass(frozen=True)
class QCReport:
    in_qc: bool
    zeros: tuple[SPBEntry, ...]
    ones: tuple[SPBEntry, ...]

    def to_json(self) -> dict:
        return {"in_qc": self.in_qc,
                "zeros": [e.to_json() for e in self.zeros],
                "ones": [e.to_json() for e in self.ones]}


def _f_of_h(h: FieldElem, x: float) -> float:
    try:
        v = fe_eval(h, x)
    except ZeroDivisionError:
        return 1.0
    m = abs(v) ** 2
    if math.isinf(m):
        return 1.0
    return m / (1.0 + m)


def _candidate_points(form: OrderForm):
    a, b, c = form.A, form.B, form.C
    x = a * a.conj() + b * b.conj() * Poly((0, 1, -1))
    y = a * b.conj() + a.conj() * b
    q_num = x * x - y * y * Poly((0, 1, -1))
    q_den = c * c.conj()
    rationals, points = isolate_roots((q_num * q_den).real_part(), 0, 1)
    cands: list[Fraction | AlgebraicPoint] = [Fraction(0), Fraction(1)]
    cands.extend(z for z in rationals if 0 < z < 1)
    cands.extend(points)
    return cands


def classify_qc(h: FieldElem) -> QCReport:
    """Quantum-to-classical membership for f = |h|^2/(1+|h|^2): always SPB
    for a nondegenerate field element. Z collects zeros of f (positive net
    vanishing order of h), W the ones of f (poles of h)."""
    if isinstance(h, Infinity) or h.is_zero():
        raise ValueError("degenerate ratio: f is constant 0 or 1 and the "
                         "zero/one sets are not finite")
    form = OrderForm.from_field_elem(h)
    cands = _candidate_points(form)
    found: list[tuple[Fraction | AlgebraicPoint, Fraction, str]] = []
    for z in cands:
        if isinstance(z, Fraction):
            res = vanishing_order(form, z)
        else:
            res = vanishing_order_at_point(form, z)
        if res.order != 0:
            found.append((z, res.order, res.residual))

    positions = [float(z) if isinstance(z, Fraction) else z.approx()
                 for z, _, _ in found]
    zeros: list[SPBEntry] = []
    ones: list[SPBEntry] = []
    for i, (z, n, residual) in enumerate(found):
        x = positions[i]
        others = [abs(x - q) for j, q in enumerate(positions) if j != i]
        delta = min(0.125, min(others) / 2) if others else 0.125
        k = math.ceil(abs(n))
        grid_lo = max(0.0, x - delta)
        grid_hi = min(1.0, x + delta)
        vals = []
        for j in range(200):
            p = grid_lo + (j + 0.5) * (grid_hi - grid_lo) / 200
            if abs(p - x) < 1e-12:
                continue
            fv = _f_of_h(h, p)
            if n < 0:
                fv = 1.0 - fv
            vals.append(fv / abs(p - x) ** (2 * k))
        c = min(vals) / 2
        entry = SPBEntry(z, "zero" if n > 0 else "one", 2 * abs(n), k,
                         delta, c, residual)
        (zeros if n > 0 else ones).append(entry)
    return QCReport(True, tuple(zeros), tuple(ones))


def verify_spb(h: FieldElem, report: QCReport) -> bool:
    """Independent re-check of an SPB certificate: recompute each vanishing
    order exactly and test the lower bound on a fresh grid."""
    form = OrderForm.from_field_elem(h)
    for entry in report.zeros + report.ones:
        if isinstance(entry.point, Fraction):
            res = vanishing_order(form, entry.point)
        else:
            res = vanishing_order_at_point(form, entry.point)
        want = entry.order if entry.kind == "zero" else -entry.order
        if 2 * res.order != want:
            return False
        x = entry.position()
        grid_lo = max(0.0, x - entry.delta)
        grid_hi = min(1.0, x + entry.delta)
        for j in range(200):
            p = grid_lo + j * (grid_hi - grid_lo) / 199
            if abs(p - x) < 1e-12:
                continue
            fv = _f_of_h(h, p)
            if entry.kind == "one":
                fv = 1.0 - fv
            if fv + 1e-15 < entry.c * abs(p - x) ** (2 * entry.k):
                return False
    return True


# -- classifier: QQ part ---------------------------------------------------

@dataclass(frozen=True)
class QQReport:
    verdict: str            # "yes" | "no" | "unknown"
    witness: FieldElem | Infinity | None
    reason: str

    def to_json(self) -> dict:
        return {"verdict": self.verdict,
                "witness": None if self.witness is None else str(self.witness),
                "reason": self.reason}


def classify_qq(f: PiecewiseFn, witness: FieldElem | None = None,
                no_complex_witness: bool = False) -> QQReport:
    """Quantum-to-quantum membership, deliberately three-valued. Yes with a
    checked witness; no by the identity-theorem rule (constant on a
    subinterval, nonconstant overall) or, for a single rational piece with
    no real-form square root, when the caller asserts no complex witness
    exists; unknown otherwise."""
    single = f.single_ratfn()

    if witness is not None and single is not None \
            and check_phased_witness(witness, single):
        return QQReport("yes", witness, "supplied witness checks: |h|^2 = f/(1-f)")

    if f.is_constant():
        value = f.pieces[0][2].constant_value()
        if value == Scalar(1):
            return QQReport("yes", INFINITY, "constant 1: the state |0>")
        if not value:
            return QQReport("yes", FE_ZERO, "constant 0: the state |1>")
        frac = value.as_fraction()
        root = sqrt_in_scalar_field(frac / (1 - frac))
        if root is not None:
            return QQReport("yes", FieldElem.const(root),
                            "constant coin with representable ratio")
        return QQReport("yes", None,
                        "constant coin; its ratio sqrt(f/(1-f)) lies outside "
                        "the toolkit scalar field")

    if single is None:
        for a, b, piece in f.pieces:
            if piece.is_constant():
                return QQReport("no", None,
                                f"constant on [{a},{b}] but not globally: "
                                "|h|^2 would be constant everywhere")
        return QQReport("unknown", None,
                        "piecewise with no constant piece: no decision rule "
                        "applies")

    if single.is_rational():
        cor = decide_real_corollary(single)
        if cor.simulable:
            return QQReport("yes", cor.h, cor.reason)
        if no_complex_witness:
            return QQReport("no", None,
                            "no real-form witness (" + cor.reason + "); "
                            "caller asserts no complex witness exists")
        return QQReport("unknown", None,
                        "no real-form witness (" + cor.reason + "); complex "
                        "witnesses undecided")
    return QQReport("unknown", None,
                    "piece has irrational coefficients; square detection "
                    "covers rational coefficients only")


@dataclass(frozen=True)
class ClassReport:
    cc: CCReport
    qc: QCReport | None
    qq: QQReport

    def to_json(self) -> dict:
        return {"cc": self.cc.to_json(),
                "qc": None if self.qc is None else self.qc.to_json(),
                "qq": self.qq.to_json()}


def classify(f: PiecewiseFn, witness: FieldElem | None = None,
             no_complex_witness: bool = False) -> ClassReport:
    """Full classification. The QC part needs a ratio witness; it is filled
    from the supplied witness or from the one found by the QQ decision."""
    cc = classify_cc(f)
    qq = classify_qq(f, witness=witness, no_complex_witness=no_complex_witness)
    h = witness if witness is not None else qq.witness
    qc = None
    if isinstance(h, FieldElem) and not h.is_zero():
        qc = classify_qc(h)
    return ClassReport(cc, qc, qq)
