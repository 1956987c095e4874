"""Classification of coin functions and the supporting decision procedures."""

import dataclasses
import random
from fractions import Fraction

import pytest

from coinfield.analysis import (ONE_RF, PiecewiseFn, check_phased_witness,
                                classify, classify_cc, classify_qc,
                                classify_qq, decide_qq_ratio,
                                decide_real_corollary, parse_piecewise,
                                verify_spb)
from coinfield.field import (FE_ZERO, FieldElem, INFINITY, fe_eval,
                             fe_mod_squared, fe_mul)
from coinfield.lang import NotInFieldError, lower, parse
from coinfield.polys import P as P_POLY
from coinfield.polys import Poly, RatFn
from coinfield.scalars import ONE, Scalar

TWO_COIN_F = "(1-2*p)^2/(1+(1-2*p)^2)"
PHASED_WITNESS = "(sqrt2*p/(1+p))*t + i*p/(1+p)"


def random_rational_q(rnd):
    def poly(deg):
        return Poly(tuple(Scalar(Fraction(rnd.randint(-3, 3), rnd.randint(1, 2)))
                          for _ in range(deg + 1)))
    den = Poly.zero()
    while den.is_zero() or den.eval_exact(Fraction(1, 2)) == Scalar(0):
        den = poly(rnd.randint(0, 1))
    num = poly(rnd.randint(0, 2))
    return RatFn(num, den)


# ---------------------------------------------------------------------------
# Piecewise functions
# ---------------------------------------------------------------------------

def test_parse_piecewise_two_pieces():
    f = parse_piecewise("[0,1/2) 1/2\n[1/2,1] p/2 + 1/4")
    assert len(f.pieces) == 2
    assert f.eval_float(0.25) == 0.5
    assert abs(f.eval_float(0.75) - (0.375 + 0.25)) < 1e-12


def test_parse_piecewise_round_trip():
    f = parse_piecewise("[0,1/2) 1/2\n[1/2,1] p/2 + 1/4")
    assert parse_piecewise(str(f)) == f


def test_parse_piecewise_rejects_gap():
    with pytest.raises(ValueError):
        parse_piecewise("[0,1/3) p\n[1/2,1] p")


def test_parse_piecewise_rejects_overlap():
    with pytest.raises(ValueError):
        parse_piecewise("[0,2/3) p\n[1/2,1] p")


def test_parse_piecewise_rejects_wrong_closure():
    with pytest.raises(ValueError):
        parse_piecewise("[0,1/2] p\n[1/2,1] p")
    with pytest.raises(ValueError):
        parse_piecewise("[0,1) p")


def test_parse_piecewise_rejects_pole_on_closure():
    with pytest.raises(ValueError):
        parse_piecewise("[0,1] 1/(1-p)")


def test_parse_piecewise_rejects_nonreal():
    with pytest.raises(ValueError):
        parse_piecewise("[0,1] i*p")


def test_parse_piecewise_rejects_garbage():
    with pytest.raises(ValueError):
        parse_piecewise("")
    with pytest.raises(ValueError):
        parse_piecewise("not an interval")


def test_from_ratfn_single_piece():
    f = PiecewiseFn.from_ratfn(RatFn.from_poly(P_POLY * P_POLY))
    assert len(f.pieces) == 1
    assert f.eval_float(0.5) == 0.25


# ---------------------------------------------------------------------------
# Simulability of a target ratio
# ---------------------------------------------------------------------------

def test_decide_linear_offset():
    d = decide_qq_ratio("p - 1/2")
    assert d.simulable
    g1, g2, g3, g4 = d.witness
    assert [str(g) for g in (g1, g2, g3, g4)] == ["0", "1", "-1/2 + p", "1"]


def test_decide_witness_reconstructs_element():
    rnd = random.Random(119)
    for src in ("t", "p - 1/2", "(1-p)*t + i*p", "t^2/(1+t^2)", "sqrt2*t - 1/3"):
        d = decide_qq_ratio(src)
        assert d.simulable
        g1, g2, g3, g4 = d.witness
        rebuilt = FieldElem(RatFn(g3, g4), RatFn(g1, g2))
        assert rebuilt == d.element


def test_decide_rejects_outside_field():
    d = decide_qq_ratio("sqrt(p^2/(1-p^2))")
    assert not d.simulable
    assert "1 - p" in d.diagnosis and "1 + p" in d.diagnosis


def test_decide_rejects_unparseable():
    with pytest.raises(ValueError):
        decide_qq_ratio("p +* 2")


# ---------------------------------------------------------------------------
# Square-root decision for real coin functions
# ---------------------------------------------------------------------------

def test_corollary_two_coin_function():
    res = decide_real_corollary(lower(parse(TWO_COIN_F)).r)
    assert res.simulable
    want = lower(parse("1 - 2*p"))
    assert res.h in (want, fe_mul(FieldElem.const(-1), want))


def test_corollary_identity_function_needs_coin():
    res = decide_real_corollary(lower(parse("p")).r)
    assert res.simulable
    assert res.h == FieldElem.coin()


def test_corollary_rejects_p_squared():
    res = decide_real_corollary(lower(parse("p^2")).r)
    assert not res.simulable


def test_corollary_constant_edges():
    assert decide_real_corollary(lower(parse("1")).r).h is INFINITY
    assert decide_real_corollary(lower(parse("0")).r).h == FE_ZERO
    res = decide_real_corollary(lower(parse("1/3")).r)
    assert res.simulable and res.h == FieldElem.const(Scalar(0, Fraction(1, 2)))


def test_corollary_rejects_out_of_range():
    with pytest.raises(ValueError):
        decide_real_corollary(lower(parse("2*p")).r)
    # pole at p = 1 must be rejected before any square testing
    with pytest.raises(ValueError):
        decide_real_corollary(RatFn(Poly((ONE,)), Poly((ONE, Scalar(-1)))))


def test_corollary_random_squares_accepted():
    # f = q^2/(1+q^2) always lands back on a real witness with |h|^2 = q^2
    rnd = random.Random(127)
    done = 0
    while done < 15:
        q = random_rational_q(rnd)
        if q.is_zero():
            continue
        u = q * q
        f = u / (ONE_RF + u)
        res = decide_real_corollary(f)
        assert res.simulable
        assert fe_mod_squared(res.h) == FieldElem(u)
        done += 1


# ---------------------------------------------------------------------------
# Phased witnesses
# ---------------------------------------------------------------------------

def test_phased_witness_for_p_squared():
    h = lower(parse(PHASED_WITNESS))
    f = lower(parse("p^2")).r
    assert check_phased_witness(h, f)
    # and the modulus really is p^2/(1-p^2)
    want = RatFn(P_POLY * P_POLY, Poly((ONE, Scalar(0), Scalar(-1))))
    assert fe_mod_squared(h) == FieldElem(want)


def test_phased_witness_mismatch():
    assert not check_phased_witness(FieldElem.coin(), lower(parse("p^2")).r)
    assert check_phased_witness(FieldElem.coin(), lower(parse("p")).r)


def test_phased_witness_constant_one():
    assert not check_phased_witness(FieldElem.coin(), ONE_RF)


# ---------------------------------------------------------------------------
# Classical-coin classification
# ---------------------------------------------------------------------------

def test_cc_flat_then_ramp():
    f = parse_piecewise("[0,1/2) 1/2\n[1/2,1] p/2 + 1/4")
    rep = classify_cc(f)
    assert rep.verdict == "yes" and rep.witness_n == 1


def test_cc_p_squared():
    rep = classify_cc(PiecewiseFn.from_ratfn(RatFn.from_poly(P_POLY * P_POLY)))
    assert rep.verdict == "yes" and rep.witness_n == 2


def test_cc_rejects_interior_zero():
    u = lower(parse("(p-1/2)^2")).r
    f = PiecewiseFn.from_ratfn(u / (ONE_RF + u))
    rep = classify_cc(f)
    assert rep.verdict == "no"
    assert "interior zero" in rep.reason


def test_cc_accepts_endpoint_zero():
    f = PiecewiseFn.from_ratfn(lower(parse("(1-p)^2")).r)
    rep = classify_cc(f)
    assert rep.verdict == "yes" and rep.witness_n == 2


def test_cc_rejects_constant_zero_piece():
    f = parse_piecewise("[0,1/2) 0\n[1/2,1] p - 1/2")
    rep = classify_cc(f)
    assert rep.verdict == "no"
    assert "zero" in rep.reason


def test_cc_rejects_discontinuity():
    f = parse_piecewise("[0,1/2) 1/4\n[1/2,1] p/2 + 1/2")
    rep = classify_cc(f)
    assert rep.verdict == "no"
    assert "1/2" in rep.reason


def test_cc_rejects_range_violation():
    f = PiecewiseFn.from_ratfn(RatFn.from_poly(Poly((Scalar(0), Scalar(2)))))
    assert classify_cc(f).verdict == "no"


def test_cc_constant_is_fine():
    rep = classify_cc(parse_piecewise("[0,1] 1/3"))
    assert rep.verdict == "yes"


def test_cc_witness_scales_with_flatness():
    # p^6 hugs zero too tightly for small n
    f = PiecewiseFn.from_ratfn(RatFn.from_poly(P_POLY ** 6))
    small = classify_cc(f, n_max=2)
    assert small.verdict == "no_witness_found"
    full = classify_cc(f)
    assert full.verdict == "yes" and full.witness_n >= 6


# ---------------------------------------------------------------------------
# Quantum-coin classification and the bound certificates
# ---------------------------------------------------------------------------

def test_qc_of_coin_ratio():
    h = FieldElem.coin()
    rep = classify_qc(h)
    assert rep.in_qc
    assert [e.point for e in rep.zeros] == [Fraction(0)]
    assert [e.point for e in rep.ones] == [Fraction(1)]
    assert rep.zeros[0].order == 1 and rep.zeros[0].k == 1
    assert verify_spb(h, rep)


def test_qc_of_phased_witness():
    h = lower(parse(PHASED_WITNESS))
    rep = classify_qc(h)
    assert rep.in_qc
    assert [e.point for e in rep.zeros] == [Fraction(0)]
    assert [e.point for e in rep.ones] == [Fraction(1)]
    assert verify_spb(h, rep)


def test_qc_interior_double_zero():
    h = lower(parse("p - 1/2"))
    rep = classify_qc(h)
    assert rep.in_qc
    assert [e.point for e in rep.zeros] == [Fraction(1, 2)]
    assert rep.zeros[0].order == 2 and rep.zeros[0].k == 1
    assert rep.ones == ()
    assert verify_spb(h, rep)


def test_qc_no_special_points_for_constant():
    rep = classify_qc(FieldElem.const(Scalar(Fraction(1, 3))))
    assert rep.in_qc and rep.zeros == () and rep.ones == ()
    assert verify_spb(FieldElem.const(Scalar(Fraction(1, 3))), rep)


def test_qc_algebraic_special_point():
    # f = 1/2 exactly where p^2 = 1/2
    h = lower(parse("p^2 - 1/2"))
    rep = classify_qc(h)
    pts = rep.zeros
    assert len(pts) == 1
    assert not isinstance(pts[0].point, Fraction)
    assert abs(pts[0].position() - 0.5 ** 0.5) < 1e-9
    assert verify_spb(h, rep)


def test_qc_rejects_degenerate():
    with pytest.raises(ValueError):
        classify_qc(FE_ZERO)


def test_verify_spb_catches_tampering():
    h = FieldElem.coin()
    rep = classify_qc(h)
    worse = dataclasses.replace(rep, zeros=(dataclasses.replace(
        rep.zeros[0], order=rep.zeros[0].order + 1),))
    assert not verify_spb(h, worse)
    greedy = dataclasses.replace(rep, zeros=(dataclasses.replace(
        rep.zeros[0], c=rep.zeros[0].c * 1000),))
    assert not verify_spb(h, greedy)


def test_qc_random_targets_verify():
    rnd = random.Random(131)
    done = 0
    while done < 12:
        r = random_rational_q(rnd)
        s = random_rational_q(rnd)
        h = FieldElem(r, s)
        if h.is_zero():
            continue
        rep = classify_qc(h)
        assert rep.in_qc
        assert verify_spb(h, rep)
        done += 1


# ---------------------------------------------------------------------------
# Quantum-to-quantum classification
# ---------------------------------------------------------------------------

def test_qq_two_coin_function():
    u = lower(parse("(p-1/2)^2")).r
    f = PiecewiseFn.from_ratfn(u / (ONE_RF + u))
    rep = classify_qq(f)
    assert rep.verdict == "yes"
    # the sign-fixed representative is 1/2 - p (nonnegative just left of 1/2)
    want = lower(parse("p - 1/2"))
    assert rep.witness in (want, fe_mul(FieldElem.const(Scalar(-1)), want))


def test_qq_constant_with_field_sqrt():
    rep = classify_qq(parse_piecewise("[0,1] 1/2"))
    assert rep.verdict == "yes" and rep.witness == FieldElem.const(ONE)
    rep3 = classify_qq(parse_piecewise("[0,1] 1/3"))
    assert rep3.verdict == "yes"
    assert rep3.witness == FieldElem.const(Scalar(0, Fraction(1, 2)))


def test_qq_constant_without_field_sqrt():
    # u = 3 has no square root in the scalar field; still in the set, no witness
    rep = classify_qq(parse_piecewise("[0,1] 3/4"))
    assert rep.verdict == "yes" and rep.witness is None


def test_qq_rejects_flat_then_ramp():
    f = parse_piecewise("[0,1/2) 1/2\n[1/2,1] p/2 + 1/4")
    assert classify_qq(f).verdict == "no"


def test_qq_p_squared_depends_on_complex_escape():
    f = PiecewiseFn.from_ratfn(lower(parse("p^2")).r)
    assert classify_qq(f).verdict == "unknown"
    assert classify_qq(f, no_complex_witness=True).verdict == "no"
    w = lower(parse(PHASED_WITNESS))
    rep = classify_qq(f, witness=w)
    assert rep.verdict == "yes" and rep.witness == w


def test_qq_rejects_wrong_witness():
    f = PiecewiseFn.from_ratfn(lower(parse("p^2")).r)
    assert classify_qq(f, witness=FieldElem.coin()).verdict != "yes"


def test_qq_multi_piece_nonconstant_unknown():
    f = parse_piecewise("[0,1/2) p/2\n[1/2,1] p^2/2 + 1/8")
    assert classify_qq(f).verdict == "unknown"


# ---------------------------------------------------------------------------
# Combined report
# ---------------------------------------------------------------------------

def test_classify_fills_qc_from_witness():
    f = PiecewiseFn.from_ratfn(lower(parse("p^2")).r)
    w = lower(parse(PHASED_WITNESS))
    rep = classify(f, witness=w)
    assert rep.cc.verdict == "yes"
    assert rep.qq.verdict == "yes"
    assert rep.qc is not None and rep.qc.in_qc


def test_classify_without_witness_leaves_qc_empty():
    f = parse_piecewise("[0,1/2) 1/2\n[1/2,1] p/2 + 1/4")
    rep = classify(f)
    assert rep.qc is None
    assert rep.cc.verdict == "yes" and rep.qq.verdict == "no"


def test_classify_uses_derived_witness():
    u = lower(parse("(p-1/2)^2")).r
    f = PiecewiseFn.from_ratfn(u / (ONE_RF + u))
    rep = classify(f)
    assert rep.qq.verdict == "yes"
    assert rep.qc is not None and verify_spb(rep.qq.witness, rep.qc)
