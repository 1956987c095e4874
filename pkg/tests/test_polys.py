import random
from fractions import Fraction

import numpy as np
import pytest

from coinfield.polys import (AlgebraicPoint, P, Poly, RatFn, certify_nonneg,
                             isolate_roots, is_square, poly_gcd, rational_roots,
                             simplest_between, split_rational_roots, square_test,
                             squarefree_decompose, sturm_count)
from coinfield.scalars import ONE, SQRT2, Scalar


def rational_poly(rnd, deg, span=5):
    coeffs = [Scalar(Fraction(rnd.randint(-span, span), rnd.randint(1, 3))) for _ in range(deg)]
    coeffs.append(Scalar(Fraction(rnd.randint(1, span))))
    return Poly(tuple(coeffs))


def from_roots(roots):
    f = Poly.const(ONE)
    for r in roots:
        f = f * Poly((Scalar(-r), ONE))
    return f


# ---------------------------------------------------------------------------
# Ring arithmetic
# ---------------------------------------------------------------------------

def test_eval_matches_numpy():
    rnd = random.Random(7)
    for _ in range(30):
        f = rational_poly(rnd, rnd.randint(0, 5))
        cs = [complex(c.to_complex()) for c in f.coeffs]
        for _ in range(4):
            z = complex(rnd.uniform(-2, 2), rnd.uniform(-2, 2))
            want = np.polyval(list(reversed(cs)), z)
            assert abs(f.eval_complex(z) - want) < 1e-9


def test_divmod_property():
    rnd = random.Random(11)
    for _ in range(40):
        f = rational_poly(rnd, rnd.randint(0, 6))
        g = rational_poly(rnd, rnd.randint(1, 4))
        q, r = divmod(f, g)
        assert q * g + r == f
        assert r.is_zero() or r.degree < g.degree


def test_gcd_of_shifted_products():
    a = from_roots([Fraction(1)])
    f = a * from_roots([Fraction(-2)])
    g = a * from_roots([Fraction(-3)])
    assert poly_gcd(f, g) == a
    assert poly_gcd(f, g).monic() == poly_gcd(f, g)


def test_gcd_coprime_is_one():
    f = from_roots([Fraction(1, 2)])
    g = from_roots([Fraction(1, 3)])
    assert poly_gcd(f, g).is_one()


# ---------------------------------------------------------------------------
# Squarefree structure and square detection
# ---------------------------------------------------------------------------

def test_squarefree_decompose_reconstructs():
    a = from_roots([Fraction(1, 2)])
    b = from_roots([Fraction(-1)])
    f = a * a * b * b * b * Poly.const(Scalar(3))
    lead, parts = squarefree_decompose(f)
    rebuilt = Poly.const(lead)
    for g, m in parts:
        for _ in range(m):
            rebuilt = rebuilt * g
    assert rebuilt == f
    mults = sorted(m for _, m in parts)
    assert mults == [2, 3]


def test_is_square_detects_perfect_squares():
    q = RatFn(P * P - Poly.const(ONE), P + Poly.const(Scalar(2)))
    sq = q * q
    root = is_square(sq)
    assert root is not None
    assert root * root == sq


def test_is_square_rejects():
    assert is_square(RatFn.from_poly(P)) is None
    assert is_square(RatFn.const(Scalar(2))) is None
    assert is_square(RatFn.const(Scalar(Fraction(9, 4)))) is not None


def test_square_test_reports_odd_factors():
    # p^2 / (1 - p^2) leaves the two linear factors of the denominator unmatched
    u = RatFn(P * P, Poly((ONE, Scalar(0), Scalar(-1))))
    res = square_test(u)
    assert res.root is None
    want = {P - Poly.const(ONE), P + Poly.const(ONE)}
    assert set(res.odd_factors) == want


def test_square_test_accepts_square():
    u = RatFn(P * P, Poly.const(Scalar(4)))
    res = square_test(u)
    assert res.root is not None
    assert res.root * res.root == u


# ---------------------------------------------------------------------------
# Rational function canonical form
# ---------------------------------------------------------------------------

def test_ratfn_cancels_common_factor():
    f = RatFn(P * P - Poly.const(ONE), P - Poly.const(ONE))
    assert f == RatFn.from_poly(P + Poly.const(ONE))
    assert f.den.is_one()


def test_ratfn_den_monic():
    f = RatFn(P, Poly.const(Scalar(2)) * (P + Poly.const(ONE)))
    assert f.den.leading == ONE


def test_ratfn_zero_den_raises():
    with pytest.raises(ZeroDivisionError):
        RatFn(P, Poly.zero())


def test_ratfn_arithmetic_matches_floats():
    rnd = random.Random(13)
    for _ in range(25):
        f = RatFn(rational_poly(rnd, 2), rational_poly(rnd, 1))
        g = RatFn(rational_poly(rnd, 1), rational_poly(rnd, 2))
        z = complex(rnd.uniform(0.1, 0.9), 0)
        for h, op in ((f + g, lambda x, y: x + y), (f * g, lambda x, y: x * y),
                      (f - g, lambda x, y: x - y)):
            want = op(f.eval_complex(z), g.eval_complex(z))
            assert abs(h.eval_complex(z) - want) < 1e-8


# ---------------------------------------------------------------------------
# Root counting and isolation
# ---------------------------------------------------------------------------

def test_sturm_count_known_cases():
    assert sturm_count(P * P - Poly.const(Scalar(Fraction(1, 2))), 0, 1) == 1
    f = from_roots([Fraction(1, 4), Fraction(3, 4)])
    assert sturm_count(f, 0, 1) == 2
    assert sturm_count(f, Fraction(1, 2), 1) == 1
    assert sturm_count(Poly.const(Scalar(5)), 0, 1) == 0


def test_sturm_count_matches_construction():
    rnd = random.Random(19)
    for _ in range(30):
        roots = sorted(set(Fraction(rnd.randint(-4, 8), rnd.randint(1, 8)) for _ in range(3)))
        f = from_roots(roots)
        inside = sum(1 for r in roots if 0 < r < 1)
        assert sturm_count(f, 0, 1) == inside


def test_isolate_roots_mixed():
    f = (P * P - Poly.const(Scalar(Fraction(1, 2)))) * from_roots([Fraction(1, 4)])
    rat, alg = isolate_roots(f, 0, 1)
    assert rat == [Fraction(1, 4)]
    assert len(alg) == 1
    pt = alg[0]
    assert abs(pt.approx() - 0.5 ** 0.5) < 1e-9
    assert pt.is_root_of(f)


def test_rational_roots():
    f = from_roots([Fraction(1, 2), Fraction(-3), Fraction(7, 5)])
    assert sorted(rational_roots(f)) == [Fraction(-3), Fraction(1, 2), Fraction(7, 5)]
    assert rational_roots(P * P - Poly.const(Scalar(2))) == []


def test_split_rational_roots():
    g = from_roots([Fraction(1, 3)]) * (P * P - Poly.const(Scalar(3)))
    parts = split_rational_roots(g)
    assert len(parts) == 2
    prod = Poly.const(ONE)
    for h in parts:
        prod = prod * h
    assert prod.monic() == g.monic()


# ---------------------------------------------------------------------------
# Nonnegativity certificates
# ---------------------------------------------------------------------------

def test_certify_nonneg_cases():
    half = Poly.const(Scalar(Fraction(1, 2)))
    assert certify_nonneg((P - half) * (P - half), 0, 1)
    assert certify_nonneg(P, 0, 1)
    assert not certify_nonneg(P - half, 0, 1)
    assert not certify_nonneg(Poly.const(Scalar(-1)), 0, 1)
    assert certify_nonneg(Poly.zero(), 0, 1)


def test_certify_nonneg_matches_sampling():
    rnd = random.Random(29)
    for _ in range(30):
        f = rational_poly(rnd, rnd.randint(1, 4))
        xs = [Fraction(j, 16) for j in range(17)]
        sampled_nonneg = all(f.eval_exact(x).sign() >= 0 for x in xs)
        cert = certify_nonneg(f, 0, 1)
        if cert:
            assert sampled_nonneg
        if not sampled_nonneg:
            assert not cert


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------

def test_simplest_between():
    assert simplest_between(Fraction(1, 3), Fraction(1, 2)) == Fraction(2, 5)
    assert simplest_between(Fraction(0), Fraction(1)) == Fraction(1, 2)
    assert simplest_between(Fraction(314, 100), Fraction(315, 100)) == Fraction(22, 7)


def test_algebraic_point_queries():
    g = P * P - Poly.const(Scalar(2))
    rat, alg = isolate_roots(g, 1, 2)
    assert rat == [] and len(alg) == 1
    pt = alg[0]
    assert pt.sign_of(P - Poly.const(ONE)) == 1
    assert pt.sign_of(P - Poly.const(Scalar(2))) == -1
    assert pt.multiplicity_in(g * g) == 2
    assert pt.multiplicity_in(P) == 0


def test_poly_json_round_trip():
    f = Poly((Scalar(1), Scalar(0, 1), Scalar(0, 0, Fraction(1, 2))))
    assert Poly.from_json(f.to_json()) == f
    q = RatFn(f, P + Poly.const(ONE))
    assert RatFn.from_json(q.to_json()) == q
