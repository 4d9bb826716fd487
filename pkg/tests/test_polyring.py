"""Polynomial rings, gradings, monomial enumeration, ring maps."""

import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from syzygies.errors import MalformedInputError, RingMismatchError
from syzygies.polyring import (Polynomial, Ring, RingMap, apply_map,
                               format_polynomial, monomials_of_degree,
                               parse_polynomial)


P2 = Ring(["x0", "x1", "x2"])
P1 = Ring(["s", "t"])


def test_p2_degree_3_has_10_monomials():
    assert len(monomials_of_degree(P2, 3)) == 10


def test_degree_0_is_the_unit():
    assert monomials_of_degree(P2, 0) == [(0, 0, 0)]


def test_p1_degree_6_has_7_monomials():
    assert len(monomials_of_degree(P1, 6)) == 7


@given(st.integers(1, 4), st.integers(0, 8))
@settings(max_examples=30, deadline=None)
def test_monomial_count_binomial(n, d):
    ring = Ring([f"x{i}" for i in range(n + 1)])
    assert len(monomials_of_degree(ring, d)) == math.comb(n + d, n)


def test_enumeration_deterministic():
    a = monomials_of_degree(P2, 4)
    b = monomials_of_degree(P2, 4)
    assert a == b


def test_weighted_enumeration():
    # genus-2 model weights (1,1,3): degree-6 forms
    ring = Ring(["s", "t", "w"], degrees=[(1,), (1,), (3,)])
    ms = monomials_of_degree(ring, 6)
    # s^a t^b (7 of them), s^a t^b w with a+b=3 (4), w^2 (1)
    assert len(ms) == 12


def test_bigraded_enumeration_matches_scroll_sections():
    # P(O(1)+O(2)): deg s = t = (0,1), deg y_i = (1, K - a_i), K = 2
    ring = Ring(["s", "t", "y1", "y2"],
                degrees=[(0, 1), (0, 1), (1, 0), (1, 1)])
    assert len(monomials_of_degree(ring, (1, 2))) == 5
    assert len(monomials_of_degree(ring, (2, 4))) == 12


def test_parse_format_roundtrip():
    p = parse_polynomial(P2, "3*x0^2*x1 - 1/2*x2^3")
    assert format_polynomial(p) == "3*x0^2*x1 - 1/2*x2^3"
    assert parse_polynomial(P2, format_polynomial(p)) == p


def test_parse_rejects_unknown_variable():
    with pytest.raises(MalformedInputError):
        parse_polynomial(P2, "x0 + z9")


def test_product_of_sum_and_difference():
    s_plus = parse_polynomial(P1, "s + t")
    s_minus = parse_polynomial(P1, "s - t")
    assert format_polynomial(s_plus * s_minus) == "s^2 - t^2"


def test_multiplication_by_zero_and_one():
    p = parse_polynomial(P2, "x0*x1 - x2^2")
    assert (p * P2.zero()).is_zero()
    assert p * P2.one() == p


def test_ring_mismatch_raises():
    with pytest.raises(RingMismatchError):
        parse_polynomial(P2, "x0") + parse_polynomial(P1, "s")


def twisted_cubic_map():
    S = Ring(["z0", "z1", "z2", "z3"])
    images = [parse_polynomial(P1, f"s^{3 - i}*t^{i}" if 0 < i < 3 else
                               ("s^3" if i == 0 else "t^3")) for i in range(4)]
    return RingMap(S, P1, images)


def test_apply_identity_map():
    f = RingMap(P2, P2, P2.variables())
    p = parse_polynomial(P2, "x0^2 - x1*x2")
    assert apply_map(f, p) == p


def test_twisted_cubic_quadric_maps_to_zero():
    f = twisted_cubic_map()
    q = parse_polynomial(f.source, "z0*z2 - z1^2")
    assert apply_map(f, q).is_zero()


def test_variable_image():
    f = twisted_cubic_map()
    z0 = f.source.variable(0)
    assert format_polynomial(apply_map(f, z0)) == "s^3"


@given(st.integers(0, 10_000))
@settings(max_examples=25, deadline=None)
def test_apply_map_is_ring_homomorphism(seed):
    rng = random.Random(seed)
    f = twisted_cubic_map()

    def rand_poly():
        terms = {}
        for _ in range(rng.randint(1, 3)):
            mono = [0, 0, 0, 0]
            for _ in range(2):
                mono[rng.randrange(4)] += 1
            terms[tuple(mono)] = rng.randint(-5, 5)
        return Polynomial.from_terms(f.source, terms)

    p, q = rand_poly(), rand_poly()
    assert apply_map(f, p * q) == apply_map(f, p) * apply_map(f, q)
    assert apply_map(f, p + q) == apply_map(f, p) + apply_map(f, q)


def test_ring_map_requires_common_degree():
    S = Ring(["z0", "z1"])
    with pytest.raises(MalformedInputError):
        RingMap(S, P1, [parse_polynomial(P1, "s"),
                        parse_polynomial(P1, "s*t")])


def test_grading_invariants():
    with pytest.raises(MalformedInputError):
        Ring(["x", "x"])
    with pytest.raises(MalformedInputError):
        Ring(["x"], degrees=[(0,)])
    with pytest.raises(MalformedInputError):
        Ring(["x", "y"], degrees=[(1,), (1, 0)])
