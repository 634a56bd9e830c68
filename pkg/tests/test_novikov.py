from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from obstructa.novikov import (INF, DivergenceError, NotMonomialInvertible, NovikovScalar, format_scalar,
                               nov_geometric_alt, nov_invert, nov_mul, nov_normalize, nov_valuation,
                               parse_scalar)


def S(terms, ceil=None, floor=0):
    return NovikovScalar(terms, ceil, floor)


def test_like_terms_merge():
    assert nov_normalize([(1, F(1, 2), 0), (1, F(1, 2), 0)], 2).terms == ((2, F(1, 2), 0),)


def test_terms_above_ceiling_drop():
    assert nov_normalize([(1, 3, 0)], 2).is_zero()


def test_cancellation_gives_zero():
    assert nov_normalize([(1, 0, 0), (-1, 0, 0)]).is_zero()


def test_canonical_order_is_sorted_by_energy_then_maslov():
    a = S([(1, 2, 0), (3, 0, 1), (5, 0, -1)])
    assert [t[1:] for t in a.terms] == [(0, -1), (0, 1), (2, 0)]


def test_product_of_binomials():
    one_plus = S([(1, 0, 0), (1, 1, 0)], 3)
    one_minus = S([(1, 0, 0), (-1, 1, 0)], 3)
    assert nov_mul(one_plus, one_minus) == S([(1, 0, 0), (-1, 2, 0)], 3)


def test_exponents_add():
    a = S([(1, F(1, 2), 2)])
    b = S([(1, F(1, 2), -2)])
    assert nov_mul(a, b) == S([(1, 1, 0)])


def test_times_zero():
    assert nov_mul(S([(7, 1, 3)], 5), NovikovScalar.zero(5)).is_zero()


def test_valuation_is_least_energy():
    assert nov_valuation(S([(2, F(1, 2), 2), (1, 1, 0)])) == F(1, 2)
    assert nov_valuation(NovikovScalar.zero()) == INF
    assert nov_valuation(S([(3, 0, -4)])) == 0


def test_invert_one_and_geometric():
    assert nov_invert(NovikovScalar.one(3)) == NovikovScalar.one(3)
    inv = nov_invert(S([(1, 0, 0), (1, 1, 0)], 3))
    assert inv == S([(1, 0, 0), (-1, 1, 0), (1, 2, 0)], 3)


def test_two_leading_terms_are_not_invertible():
    with pytest.raises(NotMonomialInvertible):
        nov_invert(S([(1, 0, 0), (1, 0, 1)], 3))


def test_invert_monomial_with_negative_energy_result():
    a = S([(2, 1, 1)], 4)
    inv = nov_invert(a)
    assert inv.terms == ((F(1, 2), -1, -1),)
    assert inv.e_floor == -1


def test_geometric_series_examples():
    assert nov_geometric_alt(NovikovScalar.zero(3)) == NovikovScalar.one(3)
    assert nov_geometric_alt(S([(1, 1, 0)], 3)) == S([(1, 0, 0), (-1, 1, 0), (1, 2, 0)], 3)
    h = S([(1, F(1, 2), 2)], F(6, 5))
    assert nov_geometric_alt(h) == S([(1, 0, 0), (-1, F(1, 2), 2), (1, 1, 4)], F(6, 5))


def test_geometric_series_needs_a_ceiling():
    with pytest.raises(DivergenceError):
        nov_geometric_alt(S([(1, 1, 0)]))


def test_geometric_series_of_non_nilpotent_energy_zero_diverges():
    with pytest.raises(DivergenceError):
        nov_geometric_alt(S([(1, 0, 1)], 3))


def test_text_round_trip_examples():
    for text in ["0", "1", "-2*T^1/2*e^2 + T", "3/4*e^-1 - T^2"]:
        a = parse_scalar(text)
        assert parse_scalar(format_scalar(a)) == a


def test_immutable():
    a = NovikovScalar.one()
    with pytest.raises(AttributeError):
        a.terms = ()


energies = st.fractions(min_value=0, max_value=4, max_denominator=4)
coeffs = st.fractions(min_value=-5, max_value=5, max_denominator=3)
terms = st.lists(st.tuples(coeffs, energies, st.integers(-2, 2)), max_size=5)
CEIL = F(3)


@given(terms, terms, terms)
@settings(max_examples=60, deadline=None)
def test_ring_laws(x, y, z):
    a, b, c = (S(t, CEIL) for t in (x, y, z))
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + (-a) == NovikovScalar.zero(CEIL)


@given(terms)
@settings(max_examples=60, deadline=None)
def test_format_parse_round_trip(x):
    a = S(x, CEIL)
    assert parse_scalar(format_scalar(a), CEIL) == a


@given(terms)
@settings(max_examples=60, deadline=None)
def test_inverse_times_self_is_one(x):
    a = S([(1, 0, 0)] + [t for t in x if t[1] > 0], CEIL)
    assert a * nov_invert(a) == NovikovScalar.one(CEIL)


@given(terms, terms)
@settings(max_examples=60, deadline=None)
def test_valuation_of_product_is_additive_when_nonzero(x, y):
    a, b = S(x), S(y)
    p = a * b
    if not p.is_zero():
        assert nov_valuation(p) >= nov_valuation(a) + nov_valuation(b)
        if len(a.leading()) == 1 and len(b.leading()) == 1:
            assert nov_valuation(p) == nov_valuation(a) + nov_valuation(b)
