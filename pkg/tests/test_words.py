from fractions import Fraction as F
from itertools import permutations

from hypothesis import given, settings, strategies as st

from obstructa.words import (CYCLIC, MODULE, PLAIN, SYMMETRIC, SignedVector, act, compose, cyclic_canonical,
                             cyclic_symmetrize, expand, format_word, full_symmetrize, koszul_sign,
                             module_cycle_action, parse_word, project, rotate_right, rotations,
                             sort_sign, sym_canonical, symmetrize_into)


def plain(word, par, c=1):
    return SignedVector({(tuple(word), 0, 0): c}, PLAIN, par)


def test_koszul_identity_and_swap():
    assert koszul_sign((0, 1, 2), [1, 0, 3]) == 1
    assert koszul_sign((1, 0), [1, 1]) == -1
    # the cyclic shift of three odd letters: (-1)^(|x1|'(|x2|'+|x3|')) = +1
    assert koszul_sign((1, 2, 0), [1, 1, 1]) == 1


def test_rotation_of_two_odd_letters_flips_sign():
    v = act((1, 0), plain((0, 1), [1, 1]))
    assert v.data == {((1, 0), 0, 0): -1}


def test_identity_action():
    v = plain((0, 1, 2), [1, 0, 1], 3)
    assert act((0, 1, 2), v) == v


def test_norm_of_two_equal_odd_letters_vanishes():
    par = [-1]
    assert cyclic_symmetrize(plain((0, 0), par)).is_zero()


def test_norm_of_single_letter():
    assert cyclic_symmetrize(plain((0,), [1])).data == {((0,), 0, 0): 1}


def test_norm_of_three_even_letters():
    par = [0, 0, 0]
    v = to_plain_cyc(cyclic_symmetrize(plain((0, 1, 2), par)))
    assert v == {((0, 1, 2), 0, 0): 1, ((1, 2, 0), 0, 0): 1, ((2, 0, 1), 0, 0): 1}


def to_plain_cyc(v):
    return expand(v.data, CYCLIC, v.par)


def test_full_symmetrization_examples():
    assert full_symmetrize(plain((0, 0), [1])).is_zero()
    assert full_symmetrize(plain((0,), [1])).data == {((0,), 0, 0): 1}
    v = full_symmetrize(plain((0, 1), [0, 0]))
    assert expand(v.data, SYMMETRIC, v.par) == {((0, 1), 0, 0): 1, ((1, 0), 0, 0): 1}


def test_module_rotation_even_degrees():
    v = SignedVector({((0, (5, 7)), 0, 0): 1}, MODULE, [0] * 8, [0] * 8)
    r = module_cycle_action(1, v)
    assert r.data == {((1, (7, 5)), 0, 0): 1}
    assert module_cycle_action(0, v) == v
    assert module_cycle_action(1, r) == v


def test_word_text_round_trip():
    names = ["L", "v", "u"]
    index = {x: i for i, x in enumerate(names)}
    for text in ["L*v*u", "cyc:v*L", "sym:L*u", "1"]:
        flavor, w = parse_word(text, index)
        assert format_word(w, names, flavor) == text


pars = st.lists(st.integers(-1, 2), min_size=1, max_size=4)


@st.composite
def word_and_par(draw, max_len=5):
    par = draw(pars)
    w = draw(st.lists(st.integers(0, len(par) - 1), min_size=1, max_size=max_len))
    return tuple(w), par


@given(word_and_par(), st.data())
@settings(max_examples=80, deadline=None)
def test_action_composes(wp, data):
    w, par = wp
    n = len(w)
    sigma = tuple(data.draw(st.permutations(range(n))))
    tau = tuple(data.draw(st.permutations(range(n))))
    v = plain(w, par)
    assert act(compose(sigma, tau), v) == act(sigma, act(tau, v))


@given(word_and_par())
@settings(max_examples=80, deadline=None)
def test_t_to_the_n_is_identity(wp):
    w, par = wp
    cur, s = w, 1
    for _ in range(len(w)):
        cur, t = rotate_right(cur, par)
        s *= t
    assert (cur, s) == (w, 1)


@given(word_and_par())
@settings(max_examples=80, deadline=None)
def test_cyclic_canonical_matches_norm(wp):
    w, par = wp
    norm = {}
    for u, s in rotations(w, par):
        norm[u] = norm.get(u, 0) + s
    norm = {u: c for u, c in norm.items() if c}
    rep, s, mult = cyclic_canonical(w, par)
    got = expand({(rep, 0, 0): F(s * mult)}, CYCLIC, par) if mult else {}
    assert got == {(u, 0, 0): c for u, c in norm.items()}


@given(word_and_par())
@settings(max_examples=80, deadline=None)
def test_sym_canonical_matches_permutation_sum(wp):
    w, par = wp
    total = {}
    degs = [par[x] for x in w]
    for sigma in permutations(range(len(w))):
        u = tuple(w[i] for i in sigma)
        total[u] = total.get(u, 0) + koszul_sign(sigma, degs)
    total = {(u, 0, 0): c for u, c in total.items() if c}
    rep, s, mult = sym_canonical(w, par)
    got = expand({(rep, 0, 0): F(s * mult)}, SYMMETRIC, par) if mult else {}
    assert got == total


@given(word_and_par())
@settings(max_examples=80, deadline=None)
def test_project_inverts_expand(wp):
    w, par = wp
    for flavor in (CYCLIC, SYMMETRIC):
        sym = symmetrize_into({(w, 0, 0): F(1)}, flavor, par)
        assert project(expand(sym, flavor, par), flavor, par) == sym


@given(word_and_par())
@settings(max_examples=60, deadline=None)
def test_sort_sign_is_the_koszul_sign_of_the_sort(wp):
    w, par = wp
    rep, s = sort_sign(w, par)
    assert list(rep) == sorted(w)
    assert s in (1, -1)
    # sorting twice changes nothing
    assert sort_sign(rep, par) == (rep, 1)
