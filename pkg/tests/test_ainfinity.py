import random
from fractions import Fraction as F
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from helpers import known_valid, matrix_algebra, random_algebra

from obstructa import hochschild
from obstructa.ainfinity import (AlgebraSpec, BimoduleSpec, HomomorphismSpec, SpecError, ainfty_defect, bimodule_defect,
                                 coproduct, dhat_apply, dhat_raw, diagonal_bimodule, direct_relation_defect,
                                 empty_bimodule, flavor_closure_defect, hom_apply, hom_chainmap_defect,
                                 hom_from_terms, hom_raw, identity_hom, pullback_bimodule, relation_residual,
                                 unit_check, validate_spec, zero_algebra)
from obstructa.window_homology import Window, words_up_to
from obstructa.words import CYCLIC, PLAIN, SYMMETRIC, SignedVector

W = Window(3, 3)


def letters(a, *names):
    return tuple(a.index[x] for x in names)


# validation ---------------------------------------------------------------------

def test_curvature_at_energy_zero_is_rejected():
    a = AlgebraSpec("bad", [("x", 1)], {"b0": (0, 0)}, {(0, "b0"): {(): {"x": 1}}})
    assert "m0 must have positive energy" in validate_spec(a)


def test_zero_operations_are_valid():
    assert validate_spec(zero_algebra([("p", 0), ("q", 3), ("r", -2)])) == []


def test_degree_violation_names_the_term():
    a = AlgebraSpec("bad", [("x", 0), ("y", 0)], {"b0": (0, 0)}, {(1, "b0"): {("x",): {"y": 1}}})
    (msg,) = validate_spec(a)
    assert "m_1,b0" in msg and "x -> y" in msg


def test_odd_maslov_and_two_zero_classes_are_rejected():
    a = AlgebraSpec("bad", [("x", 0)], {"b0": (0, 0), "c": (0, 0), "d": (1, 1)}, {})
    bad = validate_spec(a)
    assert any("several energy-zero classes" in b for b in bad)
    assert any("odd Maslov index" in b for b in bad)


def test_shipped_unit_passes(algebras):
    assert unit_check(algebras["E2"]) == []


def test_planted_unit_failures(algebras):
    a = algebras["E2"]
    ops = {k: {tuple(a.ids[i] for i in inp): {a.ids[o]: c for o, c in outs.items()}
               for inp, outs in t.items()} for k, t in a.ops.items()}
    ops[(2, "b0")][("L", "v")] = {"v": 2}
    b = AlgebraSpec("E2'", [("L", 0, True), ("v", 2)], dict(a.classes), ops)
    assert any("m2(I,v)" in x for x in unit_check(b))
    free = algebras["E-free"]
    ops = {(2, "b0"): {tuple(free.ids[i] for i in inp): {free.ids[o]: c for o, c in outs.items()}
                       for inp, outs in free.ops[(2, "b0")].items()},
           (3, "b0"): {("a", "1", "a"): {"a": 1}}}
    c = AlgebraSpec("free'", [("1", 0, True), ("a", 1), ("b", 2)], {"b0": (0, 0)}, ops)
    assert any("m_3,b0(a*1*a) must vanish" in x for x in unit_check(c))


# the bar differential -----------------------------------------------------------

def test_empty_word_goes_to_curvature(algebras):
    a = algebras["E2"]
    d = dhat_apply(a, SignedVector({((), 0, 0): 1}, PLAIN, a.par), W)
    assert d.data == {(letters(a, "v"), 1, 0): 1}


def test_unit_goes_to_commutator_with_curvature(algebras):
    a = algebras["E2"]
    d = dhat_apply(a, SignedVector({(letters(a, "L"), 0, 0): 1}, PLAIN, a.par), W)
    assert d.data == {(letters(a, "v", "L"), 1, 0): 1, (letters(a, "L", "v"), 1, 0): -1}


def test_zero_algebra_has_zero_differential():
    a = zero_algebra([("x", 1), ("y", 2)])
    v = SignedVector({((0, 1, 0), 0, 0): 1}, PLAIN, a.par)
    assert dhat_apply(a, v, W).is_zero()


def test_shipped_and_matrix_algebras_are_clean(algebras):
    for a in list(algebras.values()) + [matrix_algebra()]:
        assert ainfty_defect(a, Window(4, 3)).ok, a.name
        assert direct_relation_defect(a, Window(4, 3)).ok, a.name


def test_non_square_zero_differential_fails_on_letters():
    a = AlgebraSpec("chain", [("a", 0), ("b", 1), ("c", 2)], {"b0": (0, 0)},
                    {(1, "b0"): {("a",): {"b": 1}, ("b",): {"c": 1}}})
    rep = ainfty_defect(a, W)
    assert rep.residuals[0][0] == "a"
    assert direct_relation_defect(a, W).residuals[0][0] == "a"


def test_zero_algebra_defect_is_empty():
    assert ainfty_defect(zero_algebra([("x", 1), ("y", 0)]), W).ok


@given(st.integers(0, 10 ** 6))
@settings(max_examples=25, deadline=None)
def test_length_one_part_of_square_is_the_relation(seed):
    a = random_algebra(random.Random(seed))
    for w in product(range(a.size()), repeat=3):
        twice = dhat_raw(a, dhat_raw(a, {(w, F(0), 0): F(1)}, 3), 3)
        short = {(k[0][0], k[1], k[2]): c for k, c in twice.items() if len(k[0]) == 1}
        assert short == relation_residual(a, w, 3)


@given(st.integers(0, 10 ** 6))
@settings(max_examples=15, deadline=None)
def test_differential_preserves_cyclic_and_symmetric_words(seed):
    rng = random.Random(seed)
    a = rng.choice(known_valid() + [random_algebra(rng)])
    for flavor in (CYCLIC, SYMMETRIC):
        for L in range(0, 4):
            for w in words_up_to(a.size(), L, flavor, a.par, L)[L]:
                v = SignedVector({(w, 0, 0): 1}, flavor, a.par)
                assert not flavor_closure_defect(a, v, W)


# homomorphisms ------------------------------------------------------------------

def test_identity_morphism_fixes_vectors(algebras):
    a = algebras["E3"]
    v = SignedVector({((0, 1, 2), 0, 0): 3, ((2,), 1, 0): -1}, PLAIN, a.par, e_ceiling=3)
    assert hom_apply(identity_hom(a), v, W) == v
    assert hom_chainmap_defect(identity_hom(a), W).ok


def test_curvature_component_exponentiates(algebras):
    a = algebras["E3"]
    u = a.index["u"]
    f = hom_from_terms(a, a, [(1, (x,), x, 1, 0, 0) for x in range(a.size())] + [(0, (), u, 1, 1, 0)])
    img = hom_apply(f, SignedVector({((), 0, 0): 1}, PLAIN, a.par), Window(3, 4)).data
    assert img == {((), 0, 0): 1, ((u,), 1, 0): 1, ((u, u), 2, 0): 1, ((u, u, u), 3, 0): 1}


def test_morphism_is_a_coalgebra_map(algebras):
    a = algebras["E3"]
    rng = random.Random(5)
    terms = [(1, (x,), x, rng.choice([1, 2]), 0, 0) for x in range(a.size())]
    terms += [(0, (), a.index["u"], 1, 1, 0), (2, letters(a, "u", "u"), a.index["v"], 1, 1, 0)]
    f = hom_from_terms(a, a, terms)
    for w in product(range(a.size()), repeat=3):
        lhs = coproduct(hom_raw(f, {(w, F(0), 0): F(1)}, 3))
        rhs = {}
        for (w1, w2, lam, q), c in coproduct({(w, F(0), 0): F(1)}).items():
            for (u1, l1, q1), c1 in hom_raw(f, {(w1, lam, q): c}, 3).items():
                for (u2, l2, q2), c2 in hom_raw(f, {(w2, F(0), 0): F(1)}, 3).items():
                    if l1 + l2 < 3:
                        k = (u1, u2, l1 + l2, q1 + q2)
                        rhs[k] = rhs.get(k, 0) + c1 * c2
        assert lhs == {k: c for k, c in rhs.items() if c}


def test_inclusion_of_deformation_is_a_chain_map(algebras):
    a = algebras["E3"]
    w = Window(3, 3)
    b = hochschild.solve_mc(a, w)
    d = hochschild.deform(a, b, w)
    assert hom_chainmap_defect(hochschild.inclusion_hom(a, d, b), w).ok


def test_doubling_is_not_a_chain_map(algebras):
    a = algebras["E2"]
    f = hom_from_terms(a, a, [(1, (x,), x, 2, 0, 0) for x in range(a.size())])
    assert not hom_chainmap_defect(f, W).ok


# bimodules ---------------------------------------------------------------------------

def test_diagonal_and_empty_bimodules_are_clean(algebras):
    for a in algebras.values():
        assert bimodule_defect(diagonal_bimodule(a), W).ok, a.name
        assert bimodule_defect(empty_bimodule(a), W).ok


def test_planted_module_differential_fails_on_bare_module_letters():
    a = zero_algebra([("x", 1)])
    m = BimoduleSpec(a, a, [("p", 0), ("q", 1), ("r", 2)], {"b0": (0, 0)},
                     {((0, 0), "b0"): {((), "p", ()): {"q": 1}, ((), "q", ()): {"r": 1}}})
    rep = bimodule_defect(m, W)
    assert rep.residuals[0][0] == "[p]"


def _tables(m):
    return {kk: {key: sorted(v) for key, v in t.items() if v} for kk, t in m.tab().items() if t}


def test_pullback_along_identities_changes_nothing(algebras):
    a = algebras["E2"]
    m = diagonal_bimodule(a)
    f = identity_hom(a)
    assert _tables(pullback_bimodule(f, f, m, Window(3, 3))) == _tables(m)


def test_pullback_along_inclusion_is_the_deformed_diagonal(algebras):
    a = algebras["E3"]
    w = Window(3, 3)
    b = hochschild.solve_mc(a, w)
    d = hochschild.deform(a, b, w)
    i = hochschild.inclusion_hom(a, d, b)
    pulled = pullback_bimodule(i, i, diagonal_bimodule(a), w)
    assert _tables(pulled) == _tables(diagonal_bimodule(d))


def _scaled(a, scale, name):
    ops = {}
    for key, table in a.ops.items():
        t = {}
        for inp, outs in table.items():
            den = F(1)
            for x in inp:
                den *= scale[x]
            t[tuple(a.ids[x] for x in inp)] = {a.ids[o]: c * scale[o] / den for o, c in outs.items()}
        ops[key] = t
    basis = [(x, a.degrees[i], i in a.unit_flags) for i, x in enumerate(a.ids)]
    return AlgebraSpec(name, basis, dict(a.classes), ops)


def _scaling_hom(src, dst, factors):
    return HomomorphismSpec(src, dst, {"b0": (0, 0)},
                            {(1, "b0"): {(x,): {x: factors[x]} for x in range(src.size())}})


def test_pullback_is_functorial(algebras):
    a = algebras["E2"]
    s1 = {0: F(1), 1: F(3)}
    s2 = {0: F(1), 1: F(-1, 2)}
    a1 = _scaled(a, s1, "A1")
    a2 = _scaled(a1, s2, "A2")
    g = _scaling_hom(a1, a, {x: 1 / s1[x] for x in s1})
    f = _scaling_hom(a2, a1, {x: 1 / s2[x] for x in s2})
    gf = _scaling_hom(a2, a, {x: 1 / (s1[x] * s2[x]) for x in s1})
    assert hom_chainmap_defect(g, W).ok and hom_chainmap_defect(f, W).ok
    m = diagonal_bimodule(a)
    w = Window(3, 3)
    twice = pullback_bimodule(f, f, pullback_bimodule(g, g, m, w), w)
    once = pullback_bimodule(gf, gf, m, w)
    assert _tables(twice) == _tables(once)
    assert bimodule_defect(once, w).ok


def test_pullback_needs_matching_targets(algebras):
    with pytest.raises(SpecError):
        pullback_bimodule(identity_hom(algebras["E1"]), identity_hom(algebras["E1"]),
                          diagonal_bimodule(algebras["E2"]), W)
