from fractions import Fraction as F

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from obstructa import cyclic
from obstructa.ainfinity import zero_algebra
from obstructa.hochschild import hochschild_complex
from obstructa.window_homology import (Echelon, LedgerError, ResourceError, Window, bar_complex, homology,
                                       left_witness, nonboundary_certificate, rank, solve_linear,
                                       spectral_page)


# linear algebra against an independent oracle ------------------------------------

sparse_vec = st.dictionaries(st.integers(0, 5), st.fractions(-3, 3, max_denominator=3).filter(bool), max_size=4)
vec_lists = st.lists(sparse_vec, max_size=6)


def _dense(vectors, n=6):
    return sympy.Matrix([[sympy.Rational(v.get(i, 0).numerator, v.get(i, 0).denominator) if v.get(i) else 0
                          for i in range(n)] for v in vectors]) if vectors else sympy.zeros(0, n)


@given(vec_lists)
@settings(max_examples=80, deadline=None)
def test_rank_matches_sympy(vectors):
    assert rank(vectors) == (_dense(vectors).rank() if vectors else 0)


@given(vec_lists, sparse_vec)
@settings(max_examples=80, deadline=None)
def test_solve_linear_is_exact_or_certifiably_impossible(cols, target):
    x = solve_linear(cols, target)
    if x is not None:
        got = {}
        for j, c in x.items():
            for i, v in cols[j].items():
                got[i] = got.get(i, 0) + c * v
        assert {i: v for i, v in got.items() if v} == {i: v for i, v in target.items() if v}
    else:
        phi = left_witness(cols, target)
        assert sum(phi.get(i, 0) * v for i, v in target.items()) == 1
        for col in cols:
            assert sum(phi.get(i, 0) * v for i, v in col.items()) == 0


def test_echelon_preimage_round_trip():
    e = Echelon(track=True)
    e.add({0: F(1), 1: F(2)}, "a")
    e.add({1: F(1), 2: F(-1)}, "b")
    pre = e.preimage({0: F(1), 1: F(3), 2: F(-1)})
    assert pre == {"a": 1, "b": 1}


# enumeration -------------------------------------------------------------------------

def test_single_letter_bar_cells():
    a = zero_algebra([("x", 1)])
    c = bar_complex(a, Window(3, 1))
    assert [cell[0] for cell in c.cells] == [(), (0,), (0, 0), (0, 0, 0)]


def test_cyclic_cells_drop_self_cancelling_orbits():
    a = zero_algebra([("a", 0), ("b", 0)])
    c = cyclic.cyclic_complex(a, Window(2, 1))
    assert sorted(a.fmt(cell[0]) for cell in c.cells) == ["a", "a*b", "b"]


def test_empty_basis():
    a = zero_algebra([])
    assert [cell[0] for cell in bar_complex(a, Window(3, 1)).cells] == [()]
    assert hochschild_complex(a, None, Window(3, 1)).cells == []


def test_cell_cap_is_enforced():
    a = zero_algebra([("x", 1), ("y", 2)])
    with pytest.raises(ResourceError):
        bar_complex(a, Window(6, 1, cap=20))


# assembly and the ledger ---------------------------------------------------------------

def test_zero_algebra_has_zero_matrix_and_clean_ledger():
    c = bar_complex(zero_algebra([("x", 1), ("y", 0)]), Window(3, 1))
    assert all(not col for col in c.columns) and not c.ledger


def test_filtered_bar_ledger_is_clean(algebras):
    assert not bar_complex(algebras["E2"], Window(4, 3)).ledger


def test_clipped_hochschild_window_names_its_words(algebras):
    c = hochschild_complex(algebras["E3"], None, Window(3, 3, slope=False))
    assert c.ledger
    with pytest.raises(LedgerError, match=r"\[L\]\*L\*L"):
        homology(c, 0)


# homology ------------------------------------------------------------------------------

def test_zero_differential_counts_cells():
    a = zero_algebra([("x", 1), ("y", 2), ("z", 0)])
    c = bar_complex(a, Window(3, 1))
    rep = homology(c, 0)
    for d, dims in rep.dims.items():
        assert dims.homology == dims.cells == len(c.cells_of_degree(d))


def test_unfiltered_unital_bar_is_acyclic_above_length_zero(algebras):
    for name in ("E1", "E-free"):
        rep = homology(bar_complex(algebras[name], Window(4, 1), min_len=1), 1)
        assert rep.total() == 0


def test_filtered_unital_bar_has_one_class_per_energy_slot(algebras):
    rep = homology(bar_complex(algebras["E2"], Window(3, 3)), 3)
    assert {d: v for d, v in rep.homology().items() if v} == {0: 3}


# energy pages ----------------------------------------------------------------------------

def test_pages_of_zero_differential_are_the_cells():
    c = bar_complex(zero_algebra([("x", 1), ("y", 0)]), Window(3, 1))
    assert spectral_page(c, 1) == spectral_page(c, 2)
    assert sum(spectral_page(c, 1).values()) == len(c.cells)


def test_first_page_is_homology_of_the_energy_zero_part(algebras):
    a = algebras["E3"]
    c = bar_complex(a, Window(3, 3))
    page = spectral_page(c, 1)
    # the energy-zero differential preserves energy, so its homology splits by level
    zero_part = bar_complex(a, Window(3, F(1, 2)))
    level0 = {p: v for (p, n), v in page.items() if n == 0}
    assert level0 == {d: v.homology for d, v in homology(zero_part, 0).dims.items()}


def test_second_page_is_a_subquotient_of_the_first(algebras):
    for name in ("E2", "E3", "E4"):
        c = bar_complex(algebras[name], Window(3, 3))
        e1, e2 = spectral_page(c, 1), spectral_page(c, 2)
        assert all(0 <= e2[k] <= e1[k] for k in e1), name


# certificates --------------------------------------------------------------------------------

def test_zero_is_a_boundary():
    c = bar_complex(zero_algebra([("x", 1)]), Window(2, 1))
    assert nonboundary_certificate(c, {}).kind == "refutation"


def test_a_boundary_gets_a_refutation_with_preimage(algebras):
    a = algebras["E1"]
    c = bar_complex(a, Window(3, 1))
    x, y = a.index["x"], a.index["y"]
    # m1(x) = y, so the letter y is hit by the letter x
    z = {((y,), F(0), 0): F(1)}
    cert = nonboundary_certificate(c, z)
    assert cert.kind == "refutation" and cert.preimage


def test_leading_term_of_gamma_is_certified(algebras):
    a = algebras["E2"]
    w = Window(3, 3)
    gamma, dgamma, _ = cyclic.gamma_build(a, w)
    assert not dgamma
    c = bar_complex(a, w)
    cert = nonboundary_certificate(c, gamma)
    assert cert.is_certificate and cert.verify()
    assert cert.lead == {((), F(0), 0): 1}
