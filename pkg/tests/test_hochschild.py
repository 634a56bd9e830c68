from fractions import Fraction as F

import pytest

from obstructa import hochschild as h
from obstructa.ainfinity import AlgebraSpec, diagonal_bimodule, empty_bimodule, zero_algebra
from obstructa.window_homology import Window, homology

W = Window(3, 3)


def chain(*letters, lam=0, q=0):
    return {((0, tuple(letters)), F(lam), q): F(1)}


def _one_letter_by_hand(a, x):
    """(-1)^{|x|'} [x]*m0 + m1(x), written out from the operation tables."""
    out = {}
    sign = -1 if a.par[x] & 1 else 1
    tab = a.mtab("z")
    for o, c, lam, q in tab.get(0, {}).get((), []):
        out[((0, (x, o)), lam, q)] = out.get(((0, (x, o)), lam, q), 0) + sign * c
    for o, c, lam, q in tab.get(1, {}).get((x,), []):
        out[((0, (o,)), lam, q)] = out.get(((0, (o,)), lam, q), 0) + c
    return {k: v for k, v in out.items() if v}


@pytest.mark.parametrize("name", ["E1", "E2", "E3", "E4", "E-free"])
def test_single_module_letter(algebras, name):
    a = algebras[name]
    m = diagonal_bimodule(a)
    for x in range(a.size()):
        assert h.dhoch_raw(a, m, chain(x), W.E_max) == _one_letter_by_hand(a, x)


def test_curved_unit_example(algebras):
    a = algebras["E3"]
    L, v, u = (a.index[x] for x in "Lvu")
    m = diagonal_bimodule(a)
    assert h.dhoch_raw(a, m, chain(L), 3) == {((0, (L, v)), 1, 0): -1}
    assert h.dhoch_raw(a, m, chain(u), 3) == {((0, (u, v)), 1, 0): 1, ((0, (v,)), 0, 0): 1}


def test_zero_structure_gives_zero_differential():
    a = zero_algebra([("x", 1), ("y", 2)])
    m = diagonal_bimodule(a)
    for w in [(0,), (0, 1), (1, 0, 1)]:
        assert h.dhoch_raw(a, m, chain(*w), 3) == {}


def test_zero_algebra_homology_is_the_cell_count():
    a = zero_algebra([("x", 1), ("y", 0)])
    c = h.hochschild_complex(a, None, Window(3, 1))
    rep = homology(c, 0)
    assert all(d.homology == d.cells for d in rep.dims.values())
    assert sum(d.cells for d in rep.dims.values()) == len(c.cells)


def test_empty_bimodule_complex_has_no_cells(algebras):
    a = algebras["E2"]
    assert h.hochschild_complex(a, empty_bimodule(a), W).cells == []


@pytest.mark.parametrize("name", ["E1", "E2", "E3", "E4", "E-free", "E-zero"])
def test_square_vanishes_on_diagonal(algebras, name):
    a = algebras[name]
    assert h.hochschild_square_defect(a, diagonal_bimodule(a), W).ok


def test_literal_wrap_sign_breaks_the_square(algebras):
    a = algebras["E4"]
    m = diagonal_bimodule(a)
    c = h.hochschild_complex(a, m, W)
    bad = 0
    for cell in c.cells:
        once = h.dhoch_raw(a, m, {cell: F(1)}, 3, wrap_sign="literal")
        if h.dhoch_raw(a, m, once, 3, wrap_sign="literal"):
            bad += 1
    assert bad


def test_reduced_tails_never_contain_the_unit(algebras):
    a = algebras["E3"]
    c = h.reduced_complex(a, None, W)
    assert c.cells and all(a.unit not in cell[0][1][1:] for cell in c.cells)


def test_reduced_complex_needs_a_unit():
    with pytest.raises(Exception, match="unit"):
        h.reduced_complex(zero_algebra([("x", 1)]), None, W)


# the degeneracy-type operators ------------------------------------------------------

def test_t_is_m0_after_s_up_to_a_uniform_sign(algebras):
    a = algebras["E2"]
    m = diagonal_bimodule(a)
    for i in range(2):
        eq, opp, other = h.t_versus_d0s(a, m, W, i)
        assert other == 0 and (eq == 0 or opp == 0) and eq + opp > 0


# chain maps ---------------------------------------------------------------------------

def test_identity_bimodule_map_is_a_chain_map(algebras):
    for name in ("E2", "E3", "E4"):
        a = algebras[name]
        m = diagonal_bimodule(a)
        assert h.chainmap_defect(a, h.identity_bimodule_hom(m), W).ok


def test_a_map_that_ignores_the_differential_is_caught(algebras):
    a = algebras["E3"]
    m = diagonal_bimodule(a)
    u, v = a.index["u"], a.index["v"]
    # send u to itself and kill v; m1(u) = v breaks this
    table = {((), y, ()): {y: 1} for y in range(m.size()) if y != v}
    phi = h.BimoduleHomSpec(m, m, {"b0": (0, 0)}, {((0, 0), "b0"): table})
    rep = h.chainmap_defect(a, phi, W)
    assert not rep.ok
    assert any(name.startswith("[u]") for name, _ in rep.residuals)


# Maurer-Cartan -------------------------------------------------------------------------

def test_zero_cochain_of_uncurved_algebra_is_a_solution(algebras):
    assert h.mc_defect(algebras["E1"], {}, W) == {}


def test_zero_cochain_leaves_the_curvature(algebras):
    a = algebras["E2"]
    assert h.mc_defect(a, {}, W) == {((a.index["v"],), 1, 0): 1}


def test_exponential_needs_positive_energy(algebras):
    with pytest.raises(ArithmeticError):
        h.exp_element(algebras["E3"], {(0, F(0), 0): F(1)}, 3)


def test_exponential_truncates():
    a = zero_algebra([("x", 0)])
    e = h.exp_element(a, {(0, F(1), 0): F(2)}, 3)
    assert e == {((), 0, 0): 1, ((0,), 1, 0): 2, ((0, 0), 2, 0): 4}


def test_solver_matches_shipped_cochain(shipped):
    a = shipped["E3"].algebra
    b = h.solve_mc(a, Window(4, 3))
    assert b == shipped["E3"].bounding_cochain
    assert h.mc_defect(a, b, Window(4, 3)) == {}


def test_curvature_with_no_primitive_is_obstructed(algebras):
    with pytest.raises(h.ObstructedError, match="T\\^1"):
        h.solve_mc(algebras["E2"], W)


def test_deforming_by_zero_changes_nothing(algebras):
    a = algebras["E1"]
    d = h.deform(a, {}, W)
    assert {k: v for k, v in d.ops.items() if v} == {k: v for k, v in a.ops.items() if v}


def test_deformed_algebra_is_flat(algebras):
    a = algebras["E3"]
    d = h.deform(a, h.solve_mc(a, W), W)
    assert not d.mtab("z").get(0)
    assert h.mc_defect(d, {}, W) == {}


def test_deforming_by_a_non_solution_is_refused(algebras):
    with pytest.raises(h.ObstructedError):
        h.deform(algebras["E2"], {}, W)


def test_gamma_b_is_a_cycle_exactly_when_b_solves(algebras):
    a = algebras["E3"]
    m = diagonal_bimodule(a)
    b = h.solve_mc(a, W)
    assert h.dhoch_raw(a, m, h.gamma_b(a, b, W), 3) == {}
    assert h.dhoch_raw(a, m, h.gamma_b(a, {}, W), 3) != {}


def test_cochain_degree_check(algebras):
    a = algebras["E3"]
    assert h.check_cochain_degree(a, {(a.index["u"], F(1), 0): F(1)}) == []
    assert h.check_cochain_degree(a, {(a.index["v"], F(1), 0): F(1)})


def test_augmentation_detects_curvature(algebras):
    tried, bad = h.augmentation_check(algebras["E2"], {}, W)
    assert tried > 0 and bad == [(algebras["E2"].index["v"],)]
    a = algebras["E3"]
    tried, bad = h.augmentation_check(a, h.solve_mc(a, W), W)
    assert tried > 0 and bad == []


def test_differential_square_of_a_chain_complex(algebras):
    assert h.differential_square(algebras["E1"], W) == {}
    a = AlgebraSpec("chain", [("a", 0), ("b", 1), ("c", 2)], {"b0": (0, 0)},
                    {(1, "b0"): {("a",): {"b": 1}, ("b",): {"c": 1}}})
    assert h.differential_square(a, W) == {(0, 2, 0, 0): 1}
