"""Algebra generators shared by the test modules."""

import random
from fractions import Fraction
from itertools import product

from obstructa import examples
from obstructa.ainfinity import AlgebraSpec, validate_spec


def matrix_algebra():
    """2x2 matrices in degree 0: associative, unital, not commutative."""
    ids = ["e11", "e12", "e21", "e22"]
    m2 = {}
    for a in ids:
        for b in ids:
            if a[2] == b[1]:
                m2[(a, b)] = {f"e{a[1]}{b[2]}": 1}
    return AlgebraSpec("M2", [(x, 0) for x in ids], {"b0": (0, 0)}, {(2, "b0"): m2})


def _ops_of(a):
    """Operations of a spec as {(k, label): {input ids: {out id: coeff}}}."""
    return {key: {tuple(a.ids[i] for i in inp): {a.ids[o]: c for o, c in outs.items()}
                  for inp, outs in table.items()}
            for key, table in a.ops.items()}


def _basis_of(a):
    return [(x, a.degrees[i], i in a.unit_flags) for i, x in enumerate(a.ids)]


def rescaled(a, rng, name=None):
    """Same algebra after x -> c_x x on every non-unit basis element.

    m_k(x_1..x_k) picks up c_out / prod c_in, so validity is preserved while
    every structure constant changes.
    """
    scale = {x: Fraction(1) if i == a.unit else Fraction(rng.choice([1, 2, 3, -1, -2])) / rng.choice([1, 2, 3])
             for i, x in enumerate(a.ids)}
    ops = {}
    for key, table in _ops_of(a).items():
        t = {}
        for inp, outs in table.items():
            den = Fraction(1)
            for x in inp:
                den *= scale[x]
            t[inp] = {o: c * scale[o] / den for o, c in outs.items()}
        ops[key] = t
    return AlgebraSpec(name or f"{a.name}~", _basis_of(a), dict(a.classes), ops)


def perturbed(a, rng):
    """One structure constant shifted by a nonzero amount."""
    ops = _ops_of(a)
    slots = [(key, inp, o) for key, t in sorted(ops.items()) for inp, outs in sorted(t.items())
             for o in sorted(outs)]
    if not slots:
        return a
    key, inp, o = rng.choice(slots)
    ops[key][inp][o] += rng.choice([1, -1, 2])
    return AlgebraSpec(f"{a.name}!", _basis_of(a), dict(a.classes), ops)


def random_algebra(rng, n_basis=None, max_arity=3, curved=None, density=0.4):
    """Degree-consistent operations with random coefficients; usually invalid."""
    n = n_basis or rng.randint(1, 4)
    names = "abcd"[:n]
    basis = [(x, rng.randint(0, 3)) for x in names]
    deg = dict(basis)
    classes = {"b0": (0, 0), "b1": (1, 0)}
    ops = {}
    curved = rng.random() < 0.3 if curved is None else curved
    for k in range(0, max_arity + 1):
        for lab in ("b0", "b1"):
            if k == 0 and (lab == "b0" or not curved):
                continue
            t = {}
            for inp in product(names, repeat=k):
                src = sum(deg[x] - 1 for x in inp)
                outs = {x: rng.choice([1, -1, 2, Fraction(1, 2)]) for x in names
                        if deg[x] - 1 == src + 1 and rng.random() < density}
                if outs:
                    t[inp] = outs
            if t:
                ops[(k, lab)] = t
    a = AlgebraSpec("random", basis, classes, ops)
    assert not validate_spec(a)
    return a


def known_valid():
    """Shipped algebras plus the matrix algebra, all with at most four basis elements."""
    out = [examples.load_example_algebra(n) for n in examples.NAMES]
    out.append(matrix_algebra())
    return [a for a in out if a.size() <= 4]


def spec_family(seed, count=50):
    """Mixed batch for the two-route structure check: rescaled valid algebras,
    single-constant perturbations of them, and random tables."""
    rng = random.Random(seed)
    base = known_valid()
    out = []
    for i in range(count):
        kind = i % 3
        a = rng.choice(base)
        if kind == 0:
            out.append(rescaled(a, rng, f"valid-{i}"))
        elif kind == 1:
            out.append(perturbed(rescaled(a, rng), rng))
        else:
            out.append(random_algebra(rng))
    return out
