"""Hochschild chains of A-infinity bimodules, bounding cochains and deformation."""

from fractions import Fraction
from itertools import product

from .ainfinity import (DefectReport, SpecError, _rat_str, diagonal_bimodule, dhat_raw,
                        hom_from_terms, hom_raw, spec_from_terms)
from .novikov import DivergenceError, NovikovScalar
from .window_homology import (assemble, bar_complex, graded_cells, degree_fn, homology, monoid_slots,
                              solve_linear)
from .words import MODULE, SignedVector, vadd, vaxpy


class ObstructedError(ArithmeticError):
    pass


def _gen_slots(a, m, window):
    gens = set(a.slot_generators(window.mode))
    for (kk, lab), t in m.nops.items():
        if t:
            e, mu = m.classes[lab]
            q = 0 if window.mode == "z2" else mu // 2
            if e > 0 or q:
                gens.add((e, q))
    return sorted(gens)


# the differential ------------------------------------------------------

def dhoch_raw(a, m, data, ceiling=None, mode="z", kmax=None, families=(1, 2, 3), wrap_sign="rotation"):
    """Hochschild boundary on keys ``(0, (v, x1, ..., xk))``.

    Families: 1 operations on the tail, 2 m0 inserted after v, 3 module
    operations wrapping around the circle.
    """
    par, mpar = a.par, m.mpar
    ntab = m.tab(mode)
    atab = a.mtab(mode)
    out = {}
    for ((mark, letters), lam, q), c in data.items():
        v = letters[0]
        xs = letters[1:]
        k = len(xs)
        pv = mpar[v] & 1
        pre = [pv]
        for x in xs:
            pre.append(pre[-1] ^ (par[x] & 1))
        # families 1 and 2: sign |v|' + |x_1|' + ... + |x_{i-1}|'
        for kk, table in atab.items():
            if kmax is not None and kk > kmax:
                continue
            if kk == 0:
                if 2 not in families:
                    continue
                for i in range(k + 1):
                    sc = -c if pre[i] else c
                    for o, cc, l2, q2 in table.get((), []):
                        lt = lam + l2
                        if ceiling is not None and lt >= ceiling:
                            continue
                        w = (v,) + xs[:i] + (o,) + xs[i:]
                        vadd(out, ((0, w), lt, q + q2), sc * cc)
                continue
            if 1 not in families:
                continue
            for i in range(k - kk + 1):
                ents = table.get(xs[i:i + kk])
                if not ents:
                    continue
                sc = -c if pre[i] else c
                for o, cc, l2, q2 in ents:
                    lt = lam + l2
                    if ceiling is not None and lt >= ceiling:
                        continue
                    w = (v,) + xs[:i] + (o,) + xs[i + kk:]
                    vadd(out, ((0, w), lt, q + q2), sc * cc)
        if 3 not in families:
            continue
        # family 3: n_{i,j}(x_{k-i+1..k}, v, x_{1..j}) x_{j+1..k-i}
        for (i, j), table in ntab.items():
            if i + j > k:
                continue
            if kmax is not None and i + j + 1 > kmax:
                continue
            ents = table.get((xs[k - i:], v, xs[:j]))
            if not ents:
                continue
            back = sum(par[x] for x in xs[k - i:]) & 1
            reach = j if wrap_sign == "literal" else k - i
            front = (pv + sum(par[x] for x in xs[:reach])) & 1
            sc = -c if (back and front) else c
            rest = xs[j:k - i]
            for o, cc, l2, q2 in ents:
                lt = lam + l2
                if ceiling is not None and lt >= ceiling:
                    continue
                vadd(out, ((0, (o,) + rest), lt, q + q2), sc * cc)
    return out


def dhoch_apply(a, m, v, window):
    res = dhoch_raw(a, m, v.data, window.E_max, window.mode, window.K_max)
    return SignedVector(res, MODULE, a.par, m.mpar, e_ceiling=window.E_max)


def hochschild_fmt(a, m):
    def fmt(key):
        mark, letters = key
        if not letters:
            return "1"
        parts = [f"[{m.mids[letters[0]]}]"] + [a.ids[x] for x in letters[1:]]
        return "*".join(parts)
    return fmt


def hochschild_complex(a, m=None, window=None, reduced=False):
    """Windowed Hochschild complex C(A, M); the diagonal bimodule by default."""
    if m is None:
        m = diagonal_bimodule(a)
    if reduced and a.unit is None:
        raise SpecError("the reduced complex needs a strict unit")
    step = a.length_step()
    slots = monoid_slots(_gen_slots(a, m, window), window.E_max)
    top = max(window.budget(lam, step) for lam, _ in slots)
    tails = list(range(a.size()))
    if reduced:
        tails = [x for x in tails if x != a.unit]
    words = {}
    for L in range(1, top + 1):
        ws = []
        for v in range(m.size()):
            for t in product(tails, repeat=L - 1):
                ws.append((0, (v,) + t))
        words[L] = ws
    cells = graded_cells(slots, lambda lam: window.budget(lam, step), words, window.effective_cap())
    par, mpar = a.par, m.mpar
    unit = a.unit

    def op(raw):
        res = dhoch_raw(a, m, raw, window.E_max, window.mode, window.K_max)
        if reduced:
            res = {k: c for k, c in res.items() if unit not in k[0][1][1:]}
        return res

    def parity(key):
        letters = key[1]
        return mpar[letters[0]] + sum(par[x] for x in letters[1:])

    def builder(w2):
        return hochschild_complex(a, m, w2, reduced)

    name = "reduced-hochschild" if reduced else "hochschild"
    return assemble(name, window, cells, degree_fn(window, parity), op,
                    fmt=hochschild_fmt(a, m), builder=builder,
                    max_arity=max(a.max_arity(), 1), step=step)


def hochschild_homology(a, m=None, window=None, margin=None):
    c = hochschild_complex(a, m, window)
    return homology(c, margin)


def reduced_complex(a, m=None, window=None):
    return hochschild_complex(a, m, window, reduced=True)


def hochschild_square_defect(a, m, window):
    """d^Hoch applied twice on every cell of the window."""
    c = hochschild_complex(a, m, window)
    rep = DefectReport("hochschild")
    for cell in c.cells:
        once = dhoch_raw(a, m, {cell: Fraction(1)}, window.E_max, window.mode)
        twice = dhoch_raw(a, m, once, window.E_max, window.mode)
        rep.checked += 1
        if twice:
            rep.residuals.append((c.describe(cell), twice))
    return rep


# degeneracies used in the reduced comparison --------------------------------

def s_op(a, m, i, data):
    """s_i inserts the unit after a_i with sign (-1)^(|v|' + |a_1|' + ... + |a_i|')."""
    out = {}
    for ((mark, letters), lam, q), c in data.items():
        xs = letters[1:]
        if i < 0 or i > len(xs):
            continue
        s = (m.mpar[letters[0]] + sum(a.par[x] for x in xs[:i])) & 1
        w = (letters[0],) + xs[:i] + (a.unit,) + xs[i:]
        vadd(out, ((0, w), lam, q), -c if s else c)
    return out


def t_op(a, m, i, data, ceiling=None, mode="z"):
    """t_i = (-1)^|v|' v (x) m0-hat(a_1 .. a_i I a_i+1 .. a_k)."""
    out = {}
    for ((mark, letters), lam, q), c in data.items():
        xs = letters[1:]
        if i < 0 or i > len(xs):
            continue
        inner = xs[:i] + (a.unit,) + xs[i:]
        s = m.mpar[letters[0]] & 1
        res = dhat_raw(a, {(inner, lam, q): c}, ceiling, mode, kmax=0)
        for (w, l2, q2), c2 in res.items():
            vadd(out, ((0, (letters[0],) + w), l2, q2), -c2 if s else c2)
    return out


def t_versus_d0s(a, m, window, i):
    """Compare t_i with (m0 part of d^Hoch) after s_i on every cell.

    Returns (equal_count, opposite_count, other_count).
    """
    c = hochschild_complex(a, m, window)
    eq = opp = other = 0
    for cell in c.cells:
        x = {cell: Fraction(1)}
        t = t_op(a, m, i, x, window.E_max, window.mode)
        ds = dhoch_raw(a, m, s_op(a, m, i, x), window.E_max, window.mode, families=(2,))
        if not t and not ds:
            continue
        if t == ds:
            eq += 1
        elif t == {k: -v for k, v in ds.items()}:
            opp += 1
        else:
            other += 1
    return eq, opp, other


# bimodule homomorphisms and the induced chain map ----------------------------

class BimoduleHomSpec:
    """phi_(i,j) : A^i (x) M (x) A^j -> N, optionally over a homomorphism ``alpha``."""

    def __init__(self, source, target, classes, phis, alpha=None, name="phi"):
        self.source = source
        self.target = target
        self.alpha = alpha
        self.name = name
        self.classes = {lab: (Fraction(e), int(mu)) for lab, (e, mu) in classes.items()}
        self.phis = {}
        for (kk, lab), table in phis.items():
            t = {}
            for (lw, mm, rw), outs in table.items():
                la = source.left
                key = (tuple(la.index[x] if not isinstance(x, int) else x for x in lw),
                       source.mindex[mm] if not isinstance(mm, int) else mm,
                       tuple(la.index[x] if not isinstance(x, int) else x for x in rw))
                o = {}
                for out, c in outs.items():
                    vadd(o, target.mindex[out] if not isinstance(out, int) else out, Fraction(c))
                if o:
                    t[key] = o
            self.phis[(tuple(kk), lab)] = t

    def tab(self, mode="z"):
        t = {}
        for (kk, lab), table in self.phis.items():
            e, mu = self.classes[lab]
            q = 0 if mode == "z2" else mu // 2
            dst = t.setdefault(kk, {})
            for key, outs in table.items():
                lst = dst.setdefault(key, [])
                for o, c in sorted(outs.items()):
                    lst.append((o, c, e, q))
        return t


def identity_bimodule_hom(m, scale=1):
    table = {((), y, ()): {y: scale} for y in range(m.size())}
    return BimoduleHomSpec(m, m, {"b0": (0, 0)}, {((0, 0), "b0"): table}, name="id")


def chainmap_apply(phi, data, window):
    """phi_*(v x_1..x_k) = sum (-1)^e phi_(i,j)(x_(k-i+1..k), v, x_(1..j)) alpha-hat(x_(j+1..k-i)).

    The sign is the Koszul sign of rotating the last i letters to the front.
    """
    a = phi.source.left
    ptab = phi.tab(window.mode)
    ceiling = window.E_max
    out = {}
    for ((mark, letters), lam, q), c in data.items():
        v = letters[0]
        xs = letters[1:]
        k = len(xs)
        for (i, j), table in ptab.items():
            if i + j > k:
                continue
            ents = table.get((xs[k - i:], v, xs[:j]))
            if not ents:
                continue
            back = sum(a.par[x] for x in xs[k - i:]) & 1
            front = (phi.source.mpar[v] + sum(a.par[x] for x in xs[:k - i])) & 1
            sc = -c if (back and front) else c
            rest = xs[j:k - i]
            if phi.alpha is None:
                tails = {(rest, Fraction(0), 0): Fraction(1)}
            else:
                tails = hom_raw(phi.alpha, {(rest, Fraction(0), 0): Fraction(1)}, ceiling, window.mode)
            for o, cc, l2, q2 in ents:
                for (tw, l3, q3), c3 in tails.items():
                    lt = lam + l2 + l3
                    if lt >= ceiling:
                        continue
                    vadd(out, ((0, (o,) + tw), lt, q + q2 + q3), sc * cc * c3)
    return out


def chainmap_defect(a, phi, window, target_algebra=None):
    """phi_* d_M - d_N phi_* on the source window."""
    m, n = phi.source, phi.target
    b = target_algebra or a
    c = hochschild_complex(a, m, window)
    rep = DefectReport("hochschild chain map")
    for cell in c.cells:
        x = {cell: Fraction(1)}
        lhs = chainmap_apply(phi, dhoch_raw(a, m, x, window.E_max, window.mode), window)
        rhs = dhoch_raw(b, n, chainmap_apply(phi, x, window), window.E_max, window.mode)
        diff = vaxpy(dict(lhs), rhs, -1)
        rep.checked += 1
        if diff:
            rep.residuals.append((c.describe(cell), diff))
    return rep


# Maurer-Cartan ---------------------------------------------------------------

def _as_element(a, b):
    """Normalize b to {(letter, lam, q): coeff} and check its shape."""
    if isinstance(b, SignedVector):
        b = b.data
    out = {}
    for key, c in b.items():
        w, lam, q = key
        if isinstance(w, tuple):
            if len(w) != 1:
                raise ValueError("a cochain is a combination of single letters")
            w = w[0]
        vadd(out, (w, Fraction(lam), q), Fraction(c))
    return out


def exp_element(a, b, ceiling, mode="z"):
    """e^b = 1 + b + b(x)b + ... truncated below ``ceiling``."""
    b = _as_element(a, b)
    if any(lam <= 0 for (_, lam, _) in b):
        raise DivergenceError("e^b needs every term of b to have positive energy")
    terms = [((x,), lam, q, c) for (x, lam, q), c in sorted(b.items())]
    out = {((), Fraction(0), 0): Fraction(1)}
    layer = dict(out)
    while layer:
        nxt = {}
        for (w, lam, q), c in layer.items():
            for tw, l2, q2, c2 in terms:
                lt = lam + l2
                if lt < ceiling:
                    vadd(nxt, (w + tw, lt, q + q2), c * c2)
        vaxpy(out, nxt)
        layer = nxt
    return out


def mc_defect(a, b, window):
    """d-hat(e^b) truncated; empty means b is a bounding cochain to window precision."""
    e = exp_element(a, b, window.E_max, window.mode)
    return dhat_raw(a, e, window.E_max, window.mode)


def mc_element(a, b, window):
    """sum_k m_k(b, ..., b) as {(letter, lam, q): coeff}."""
    b = _as_element(a, b)
    res = {}
    e = exp_element(a, b, window.E_max, window.mode)
    tab = a.mtab(window.mode)
    for (w, lam, q), c in e.items():
        for o, cc, l2, q2 in tab.get(len(w), {}).get(w, []):
            lt = lam + l2
            if lt < window.E_max:
                vadd(res, (o, lt, q + q2), c * cc)
    return res


def check_cochain_degree(a, b, mode="z"):
    bad = []
    for (x, lam, q), c in _as_element(a, b).items():
        d = a.par[x] + (0 if mode == "z2" else 2 * q)
        if (mode == "z2" and d % 2) or (mode != "z2" and d != 0):
            bad.append(f"{a.ids[x]}@T^{_rat_str(lam)}e^{q} has shifted degree {d}")
    return bad


def solve_mc(a, window, seed=None):
    """Solve the Maurer-Cartan equation order by order in energy.

    At each slot the new part y must satisfy m1-bar(y) = -(current defect at
    that slot); the linear system is solved exactly and an unsolvable slot
    raises ObstructedError naming the slot.
    """
    b = _as_element(a, seed or {})
    mode = window.mode
    slots = monoid_slots(a.slot_generators(mode), window.E_max)
    m1 = {}
    for o_in, ents in a.mtab(mode).get(1, {}).items():
        for o, c, lam, q in ents:
            if lam == 0 and q == 0:
                vadd(m1.setdefault(o_in[0], {}), o, c)
    for lam, q in slots:
        if lam == 0:
            continue
        r = {o: c for (o, l, qq), c in mc_element(a, b, window).items() if l == lam and qq == q}
        if not r:
            continue
        if mode == "z2":
            cands = [x for x in range(a.size()) if a.par[x] % 2 == 0]
        else:
            cands = [x for x in range(a.size()) if a.par[x] + 2 * q == 0]
        cols = [m1.get(x, {}) for x in cands]
        x = solve_linear(cols, {o: -c for o, c in r.items()})
        if x is None:
            raise ObstructedError(f"Maurer-Cartan equation obstructed at T^{_rat_str(lam)}e^{q}")
        for j, c in x.items():
            vadd(b, (cands[j], lam, q), c)
    return b


def deform(a, b, window):
    """Spec of m^b_k(x_1..x_k) = sum m(b..b, x_1, b..b, ..., x_k, b..b)."""
    if mc_defect(a, b, window):
        raise ObstructedError("b is not a bounding cochain in this window")
    b = _as_element(a, b)
    by_letter = {}
    for (x, lam, q), c in b.items():
        by_letter.setdefault(x, []).append((c, lam, q))
    mode = window.mode
    ceiling = window.E_max
    terms = []
    for (k, lab), table in sorted(a.ops.items(), key=lambda kv: (kv[0][0], str(kv[0][1]))):
        lam0, q0 = a.slot(lab, mode)
        for inp, outs in sorted(table.items()):
            for mask in product((0, 1), repeat=k):
                # 1 = explicit input, 0 = filled by b
                coeffs = [(Fraction(1), lam0, q0)]
                ok = True
                for bit, x in zip(mask, inp):
                    if bit:
                        continue
                    opts = by_letter.get(x)
                    if not opts:
                        ok = False
                        break
                    nxt = []
                    for c1, l1, r1 in coeffs:
                        for c2, l2, r2 in opts:
                            if l1 + l2 < ceiling:
                                nxt.append((c1 * c2, l1 + l2, r1 + r2))
                    coeffs = nxt
                    if not coeffs:
                        ok = False
                        break
                if not ok:
                    continue
                sub = tuple(x for bit, x in zip(mask, inp) if bit)
                for o, co in sorted(outs.items()):
                    for c1, l1, r1 in coeffs:
                        terms.append((len(sub), sub, o, c1 * co, l1, r1))
    basis = [(x, d, i == a.unit) for i, (x, d) in enumerate(zip(a.ids, a.degrees))]
    merged = {}
    for k, sub, o, c, lam, q in terms:
        vadd(merged, (k, sub, o, lam, q), c)
    flat = [(k, sub, o, c, lam, q) for (k, sub, o, lam, q), c in sorted(merged.items())]
    return spec_from_terms(f"{a.name}^b", basis, flat)


def inclusion_hom(a, deformed, b):
    """i^b from (C, m^b) to (C, m): i_0 = b, i_1 = id."""
    terms = [(1, (x,), x, 1, 0, 0) for x in range(a.size())]
    for (x, lam, q), c in sorted(_as_element(a, b).items()):
        terms.append((0, (), x, c, lam, q))
    return hom_from_terms(deformed, a, terms, name="i^b")


def gamma_b(a, b, window):
    """I (x) e^b as a Hochschild chain of the diagonal bimodule."""
    if a.unit is None:
        raise SpecError("gamma_b needs a unit")
    e = exp_element(a, b, window.E_max, window.mode)
    return {((0, (a.unit,) + w), lam, q): c for (w, lam, q), c in e.items()}


def augmentation_eval(a, b, functional, window):
    """(d-hat^* f)(e^b) = f(d-hat(e^b)) for a functional f on bar cells."""
    d = mc_defect(a, b, window)
    terms = []
    for (w, lam, q), c in d.items():
        fc = functional.get(w)
        if fc is None:
            continue
        if isinstance(fc, NovikovScalar):
            for c2, l2, q2 in fc.terms:
                terms.append((c * c2, lam + l2, q + q2))
        else:
            terms.append((c * Fraction(fc), lam, q))
    return NovikovScalar(terms, window.E_max, min([0] + [t[1] for t in terms]))


def differential_square(a, window):
    """m1 composed with itself on each basis element, truncated at the window ceiling."""
    sq = {}
    tab = a.mtab(window.mode).get(1, {})
    for x in range(a.size()):
        for o, c, lam, q in tab.get((x,), []):
            for o2, c2, l2, q2 in tab.get((o,), []):
                if lam + l2 < window.E_max:
                    vadd(sq, (x, o2, lam + l2, q + q2), c * c2)
    return sq


def augmentation_check(a, b, window):
    """Evaluate every bar-word coordinate functional on d-hat(e^b).

    Returns (functionals tried, words whose value is nonzero)."""
    words = sorted({cell[0] for cell in bar_complex(a, window).cells})
    bad = [w for w in words if not augmentation_eval(a, b, {w: 1}, window).is_zero()]
    return len(words), bad
