"""Gapped filtered A-infinity algebras, homomorphisms and bimodules.

Operation tables are sparse: ``ops[(k, label)][inputs] = {out: coeff}`` where
``label`` names an energy/Maslov class.  The full operation is
m_k = sum over classes of T^energy e^(maslov/2) m_(k, class).
"""

from dataclasses import dataclass, field
from fractions import Fraction

from .words import (CYCLIC, MODULE, PLAIN, SYMMETRIC, SignedVector, expand,
                    fixed_defect, format_word, project, vadd, vaxpy)


class SpecError(ValueError):
    pass


def _F(x):
    return x if isinstance(x, Fraction) else Fraction(x)


class AlgebraSpec:
    def __init__(self, name, basis, classes, ops):
        """basis: list of (id, degree, is_unit); classes: {label: (energy, maslov)};
        ops: {(arity, label): {inputs(tuple of ids): {out_id: coeff}}}."""
        self.name = name
        self.ids = [b[0] for b in basis]
        self.degrees = [int(b[1]) for b in basis]
        units = [i for i, b in enumerate(basis) if len(b) > 2 and b[2]]
        self.unit_flags = units
        self.unit = units[0] if len(units) == 1 else None
        self.index = {x: i for i, x in enumerate(self.ids)}
        if len(self.index) != len(self.ids):
            raise SpecError("duplicate basis ids")
        self.par = [d - 1 for d in self.degrees]
        self.classes = {lab: (_F(e), int(mu)) for lab, (e, mu) in classes.items()}
        self.ops = {}
        for (k, lab), table in ops.items():
            t = {}
            for inp, outs in table.items():
                key = tuple(self.index[x] if not isinstance(x, int) else x for x in inp)
                o = {}
                for out, c in outs.items():
                    oi = self.index[out] if not isinstance(out, int) else out
                    vadd(o, oi, _F(c))
                if o:
                    t[key] = o
            self.ops[(int(k), lab)] = t
        self._mtab = {}

    # derived ------------------------------------------------------------
    def size(self):
        return len(self.ids)

    def arities(self):
        return sorted({k for k, _ in self.ops if self.ops[(k, _)]})

    def max_arity(self):
        a = self.arities()
        return max(a) if a else 0

    def slot(self, label, mode="z"):
        e, mu = self.classes[label]
        return e, (0 if mode == "z2" else mu // 2)

    def mtab(self, mode="z"):
        """{k: {inputs: [(out, coeff, lam, q), ...]}} summed over classes."""
        t = self._mtab.get(mode)
        if t is None:
            t = {}
            for (k, lab), table in sorted(self.ops.items(), key=lambda kv: (kv[0][0], str(kv[0][1]))):
                lam, q = self.slot(lab, mode)
                dst = t.setdefault(k, {})
                for inp, outs in table.items():
                    lst = dst.setdefault(inp, [])
                    for o, c in sorted(outs.items()):
                        lst.append((o, c, lam, q))
            self._mtab[mode] = t
        return t

    def m0_energies(self):
        return sorted({self.classes[lab][0] for (k, lab), t in self.ops.items() if k == 0 and t})

    def length_step(self):
        """Smallest energy paid by an operation that lengthens words."""
        e = self.m0_energies()
        return e[0] if e else None

    def slot_generators(self, mode="z"):
        gens = set()
        for (k, lab), t in self.ops.items():
            if t:
                lam, q = self.slot(lab, mode)
                if lam > 0 or q != 0:
                    gens.add((lam, q))
        return sorted(gens)

    def m0_vector(self, e_ceiling=None, mode="z"):
        """m_0(1) as a plain SignedVector of length-1 words."""
        data = {}
        for o, c, lam, q in self.mtab(mode).get(0, {}).get((), []):
            vadd(data, ((o,), lam, q), c)
        return SignedVector(data, PLAIN, self.par, e_ceiling=e_ceiling)

    def vector(self, terms, flavor=PLAIN, e_ceiling=None):
        """Build a vector from [(word_of_ids, coeff, lam, q)]."""
        data = {}
        for w, c, lam, q in terms:
            vadd(data, (tuple(self.index[x] for x in w), _F(lam), q), _F(c))
        return SignedVector(data, flavor, self.par, e_ceiling=e_ceiling)

    def fmt(self, word, flavor=PLAIN):
        return format_word(word, self.ids, flavor)

    def to_dict(self):
        basis = []
        for i, x in enumerate(self.ids):
            b = {"id": x, "degree": self.degrees[i]}
            if i in self.unit_flags:
                b["unit"] = True
            basis.append(b)
        classes = [{"label": lab, "energy": _rat_str(e), "maslov": mu}
                   for lab, (e, mu) in sorted(self.classes.items(), key=lambda kv: (kv[1], str(kv[0])))]
        ops = []
        for (k, lab), table in sorted(self.ops.items(), key=lambda kv: (kv[0][0], str(kv[0][1]))):
            terms = []
            for inp, outs in sorted(table.items()):
                terms.append({"in": [self.ids[i] for i in inp],
                              "out": [{"id": self.ids[o], "coeff": _rat_str(c)} for o, c in sorted(outs.items())]})
            ops.append({"arity": k, "class": lab, "terms": terms})
        return {"name": self.name, "basis": basis, "classes": classes, "ops": ops}

    def __repr__(self):
        return f"AlgebraSpec({self.name!r}, basis={self.ids})"


def _rat_str(x):
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def spec_from_terms(name, basis, terms):
    """Build a spec from [(k, inputs, out, coeff, lam, q)] with generated labels."""
    classes = {"b0": (0, 0)}
    ops = {}
    for k, inp, out, c, lam, q in terms:
        lam = _F(lam)
        if lam == 0 and q == 0:
            lab = "b0"
        else:
            lab = f"E{_rat_str(lam)}q{q}"
            classes[lab] = (lam, 2 * q)
        t = ops.setdefault((k, lab), {})
        o = t.setdefault(tuple(inp), {})
        vadd(o, out, _F(c))
    return AlgebraSpec(name, basis, classes, ops)


# validation ---------------------------------------------------------------

def validate_spec(a, mode="z"):
    """List of human-readable violations; empty means valid."""
    bad = []
    if len(a.unit_flags) > 1:
        bad.append(f"more than one unit flagged: {[a.ids[i] for i in a.unit_flags]}")
    zero_classes = []
    for lab, (e, mu) in sorted(a.classes.items(), key=lambda kv: str(kv[0])):
        if e < 0:
            bad.append(f"class {lab}: negative energy {e}")
        if mu % 2:
            bad.append(f"class {lab}: odd Maslov index {mu}")
        if e == 0:
            zero_classes.append(lab)
            if mu != 0:
                bad.append(f"class {lab}: energy 0 requires Maslov index 0 (gapped condition)")
    if len(zero_classes) > 1:
        bad.append(f"several energy-zero classes: {zero_classes}")
    for (k, lab), table in sorted(a.ops.items(), key=lambda kv: (kv[0][0], str(kv[0][1]))):
        if lab not in a.classes:
            bad.append(f"m_{k} uses undeclared class {lab}")
            continue
        e, mu = a.classes[lab]
        if k < 0:
            bad.append(f"negative arity {k}")
        if k == 0 and e <= 0 and table:
            bad.append("m0 must have positive energy")
        for inp, outs in sorted(table.items()):
            if len(inp) != k:
                bad.append(f"m_{k},{lab}: input {a.fmt(inp)} has wrong length")
                continue
            src = sum(a.par[i] for i in inp)
            for o in sorted(outs):
                want = src + 1 - (0 if mode == "z2" else mu)
                got = a.par[o]
                ok = (got - want) % 2 == 0 if mode == "z2" else got == want
                if not ok:
                    bad.append(
                        f"degree violation in m_{k},{lab}: {a.fmt(inp)} -> {a.ids[o]} "
                        f"(shifted degree {got}, expected {want})")
    return bad


def unit_check(a):
    if a.unit is None:
        raise SpecError("no unit flagged")
    u = a.unit
    bad = []
    zero = None
    for lab, (e, mu) in a.classes.items():
        if e == 0 and mu == 0:
            zero = lab
    for (k, lab), table in sorted(a.ops.items(), key=lambda kv: (kv[0][0], str(kv[0][1]))):
        for inp, outs in sorted(table.items()):
            if u not in inp or not outs:
                continue
            if k != 2:
                bad.append(f"m_{k},{lab}({a.fmt(inp)}) must vanish")
            elif lab != zero:
                bad.append(f"m_2,{lab}({a.fmt(inp)}) must vanish above energy 0")
    table = a.ops.get((2, zero), {}) if zero is not None else {}
    for x in range(a.size()):
        left = table.get((u, x), {})
        right = table.get((x, u), {})
        if left != {x: 1}:
            bad.append(f"m2(I,{a.ids[x]}) != {a.ids[x]}")
        sign = -1 if a.degrees[x] % 2 else 1
        if right != {x: sign}:
            bad.append(f"(-1)^deg m2({a.ids[x]},I) != {a.ids[x]}")
    return bad


# the bar coderivation -----------------------------------------------------

def _prefix_parity(word, par):
    pre = [0]
    s = 0
    for x in word:
        s ^= par[x] & 1
        pre.append(s)
    return pre


def dhat_raw(a, data, ceiling=None, mode="z", kmax=None):
    """d-hat on a plain dict (word, lam, q) -> coeff, truncated at ``ceiling``."""
    tab = a.mtab(mode)
    par = a.par
    out = {}
    ks = sorted(k for k in tab if kmax is None or k <= kmax)
    for (w, lam, q), c in data.items():
        n = len(w)
        pre = _prefix_parity(w, par)
        for k in ks:
            table = tab[k]
            if k == 0:
                ents = table.get(())
                if not ents:
                    continue
                for i in range(n + 1):
                    sc = -c if pre[i] else c
                    head, tail = w[:i], w[i:]
                    for o, cc, l2, q2 in ents:
                        lt = lam + l2
                        if ceiling is not None and lt >= ceiling:
                            continue
                        vadd(out, (head + (o,) + tail, lt, q + q2), sc * cc)
                continue
            for i in range(n - k + 1):
                ents = table.get(w[i:i + k])
                if not ents:
                    continue
                sc = -c if pre[i] else c
                head, tail = w[:i], w[i + k:]
                for o, cc, l2, q2 in ents:
                    lt = lam + l2
                    if ceiling is not None and lt >= ceiling:
                        continue
                    vadd(out, (head + (o,) + tail, lt, q + q2), sc * cc)
    return out


def _ceiling_of(window, v=None):
    if window is not None:
        return Fraction(window.E_max)
    return None if v is None else v.e_ceiling


def dhat_apply(a, v, window=None):
    """Apply the bar coderivation; cyclic and symmetric vectors stay in flavor."""
    ceiling = _ceiling_of(window, v)
    mode = getattr(window, "mode", "z")
    kmax = getattr(window, "K_max", None)
    if v.flavor == MODULE:
        raise SpecError("use the bimodule differential for module-marked words")
    plain = expand(v.data, v.flavor, a.par)
    res = dhat_raw(a, plain, ceiling, mode, kmax)
    if v.flavor in (CYCLIC, SYMMETRIC):
        res = project(res, v.flavor, a.par)
    return SignedVector(res, v.flavor, a.par, e_ceiling=ceiling)


def flavor_closure_defect(a, v, window=None):
    """Component of d-hat(v) outside the fixed subspace of v's flavor."""
    ceiling = _ceiling_of(window, v)
    mode = getattr(window, "mode", "z")
    plain = expand(v.data, v.flavor, a.par)
    res = dhat_raw(a, plain, ceiling, mode)
    return fixed_defect(res, v.flavor, a.par)


def relation_residual(a, word, ceiling=None, mode="z"):
    """The A-infinity relation evaluated directly on one input word.

    sum over inner blocks of (-1)^(|x_1|'+..+|x_i|') m(x_1..x_i, m(x_i+1..x_j), x_j+1..x_n),
    returned as {(out, lam, q): coeff}.
    """
    tab = a.mtab(mode)
    n = len(word)
    par = a.par
    res = {}
    for k2 in range(0, n + 1):
        inner = tab.get(k2)
        if not inner:
            continue
        for i in range(0, n - k2 + 1):
            ents = inner.get(tuple(word[i:i + k2]))
            if not ents:
                continue
            s = sum(par[x] for x in word[:i]) & 1
            for o, c, l1, q1 in ents:
                mid = tuple(word[:i]) + (o,) + tuple(word[i + k2:])
                outer = tab.get(len(mid), {}).get(mid)
                if not outer:
                    continue
                for o2, c2, l2, q2 in outer:
                    lt = l1 + l2
                    if ceiling is not None and lt >= ceiling:
                        continue
                    vadd(res, (o2, lt, q1 + q2), (-c if s else c) * c2)
    return res


@dataclass
class DefectReport:
    name: str
    residuals: list = field(default_factory=list)  # (label, {key: coeff})
    checked: int = 0

    @property
    def ok(self):
        return not self.residuals

    def worst(self):
        """Residual with the lowest energy, the first one a filtration sees."""
        if not self.residuals:
            return None
        return min(self.residuals, key=lambda r: (min(k[1] for k in r[1]), str(r[0])))

    def summary(self):
        if self.ok:
            return f"{self.name}: clean on {self.checked} cells"
        w = self.worst()
        return f"{self.name}: {len(self.residuals)} of {self.checked} cells fail; first {w[0]}"


def plain_words(n_letters, max_len, min_len=0):
    from itertools import product
    for L in range(min_len, max_len + 1):
        for w in product(range(n_letters), repeat=L):
            yield w


def ainfty_defect(a, window):
    """d-hat squared on every plain word up to the window length."""
    ceiling = Fraction(window.E_max)
    mode = window.mode
    rep = DefectReport("ainfty")
    for w in plain_words(a.size(), window.L_max):
        once = dhat_raw(a, {(w, Fraction(0), 0): Fraction(1)}, ceiling, mode)
        twice = dhat_raw(a, once, ceiling, mode)
        rep.checked += 1
        if twice:
            rep.residuals.append((a.fmt(w), twice))
    return rep


def direct_relation_defect(a, window):
    """Second route: the relations themselves, word by word."""
    ceiling = Fraction(window.E_max)
    rep = DefectReport("relations")
    for w in plain_words(a.size(), window.L_max):
        r = relation_residual(a, w, ceiling, window.mode)
        rep.checked += 1
        if r:
            rep.residuals.append((a.fmt(w), {((o,), l, q): c for (o, l, q), c in r.items()}))
    return rep


def zero_algebra(basis, name="zero"):
    return AlgebraSpec(name, basis, {"b0": (0, 0)}, {})


# homomorphisms ------------------------------------------------------------

class HomomorphismSpec:
    """Components f_(k, label) from ``source`` to ``target`` (shared classes)."""

    def __init__(self, source, target, classes, fops, name="f"):
        self.source = source
        self.target = target
        self.name = name
        self.classes = {lab: (_F(e), int(mu)) for lab, (e, mu) in classes.items()}
        self.fops = {}
        for (k, lab), table in fops.items():
            t = {}
            for inp, outs in table.items():
                key = tuple(source.index[x] if not isinstance(x, int) else x for x in inp)
                o = {}
                for out, c in outs.items():
                    oi = target.index[out] if not isinstance(out, int) else out
                    vadd(o, oi, _F(c))
                if o:
                    t[key] = o
            self.fops[(int(k), lab)] = t
        self._tab = {}

    def tab(self, mode="z"):
        t = self._tab.get(mode)
        if t is None:
            t = {}
            for (k, lab), table in sorted(self.fops.items(), key=lambda kv: (kv[0][0], str(kv[0][1]))):
                e, mu = self.classes[lab]
                q = 0 if mode == "z2" else mu // 2
                dst = t.setdefault(k, {})
                for inp, outs in table.items():
                    lst = dst.setdefault(inp, [])
                    for o, c in sorted(outs.items()):
                        lst.append((o, c, e, q))
            self._tab[mode] = t
        return t

    def validate(self, mode="z"):
        bad = []
        for (k, lab), table in sorted(self.fops.items(), key=lambda kv: (kv[0][0], str(kv[0][1]))):
            e, mu = self.classes[lab]
            if k == 0 and table and e <= 0:
                bad.append("f0 must have positive energy")
            for inp, outs in table.items():
                src = sum(self.source.par[i] for i in inp)
                for o in outs:
                    want = src - (0 if mode == "z2" else mu)
                    got = self.target.par[o]
                    if (mode == "z2" and (got - want) % 2) or (mode != "z2" and got != want):
                        bad.append(f"degree violation in f_{k},{lab} on {self.source.fmt(inp)}")
        return bad

    def to_dict(self):
        ops = []
        for (k, lab), table in sorted(self.fops.items(), key=lambda kv: (kv[0][0], str(kv[0][1]))):
            terms = [{"in": [self.source.ids[i] for i in inp],
                      "out": [{"id": self.target.ids[o], "coeff": _rat_str(c)} for o, c in sorted(outs.items())]}
                     for inp, outs in sorted(table.items())]
            ops.append({"arity": k, "class": lab, "terms": terms})
        classes = [{"label": lab, "energy": _rat_str(e), "maslov": mu}
                   for lab, (e, mu) in sorted(self.classes.items(), key=lambda kv: (kv[1], str(kv[0])))]
        return {"name": self.name, "classes": classes, "f_ops": ops}


def identity_hom(a):
    table = {(x,): {x: 1} for x in range(a.size())}
    return HomomorphismSpec(a, a, {"b0": (0, 0)}, {(1, "b0"): table}, name="id")


def hom_from_terms(source, target, terms, name="f"):
    """[(k, inputs, out, coeff, lam, q)] with generated class labels."""
    classes = {"b0": (0, 0)}
    fops = {}
    for k, inp, out, c, lam, q in terms:
        lam = _F(lam)
        lab = "b0" if (lam == 0 and q == 0) else f"E{_rat_str(lam)}q{q}"
        classes.setdefault(lab, (lam, 2 * q))
        t = fops.setdefault((k, lab), {})
        vadd(t.setdefault(tuple(inp), {}), out, _F(c))
    return HomomorphismSpec(source, target, classes, fops, name)


def hom_raw(f, data, ceiling=None, mode="z"):
    tab = f.tab(mode)
    f0 = tab.get(0, {}).get((), [])
    if f0 and ceiling is None:
        raise SpecError("f0 != 0 needs an energy ceiling to expand e^{f0}")
    ks = sorted(k for k in tab if k > 0)
    out = {}

    for (w, lam0, q0), c0 in data.items():
        n = len(w)

        def rec(pos, acc, lam, q, c):
            if pos == n:
                vadd(out, (acc, lam, q), c)
            for o, cc, l2, q2 in f0:
                lt = lam + l2
                if ceiling is None or lt < ceiling:
                    rec(pos, acc + (o,), lt, q + q2, c * cc)
            for k in ks:
                if pos + k > n:
                    break
                ents = tab[k].get(w[pos:pos + k])
                if not ents:
                    continue
                for o, cc, l2, q2 in ents:
                    lt = lam + l2
                    if ceiling is None or lt < ceiling:
                        rec(pos + k, acc + (o,), lt, q + q2, c * cc)

        rec(0, (), lam0, q0, c0)
    return out


def hom_apply(f, v, window=None):
    ceiling = _ceiling_of(window, v)
    mode = getattr(window, "mode", "z")
    res = hom_raw(f, expand(v.data, v.flavor, f.source.par), ceiling, mode)
    return SignedVector(res, PLAIN, f.target.par, e_ceiling=ceiling)


def hom_chainmap_defect(f, window):
    ceiling = Fraction(window.E_max)
    mode = window.mode
    rep = DefectReport("chain map")
    for w in plain_words(f.source.size(), window.L_max):
        x = {(w, Fraction(0), 0): Fraction(1)}
        lhs = dhat_raw(f.target, hom_raw(f, x, ceiling, mode), ceiling, mode)
        rhs = hom_raw(f, dhat_raw(f.source, x, ceiling, mode), ceiling, mode)
        diff = vaxpy(lhs, rhs, -1)
        rep.checked += 1
        if diff:
            rep.residuals.append((f.source.fmt(w), diff))
    return rep


def coproduct(data):
    """Deconcatenation coproduct on plain words: {(w1, w2, lam, q): c}."""
    out = {}
    for (w, lam, q), c in data.items():
        for i in range(len(w) + 1):
            vadd(out, (w[:i], w[i:], lam, q), c)
    return out


# bimodules ----------------------------------------------------------------

class BimoduleSpec:
    """Operations n_(k1,k0) : C1^k1 (x) M (x) C0^k0 -> M.

    ``nops[((k1, k0), label)][(left_ids, m_id, right_ids)] = {m_out: coeff}``.
    """

    def __init__(self, left, right, module_basis, classes, nops, name="M"):
        self.left = left
        self.right = right
        self.name = name
        self.mids = [b[0] for b in module_basis]
        self.mdegrees = [int(b[1]) for b in module_basis]
        self.mindex = {x: i for i, x in enumerate(self.mids)}
        self.mpar = [d - 1 for d in self.mdegrees]
        self.classes = {lab: (_F(e), int(mu)) for lab, (e, mu) in classes.items()}
        self.nops = {}
        for ((k1, k0), lab), table in nops.items():
            t = {}
            for (lw, m, rw), outs in table.items():
                key = (tuple(left.index[x] if not isinstance(x, int) else x for x in lw),
                       self.mindex[m] if not isinstance(m, int) else m,
                       tuple(right.index[x] if not isinstance(x, int) else x for x in rw))
                o = {}
                for out, c in outs.items():
                    vadd(o, self.mindex[out] if not isinstance(out, int) else out, _F(c))
                if o:
                    t[key] = o
            self.nops[((int(k1), int(k0)), lab)] = t
        self._tab = {}

    def size(self):
        return len(self.mids)

    def tab(self, mode="z"):
        """{(k1, k0): {(left, m, right): [(out, c, lam, q)]}}"""
        t = self._tab.get(mode)
        if t is None:
            t = {}
            for (kk, lab), table in sorted(self.nops.items(), key=lambda kv: (kv[0][0], str(kv[0][1]))):
                e, mu = self.classes[lab]
                q = 0 if mode == "z2" else mu // 2
                dst = t.setdefault(kk, {})
                for key, outs in table.items():
                    lst = dst.setdefault(key, [])
                    for o, c in sorted(outs.items()):
                        lst.append((o, c, e, q))
            self._tab[mode] = t
        return t

    def validate(self, mode="z"):
        bad = []
        for (kk, lab), table in sorted(self.nops.items(), key=lambda kv: (kv[0][0], str(kv[0][1]))):
            e, mu = self.classes[lab]
            if kk == (0, 0) and e < 0:
                bad.append("negative energy")
            for (lw, m, rw), outs in table.items():
                if (len(lw), len(rw)) != kk:
                    bad.append(f"n_{kk} entry with wrong arity")
                src = sum(self.left.par[i] for i in lw) + self.mpar[m] + sum(self.right.par[i] for i in rw)
                for o in outs:
                    want = src + 1 - (0 if mode == "z2" else mu)
                    got = self.mpar[o]
                    if (mode == "z2" and (got - want) % 2) or (mode != "z2" and got != want):
                        bad.append(f"degree violation in n_{kk},{lab}")
        return bad

    def fmt(self, key):
        mark, letters = key
        parts = []
        for i, x in enumerate(letters):
            if i < mark:
                parts.append(self.left.ids[x])
            elif i == mark:
                parts.append(f"[{self.mids[x]}]")
            else:
                parts.append(self.right.ids[x])
        return "*".join(parts)

    def to_dict(self):
        ops = []
        for ((k1, k0), lab), table in sorted(self.nops.items(), key=lambda kv: (kv[0][0], str(kv[0][1]))):
            terms = []
            for (lw, m, rw), outs in sorted(table.items()):
                terms.append({"left": [self.left.ids[i] for i in lw], "module": self.mids[m],
                              "right": [self.right.ids[i] for i in rw],
                              "out": [{"id": self.mids[o], "coeff": _rat_str(c)} for o, c in sorted(outs.items())]})
            ops.append({"arity": [k1, k0], "class": lab, "terms": terms})
        return {"name": self.name,
                "module_basis": [{"id": x, "degree": d} for x, d in zip(self.mids, self.mdegrees)],
                "n_ops": ops}


def diagonal_bimodule(a):
    """n_(i,j) = m_(i+j+1), the algebra as a bimodule over itself."""
    nops = {}
    for (k, lab), table in a.ops.items():
        if k < 1:
            continue
        for inp, outs in table.items():
            for i in range(k):
                key = (inp[:i], inp[i], inp[i + 1:])
                nops.setdefault(((i, k - 1 - i), lab), {})[key] = dict(outs)
    basis = [(x, d) for x, d in zip(a.ids, a.degrees)]
    return BimoduleSpec(a, a, basis, dict(a.classes), nops, name=f"{a.name}-diagonal")


def empty_bimodule(a):
    return BimoduleSpec(a, a, [], {"b0": (0, 0)}, {}, name="void")


def bimodule_dhat_raw(m, data, ceiling=None, mode="z"):
    """Extended differential on B(C1) (x) M (x) B(C0); keys (mark, letters)."""
    left, right = m.left, m.right
    ntab = m.tab(mode)
    out = {}
    for ((mark, letters), lam, q), c in data.items():
        lw = letters[:mark]
        y = letters[mark]
        rw = letters[mark + 1:]
        # left factor
        for (w2, l2, q2), c2 in dhat_raw(left, {(lw, lam, q): c}, ceiling, mode).items():
            vadd(out, ((len(w2), w2 + (y,) + rw), l2, q2), c2)
        # module operations
        lpar = _prefix_parity(lw, left.par)
        for (k1, k0), table in ntab.items():
            if k1 > len(lw) or k0 > len(rw):
                continue
            ents = table.get((lw[len(lw) - k1:], y, rw[:k0]))
            if not ents:
                continue
            head = lw[:len(lw) - k1]
            sc = -c if lpar[len(lw) - k1] else c
            for o, cc, l2, q2 in ents:
                lt = lam + l2
                if ceiling is not None and lt >= ceiling:
                    continue
                vadd(out, ((len(head), head + (o,) + rw[k0:]), lt, q + q2), sc * cc)
        # right factor
        s = (lpar[-1] + m.mpar[y]) & 1
        for (w2, l2, q2), c2 in dhat_raw(right, {(rw, lam, q): c}, ceiling, mode).items():
            vadd(out, ((mark, lw + (y,) + w2), l2, q2), -c2 if s else c2)
    return out


def bimodule_words(m, max_len):
    from itertools import product
    for L in range(1, max_len + 1):
        for mark in range(L):
            for lw in product(range(m.left.size()), repeat=mark):
                for y in range(m.size()):
                    for rw in product(range(m.right.size()), repeat=L - 1 - mark):
                        yield (mark, lw + (y,) + rw)


def bimodule_defect(m, window):
    ceiling = Fraction(window.E_max)
    rep = DefectReport("bimodule")
    for key in bimodule_words(m, window.L_max):
        x = {(key, Fraction(0), 0): Fraction(1)}
        twice = bimodule_dhat_raw(m, bimodule_dhat_raw(m, x, ceiling, window.mode), ceiling, window.mode)
        rep.checked += 1
        if twice:
            rep.residuals.append((m.fmt(key), twice))
    return rep


def pullback_bimodule(f1, f0, m, window):
    """(f1, f0)^* n (x, y, z) = n(f1-hat x, y, f0-hat z), materialized up to the window.

    Arities of the result are bounded by ``window.K_max`` (default L_max).
    """
    if f1.target is not m.left or f0.target is not m.right:
        raise SpecError("homomorphism targets must be the bimodule's algebras")
    ceiling = Fraction(window.E_max)
    mode = window.mode
    kcap = window.K_max if window.K_max is not None else window.L_max
    ntab = m.tab(mode)
    from itertools import product
    terms = {}
    for k1 in range(kcap + 1):
        for k0 in range(kcap + 1 - k1):
            for lw in product(range(f1.source.size()), repeat=k1):
                fl = hom_raw(f1, {(lw, Fraction(0), 0): Fraction(1)}, ceiling, mode)
                for rw in product(range(f0.source.size()), repeat=k0):
                    fr = hom_raw(f0, {(rw, Fraction(0), 0): Fraction(1)}, ceiling, mode)
                    for y in range(m.size()):
                        acc = {}
                        for (a1, l1, q1), c1 in fl.items():
                            for (a0, l0, q0), c0 in fr.items():
                                if l1 + l0 >= ceiling:
                                    continue
                                ents = ntab.get((len(a1), len(a0)), {}).get((a1, y, a0))
                                if not ents:
                                    continue
                                for o, cc, l2, q2 in ents:
                                    lt = l1 + l0 + l2
                                    if lt < ceiling:
                                        vadd(acc, (o, lt, q1 + q0 + q2), c1 * c0 * cc)
                        for (o, lt, qt), c in acc.items():
                            terms.setdefault(((k1, k0), lt, qt), {}).setdefault((lw, y, rw), {})[o] = c
    classes = {}
    nops = {}
    for ((kk, lt, qt)), table in terms.items():
        lab = "b0" if (lt == 0 and qt == 0) else f"E{_rat_str(lt)}q{qt}"
        classes[lab] = (lt, 2 * qt)
        nops[(kk, lab)] = table
    classes.setdefault("b0", (0, 0))
    basis = list(zip(m.mids, m.mdegrees))
    return BimoduleSpec(f1.source, f0.source, basis, classes, nops, name=f"pullback({m.name})")


def format_vector(v, names, flavor=PLAIN, mnames=None):
    """Human-readable sum like ``(1 - T)*x1*x2 + e^2*cyc:a*b``."""
    from .novikov import NovikovScalar, format_scalar
    groups = {}
    for (w, lam, q), c in v.items() if isinstance(v, dict) else v.data.items():
        groups.setdefault(w, []).append((c, lam, q))
    parts = []
    for w in sorted(groups):
        s = format_scalar(NovikovScalar(groups[w]))
        parts.append(f"({s})*{format_word(w, names, flavor, mnames)}")
    return " + ".join(parts) if parts else "0"
