"""L-infinity brackets and modules obtained by symmetrizing A-infinity data.

Brackets use the full symmetric-group sum with no 1/k! normalization:
l_k(x1..xk) is the length-one part of d-hat applied to sum_tau +-x_tau.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, permutations

from .ainfinity import DefectReport, SpecError, bimodule_dhat_raw, dhat_raw
from .window_homology import words_up_to
from .words import SYMMETRIC, koszul_sign, sort_sign, vadd, vaxpy, vsub


def _perm_sign(sigma, degs):
    return koszul_sign(sigma, degs)


def symmetrized_plain(word, par, lam=Fraction(0), q=0):
    """[x1..xk] = sum over S_k of Koszul-signed rearrangements, as a raw dict."""
    out = {}
    degs = [par[x] for x in word]
    for sigma in permutations(range(len(word))):
        vadd(out, (tuple(word[i] for i in sigma), lam, q), _perm_sign(sigma, degs))
    return out


class LInfinitySpec:
    """Bracket tables {k: {word: [(out, c, lam, q)]}}.

    Tables derived from an algebra are keyed by sorted words only; any other
    word is evaluated through its sorting sign.  Hand-made tables may hold
    several orderings, which is what the symmetry check looks at.
    """

    def __init__(self, algebra, tables, mode="z", name=None):
        self.algebra = algebra
        self.par = algebra.par
        self.tables = tables
        self.mode = mode
        self.name = name or f"{algebra.name}-sym"

    def bracket(self, word, lam=Fraction(0), q=0, c=Fraction(1), ceiling=None):
        """l_k(word) as a raw dict on length-one words."""
        table = self.tables.get(len(word), {})
        out = {}
        ents = table.get(word)
        s = 1
        if ents is None:
            rep, s = sort_sign(word, self.par)
            ents = table.get(rep, [])
        for o, cc, l2, q2 in ents:
            if ceiling is not None and lam + l2 >= ceiling:
                continue
            vadd(out, ((o,), lam + l2, q + q2), s * c * cc)
        return out

    def apply(self, raw, ceiling=None):
        out = {}
        for (w, lam, q), c in raw.items():
            vaxpy(out, self.bracket(w, lam, q, c, ceiling))
        return out

    def arities(self):
        return sorted(k for k, t in self.tables.items() if t)


def symmetrize_algebra(a, max_arity=None, mode="z"):
    """Materialize l_k on sorted words for every arity the algebra uses."""
    top = a.max_arity() if max_arity is None else min(max_arity, a.max_arity())
    tables = {}
    tab = a.mtab(mode)
    for k in range(0, max(top, 0) + 1):
        if not tab.get(k):
            continue
        t = {}
        for w in words_up_to(a.size(), k, "plain", a.par, k)[k]:
            if sort_sign(w, a.par)[0] != w:
                continue
            val = {}
            for (perm, _, _), s in symmetrized_plain(w, a.par).items():
                for o, cc, l2, q2 in tab[k].get(perm, []):
                    vadd(val, (o, l2, q2), s * cc)
            if val:
                t[w] = [(o, c, l2, q2) for (o, l2, q2), c in sorted(val.items())]
        if t:
            tables[k] = t
    return LInfinitySpec(a, tables, mode)


def brute_force_bracket(a, word, mode="z"):
    """Sum over every rearrangement of m_k, straight from the operation table."""
    out = {}
    for (perm, _, _), s in symmetrized_plain(word, a.par).items():
        for o, cc, l2, q2 in a.mtab(mode).get(len(word), {}).get(perm, []):
            vadd(out, ((o,), l2, q2), s * cc)
    return out


def symmetry_defect(l):
    """Pairs of stored orderings whose values disagree with the Koszul sign."""
    rep = DefectReport("symmetry")
    for k, table in sorted(l.tables.items()):
        for w, ents in sorted(table.items()):
            rep.checked += 1
            degs = [l.par[x] for x in w]
            base = {(o, l2, q2): c for o, c, l2, q2 in ents}
            for sigma in permutations(range(k)):
                u = tuple(w[i] for i in sigma)
                if u == w or u not in table:
                    continue
                s = _perm_sign(sigma, degs)
                other = {(o, l2, q2): c for o, c, l2, q2 in table[u]}
                diff = vsub(other, {key: s * c for key, c in base.items()})
                if diff:
                    rep.residuals.append((f"l{k} at {l.algebra.fmt(w)} vs {l.algebra.fmt(u)}",
                                          {((o,), l2, q2): c for (o, l2, q2), c in diff.items()}))
    return rep


def _unshuffles(n, k):
    """(chosen, rest) index tuples for every (k, n-k) shuffle."""
    for chosen in combinations(range(n), k):
        rest = tuple(i for i in range(n) if i not in chosen)
        yield chosen, rest


def shuffle_residual(l, word, ceiling=None):
    """sum over k2 and unshuffles of l(l(x_chosen), x_rest) on one word."""
    par = l.par
    degs = [par[x] for x in word]
    n = len(word)
    out = {}
    for k2 in range(0, n + 1):
        if not l.tables.get(k2):
            continue
        for chosen, rest in _unshuffles(n, k2):
            sigma = chosen + rest
            s = _perm_sign(sigma, degs)
            inner = l.bracket(tuple(word[i] for i in chosen), ceiling=ceiling)
            tail = tuple(word[i] for i in rest)
            for ((o,), lam, q), c in inner.items():
                vaxpy(out, l.bracket((o,) + tail, lam, q, s * c, ceiling))
    return out


def square_route_residual(a, word, ceiling=None, mode="z"):
    """Length-one part of d-hat twice on the symmetrized word."""
    sym = symmetrized_plain(word, a.par)
    twice = dhat_raw(a, dhat_raw(a, sym, ceiling, mode), ceiling, mode)
    return {k: c for k, c in twice.items() if len(k[0]) == 1}


def linfty_defect(l, window, route="shuffle"):
    """Structure equation on every sorted word up to the window length.

    Symmetry of the tables is checked first; a failure there is reported
    without running the shuffle sums.
    """
    sym = symmetry_defect(l)
    if not sym.ok:
        sym.name = "linfty-symmetry"
        return sym
    rep = DefectReport(f"linfty-{route}")
    a = l.algebra
    for L in range(1, window.L_max + 1):
        for w in words_up_to(a.size(), L, SYMMETRIC, a.par, L)[L]:
            if route == "shuffle":
                r = shuffle_residual(l, w, window.E_max)
            else:
                r = square_route_residual(a, w, window.E_max, window.mode)
            rep.checked += 1
            if r:
                rep.residuals.append((a.fmt(w), r))
    return rep


# modules ------------------------------------------------------------------------

@dataclass
class LModuleSpec:
    """eta tables {k: {(v, xs): [(out, c, lam, q)]}} with xs sorted."""
    bimodule: object
    algebra: object
    brackets: LInfinitySpec
    tables: dict = field(default_factory=dict)
    mode: str = "z"

    def eta(self, v, xs, lam=Fraction(0), q=0, c=Fraction(1), ceiling=None):
        rep, s = sort_sign(xs, self.algebra.par)
        out = {}
        for o, cc, l2, q2 in self.tables.get(len(xs), {}).get((v, rep), []):
            if ceiling is not None and lam + l2 >= ceiling:
                continue
            vadd(out, (o, lam + l2, q + q2), s * c * cc)
        return out


def _module_sym(m, v, xs, lam=Fraction(0), q=0):
    """[v, x1..xk]: every placement and order of all k+1 letters, Koszul-signed."""
    degs = [m.mpar[v]] + [m.left.par[x] for x in xs]
    letters = (v,) + tuple(xs)
    out = {}
    for sigma in permutations(range(len(letters))):
        mark = sigma.index(0)
        key = (mark, tuple(letters[i] for i in sigma))
        vadd(out, (key, lam, q), _perm_sign(sigma, degs))
    return out


def lmodule_from_bimodule(m, max_arity=None, mode="z"):
    if m.left is not m.right:
        raise SpecError("the L-infinity module needs the same algebra on both sides")
    a = m.left
    l = symmetrize_algebra(a, mode=mode)
    tab = m.tab(mode)
    top = max((k1 + k0 for (k1, k0) in tab), default=0)
    if max_arity is not None:
        top = min(top, max_arity)
    tables = {}
    for k in range(0, top + 1):
        t = {}
        for xs in words_up_to(a.size(), k, "plain", a.par, k)[k]:
            if sort_sign(xs, a.par)[0] != xs:
                continue
            for v in range(m.size()):
                val = {}
                for ((mark, letters), _, _), s in _module_sym(m, v, xs).items():
                    k1 = mark
                    k0 = len(letters) - mark - 1
                    ents = tab.get((k1, k0), {}).get((letters[:mark], letters[mark], letters[mark + 1:]), [])
                    for o, cc, l2, q2 in ents:
                        vadd(val, (o, l2, q2), s * cc)
                if val:
                    t[(v, xs)] = [(o, c, l2, q2) for (o, l2, q2), c in sorted(val.items())]
        if t:
            tables[k] = t
    return LModuleSpec(m, a, l, tables, mode)


def lmod_residual(mod, v, xs, ceiling=None, sign="corrected"):
    """Module structure equation on (v; x1..xk).

    ``literal`` counts only the algebra letters in the sign; ``corrected``
    also puts (-1)^|v|' on the bracket term, as the CE differential does.
    """
    a = mod.algebra
    par = a.par
    mpar = mod.bimodule.mpar
    degs = [par[x] for x in xs]
    n = len(xs)
    out = {}
    for k2 in range(0, n + 1):
        for chosen, rest in _unshuffles(n, k2):
            s = _perm_sign(chosen + rest, degs)
            ch = tuple(xs[i] for i in chosen)
            tail = tuple(xs[i] for i in rest)
            # eta(eta(v; chosen); rest)
            for (o, lam, q), c in mod.eta(v, ch, ceiling=ceiling).items():
                vaxpy(out, mod.eta(o, tail, lam, q, s * c, ceiling))
            # eta(v; l(chosen), rest)
            s2 = s
            if sign == "corrected" and mpar[v] & 1:
                s2 = -s
            for ((o,), lam, q), c in mod.brackets.bracket(ch, ceiling=ceiling).items():
                vaxpy(out, mod.eta(v, (o,) + tail, lam, q, s2 * c, ceiling))
    return out


def module_square_residual(mod, v, xs, ceiling=None):
    """Module-only part of the bimodule differential applied twice to [v, xs]."""
    m = mod.bimodule
    sym = _module_sym(m, v, xs)
    twice = bimodule_dhat_raw(m, bimodule_dhat_raw(m, sym, ceiling, mod.mode), ceiling, mod.mode)
    out = {}
    for ((mark, letters), lam, q), c in twice.items():
        if len(letters) == 1:
            vadd(out, (letters[0], lam, q), c)
    return out


def lmodule_defect(mod, window, sign="corrected"):
    a = mod.algebra
    rep = DefectReport(f"lmodule-{sign}")
    for L in range(0, window.L_max):
        for xs in words_up_to(a.size(), L, SYMMETRIC, a.par, L)[L]:
            for v in range(mod.bimodule.size()):
                if sign == "square":
                    r = module_square_residual(mod, v, xs, window.E_max)
                else:
                    r = lmod_residual(mod, v, xs, window.E_max, sign)
                rep.checked += 1
                if r:
                    label = f"{mod.bimodule.mids[v]};{a.fmt(xs)}"
                    rep.residuals.append((label, {((o,), lam, q): c for (o, lam, q), c in r.items()}))
    return rep
