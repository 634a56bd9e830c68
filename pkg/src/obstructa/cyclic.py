"""Cyclic homology: the cyclic bar subcomplex, the Tsygan and (b, B) bicomplexes,
the corrected contracting homotopy and the odd cycle built from the unit and m0."""

import heapq
import weakref
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

from .ainfinity import DefectReport, SpecError, dhat_raw, diagonal_bimodule
from .hochschild import dhoch_raw
from .window_homology import (Echelon, LedgerError, assemble, bar_complex, degree_fn,
                              graded_cells, homology, nonboundary_certificate, rank,
                              slots_for, words_up_to)
from .words import CYCLIC, PLAIN, project, rotate_right, vadd, vaxpy, vsub

# Hochschild chains x0 (x) x1 ... (x) xn of the diagonal bimodule are kept as
# plain words (word, lam, q); x0 is the bimodule slot.

_DIAGONALS = weakref.WeakKeyDictionary()


def _diagonal(a):
    m = _DIAGONALS.get(a)
    if m is None:
        m = _DIAGONALS[a] = diagonal_bimodule(a)
    return m


def hoch_b(a, raw, ceiling=None, mode="z", kmax=None):
    """b: the Hochschild boundary of the diagonal bimodule on plain words."""
    res = dhoch_raw(a, _diagonal(a), {((0, w), lam, q): c for (w, lam, q), c in raw.items()},
                    ceiling, mode, kmax)
    return {(key[1], lam, q): c for (key, lam, q), c in res.items()}


def bprime(a, raw, ceiling=None, mode="z", kmax=None):
    """b': the bar coderivation restricted to words of positive length."""
    return dhat_raw(a, raw, ceiling, mode, kmax)


def t_apply(a, raw, rotate=rotate_right):
    out = {}
    for (w, lam, q), c in raw.items():
        u, s = rotate(w, a.par)
        vadd(out, (u, lam, q), s * c)
    return out


def one_minus_t(a, raw, rotate=rotate_right):
    return vsub(raw, t_apply(a, raw, rotate))


def norm_n(a, raw, rotate=rotate_right):
    """N = 1 + t + ... + t^n on words of length n + 1."""
    out = {}
    for (w, lam, q), c in raw.items():
        cur, s = w, 1
        for _ in range(max(len(w), 1)):
            vadd(out, (cur, lam, q), s * c)
            cur, s2 = rotate(cur, a.par)
            s *= s2
    return out


# deliberately wrong rotations, used to show the identity check has teeth

def _rot_unsigned(word, par):
    return ((word[-1],) + word[:-1], 1) if len(word) > 1 else (word, 1)


def _rot_negated(word, par):
    u, s = rotate_right(word, par)
    return u, -s


def _rot_first_letter(word, par):
    if len(word) <= 1:
        return word, 1
    odd = par[word[0]] & 1 and sum(par[x] for x in word[1:]) & 1
    return (word[-1],) + word[:-1], -1 if odd else 1


def _rot_unshifted(word, par):
    return rotate_right(word, [p + 1 for p in par])


T_MUTATIONS = {
    "unsigned": _rot_unsigned,
    "negated": _rot_negated,
    "first-letter": _rot_first_letter,
    "unshifted": _rot_unshifted,
}


def _word_cells(a, window, min_len=1):
    for L in range(min_len, window.L_max + 1):
        for w in product(range(a.size()), repeat=L):
            yield w


def bicomplex_identities(a, window, rotate=rotate_right):
    """Residuals of b(1-t) = (1-t)b' and b'N = Nb on every word of the window.

    Residuals are listed shortest word first.
    """
    E, mode = window.E_max, window.mode
    rep = DefectReport("bicomplex")
    for w in _word_cells(a, window):
        x = {(w, Fraction(0), 0): Fraction(1)}
        lhs = hoch_b(a, one_minus_t(a, x, rotate), E, mode)
        rhs = one_minus_t(a, bprime(a, x, E, mode), rotate)
        r = vsub(lhs, rhs)
        if r:
            rep.residuals.append((f"b(1-t)-(1-t)b' at {a.fmt(w)}", r))
        lhs = bprime(a, norm_n(a, x, rotate), E, mode)
        rhs = norm_n(a, hoch_b(a, x, E, mode), rotate)
        r = vsub(lhs, rhs)
        if r:
            rep.residuals.append((f"b'N-Nb at {a.fmt(w)}", r))
        rep.checked += 1
    return rep


def mutation_suite(a, window):
    """{mutation name: first failing label or None} for each planted t error."""
    out = {}
    for name, rot in T_MUTATIONS.items():
        rep = bicomplex_identities(a, window, rot)
        out[name] = rep.residuals[0][0] if rep.residuals else None
    return out


def cyclic_invariants(a, window):
    """(1-t)N, N(1-t), b^2 and b'^2 on every word of the window."""
    E, mode = window.E_max, window.mode
    rep = DefectReport("cyclic-invariants")
    for w in _word_cells(a, window):
        x = {(w, Fraction(0), 0): Fraction(1)}
        checks = {
            "(1-t)N": one_minus_t(a, norm_n(a, x)),
            "N(1-t)": norm_n(a, one_minus_t(a, x)),
            "b^2": hoch_b(a, hoch_b(a, x, E, mode), E, mode),
            "b'^2": bprime(a, bprime(a, x, E, mode), E, mode),
        }
        for name, r in checks.items():
            if r:
                rep.residuals.append((f"{name} at {a.fmt(w)}", r))
        rep.checked += 1
    return rep


# cyclic homology and the Connes quotient ------------------------------------

def cyclic_complex(a, window):
    return bar_complex(a, window, CYCLIC, min_len=1)


def cyclic_homology(a, window, margin=None):
    return homology(cyclic_complex(a, window), margin)


def _chain_cells(a, window):
    step = a.length_step()
    slots = slots_for(a, window)
    top = max(window.budget(lam, step) for lam, _ in slots)
    wl = words_up_to(a.size(), top, PLAIN, a.par, 1)
    return graded_cells(slots, lambda lam: window.budget(lam, step), wl, window.effective_cap())


def _split(raw):
    cols = {}
    for ((p, w), lam, q), c in raw.items():
        cols.setdefault(p, {})[(w, lam, q)] = c
    return cols


def _join(dst, p, raw, c=1):
    for (w, lam, q), v in raw.items():
        vadd(dst, ((p, w), lam, q), c * v)


def _column_fmt(a):
    return lambda key: f"c{key[0]}:{a.fmt(key[1])}"


def tsygan_complex(a, window, columns, quotient_last=True):
    """Columns 0..P-1 of the Tsygan bicomplex as one total complex.

    Even columns carry b, odd ones -b'; 1-t leaves odd columns and N leaves
    even ones.  Total degree is the word degree minus the column.  With
    ``quotient_last`` the last column is taken modulo the image of the next
    horizontal map, so one column is exactly the Connes quotient.
    """
    if columns < 1:
        raise ValueError("at least one column")
    E, mode, kmax = window.E_max, window.mode, window.K_max
    base = _chain_cells(a, window)
    cells = [((p, w), lam, q) for p in range(columns) for (w, lam, q) in base]
    par = a.par

    def op(raw):
        out = {}
        for p, x in _split(raw).items():
            if p % 2 == 0:
                _join(out, p, hoch_b(a, x, E, mode, kmax))
                if p:
                    _join(out, p - 1, norm_n(a, x))
            else:
                _join(out, p, bprime(a, x, E, mode, kmax), -1)
                _join(out, p - 1, one_minus_t(a, x))
        return out

    def builder(w2):
        return tsygan_complex(a, w2, columns, quotient_last)

    deg = degree_fn(window, lambda key: sum(par[x] for x in key[1]) - key[0])
    c = assemble(f"tsygan-{columns}", window, cells, deg, op, fmt=_column_fmt(a),
                 builder=builder, max_arity=max(a.max_arity(), 1), step=a.length_step())
    if quotient_last:
        last = columns - 1
        h = one_minus_t if columns % 2 == 1 else norm_n
        quo = []
        for (w, lam, q) in base:
            img = h(a, {(w, lam, q): Fraction(1)})
            if img:
                vec = {}
                _join(vec, last, img)
                quo.append(c.to_vector(vec))
        c.quotient = quo
    return c


def connes_complex(a, window):
    """Hochschild chains modulo the image of 1 - t, with b."""
    c = tsygan_complex(a, window, 1)
    c.name = "connes"
    return c


def connes_homology(a, window, margin=None):
    return homology(connes_complex(a, window), margin)


def tsygan_total_homology(a, window, columns, margin=None):
    return homology(tsygan_complex(a, window, columns), margin)


# the corrected contracting homotopy ------------------------------------------

def _nullspace(columns, idxs):
    e = Echelon(track=True)
    out = []
    for j in idxs:
        rem, combo, p = e.reduce(columns[j], {j: Fraction(1)})
        if p is None:
            out.append({k: c for k, c in combo.items() if c})
        else:
            e.rows[p] = (rem, combo)
    return out


def _full_reduce(rows, x):
    """Clear every pivot key of ``rows`` from ``x``."""
    x = dict(x)
    heap = list(x)
    heapq.heapify(heap)
    seen = set()
    while heap:
        k = heapq.heappop(heap)
        if k in seen:
            continue
        seen.add(k)
        c = x.get(k)
        if not c or k not in rows:
            continue
        r = rows[k]
        f = c / r[k]
        for kk, cc in r.items():
            vadd(x, kk, -f * cc)
            if kk not in seen:
                heapq.heappush(heap, kk)
    return x


@dataclass
class STilde:
    """s-tilde on plain words: I (x) p on the complement, corrected on cycles."""
    algebra: object
    window: object          # cells on which the identity is checked
    outer: object           # window where the splitting lives
    complex: object = None
    kernel_rows: dict = None
    image: object = None
    report: DefectReport = None
    missing: list = field(default_factory=list)

    def _m0(self):
        return self.algebra.mtab(self.window.mode).get(0, {}).get((), [])

    def split(self, raw):
        """(cycle part, complement part) of a raw vector, or raise KeyError."""
        c = self.complex
        x = {-k: v for k, v in c.to_vector(raw).items()}
        rem = {k: v for k, v in _full_reduce(self.kernel_rows, x).items() if v}
        cyc = {-k: v for k, v in vsub(x, rem).items() if v}
        return c.from_vector(cyc), c.from_vector({-k: v for k, v in rem.items()})

    def primitive(self, cycle):
        """q in the complement with d-hat q = cycle, or None."""
        if not cycle:
            return {}
        pre = self.image.preimage(self.complex.to_vector(cycle))
        if pre is None:
            return None
        return {self.complex.cells[j]: v for j, v in pre.items()}

    def correction(self, raw):
        """The m0 (x) I (x) q part alone."""
        m0 = self._m0()
        if not m0 or not raw:
            return {}
        cyc, _ = self.split(raw)
        q = self.primitive(cyc)
        if q is None:
            raise ValueError("cycle has no primitive in the outer window")
        out = {}
        E = self.window.E_max
        unit = self.algebra.unit
        for (w, lam, qq), c in q.items():
            for o, c0, l2, q2 in m0:
                if lam + l2 < E:
                    vadd(out, ((o, unit) + w, lam + l2, qq + q2), -c * c0)
        return out

    def apply(self, raw):
        unit = self.algebra.unit
        out = {}
        for (w, lam, q), c in raw.items():
            vadd(out, ((unit,) + w, lam, q), c)
        return vaxpy(out, self.correction(raw))


def plain_s(a, raw):
    return {((a.unit,) + w, lam, q): c for (w, lam, q), c in raw.items()}


def homotopy_residual(a, s, raw, window):
    """(s d-hat + d-hat s)(x) - x for an operator s on raw dicts."""
    E, mode = window.E_max, window.mode
    r = bprime(a, s(raw), E, mode)
    d = bprime(a, raw, E, mode)
    if d:
        vaxpy(r, s(d))
    return vsub(r, raw)


def plain_s_residual(a, window):
    """Residual of the naive homotopy I (x) - on length-one words."""
    if a.unit is None:
        raise SpecError("the homotopy needs a strict unit")
    out = {}
    for x in range(a.size()):
        raw = {((x,), Fraction(0), 0): Fraction(1)}
        out[x] = homotopy_residual(a, lambda v: plain_s(a, v), raw, window)
    return out


def stilde_build(a, window, margin=None, max_margin=4):
    """Split the bar chains of positive length into cycles and a complement and
    build s-tilde; the identity is checked on every cell of ``window``.

    The splitting is computed on ``window`` widened by ``margin`` letters; by
    default the margin grows until every cycle of the window has a primitive.
    """
    if a.unit is None:
        raise SpecError("the homotopy needs a strict unit")
    inner = bar_complex(a, window, PLAIN, min_len=1)
    margins = [margin] if margin is not None else list(range(0, max_margin + 1))
    has_m0 = bool(a.mtab(window.mode).get(0, {}).get((), []))
    if not has_m0:
        margins = margins[:1]
    for mg in margins:
        st = _stilde_at(a, window, window.widened(mg), inner, has_m0)
        if not st.missing:
            break
    return st


def _stilde_at(a, window, outer_w, inner, has_m0):
    st = STilde(a, window, outer_w)
    st.report = DefectReport("stilde")
    if has_m0:
        c = bar_complex(a, outer_w, PLAIN, min_len=1)
        if c.clipped:
            raise LedgerError(f"{c.name}: window is not closed under the differential")
        groups = {}
        for i, cell in enumerate(c.cells):
            groups.setdefault(c.degree[cell], []).append(i)
        # keys are negated indices so kernel pivots sit on the longest,
        # highest-energy cells and the complement keeps the short ones
        rows = {}
        for d in sorted(groups):
            for v in _nullspace(c.columns, groups[d]):
                v = {-k: x for k, x in v.items()}
                v = {k: x for k, x in _full_reduce(rows, v).items() if x}
                if v:
                    rows[min(v)] = v
        image = Echelon(track=True)
        for i in range(len(c.cells)):
            if -i not in rows:
                image.add(c.columns[i], i)
        st.complex, st.kernel_rows, st.image = c, rows, image
    for cell in inner.cells:
        raw = {cell: Fraction(1)}
        try:
            r = homotopy_residual(a, st.apply, raw, window)
        except ValueError:
            st.missing.append(cell)
            continue
        st.report.checked += 1
        if r:
            st.report.residuals.append((inner.describe(cell), r))
    return st


# the Connes operator -----------------------------------------------------------

def connes_B(a, st, raw):
    """B = (1 - t) s-tilde N."""
    return one_minus_t(a, st.apply(norm_n(a, raw)))


def classical_B(a, raw):
    return one_minus_t(a, plain_s(a, norm_n(a, raw)))


def _degenerate(a, w):
    return a.unit in w[1:]


def _nondegenerate(a, raw):
    return {k: c for k, c in raw.items() if not _degenerate(a, k[0])}


@dataclass
class BReport:
    square: DefectReport
    anticommutator: DefectReport
    extra_terms: int          # cells where B differs from the classical formula
    extra_normalized: int     # the same after dropping degenerate words
    checked: int


def connes_B_report(a, window, st=None):
    """B^2 = 0, bB + Bb = 0 and the extra m0 terms on every cell of ``window``.

    ``st`` must cover cells one letter longer than the window.
    """
    if st is None:
        st = stilde_build(a, window.widened(1))
    E, mode = window.E_max, window.mode
    sq = DefectReport("B^2")
    anti = DefectReport("bB+Bb")
    extra = extra_n = 0
    cells = _chain_cells(a, window)
    for cell in cells:
        x = {cell: Fraction(1)}
        bx = connes_B(a, st, x)
        r = connes_B(a, st, bx)
        if r:
            sq.residuals.append((a.fmt(cell[0]), r))
        r = hoch_b(a, bx, E, mode)
        hb = hoch_b(a, x, E, mode)
        if hb:
            vaxpy(r, connes_B(a, st, hb))
        if r:
            anti.residuals.append((a.fmt(cell[0]), r))
        diff = vsub(bx, classical_B(a, x))
        if diff:
            extra += 1
            if _nondegenerate(a, diff):
                extra_n += 1
        sq.checked += 1
        anti.checked += 1
    return BReport(sq, anti, extra, extra_n, len(cells))


def bB_complex(a, window, columns, normalized=False, drop=None, margin=None, max_drop=5):
    """Columns 0..P-1 of the (b, B) bicomplex; column p is shortened by
    ``drop * p`` letters so B lands inside column p - 1.

    Total degree is the word degree minus twice the column.  Without an
    explicit ``drop`` the smallest one from 2 up that keeps B inside the
    window is used.
    """
    if drop is not None:
        return _bB_at(a, window, columns, normalized, drop, margin)
    for d in range(2, max_drop + 1):
        c = _bB_at(a, window, columns, normalized, d, margin)
        if not c.clipped:
            return c
    return c


def _bB_at(a, window, columns, normalized, drop, margin):
    if columns < 1:
        raise ValueError("at least one column")
    if a.unit is None:
        raise SpecError("B needs a strict unit")
    E, mode, kmax = window.E_max, window.mode, window.K_max
    cells = []
    for p in range(columns):
        if window.L_max - drop * p < 1:
            break
        wp = window.widened(-drop * p)
        for (w, lam, q) in _chain_cells(a, wp):
            if normalized and _degenerate(a, w):
                continue
            cells.append(((p, w), lam, q))
    used = max(k[0][0] for k in cells) + 1 if cells else 1
    st = None
    if used > 1:
        st = stilde_build(a, window.widened(-drop), margin=margin)
        if st.missing:
            raise LedgerError(f"s-tilde undefined on {len(st.missing)} cells")
    par = a.par

    def op(raw):
        out = {}
        for p, x in _split(raw).items():
            _join(out, p, hoch_b(a, x, E, mode, kmax))
            if p:
                _join(out, p - 1, connes_B(a, st, x))
        if normalized:
            out = {k: c for k, c in out.items() if not _degenerate(a, k[0][1])}
        return out

    def builder(w2):
        return _bB_at(a, w2, columns, normalized, drop, margin)

    deg = degree_fn(window, lambda key: sum(par[x] for x in key[1]) - 2 * key[0])
    name = "bB-normalized" if normalized else "bB"
    return assemble(f"{name}-{columns}-drop{drop}", window, cells, deg, op, fmt=_column_fmt(a),
                    builder=builder, max_arity=max(a.max_arity(), 1), step=a.length_step())


def bB_total_homology(a, window, columns, normalized=False, margin=None, drop=None):
    return homology(bB_complex(a, window, columns, normalized, drop), margin)


# the Connes exact sequence --------------------------------------------------------

def _cycles_and_boundaries(c, idx, target):
    """Per degree: cycle basis over ``idx`` (differential projected to
    ``target``) and boundaries of ``idx`` projected to ``target``."""
    groups = {}
    for i in idx:
        groups.setdefault(c.degree[c.cells[i]], []).append(i)
    proj = {i: {k: v for k, v in c.columns[i].items() if k in target} for i in idx}
    cycles = {}
    for d, ids in groups.items():
        cycles[d] = _nullspace(proj, ids)
    bounds = {d: [proj[i] for i in ids if proj[i]] for d, ids in groups.items()}
    return cycles, bounds


def _combine(c, combo):
    out = {}
    for j, v in combo.items():
        vaxpy(out, c.columns[j], v)
    return out


@dataclass
class SequenceNode:
    label: str
    degree: int
    dim: int
    rank_in: int
    rank_out: int

    @property
    def exact(self):
        return self.rank_in + self.rank_out == self.dim


def connes_sequence_check(a, window, columns=4):
    """H -> HC -> HC[+2] -> H[+1] from the short exact sequence of the first two
    Tsygan columns, all P columns, and columns 2..P-1."""
    if columns < 3:
        raise ValueError("the sequence needs at least three columns")
    c = tsygan_complex(a, window, columns, quotient_last=False)
    sub_idx = {i for i, cell in enumerate(c.cells) if cell[0][0] <= 1}
    quo_idx = set(range(len(c.cells))) - sub_idx
    every = set(range(len(c.cells)))
    za, ba = _cycles_and_boundaries(c, sub_idx, sub_idx)
    zt, bt = _cycles_and_boundaries(c, every, every)
    zc, bc = _cycles_and_boundaries(c, quo_idx, quo_idx)

    def hdim(z, b, d):
        return len(z.get(d, [])) - rank(b.get(d - 1, []))

    def map_rank(images, b, d):
        base = rank(b.get(d - 1, []))
        return rank(images + b.get(d - 1, [])) - base

    degrees = sorted(set(c.degree.values()))
    nodes = []
    r_i, r_pi, r_delta = {}, {}, {}
    for d in degrees:
        r_i[d] = map_rank(za.get(d, []), bt, d)
        r_pi[d] = map_rank([{k: v for k, v in z.items() if k in quo_idx} for z in zt.get(d, [])], bc, d)
        # delta: lift a cycle of the quotient, apply D, land in the subcomplex
        r_delta[d] = map_rank([{k: v for k, v in _combine(c, z).items() if k in sub_idx}
                               for z in zc.get(d, [])], ba, d + 1)
    for d in degrees:
        nodes.append(SequenceNode("H", d, hdim(za, ba, d), r_delta.get(d - 1, 0), r_i[d]))
        nodes.append(SequenceNode("HC", d, hdim(zt, bt, d), r_i[d], r_pi[d]))
        # columns 2.. are HC shifted up by two in total degree
        nodes.append(SequenceNode("HC+2", d, hdim(zc, bc, d), r_pi[d], r_delta[d]))
    return nodes


# the odd cycle built from the unit and m0 ---------------------------------------

def _m0_terms(a, mode="z"):
    return a.mtab(mode).get(0, {}).get((), [])


def _expand_pattern(pattern, m0, ceiling):
    """Multilinear expansion of a word whose letters are ids or the marker 'm0'."""
    acc = {((), Fraction(0), 0): Fraction(1)}
    for letter in pattern:
        nxt = {}
        opts = [(letter, Fraction(1), Fraction(0), 0)] if letter != "m0" else m0
        for (w, lam, q), c in acc.items():
            for o, co, l2, q2 in opts:
                if ceiling is not None and lam + l2 >= ceiling:
                    continue
                vadd(nxt, (w + (o,), lam + l2, q + q2), c * co)
        acc = nxt
    return acc


def _alternating(unit, n, start_unit=True):
    a, b = (unit, "m0") if start_unit else ("m0", unit)
    return tuple(a if i % 2 == 0 else b for i in range(n))


def _only_arity(a, raw, k, ceiling, mode):
    hi = dhat_raw(a, raw, ceiling, mode, kmax=k)
    lo = dhat_raw(a, raw, ceiling, mode, kmax=k - 1) if k > 0 else {}
    return vsub(hi, lo)


def _valuation(m0):
    return min(l for _, _, l, _ in m0)


@dataclass
class AlphaReport:
    k_max: int
    pieces: dict              # k -> alpha_{2k+1} (plain raw)
    alpha: dict               # plain raw
    lemma: dict               # k -> residual of m0-hat(alpha_{2k-1}) - m2-hat(alpha_{2k+1})
    shift_lemma: dict         # k -> residual of the m0-hat shift identity
    closed: dict              # d-hat(alpha) below the ceiling
    unit_sources: list        # inputs of operations that can output the unit
    n2_unit: dict             # N_2(I (x) I)
    certificate: object = None

    @property
    def ok(self):
        return (not self.closed and not any(self.lemma.values())
                and not any(self.shift_lemma.values()))


def alpha_pieces(a, e_ceiling, k_max=None, mode="z"):
    unit = a.unit
    m0 = _m0_terms(a, mode)
    if unit is None:
        raise SpecError("alpha needs a unit")
    if not m0:
        raise SpecError("alpha needs a nonzero m0")
    val = _valuation(m0)
    if k_max is None:
        k_max = 0
        while (k_max + 1) * val < e_ceiling:
            k_max += 1
    pieces = {}
    for k in range(k_max + 1):
        w = _expand_pattern(_alternating(unit, 2 * k + 1), m0, e_ceiling)
        pieces[k] = norm_n(a, w)
    return pieces, k_max


def alpha_build(a, window, k_max=None, certify=True):
    """alpha = sum_k (-1)^k N(I m0 I m0 ... I) with every check that goes with it."""
    E, mode = window.E_max, window.mode
    pieces, k_max = alpha_pieces(a, E, k_max, mode)
    alpha = {}
    for k, p in pieces.items():
        vaxpy(alpha, p, -1 if k % 2 else 1)
    lemma = {}
    for k in range(1, k_max + 1):
        lhs = _only_arity(a, pieces[k - 1], 0, E, mode)
        rhs = _only_arity(a, pieces[k], 2, E, mode)
        lemma[k] = vsub(lhs, rhs)
    shift = shift_lemma_residuals(a, window, k_max)
    closed = dhat_raw(a, alpha, E, mode)
    unit = a.unit
    sources = []
    for k, table in a.mtab(mode).items():
        for inp, ents in table.items():
            if any(o == unit for o, *_ in ents):
                sources.append(inp)
    n2 = norm_n(a, {((unit, unit), Fraction(0), 0): Fraction(1)})
    rep = AlphaReport(k_max, pieces, alpha, lemma, shift, closed, sorted(sources), n2)
    if certify:
        c = cyclic_complex(a, window)
        z = project(alpha, CYCLIC, a.par)
        missing = [k for k in z if k not in c.index]
        if missing:
            raise ValueError(f"window too short for alpha: {c.describe(missing[0])}")
        rep.certificate = nonboundary_certificate(c, z)
    return rep


def shift_lemma_residuals(a, window, k_max):
    """m0-hat(N(a_1..a_{2k+1})) against N(m0-hat(a_1..a_{2k}) (x) a_{2k+1}) for
    letters of odd shifted degree, every such word up to length 2 k_max + 1."""
    E, mode = window.E_max, window.mode
    odd = [x for x in range(a.size()) if a.par[x] & 1]
    out = {}
    for k in range(1, k_max + 1):
        worst = {}
        for w in product(odd, repeat=2 * k + 1):
            x = {(w, Fraction(0), 0): Fraction(1)}
            lhs = _only_arity(a, norm_n(a, x), 0, E, mode)
            head = _only_arity(a, {(w[:-1], Fraction(0), 0): Fraction(1)}, 0, E, mode)
            tail = {(u + (w[-1],), lam, q): c for (u, lam, q), c in head.items()}
            r = vsub(lhs, norm_n(a, tail))
            if r:
                worst = r
                break
        out[k] = worst
    return out


def m2_cases(a, k, mode="z"):
    """m2-hat on the five kinds of rotations of I m0 I ... m0 I (length 2k+1)."""
    unit = a.unit
    m0 = _m0_terms(a, mode)
    n = 2 * k + 1
    base = _alternating(unit, n)
    kinds = {
        "I m0 .. m0 I": base,
        "I I m0 .. I m0": (unit,) + base[:-1],
        "m0 I .. m0 I I": base[1:] + (unit,),
    }
    if k >= 2:
        # m0 I .. m0 I I m0 .. m0 I  and  I m0 .. m0 I I m0 .. I m0
        kinds["m0 .. I I m0 .. I"] = base[3:] + base[:3]
        kinds["I m0 .. I I m0 .. m0"] = base[2:] + base[:2]
    out = {}
    for name, pat in kinds.items():
        w = _expand_pattern(pat, m0, None)
        out[name] = (w, _only_arity(a, w, 2, None, mode))
    return out


def gamma_build(a, window):
    """gamma = sum_k (-1)^k (I (x) m0)^k and the actual shape of d-hat on each power."""
    E, mode = window.E_max, window.mode
    unit = a.unit
    m0 = _m0_terms(a, mode)
    if unit is None:
        raise SpecError("gamma needs a unit")
    val = _valuation(m0) if m0 else None
    gamma = {((), Fraction(0), 0): Fraction(1)}
    powers = {}
    k = 1
    while m0 and k * val < E:
        pat = tuple(x for _ in range(k) for x in (unit, "m0"))
        powers[k] = _expand_pattern(pat, m0, E)
        vaxpy(gamma, powers[k], -1 if k % 2 else 1)
        k += 1
    images = {k: dhat_raw(a, p, E, mode) for k, p in powers.items()}
    return gamma, dhat_raw(a, gamma, E, mode), images


def gamma_power_identity(a, window):
    """Which sign makes d-hat((I m0)^k) = m0 (I m0)^k +- m0 (I m0)^(k-1) true, per k.

    Returns {k: "+", "-" or None}.
    """
    E, mode = window.E_max, window.mode
    _, _, images = gamma_build(a, window)
    m0 = _m0_terms(a, mode)
    out = {}
    for k, img in images.items():
        hi = _expand_pattern(("m0",) + tuple(x for _ in range(k) for x in (a.unit, "m0")), m0, E)
        lo = _expand_pattern(("m0",) + tuple(x for _ in range(k - 1) for x in (a.unit, "m0")), m0, E)
        out[k] = None
        for sign in ("+", "-"):
            guess = vaxpy(dict(hi), lo, 1 if sign == "+" else -1)
            if not vsub(img, guess):
                out[k] = sign
    return out


@dataclass
class MethodComparison:
    columns: int
    cyclic: dict
    tsygan: dict
    bB: dict
    bB_normalized: dict
    matched: list             # degrees compared for the (b, B) side

    def tsygan_agrees(self):
        return all(self.tsygan.get(d, 0) == v for d, v in self.cyclic.items())

    def bB_agrees(self):
        return all(self.cyclic.get(d, 0) == self.bB.get(d, 0) == self.bB_normalized.get(d, 0)
                   for d in self.matched)


def compare_cyclic_methods(a, window, columns=(2, 4, 6), margin=None):
    """Cyclic homology three ways at each column count.

    The (b, B) columns shrink with p, so that side is compared only on degrees
    at least two away from the window length in absolute value.
    """
    cyc = cyclic_homology(a, window, margin)
    margin = cyc.margin
    matched = [d for d in cyc.homology() if abs(d) <= window.L_max - 2]
    out = []
    for P in columns:
        tsy = tsygan_total_homology(a, window, P, margin).homology()
        bb = bB_total_homology(a, window, P, False, margin, drop=2).homology()
        bbn = bB_total_homology(a, window, P, True, margin, drop=2).homology()
        out.append(MethodComparison(P, cyc.homology(), tsy, bb, bbn, matched))
    return out


def stable_columns(comparisons):
    """Column counts whose (b, B) dims no longer change at the next count."""
    out = []
    for cur, nxt in zip(comparisons, comparisons[1:]):
        same = all(cur.bB.get(d, 0) == nxt.bB.get(d, 0) and
                   cur.bB_normalized.get(d, 0) == nxt.bB_normalized.get(d, 0)
                   for d in cur.matched)
        if same:
            out.append(cur.columns)
    if out and out[-1] == comparisons[-2].columns:
        out.append(comparisons[-1].columns)
    return out
