"""Finite windows of completed complexes and their exact homology.

A cell is ``(word_key, lam, q)``: one basis word times one monomial slot
T^lam e^q.  Slots range over the monoid generated by the operation classes,
so each window is the Q-linearization of a truncated Novikov complex.

Lengths are bounded by a budget that grows with energy (``slope``): a cell at
energy lam may have length up to ``L_max + floor(lam / step)`` where ``step``
is the cheapest length-raising energy.  Every differential here lengthens a
word only by paying at least ``step``, so sloped windows are honest
subcomplexes.  Flat windows (``slope=False``) clip length at ``L_max`` and let
the defect ledger record the damage.
"""

import heapq
import os
from dataclasses import dataclass, field, replace
from fractions import Fraction
from math import floor

from .words import vadd

DEFAULT_CAP = 60000


class ResourceError(RuntimeError):
    def __init__(self, count, cap):
        super().__init__(f"window has at least {count} cells, above the cap of {cap} "
                         f"(raise OBSTRUCTA_CAP to allow more)")
        self.count = count
        self.cap = cap


class LedgerError(RuntimeError):
    """Homology refused because the window is not a complex in the requested degrees."""


def cell_cap():
    env = os.environ.get("OBSTRUCTA_CAP")
    return int(env) if env else DEFAULT_CAP


@dataclass(frozen=True)
class Window:
    L_max: int
    E_max: Fraction
    degree_range: tuple = None
    K_max: int = None
    mode: str = "z"
    slope: bool = True
    cap: int = None

    def __post_init__(self):
        object.__setattr__(self, "E_max", Fraction(self.E_max))
        if self.L_max < 0:
            raise ValueError("L_max must be non-negative")
        if self.E_max <= 0:
            raise ValueError("E_max must be positive")
        if self.mode not in ("z", "z2"):
            raise ValueError(f"unknown mode {self.mode!r}")

    def widened(self, extra):
        return replace(self, L_max=self.L_max + extra)

    def budget(self, lam, step):
        if not self.slope or step is None:
            return self.L_max
        return self.L_max + floor(Fraction(lam) / step)

    def in_degrees(self, d):
        if self.degree_range is None:
            return True
        lo, hi = self.degree_range
        return lo <= d <= hi

    def params(self):
        out = {"L_max": self.L_max, "E_max": _q(self.E_max), "mode": self.mode,
               "slope": self.slope}
        if self.K_max is not None:
            out["K_max"] = self.K_max
        if self.degree_range is not None:
            out["degrees"] = f"{self.degree_range[0]}..{self.degree_range[1]}"
        return out

    def effective_cap(self):
        return self.cap if self.cap is not None else cell_cap()


def _q(x):
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def monoid_slots(generators, e_max):
    """All (lam, q) sums of generators with lam < e_max, including (0, 0)."""
    gens = [(Fraction(l), q) for l, q in generators if Fraction(l) > 0]
    seen = {(Fraction(0), 0)}
    heap = [(Fraction(0), 0)]
    while heap:
        lam, q = heapq.heappop(heap)
        for gl, gq in gens:
            s = (lam + gl, q + gq)
            if s[0] < e_max and s not in seen:
                seen.add(s)
                heapq.heappush(heap, s)
    return sorted(seen)


# exact linear algebra -----------------------------------------------------

class Echelon:
    """Incrementally reduced set of sparse vectors over Q.

    Vectors are dicts from sortable keys to Fractions; each stored row has a
    distinct pivot (its least key).  With ``track`` every row remembers which
    combination of inserted tags produced it, so preimages can be read off.
    """

    def __init__(self, track=False):
        self.rows = {}
        self.track = track

    def __len__(self):
        return len(self.rows)

    def reduce(self, vec, combo=None):
        vec = dict(vec)
        combo = dict(combo) if combo is not None else ({} if self.track else None)
        rows = self.rows
        while vec:
            p = min(vec)
            row = rows.get(p)
            if row is None:
                # the leading key is free; strip the rest as far as possible
                return vec, combo, p
            r, rc = row
            f = vec[p] / r[p]
            for k, c in r.items():
                vadd(vec, k, -f * c)
            if combo is not None and rc is not None:
                for k, c in rc.items():
                    vadd(combo, k, -f * c)
        return vec, combo, None

    def add(self, vec, tag=None):
        """Insert; returns True when ``vec`` was independent of the rows."""
        combo = None
        if self.track:
            combo = {tag: Fraction(1)} if tag is not None else {}
        rem, combo, p = self.reduce(vec, combo)
        if p is None:
            return False
        self.rows[p] = (rem, combo)
        return True

    def contains(self, vec):
        return self.reduce(vec, None if not self.track else {})[2] is None

    def preimage(self, vec):
        """Tags combination c with sum c_tag * vec_tag == vec, or None."""
        if not self.track:
            raise ValueError("preimages need a tracking echelon")
        rem, combo, p = self.reduce(vec, {})
        if p is not None:
            return None
        return {k: -c for k, c in combo.items() if c}


def rank(vectors):
    e = Echelon()
    for v in vectors:
        if v:
            e.add(v)
    return len(e)


def solve_linear(columns, target):
    """Coefficients x (dict index -> Fraction) with sum x_j columns[j] == target, or None."""
    e = Echelon(track=True)
    for j, col in enumerate(columns):
        if col:
            e.add(col, j)
    if not target:
        return {}
    return e.preimage(target)


def left_witness(columns, z):
    """A functional phi with phi(col) = 0 for all columns and phi(z) = 1, or None.

    Found by solving the transposed system exactly; returned as a dict on keys.
    """
    keys = set(z)
    for col in columns:
        keys.update(col)
    keys = sorted(keys)
    # unknowns phi_k; equations: sum_k phi_k col[k] = 0, sum_k phi_k z[k] = 1
    eqs = [(col, Fraction(0)) for col in columns if col]
    eqs.append((z, Fraction(1)))
    return _solve_rows(eqs)


def _solve_rows(eqs):
    """Solve sparse equations [(coeffs dict var->c, rhs)]; free variables set to 0."""
    pivots = {}
    order = []
    for coeffs, rhs in eqs:
        row = dict(coeffs)
        r = Fraction(rhs)
        while row:
            p = min(row)
            if p not in pivots:
                break
            prow, prhs = pivots[p]
            f = row[p] / prow[p]
            for k, c in prow.items():
                vadd(row, k, -f * c)
            r -= f * prhs
        if not row:
            if r != 0:
                return None
            continue
        p = min(row)
        pivots[p] = (row, r)
        order.append(p)
    sol = {}
    for p in sorted(pivots, reverse=True):
        row, r = pivots[p]
        acc = r
        for k, c in row.items():
            if k != p:
                acc -= c * sol.get(k, 0)
        val = acc / row[p]
        if val:
            sol[p] = val
    return sol


def apply_functional(phi, vec):
    return sum((phi.get(k, 0) * c for k, c in vec.items()), Fraction(0))


# complexes ----------------------------------------------------------------

@dataclass
class WindowedComplex:
    name: str
    window: Window
    cells: list
    degree: dict
    columns: list
    clipped: list
    ledger: list
    op: object = None
    builder: object = None
    quotient: list = None
    fmt: object = None
    max_arity: int = 1
    step: object = None
    index: dict = field(default_factory=dict)

    def cells_of_degree(self, d):
        return [i for i, c in enumerate(self.cells) if self.degree[c] == d]

    def degrees(self):
        return sorted(set(self.degree.values()))

    def describe(self, cell):
        w, lam, q = cell
        f = self.fmt(w) if self.fmt else str(w)
        return f"{f}@T^{_q(lam)}e^{q}"

    def dirty_degrees(self):
        return sorted({self.degree[self.cells[j]] for j, _ in self.ledger})

    def to_vector(self, raw):
        out = {}
        for k, c in raw.items():
            i = self.index.get(k)
            if i is None:
                raise KeyError(f"{self.describe(k)} is not a cell of this window")
            vadd(out, i, c)
        return out

    def from_vector(self, vec):
        return {self.cells[i]: c for i, c in vec.items()}

    def apply(self, raw):
        """Window differential: operator followed by projection to the window."""
        out = {}
        for k, c in self.op(raw).items():
            if k in self.index:
                vadd(out, k, c)
        return out


def assemble(name, window, cells, degree_of, op, fmt=None, builder=None,
             quotient=None, max_arity=1, step=None):
    cap = window.effective_cap()
    if len(cells) > cap:
        raise ResourceError(len(cells), cap)
    index = {c: i for i, c in enumerate(cells)}
    degree = {c: degree_of(c) for c in cells}
    columns = []
    clipped = []
    for j, c in enumerate(cells):
        img = op({c: Fraction(1)})
        col = {}
        out = {}
        for k, v in img.items():
            i = index.get(k)
            if i is None:
                out[k] = v
            else:
                col[i] = v
        columns.append(col)
        if out:
            clipped.append((j, out))
    ledger = []
    if clipped:
        for j, col in enumerate(columns):
            sq = {}
            for i, v in col.items():
                for i2, v2 in columns[i].items():
                    vadd(sq, i2, v * v2)
            if sq:
                ledger.append((j, sq))
    return WindowedComplex(name, window, cells, degree, columns, clipped, ledger, op,
                           builder, quotient, fmt, max_arity, step, index)


def square_defect(c):
    """Residual of the window differential applied twice, per cell."""
    out = []
    for j, col in enumerate(c.columns):
        sq = {}
        for i, v in col.items():
            for i2, v2 in c.columns[i].items():
                vadd(sq, i2, v * v2)
        if sq:
            out.append((j, sq))
    return out


# homology -----------------------------------------------------------------

@dataclass
class DegreeDims:
    cells: int
    kernel: int
    image: int
    homology: int


@dataclass
class HomologyReport:
    name: str
    window: Window
    dims: dict                      # degree -> DegreeDims
    margin: int = 0
    pages: dict = field(default_factory=dict)
    certificates: list = field(default_factory=list)
    ledger: int = 0
    notes: list = field(default_factory=list)

    def homology(self):
        return {d: v.homology for d, v in sorted(self.dims.items())}

    def total(self):
        return sum(v.homology for v in self.dims.values())

    def records(self):
        base = " ".join(f"{k}={v}" for k, v in self.window.params().items())
        out = [f"homology complex={self.name} {base} margin={self.margin} ledger={self.ledger}"]
        for d, v in sorted(self.dims.items()):
            out.append(f"degree complex={self.name} {base} degree={d} cells={v.cells} "
                       f"kernel={v.kernel} image={v.image} homology={v.homology}")
        for (p, n), dim in sorted(self.pages.items()):
            out.append(f"page complex={self.name} {base} degree={p} level={n} dim={dim}")
        for note in self.notes:
            out.append(f"note complex={self.name} {base} {note}")
        return out


def _by_degree(c, idx_set=None):
    groups = {}
    for i, cell in enumerate(c.cells):
        if idx_set is not None and i not in idx_set:
            continue
        groups.setdefault(c.degree[cell], []).append(i)
    return groups


def _quotient_by_degree(c):
    groups = {}
    for vec in c.quotient or []:
        if not vec:
            continue
        d = c.degree[c.cells[min(vec)]]
        groups.setdefault(d, []).append(vec)
    return groups


def _check_ledger(c, degrees):
    if not c.ledger:
        return
    bad = [(j, sq) for j, sq in c.ledger
           if c.degree[c.cells[j]] + 1 in degrees]
    if bad:
        j, sq = bad[0]
        cells = ", ".join(c.describe(c.cells[i]) for i in sorted(sq)[:3])
        raise LedgerError(
            f"{c.name}: d^2 != 0 in the window ({len(bad)} cells), first at "
            f"{c.describe(c.cells[j])} -> {cells}")


def _plain_dims(c, degrees):
    """Ordinary homology of the window complex modulo its quotient subspace."""
    groups = _by_degree(c)
    kq = _quotient_by_degree(c)
    rank_k = {d: rank(kq.get(d, [])) for d in set(groups) | set(kq)}
    rank_dk = {}

    def r_dk(d):
        # rank of [D(C_d), K_{d+1}] minus rank K_{d+1}
        if d not in rank_dk:
            vecs = [c.columns[i] for i in groups.get(d, [])] + kq.get(d + 1, [])
            rank_dk[d] = rank(vecs) - rank_k.get(d + 1, 0)
        return rank_dk[d]

    out = {}
    for d in degrees:
        n = len(groups.get(d, []))
        if n == 0 and not kq.get(d):
            continue
        dim_q = n - rank_k.get(d, 0)
        ker = dim_q - r_dk(d)
        im = r_dk(d - 1)
        out[d] = DegreeDims(dim_q, ker, im, ker - im)
    return out


def _robust_dims(inner, outer, degrees):
    """Image of H(inner window) in H(outer window), per degree."""
    if outer.quotient is None and inner.quotient is not None:
        raise ValueError("outer window lost its quotient")
    inner_idx = {outer.index[cell] for cell in inner.cells if cell in outer.index}
    if len(inner_idx) != len(inner.cells):
        raise ValueError("outer window does not contain the inner one")
    ogroups = _by_degree(outer)
    kq = _quotient_by_degree(outer)
    inner_k = _quotient_by_degree(inner)
    out = {}
    for d in degrees:
        cin = [i for i in ogroups.get(d, []) if i in inner_idx]
        if not cin:
            continue
        k_in = [outer.to_vector(inner.from_vector(v)) for v in inner_k.get(d, [])]
        k_in_next = [outer.to_vector(inner.from_vector(v)) for v in inner_k.get(d + 1, [])]
        rk_in = rank(k_in)
        rk_in_next = rank(k_in_next)
        dim_q = len(cin) - rk_in
        # cycles of the inner quotient
        dcin = [outer.columns[i] for i in cin]
        z = len(cin) - (rank(dcin + k_in_next) - rk_in_next)
        # inner cells that bound in the outer quotient
        w = [outer.columns[i] for i in ogroups.get(d - 1, [])] + kq.get(d, [])
        rw = rank(w)
        rout = rank([{k: v for k, v in vec.items() if k not in inner_idx} for vec in w])
        bd = rw - rout
        ker = z - rk_in
        im = bd - rk_in
        out[d] = DegreeDims(dim_q, ker, im, ker - im)
    return out


def homology(c, margin=None, degrees=None):
    """Per-degree dims; with ``margin`` > 0 only classes that survive into a
    window ``margin`` letters longer are counted."""
    if degrees is None:
        degrees = [d for d in c.degrees() if c.window.in_degrees(d)]
    degrees = sorted(degrees)
    if margin is None:
        # the longest words of any truncation are cycles with no primitive in
        # reach, so one extra letter is the least that hides that edge
        margin = 1 if c.builder is not None else 0
    _check_ledger(c, set(degrees))
    if margin and c.builder is not None:
        outer = c.builder(c.window.widened(margin))
        _check_ledger(outer, set(degrees))
        dims = _robust_dims(c, outer, degrees)
    else:
        margin = 0
        dims = _plain_dims(c, degrees)
    return HomologyReport(c.name, c.window, dims, margin, ledger=len(c.ledger))


# energy pages -------------------------------------------------------------

def energy_levels(c):
    """Common quantum lam0 and the level n of each cell, or refusal."""
    lams = sorted({cell[1] for cell in c.cells if cell[1] > 0})
    if not lams:
        return Fraction(1), {cell: 0 for cell in c.cells}
    lam0 = lams[0]
    for lam in lams:
        if (lam / lam0).denominator != 1:
            raise ValueError(f"energy {lam} is not a multiple of {lam0}; pages undefined")
    return lam0, {cell: int(cell[1] / lam0) for cell in c.cells}


def spectral_page(c, r, literal=False):
    """Dims of E_r^{p,n} with the energy filtration F^n = F^{n lam0}.

    By default page 1 is the homology of the energy-zero differential; with
    ``literal`` the index follows the Z_r/B_r formulas unshifted, in which case
    page 1 is just the graded cells.
    """
    if r not in (1, 2) and not literal:
        raise ValueError("only pages 1 and 2 are supported")
    _check_ledger(c, set(c.degrees()))
    lam0, level = energy_levels(c)
    s = r if not literal else r - 1   # delta(x) must vanish at s levels
    by = {}
    for i, cell in enumerate(c.cells):
        by.setdefault((c.degree[cell], level[cell]), []).append(i)
    top = max(level.values()) if level else 0
    levels_of = {i: level[cell] for i, cell in enumerate(c.cells)}

    def cells_in(p, lo, hi):
        out = []
        for n in range(max(lo, 0), hi + 1):
            out.extend(by.get((p, n), []))
        return out

    def rows_in(vec, lo, hi):
        return {k: v for k, v in vec.items() if lo <= levels_of[k] <= hi}

    def nullity(cols, lo, hi):
        vecs = [rows_in(c.columns[i], lo, hi) for i in cols]
        return len(cols) - rank(vecs)

    out = {}
    for (p, n) in sorted(by):
        # Z: x in F^n with delta(x) vanishing at levels n .. n+s-1, projected to level n
        if s <= 0:
            zdim = len(by[(p, n)])
        else:
            a = cells_in(p, n, n + s - 1)
            a2 = cells_in(p, n + 1, n + s - 1)
            zdim = nullity(a, n, n + s - 1) - nullity(a2, n + 1, n + s - 1)
        # B: level-n parts of delta(y), y in F^(n-s), delta(y) in F^n
        lo = n - s
        ys = cells_in(p - 1, lo, n)
        full = rank([rows_in(c.columns[i], lo, n) for i in ys])
        cons = rank([rows_in(c.columns[i], lo, n - 1) for i in ys])
        bdim = full - cons
        out[(p, n)] = zdim - bdim
    return out


# certificates -------------------------------------------------------------

@dataclass
class Certificate:
    kind: str
    level: Fraction
    degree: int
    witness: dict            # cell -> coefficient (functional) for certificates
    lead: dict               # cell -> coefficient
    constraints: list        # source cell -> image vector (as cell dicts)
    complete: bool
    preimage: dict = None

    @property
    def is_certificate(self):
        return self.kind == "certificate"

    def verify(self):
        """Recheck the witness against the recorded system."""
        if self.kind != "certificate":
            return False
        if apply_functional(self.witness, self.lead) != 1:
            return False
        return all(apply_functional(self.witness, img) == 0 for img in self.constraints)


def nonboundary_certificate(c, z):
    """Decide whether the leading energy part of the cycle ``z`` is hit.

    ``z`` is a raw dict on cells.  A certificate is a functional vanishing on
    the image of the differential modulo higher energy and taking the value 1
    on the leading part; a refutation carries a preimage.
    """
    _check_ledger(c, set(c.degrees()))
    z = {k: v for k, v in z.items() if v}
    if not z:
        return Certificate("refutation", None, None, {}, {}, [], True, preimage={})
    zv = c.to_vector(z)
    if c.apply(z):
        raise ValueError("not a cycle in this window")
    degs = {c.degree[k] for k in z}
    if len(degs) != 1:
        raise ValueError("cycle is not homogeneous")
    deg = degs.pop()
    lvl = min(k[1] for k in z)
    lead = {k: v for k, v in z.items() if k[1] == lvl}
    srcs = [i for i, cell in enumerate(c.cells) if c.degree[cell] == deg - 1 and cell[1] <= lvl]
    cols = []
    for i in srcs:
        cols.append({k: v for k, v in c.columns[i].items() if c.cells[k][1] <= lvl})
    lead_v = {k: v for k, v in zv.items() if c.cells[k][1] == lvl}
    phi = left_witness(cols, lead_v)
    support = max(len(_letters(k[0])) for k in lead)
    # longer preimages cannot reach the support of the lead
    complete = c.window.budget(0, c.step) >= support + c.max_arity - 1
    constraints = [c.from_vector(col) for col in cols]
    if phi is None:
        x = solve_linear(cols, lead_v)
        pre = {c.cells[srcs[j]]: v for j, v in x.items()}
        return Certificate("refutation", lvl, deg, {}, lead, constraints, complete, preimage=pre)
    witness = {c.cells[k]: v for k, v in phi.items()}
    return Certificate("certificate", lvl, deg, witness, lead, constraints, complete)


def _letters(key):
    if isinstance(key, tuple) and len(key) == 2 and isinstance(key[1], tuple) and isinstance(key[0], int):
        return key[1]
    return key


# bar-type complexes --------------------------------------------------------

def words_up_to(n_letters, max_len, flavor, par, min_len=0):
    """Canonical words by length for a flavor."""
    from itertools import combinations_with_replacement, product

    from .words import CYCLIC, SYMMETRIC, is_cyclic_rep, is_sym_rep
    out = {}
    for L in range(min_len, max_len + 1):
        if flavor == SYMMETRIC:
            ws = [w for w in combinations_with_replacement(range(n_letters), L) if is_sym_rep(w, par)]
        else:
            ws = list(product(range(n_letters), repeat=L))
            if flavor == CYCLIC:
                ws = [w for w in ws if is_cyclic_rep(w, par)]
        out[L] = ws
    return out


def slots_for(a, window):
    return monoid_slots(a.slot_generators(window.mode), window.E_max)


def graded_cells(slots, budget_of, words_by_len, cap):
    """(word, lam, q) for every slot and every word within that slot's budget."""
    cells = []
    for lam, q in slots:
        b = budget_of(lam)
        for L in sorted(words_by_len):
            if L > b:
                break
            for w in words_by_len[L]:
                cells.append((w, lam, q))
                if len(cells) > cap:
                    raise ResourceError(len(cells), cap)
    return cells


def degree_fn(window, parity_of):
    if window.mode == "z2":
        return lambda cell: parity_of(cell[0]) % 2
    return lambda cell: parity_of(cell[0]) + 2 * cell[2]


def bar_complex(a, window, flavor="plain", min_len=0):
    """(B C, d-hat) or its cyclic / symmetric subcomplex on a window."""
    from .ainfinity import dhat_raw
    from .words import PLAIN, expand, project
    step = a.length_step()
    slots = slots_for(a, window)
    top = max(window.budget(lam, step) for lam, _ in slots)
    wl = words_up_to(a.size(), top, flavor, a.par, min_len)
    cells = graded_cells(slots, lambda lam: window.budget(lam, step), wl, window.effective_cap())
    par = a.par

    def op(raw):
        plain = expand(raw, flavor, par)
        res = dhat_raw(a, plain, window.E_max, window.mode, window.K_max)
        if flavor != PLAIN:
            res = project(res, flavor, par)
        return res

    def builder(w2):
        return bar_complex(a, w2, flavor, min_len)

    fmt = lambda w: a.fmt(w, flavor)
    return assemble(f"bar-{flavor}", window, cells, degree_fn(window, lambda w: sum(par[x] for x in w)),
                    op, fmt=fmt, builder=builder, max_arity=max(a.max_arity(), 1), step=step)
