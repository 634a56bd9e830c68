"""Chevalley-Eilenberg chains for L-infinity modules, the symmetric bar complex,
and its topological dual: a graded-commutative algebra of series in dual
variables with the transposed differential.

Dual series are Lambda-linear functionals written in orbit coordinates: the
monomial ``xs`` pairs to 1 with the orbit sum O(xs) and to 0 with every other
orbit.  Each series remembers where it is exact: coefficients with energy
below ``e_ceiling`` and monomials of length at most ``l_max``.
"""

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .ainfinity import SpecError, dhat_raw
from .hochschild import _gen_slots
from .linfinity import _unshuffles, lmodule_from_bimodule
from .novikov import NovikovScalar, format_scalar
from .window_homology import (Echelon, assemble, bar_complex, degree_fn, graded_cells, homology,
                              left_witness, monoid_slots, rank, solve_linear, words_up_to)
from .words import SYMMETRIC, expand, is_sym_rep, koszul_sign, project, sym_canonical, vadd, vaxpy


def _min_opt(*xs):
    xs = [x for x in xs if x is not None]
    return min(xs) if xs else None


# chain side ------------------------------------------------------------------

def cyclic_ce_complex(a, window):
    """(E_{>=1} C, d-hat): the symmetric-flavor bar complex without length 0."""
    c = bar_complex(a, window, SYMMETRIC, min_len=1)
    c.name = "cyclic-ce"
    return c


def cyclic_ce_homology(l, window, margin=None):
    return homology(cyclic_ce_complex(l.algebra, window), margin)


def bracket_coderivation(l, data, ceiling=None):
    """sum over unshuffles of [l(x_S), x_R] on orbit coordinates.

    An independent route to the symmetric bar differential, built from the
    bracket tables instead of the A-infinity operations.
    """
    par = l.par
    out = {}
    for (xs, lam, q), c in data.items():
        _, _, mult = sym_canonical(xs, par)
        if not mult:
            continue
        scale = Fraction(c) / mult
        degs = [par[x] for x in xs]
        for k in range(0, len(xs) + 1):
            if not l.tables.get(k):
                continue
            for S, R in _unshuffles(len(xs), k):
                s = koszul_sign(S + R, degs)
                rest = tuple(xs[i] for i in R)
                for ((o,), l2, q2), cc in l.bracket(tuple(xs[i] for i in S), lam, q, ceiling=ceiling).items():
                    rep, s2, m2 = sym_canonical((o,) + rest, par)
                    if m2:
                        vadd(out, (rep, l2, q2), scale * s * s2 * m2 * cc)
    return out


def _module_bracket(word, par, v, coeff, lam, q, out, scale):
    rep, s, mult = sym_canonical(word, par)
    if mult:
        vadd(out, ((v, rep), lam, q), scale * s * mult * coeff)


def ce_raw(mod, data, ceiling=None):
    """d^CE on cells ((v, xs), lam, q) meaning v (x) O(xs)."""
    a = mod.algebra
    par, mpar = a.par, mod.bimodule.mpar
    l = mod.brackets
    out = {}
    for ((v, xs), lam, q), c in data.items():
        _, _, mult = sym_canonical(xs, par)
        if not mult:
            continue
        scale = Fraction(c) / mult
        degs = [par[x] for x in xs]
        vsign = -1 if mpar[v] & 1 else 1
        for k in range(0, len(xs) + 1):
            for S, R in _unshuffles(len(xs), k):
                s = koszul_sign(S + R, degs)
                chosen = tuple(xs[i] for i in S)
                rest = tuple(xs[i] for i in R)
                for (o, l2, q2), cc in mod.eta(v, chosen, lam, q, ceiling=ceiling).items():
                    _module_bracket(rest, par, o, cc, l2, q2, out, scale * s)
                for ((o,), l2, q2), cc in l.bracket(chosen, lam, q, ceiling=ceiling).items():
                    _module_bracket((o,) + rest, par, v, cc, l2, q2, out, scale * s * vsign)
    return out


def ce_fmt(mod):
    a = mod.algebra
    mids = mod.bimodule.mids

    def fmt(key):
        v, xs = key
        inner = ",".join(a.ids[x] for x in xs)
        return f"{mids[v]}|[{inner}]"
    return fmt


def ce_complex(mod, window):
    """Windowed CE chains M[1] (x) E C of an L-infinity module."""
    a = mod.algebra
    m = mod.bimodule
    step = a.length_step()
    slots = monoid_slots(_gen_slots(a, m, window), window.E_max)
    top = max(window.budget(lam, step) for lam, _ in slots)
    sym = words_up_to(a.size(), max(top - 1, 0), SYMMETRIC, a.par, 0)
    words = {}
    for L in range(1, top + 1):
        words[L] = [(v, xs) for xs in sym.get(L - 1, []) for v in range(m.size())]
    cells = graded_cells(slots, lambda lam: window.budget(lam, step), words, window.effective_cap())
    par, mpar = a.par, m.mpar

    def parity(key):
        v, xs = key
        return mpar[v] + sum(par[x] for x in xs)

    def op(raw):
        return ce_raw(mod, raw, window.E_max)

    def builder(w2):
        return ce_complex(mod, w2)

    return assemble("ce", window, cells, degree_fn(window, parity), op, fmt=ce_fmt(mod),
                    builder=builder, max_arity=max(a.max_arity(), 1), step=step)


def ce_chain_homology(l, mod, window, margin=None):
    if l is not None and l.algebra is not mod.algebra:
        raise SpecError("brackets and module belong to different algebras")
    return homology(ce_complex(mod, window), margin)


def free_symmetric_counts(a, L_max, min_len=1):
    """Graded-symmetric monomial counts by degree from the generating function.

    Odd shifted-degree letters appear at most once; counts are by total
    shifted degree and length 1..L_max.
    """
    # polynomial in (length, degree)
    poly = {(0, 0): 1}
    for x in range(a.size()):
        d = a.par[x]
        new = {}
        for (n, deg), c in poly.items():
            powers = [0, 1] if d & 1 else range(0, L_max - n + 1)
            for p in powers:
                if n + p > L_max:
                    break
                key = (n + p, deg + p * d)
                new[key] = new.get(key, 0) + c
        poly = new
    out = {}
    for (n, deg), c in poly.items():
        if n >= min_len:
            out[deg] = out.get(deg, 0) + c
    return out


# dual series -----------------------------------------------------------------

@dataclass
class DualSeries:
    """Sparse functional {(monomial, lam, q): coeff}.

    Monomials are sorted symmetric words for the algebra dual, and
    ``(v, xs)`` pairs for the dual of CE chains of ``module`` (an
    L-infinity module).
    """
    algebra: object
    terms: dict = field(default_factory=dict)
    e_floor: Fraction = Fraction(0)
    e_ceiling: object = None
    l_max: object = None
    module: object = None

    def __post_init__(self):
        self.e_floor = Fraction(self.e_floor)
        self.terms = self._clip(self.terms)

    def _clip(self, terms):
        out = {}
        for (mono, lam, q), c in terms.items():
            if not c:
                continue
            if lam < self.e_floor:
                raise ValueError(f"energy {lam} below the series floor {self.e_floor}")
            if self.e_ceiling is not None and lam >= self.e_ceiling:
                continue
            if self.l_max is not None and self.length(mono) > self.l_max:
                continue
            out[(mono, lam, q)] = Fraction(c)
        return out

    def length(self, mono):
        return len(mono[1]) + 1 if self.module is not None else len(mono)

    def like(self, terms, **kw):
        args = dict(e_floor=self.e_floor, e_ceiling=self.e_ceiling, l_max=self.l_max, module=self.module)
        args.update(kw)
        if args["e_floor"] is not None:
            lo = min((k[1] for k in terms if terms[k]), default=args["e_floor"])
            args["e_floor"] = min(args["e_floor"], lo)
        return DualSeries(self.algebra, terms, **args)

    def is_zero(self):
        return not self.terms

    def __add__(self, other):
        t = dict(self.terms)
        vaxpy(t, other.terms)
        return self.like(t, e_floor=min(self.e_floor, other.e_floor),
                         e_ceiling=_min_opt(self.e_ceiling, other.e_ceiling),
                         l_max=_min_opt(self.l_max, other.l_max))

    def __neg__(self):
        return self.like({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return self.like({k: c * v for k, v in self.terms.items()})

    def valuation(self):
        return min((k[1] for k in self.terms), default=None)

    def part(self, pred):
        return self.like({k: c for k, c in self.terms.items() if pred(k)})

    def restricted(self, e_ceiling=None, l_max=None):
        return self.like(dict(self.terms), e_ceiling=_min_opt(self.e_ceiling, e_ceiling),
                         l_max=_min_opt(self.l_max, l_max))

    def equal_within(self, other, e_ceiling=None, l_max=None):
        c = _min_opt(self.e_ceiling, other.e_ceiling, e_ceiling)
        n = _min_opt(self.l_max, other.l_max, l_max)
        return not (self.restricted(c, n) - other.restricted(c, n)).terms

    def parity(self, key):
        mono, _, _ = key
        a = self.algebra
        if self.module is not None:
            v, xs = mono
            return (self.module.bimodule.mpar[v] + sum(a.par[x] for x in xs)) & 1
        return sum(a.par[x] for x in mono) & 1

    def coefficient_of(self, mono):
        ts = [(c, lam, q) for (m, lam, q), c in self.terms.items() if m == mono]
        return NovikovScalar(ts, e_floor=min([self.e_floor] + [t[1] for t in ts]))

    def format(self):
        by = {}
        for (mono, lam, q), c in self.terms.items():
            by.setdefault(mono, []).append((c, lam, q))
        parts = []
        for mono in sorted(by, key=lambda m: (self.length(m), m)):
            s = NovikovScalar(by[mono], e_floor=min(t[1] for t in by[mono]))
            parts.append(f"({format_scalar(s)})*{self._mono_text(mono)}")
        return " + ".join(parts) if parts else "0"

    def _mono_text(self, mono):
        ids = self.algebra.ids
        if self.module is not None:
            v, xs = mono
            return "*".join([f"y_{self.module.bimodule.mids[v]}"] + [f"x_{ids[x]}" for x in xs])
        if not mono:
            return "1"
        return "*".join(f"x_{ids[x]}" for x in mono)

    def __repr__(self):
        return f"DualSeries({self.format()})"


def dual_one(a, **kw):
    return DualSeries(a, {((), Fraction(0), 0): Fraction(1)}, **kw)


def dual_variable(a, letter, coeff=1, lam=0, q=0, **kw):
    x = a.index[letter] if isinstance(letter, str) else letter
    lam = Fraction(lam)
    kw.setdefault("e_floor", min(lam, Fraction(0)))
    return DualSeries(a, {((x,), lam, q): Fraction(coeff)}, **kw)


_SPLIT_CACHE = {}


def _splits(par, w):
    """Delta O(w) = sum c * O(u1) (x) O(u2), by deconcatenation then projection."""
    key = (tuple(par), w)
    got = _SPLIT_CACHE.get(key)
    if got is not None:
        return got
    plain = expand({(w, Fraction(0), 0): Fraction(1)}, SYMMETRIC, par)
    acc = {}
    for (u, _, _), c in plain.items():
        for i in range(len(u) + 1):
            u1, u2 = u[:i], u[i:]
            if is_sym_rep(u1, par) and is_sym_rep(u2, par):
                vadd(acc, (u1, u2), c)
    _SPLIT_CACHE[key] = acc
    return acc


def _product_table(par, A, B):
    """O(A)* . O(B)* as {w: coeff}; supported on the sorted union."""
    w, s, mult = sym_canonical(A + B, par)
    if not mult:
        return {}
    c = _splits(par, w).get((A, B), 0)
    if not c:
        return {}
    sign = -1 if (sum(par[x] for x in A) * sum(par[x] for x in B)) & 1 else 1
    return {w: sign * c}


def dual_product(f, g):
    """Product dual to deconcatenation; (f g)(u1 u2) = (-1)^{|g||u1|} f(u1) g(u2)."""
    if f.algebra is not g.algebra:
        raise SpecError("series over different algebras")
    if g.module is not None:
        raise SpecError("module series act on the right only")
    par = f.algebra.par
    e_floor = f.e_floor + g.e_floor
    ceil = _min_opt(None if f.e_ceiling is None else f.e_ceiling + g.e_floor,
                    None if g.e_ceiling is None else g.e_ceiling + f.e_floor)
    lmax = _min_opt(f.l_max, g.l_max)
    out = {}
    for (A, l1, q1), c1 in f.terms.items():
        for (B, l2, q2), c2 in g.terms.items():
            lam = l1 + l2
            if ceil is not None and lam >= ceil:
                continue
            if f.module is not None:
                v, xs = A
                if lmax is not None and len(xs) + len(B) + 1 > lmax:
                    continue
                # y_v x_xs . x_B: the module letter stays in front
                vpar = f.module.bimodule.mpar[v]
                for w, cc in _product_table(par, xs, B).items():
                    s = -1 if (vpar * sum(par[x] for x in B)) & 1 else 1
                    vadd(out, ((v, w), lam, q1 + q2), s * cc * c1 * c2)
            else:
                if lmax is not None and len(A) + len(B) > lmax:
                    continue
                for w, cc in _product_table(par, A, B).items():
                    vadd(out, (w, lam, q1 + q2), cc * c1 * c2)
    return DualSeries(f.algebra, out, e_floor=e_floor, e_ceiling=ceil, l_max=lmax, module=f.module)


def _dhat_orbit(a, w, ceiling, mode):
    """d-hat of the orbit cell O(w) in orbit coordinates."""
    plain = expand({(w, Fraction(0), 0): Fraction(1)}, SYMMETRIC, a.par)
    return project(dhat_raw(a, plain, ceiling, mode), SYMMETRIC, a.par)


def _raises_length(a, mode):
    return bool(a.mtab(mode).get(0))


def dual_differential(l, f, window):
    """(d-hat* f)(O(w)) = f(d-hat O(w)) for every window monomial w."""
    a = l.algebra
    mode = window.mode
    up = 1 if _raises_length(a, mode) else 0
    lmax = window.L_max if f.l_max is None else min(window.L_max, f.l_max - up)
    ceil = _min_opt(window.E_max, f.e_ceiling)
    if f.module is not None:
        return _ce_dual_differential(l, f, window, lmax, ceil)
    by_mono = {}
    for (mono, lam, q), c in f.terms.items():
        by_mono.setdefault(mono, []).append((lam, q, c))
    out = {}
    span = ceil - f.e_floor if ceil is not None else None
    for n in range(0, lmax + 1):
        for w in words_up_to(a.size(), n, SYMMETRIC, a.par, n)[n]:
            for (u, beta, qb), c in _dhat_orbit(a, w, span, mode).items():
                for lam, q, cf in by_mono.get(u, ()):
                    if ceil is not None and lam + beta >= ceil:
                        continue
                    vadd(out, (w, lam + beta, q + qb), c * cf)
    return DualSeries(a, out, e_floor=f.e_floor, e_ceiling=ceil, l_max=lmax)


def _ce_dual_differential(l, f, window, lmax, ceil):
    mod = f.module
    a = l.algebra
    by_mono = {}
    for (mono, lam, q), c in f.terms.items():
        by_mono.setdefault(mono, []).append((lam, q, c))
    out = {}
    span = ceil - f.e_floor if ceil is not None else None
    for n in range(0, lmax):
        for xs in words_up_to(a.size(), n, SYMMETRIC, a.par, n)[n]:
            for v in range(mod.bimodule.size()):
                for (u, beta, qb), c in ce_raw(mod, {((v, xs), Fraction(0), 0): 1}, span).items():
                    for lam, q, cf in by_mono.get(u, ()):
                        if ceil is not None and lam + beta >= ceil:
                            continue
                        vadd(out, ((v, xs), lam + beta, q + qb), c * cf)
    return DualSeries(a, out, e_floor=f.e_floor, e_ceiling=ceil, l_max=lmax, module=mod)


def module_dual(mod, terms, **kw):
    """A series on the dual of CE chains of ``mod``."""
    return DualSeries(mod.algebra, terms, module=mod, **kw)


def right_act(phi, g):
    """phi . g for a CE-module series phi and an algebra series g."""
    return dual_product(phi, g)


def leibniz_residual(l, f, g, window):
    """d(f g) - (-1)^|g| (d f) g - f (d g); the transpose of d-hat acts from the right."""
    lhs = dual_differential(l, dual_product(f, g), window)
    rhs = dual_product(f, dual_differential(l, g, window))
    for p in (0, 1):
        gp = g.part(lambda k: g.parity(k) == p)
        term = dual_product(dual_differential(l, f, window), gp)
        rhs = rhs + (term if p == 0 else -term)
    c = _min_opt(lhs.e_ceiling, rhs.e_ceiling)
    n = _min_opt(lhs.l_max, rhs.l_max)
    return lhs.restricted(c, n) - rhs.restricted(c, n)


def evaluate(f, raw):
    """Pair a series with a chain given in orbit coordinates; returns raw Novikov terms."""
    out = {}
    for (w, beta, qb), c in raw.items():
        for (mono, lam, q), cf in f.terms.items():
            if mono == w:
                vadd(out, (lam + beta, q + qb), c * cf)
    return out


# vanishing certificates ---------------------------------------------------------

@dataclass
class VanishingCertificate:
    x: DualSeries
    h: DualSeries
    inverse: DualSeries          # sum_j (-1)^j h^j, truncated by length
    contraction: DualSeries      # x . inverse
    l: object
    window: object

    def witness(self, y):
        """(-1)^|y| x h' y, split over the parity parts of y."""
        even = y.part(lambda k: y.parity(k) == 0)
        odd = y.part(lambda k: y.parity(k) == 1)
        return dual_product(self.contraction, even) - dual_product(self.contraction, odd)

    def check(self, y):
        """d-hat*(x h' y) == y where both sides are exact."""
        z = self.witness(y)
        dz = dual_differential(self.l, z, self.window)
        return dz.equal_within(y)


@dataclass
class Rejection:
    reason: str
    x: DualSeries
    h: DualSeries = None

    def __bool__(self):
        return False


def vanishing_certificate(l, x, window):
    """Accept x when d-hat* x = 1 + h with h of positive length and energy >= 0."""
    a = l.algebra
    dx = dual_differential(l, x, window)
    one = dual_one(a)
    h = dx - one
    const = h.part(lambda k: len(k[0]) == 0)
    if const.terms:
        return Rejection(f"d-hat* x has length-0 part 1 + {const.format()}", x, h)
    neg = h.part(lambda k: k[1] < 0)
    if neg.terms:
        return Rejection(f"h has negative energy terms {neg.format()}", x, h)
    # geometric series; h has positive length so h^j dies past the length bound
    inv = dual_one(a, e_ceiling=h.e_ceiling, l_max=h.l_max)
    power = dual_one(a, e_ceiling=h.e_ceiling, l_max=h.l_max)
    sign = 1
    top = h.l_max if h.l_max is not None else window.L_max
    for _ in range(top):
        power = dual_product(power, h)
        if power.is_zero():
            break
        sign = -sign
        inv = inv + power.scale(sign)
    contraction = dual_product(x, inv)
    return VanishingCertificate(x, h, inv, contraction, l, window)


@dataclass
class ObstructionClass:
    label: str
    energy: Fraction
    maslov: int
    cycle: dict                  # basis index -> coeff
    is_cycle: bool
    exact: bool
    primitive: dict = None


@dataclass
class ObstructionReport:
    status: str                  # "no obstruction" | "all exact" | "candidate"
    classes: list
    candidate: DualSeries = None
    certificate: object = None

    def summary(self):
        if self.status == "no obstruction":
            return "no obstruction: m0 = 0"
        if self.status == "all exact":
            return "no certificate: all primary obstructions exact"
        ok = isinstance(self.certificate, VanishingCertificate)
        return f"candidate {self.candidate.format()}: " + ("certificate" if ok else f"rejected ({self.certificate.reason})")


def _mbar1_columns(a, mode):
    cols = []
    for i in range(a.size()):
        col = {}
        for o, c, lam, q in a.mtab(mode).get(1, {}).get((i,), []):
            if lam == 0:
                vadd(col, o, c)
        cols.append(col)
    return cols


def obstruction_extract(a, window, l=None):
    """Primary obstructions from the lowest-energy classes of m0."""
    from .linfinity import symmetrize_algebra
    mode = window.mode
    m0 = a.mtab(mode).get(0, {}).get((), [])
    if not m0:
        return ObstructionReport("no obstruction", [])
    lam0 = min(t[2] for t in m0)
    by_class = {}
    for o, c, lam, q in m0:
        if lam == lam0:
            vadd(by_class.setdefault(q, {}), o, c)
    cols = _mbar1_columns(a, mode)
    labels = {(e, mu // 2 if mode != "z2" else 0): lab for lab, (e, mu) in a.classes.items()}
    classes = []
    for q, vec in sorted(by_class.items()):
        img = {}
        for i, c in vec.items():
            vaxpy(img, cols[i], c)
        pre = solve_linear(cols, vec)
        classes.append(ObstructionClass(labels.get((lam0, q), "?"), lam0, 2 * q, vec,
                                        not img, pre is not None, pre))
    if all(c.exact for c in classes):
        return ObstructionReport("all exact", classes)
    target = next(c for c in classes if not c.exact)
    phi = left_witness(cols, target.cycle)
    q = target.maslov // 2
    terms = {((i,), -lam0, -q): c for i, c in phi.items()}
    y = DualSeries(a, terms, e_floor=-lam0)
    if l is None:
        l = symmetrize_algebra(a, mode=mode)
    cert = vanishing_certificate(l, y, window)
    return ObstructionReport("candidate", classes, y, cert)


# sampling dual cocycles -------------------------------------------------------

def _dual_coordinates(a, window, module=None):
    slots = monoid_slots(a.slot_generators(window.mode), window.E_max)
    coords = []
    if module is None:
        for n in range(0, window.L_max + 1):
            for w in words_up_to(a.size(), n, SYMMETRIC, a.par, n)[n]:
                coords.extend((w, lam, q) for lam, q in slots)
    else:
        for n in range(0, window.L_max):
            for xs in words_up_to(a.size(), n, SYMMETRIC, a.par, n)[n]:
                for v in range(module.size()):
                    coords.extend(((v, xs), lam, q) for lam, q in slots)
    return coords


def dual_cocycles(l, window, mod=None, parity=None):
    """Basis of cocycles among series with energies in the window slots.

    Exactness is the window: energies below E_max and full window length.
    """
    a = l.algebra
    module = mod.bimodule if mod is not None else None
    coords = _dual_coordinates(a, window, module)
    if parity is not None:
        def par_of(k):
            mono = k[0]
            if module is not None:
                v, xs = mono
                return (module.mpar[v] + sum(a.par[x] for x in xs)) & 1
            return sum(a.par[x] for x in mono) & 1
        coords = [k for k in coords if par_of(k) == parity]
    lmax = window.L_max
    columns = []
    for k in coords:
        if module is None:
            f = DualSeries(a, {k: Fraction(1)}, e_ceiling=window.E_max, l_max=lmax)
        else:
            f = module_dual(mod, {k: Fraction(1)}, e_ceiling=window.E_max, l_max=lmax)
        columns.append(dual_differential(l, f, window).terms)
    # nullspace of the coordinate map
    rows = Echelon(track=True)
    basis = []
    for j, col in enumerate(columns):
        rem, combo, p = rows.reduce(dict(col), {j: Fraction(1)})
        if p is None:
            basis.append({coords[i]: c for i, c in combo.items() if c})
        else:
            rows.add(col, j)
    return coords, basis


def sample_cocycles(l, window, n, seed=0, mod=None, parity=0):
    _, basis = dual_cocycles(l, window, mod, parity)
    rng = random.Random(seed)
    out = []
    if not basis:
        return out
    a = l.algebra
    for _ in range(n):
        acc = {}
        for b in basis:
            c = rng.randint(-3, 3)
            if c:
                vaxpy(acc, b, c)
        if not acc:
            acc = dict(basis[rng.randrange(len(basis))])
        if mod is None:
            out.append(DualSeries(a, acc, e_ceiling=window.E_max, l_max=window.L_max))
        else:
            out.append(module_dual(mod, acc, e_ceiling=window.E_max, l_max=window.L_max))
    return out


@dataclass
class WitnessRecord:
    index: int
    cocycle: DualSeries
    witness: DualSeries
    verified: bool


def verify_cyclic_ce_vanishing(cert, window, samples=20, seed=0):
    """Sample dual cocycles of both parities and check each against its witness."""
    out = []
    half = (samples + 1) // 2
    for parity, n in ((0, half), (1, samples - half)):
        for y in sample_cocycles(cert.l, window, n, seed + parity, parity=parity):
            z = cert.witness(y)
            dz = dual_differential(cert.l, z, window)
            out.append(WitnessRecord(len(out), y, z, dz.equal_within(y)))
    return out


def ce_module_vanishing(mod, cert, window, samples=20, seed=0):
    """Contract sampled CE-module cocycles with the right action of x h'."""
    if not isinstance(cert, VanishingCertificate):
        raise SpecError("no vanishing certificate for this algebra")
    if mod.bimodule.size() == 0:
        return []
    out = []
    half = (samples + 1) // 2
    # d(phi . u) = (d phi) . u + phi . d u with u = x h' and d u = 1
    for parity, n in ((0, half), (1, samples - half)):
        for phi in sample_cocycles(cert.l, window, n, seed + parity, mod, parity):
            psi = right_act(phi, cert.contraction)
            d = dual_differential(cert.l, psi, window)
            out.append(WitnessRecord(len(out), phi, psi, d.equal_within(phi)))
    return out


def lmodule_for(m, mode="z"):
    return lmodule_from_bimodule(m, mode=mode)


# window duality -----------------------------------------------------------------

def _transpose_rank(c, src, dst):
    """Rank of the rows of d: C_src -> C_dst, read as functionals on C_src."""
    dst_set = set(dst)
    rows = {}
    for j in src:
        for i, v in c.columns[j].items():
            if i in dst_set:
                rows.setdefault(i, {})[j] = v
    return rank(list(rows.values()))


def dual_dims(c, margin=0, degrees=None):
    """Per-degree cohomology dims of the transposed window complex.

    With a margin the dual statement is used: the rank of the pairing between
    cocycles of the wider window and inner cycles.
    """
    from .window_homology import _by_degree, _check_ledger
    if c.quotient:
        raise SpecError("duality is computed for complexes without a quotient")
    if degrees is None:
        degrees = [d for d in c.degrees() if c.window.in_degrees(d)]
    _check_ledger(c, set(degrees))
    if margin and c.builder is not None:
        outer = c.builder(c.window.widened(margin))
        _check_ledger(outer, set(degrees))
        return _dual_robust(c, outer, degrees)
    groups = _by_degree(c)
    out = {}
    for d in degrees:
        cells = groups.get(d, [])
        if not cells:
            continue
        # cocycles: functionals on C_d killing d(C_{d-1}); coboundaries: f o d from C_{d+1}
        zc = len(cells) - _transpose_rank(c, groups.get(d - 1, []), cells)
        bc = _transpose_rank(c, cells, groups.get(d + 1, []))
        out[d] = zc - bc
    return out


def _nullspace_rows(rows, keys):
    """Basis of {f on keys : f . row = 0 for every row}."""
    e = Echelon()
    for r in rows:
        if r:
            e.add(dict(r))
    pivots = {}
    for p, (row, _) in e.rows.items():
        pivots[p] = row
    free = [k for k in keys if k not in pivots]
    basis = []
    for fk in free:
        f = {fk: Fraction(1)}
        for p in sorted(pivots, reverse=True):
            row = pivots[p]
            s = sum((row[k] * f.get(k, 0) for k in row if k != p), Fraction(0))
            if s:
                f[p] = -s / row[p]
        basis.append(f)
    return basis


def _dual_robust(inner, outer, degrees):
    from .window_homology import _by_degree
    inner_idx = {outer.index[cell] for cell in inner.cells if cell in outer.index}
    og = _by_degree(outer)
    out = {}
    for d in degrees:
        cells = og.get(d, [])
        cin = [i for i in cells if i in inner_idx]
        if not cin:
            continue
        # outer cocycles: functionals on C_d vanishing on d(C_{d-1})
        bnd = [outer.columns[j] for j in og.get(d - 1, [])]
        cocycles = _nullspace_rows(bnd, cells)
        # inner cycles: combinations of inner cells with zero outer differential
        cyc = _nullspace_rows(_column_rows(outer, cin), cin)
        pairing = []
        for f in cocycles:
            row = {}
            for t, z in enumerate(cyc):
                v = sum((f.get(k, 0) * c for k, c in z.items()), Fraction(0))
                if v:
                    row[t] = v
            pairing.append(row)
        out[d] = rank(pairing)
    return out


def _column_rows(c, cols):
    """Rows of the matrix restricted to the given source columns."""
    rows = {}
    for j in cols:
        for i, v in c.columns[j].items():
            rows.setdefault(i, {})[j] = v
    return list(rows.values())


def duality_check(c, margin=0, degrees=None):
    """(chain dims, dual dims, agree) per degree."""
    rep = homology(c, margin, degrees)
    chain = {d: dd.homology for d, dd in rep.dims.items()}
    dual = dual_dims(c, rep.margin, list(chain))
    return chain, dual, chain == {d: dual.get(d, 0) for d in chain}
