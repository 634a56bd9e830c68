"""Tensor words, Koszul signs, cyclic and symmetric orbits, sparse vectors.

Letters are small integers indexing a graded basis; every sign uses the
shifted degree ``deg - 1``.  A vector is a dict ``(word, lam, q) -> Fraction``
so that each key is one coordinate of the Q-linearization.
"""

from fractions import Fraction
from itertools import permutations
from math import factorial

from .novikov import NovikovScalar

PLAIN, CYCLIC, SYMMETRIC, MODULE = "plain", "cyclic", "symmetric", "module"
FLAVORS = (PLAIN, CYCLIC, SYMMETRIC, MODULE)


# raw dict helpers ----------------------------------------------------------

def vadd(dst, key, c):
    v = dst.get(key, 0) + c
    if v:
        dst[key] = v
    else:
        dst.pop(key, None)


def vaxpy(dst, src, c=1):
    for k, v in src.items():
        vadd(dst, k, c * v)
    return dst


def vclean(d):
    return {k: v for k, v in d.items() if v}


def vsub(a, b):
    out = dict(a)
    return vaxpy(out, b, -1)


# signs ---------------------------------------------------------------------

def koszul_sign(sigma, shifted_degrees):
    """Sign of sigma . (x_1 ... x_k) = +- x_sigma(1) ... x_sigma(k).

    ``sigma[i]`` is the (0-based) index of the letter landing in slot i.
    Each pair of letters whose order is reversed contributes the product
    of their shifted degrees.
    """
    if len(sigma) != len(shifted_degrees):
        raise ValueError("permutation and degree list differ in length")
    e = 0
    n = len(sigma)
    for i in range(n):
        a = sigma[i]
        if not shifted_degrees[a] & 1:
            continue
        for j in range(i + 1, n):
            b = sigma[j]
            if a > b and shifted_degrees[b] & 1:
                e += 1
    return -1 if e & 1 else 1


def compose(sigma, tau):
    """Permutation p with act(p, w) == act(sigma, act(tau, w))."""
    return tuple(tau[s] for s in sigma)


def reorder_sign(word, target_order, par):
    """Koszul sign for rearranging ``word`` into ``[word[i] for i in target_order]``."""
    return koszul_sign(target_order, [par[x] for x in word])


def sort_sign(word, par, key=None):
    """(sorted word, sign); the sort is stable so equal letters never cross."""
    order = sorted(range(len(word)), key=(lambda i: word[i]) if key is None else (lambda i: key(word[i])))
    return tuple(word[i] for i in order), reorder_sign(word, order, par)


def rotate_right(word, par):
    """t(x0 ... xn) = (-1)^{|xn|'(|x0|'+...+|x_{n-1}|')} xn x0 ... x_{n-1}."""
    if len(word) <= 1:
        return word, 1
    last = word[-1]
    s = 1
    if par[last] & 1:
        if sum(par[x] for x in word[:-1]) & 1:
            s = -1
    return (last,) + word[:-1], s


def rotations(word, par):
    """All t^j(word) for j = 0..n-1 as (word, sign)."""
    out = [(word, 1)]
    cur, s = word, 1
    for _ in range(len(word) - 1):
        cur, t = rotate_right(cur, par)
        s *= t
        out.append((cur, s))
    return out


# cyclic orbits -------------------------------------------------------------

def cyclic_canonical(word, par):
    """Return (rep, sign, mult) with N(word) = sign * mult * O(rep).

    ``O(rep)`` is the signed orbit sum with coefficient +1 on ``rep``;
    ``mult`` is 0 for self-cancelling orbits such as L*L with L odd.
    """
    n = len(word)
    if n <= 1:
        return word, 1, 1
    rots = rotations(word, par)
    rep = min(r for r, _ in rots)
    sign_at = [s for r, s in rots if r == rep]
    # word with rep at rotation j: t^j(word) = s rep
    s0 = sign_at[0]
    if any(s != s0 for s in sign_at):
        return rep, 1, 0
    # distinct rotations of rep
    period = n // len(sign_at)
    return rep, s0, n // period


def cyclic_orbit(rep, par):
    """Expansion of O(rep) as {word: sign}; empty when self-cancelling."""
    out = {}
    for r, s in rotations(rep, par):
        if r in out:
            if out[r] != s:
                return {}
            continue
        out[r] = s
    return out


def is_cyclic_rep(word, par):
    rep, _, mult = cyclic_canonical(word, par)
    return mult != 0 and rep == word


# symmetric orbits ----------------------------------------------------------

def sym_canonical(word, par):
    """Return (rep, sign, mult) with [word] = sign * mult * O(rep)."""
    rep, s = sort_sign(word, par)
    mult = 1
    i = 0
    n = len(rep)
    while i < n:
        j = i
        while j < n and rep[j] == rep[i]:
            j += 1
        if j - i > 1:
            if par[rep[i]] & 1:
                return rep, 1, 0
            mult *= factorial(j - i)
        i = j
    return rep, s, mult


def sym_orbit(rep, par):
    """Expansion of O(rep): distinct rearrangements with Koszul signs."""
    out = {}
    n = len(rep)
    for perm in permutations(range(n)):
        w = tuple(rep[i] for i in perm)
        if w in out:
            continue
        out[w] = reorder_sign(rep, perm, par)
    # odd repeated letters cancel
    for i in range(n - 1):
        if rep[i] == rep[i + 1] and par[rep[i]] & 1:
            return {}
    return out


def is_sym_rep(word, par):
    rep, _, mult = sym_canonical(word, par)
    return mult != 0 and rep == word


# module-marked words -------------------------------------------------------
# key: (mark, letters); letters[mark] indexes the module basis.

def module_parities(key, par, mpar):
    mark, letters = key
    return [mpar[x] if i == mark else par[x] for i, x in enumerate(letters)]


def module_rotate(key, j, par, mpar):
    """Apply t^j to a module-marked word, tracking the mark."""
    mark, letters = key
    n = len(letters)
    if n == 0:
        return key, 1
    j %= n
    degs = module_parities(key, par, mpar)
    # t^j moves the last j letters to the front
    order = tuple(list(range(n - j, n)) + list(range(0, n - j)))
    s = koszul_sign(order, degs)
    new_letters = tuple(letters[i] for i in order)
    return ((mark + j) % n, new_letters), s


# flavor-level conversions on raw dicts -------------------------------------

def expand(data, flavor, par):
    """Orbit-coordinate dict -> plain dict."""
    if flavor in (PLAIN, MODULE):
        return dict(data)
    orbit = cyclic_orbit if flavor == CYCLIC else sym_orbit
    out = {}
    cache = {}
    for (w, lam, q), c in data.items():
        o = cache.get(w)
        if o is None:
            o = cache[w] = orbit(w, par)
        for u, s in o.items():
            vadd(out, (u, lam, q), s * c)
    return out


def project(data, flavor, par):
    """Plain dict lying in a fixed subspace -> orbit coordinates."""
    if flavor in (PLAIN, MODULE):
        return dict(data)
    test = is_cyclic_rep if flavor == CYCLIC else is_sym_rep
    out = {}
    cache = {}
    for key, c in data.items():
        w = key[0]
        ok = cache.get(w)
        if ok is None:
            ok = cache[w] = test(w, par)
        if ok:
            out[key] = c
    return out


def symmetrize_into(data, flavor, par):
    """Apply N (cyclic) or the full S_k sum (symmetric) and canonicalize."""
    canon = cyclic_canonical if flavor == CYCLIC else sym_canonical
    out = {}
    for (w, lam, q), c in data.items():
        rep, s, mult = canon(w, par)
        if mult:
            vadd(out, (rep, lam, q), s * mult * c)
    return out


def fixed_defect(plain, flavor, par):
    """Part of a plain vector that is not the expansion of its projection."""
    back = expand(project(plain, flavor, par), flavor, par)
    return vsub(plain, back)


# the public vector type ----------------------------------------------------

class SignedVector:
    """Sparse combination of words with Novikov coefficients.

    ``data`` maps ``(word, lam, q)`` to a nonzero Fraction.  ``par`` is the
    list of shifted degrees of the algebra letters and ``mpar`` that of the
    module letters (module flavor only).
    """

    __slots__ = ("data", "flavor", "par", "mpar", "e_ceiling", "e_floor")

    def __init__(self, data=None, flavor=PLAIN, par=(), mpar=(), e_ceiling=None, e_floor=0):
        if flavor not in FLAVORS:
            raise ValueError(f"unknown flavor {flavor!r}")
        self.flavor = flavor
        self.par = par
        self.mpar = mpar
        self.e_ceiling = None if e_ceiling is None else Fraction(e_ceiling)
        self.e_floor = Fraction(e_floor)
        d = {}
        for (w, lam, q), c in (data or {}).items():
            lam = Fraction(lam)
            if self.e_ceiling is not None and lam >= self.e_ceiling:
                continue
            vadd(d, (w, lam, q), Fraction(c))
        self.data = d

    @classmethod
    def word(cls, w, coeff=1, lam=0, q=0, **kw):
        return cls({(tuple(w) if kw.get("flavor") != MODULE else w, lam, q): coeff}, **kw)

    def like(self, data, flavor=None):
        return SignedVector(data, flavor or self.flavor, self.par, self.mpar, self.e_ceiling, self.e_floor)

    def is_zero(self):
        return not self.data

    def __bool__(self):
        return bool(self.data)

    def __eq__(self, other):
        if not isinstance(other, SignedVector):
            return NotImplemented
        return self.flavor == other.flavor and self.data == other.data

    def __add__(self, other):
        return self.like(vaxpy(dict(self.data), other.data))

    def __sub__(self, other):
        return self.like(vaxpy(dict(self.data), other.data, -1))

    def __neg__(self):
        return self.like({k: -v for k, v in self.data.items()})

    def scale(self, c, lam=0, q=0):
        lam = Fraction(lam)
        return self.like({(w, l + lam, p + q): c * v for (w, l, p), v in self.data.items()})

    def by_word(self):
        """Group coordinates into {word: NovikovScalar}."""
        groups = {}
        for (w, lam, q), c in self.data.items():
            groups.setdefault(w, []).append((c, lam, q))
        return {w: NovikovScalar(t, self.e_ceiling, self.e_floor) for w, t in groups.items()}

    def valuation(self):
        if not self.data:
            return float("inf")
        return min(lam for _, lam, _ in self.data)

    def words(self):
        return sorted({w for w, _, _ in self.data})

    def __repr__(self):
        return f"SignedVector({self.flavor}, {len(self.data)} terms)"


def act(sigma, v):
    """Permutation action on a plain vector, word by word."""
    out = {}
    for (w, lam, q), c in v.data.items():
        if len(sigma) != len(w):
            raise ValueError("permutation size does not match word length")
        s = koszul_sign(sigma, [v.par[x] for x in w])
        vadd(out, (tuple(w[i] for i in sigma), lam, q), s * c)
    return v.like(out)


def cyclic_symmetrize(v):
    return v.like(symmetrize_into(v.data, CYCLIC, v.par), CYCLIC)


def full_symmetrize(v):
    return v.like(symmetrize_into(v.data, SYMMETRIC, v.par), SYMMETRIC)


def to_plain(v):
    if v.flavor in (PLAIN, MODULE):
        return v
    return v.like(expand(v.data, v.flavor, v.par), PLAIN)


def module_cycle_action(j, v):
    out = {}
    for (key, lam, q), c in v.data.items():
        k2, s = module_rotate(key, j, v.par, v.mpar)
        vadd(out, (k2, lam, q), s * c)
    return v.like(out)


# word literals -------------------------------------------------------------

def format_word(word, names, flavor=PLAIN, mnames=None):
    if flavor == MODULE:
        mark, letters = word
        parts = [f"[{mnames[x]}]" if i == mark else names[x] for i, x in enumerate(letters)]
    else:
        parts = [names[x] for x in word]
    body = "*".join(parts) if parts else "1"
    if flavor == CYCLIC:
        return "cyc:" + body
    if flavor == SYMMETRIC:
        return "sym:" + body
    return body


def parse_word(text, index, mindex=None):
    """Parse ``x1*x2``, ``cyc:...``, ``sym:...`` or ``x1*[m]*x2``.

    Returns (flavor, word) with word in the internal form of that flavor.
    """
    flavor = PLAIN
    s = text.strip()
    if s.startswith("cyc:"):
        flavor, s = CYCLIC, s[4:]
    elif s.startswith("sym:"):
        flavor, s = SYMMETRIC, s[4:]
    if s in ("", "1"):
        return flavor, ()
    toks = [t.strip() for t in s.split("*")]
    mark = None
    letters = []
    for i, t in enumerate(toks):
        if t.startswith("[") and t.endswith("]"):
            if mark is not None:
                raise ValueError(f"two module marks in {text!r}")
            mark = i
            letters.append((mindex or index)[t[1:-1]])
        else:
            if t not in index:
                raise KeyError(f"unknown letter {t!r} in {text!r}")
            letters.append(index[t])
    if mark is not None:
        if flavor != PLAIN:
            raise ValueError("module words cannot carry a flavor prefix")
        return MODULE, (mark, tuple(letters))
    return flavor, tuple(letters)
