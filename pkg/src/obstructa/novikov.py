"""Truncated Novikov scalars: finite sums of c * T^lam * e^q over the rationals."""

import re
from fractions import Fraction

INF = float("inf")


class NovikovError(ArithmeticError):
    pass


class DomainError(NovikovError):
    pass


class ConfigError(NovikovError):
    pass


class NotMonomialInvertible(NovikovError):
    pass


class DivergenceError(NovikovError):
    pass


def _frac(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(x).limit_denominator(10**9)
    return Fraction(x)


def _ceil(x):
    return None if x is None else _frac(x)


class NovikovScalar:
    """Immutable finite sum of monomials, stored in canonical order.

    ``terms`` is a tuple of ``(coeff, lam, q)``; energies at or above
    ``e_ceiling`` are dropped.  ``e_ceiling=None`` means no truncation.
    """

    __slots__ = ("terms", "e_ceiling", "e_floor")

    def __init__(self, terms=(), e_ceiling=None, e_floor=0, _canonical=False):
        e_ceiling = _ceil(e_ceiling)
        e_floor = _frac(e_floor)
        if not _canonical:
            terms = _canonical_terms(terms, e_ceiling, e_floor)
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "e_ceiling", e_ceiling)
        object.__setattr__(self, "e_floor", e_floor)

    def __setattr__(self, name, value):
        raise AttributeError("NovikovScalar is immutable")

    # construction helpers
    @classmethod
    def monomial(cls, c=1, lam=0, q=0, e_ceiling=None, e_floor=0):
        return cls([(c, lam, q)], e_ceiling, e_floor)

    @classmethod
    def zero(cls, e_ceiling=None, e_floor=0):
        return cls((), e_ceiling, e_floor)

    @classmethod
    def one(cls, e_ceiling=None, e_floor=0):
        return cls([(1, 0, 0)], e_ceiling, e_floor)

    def _like(self, terms):
        return NovikovScalar(terms, self.e_ceiling, self.e_floor)

    def _check(self, other):
        if not isinstance(other, NovikovScalar):
            other = NovikovScalar.monomial(other, e_ceiling=self.e_ceiling, e_floor=self.e_floor)
        elif other.e_ceiling != self.e_ceiling or other.e_floor != self.e_floor:
            raise ConfigError(
                f"mismatched windows: [{self.e_floor}, {self.e_ceiling}) vs "
                f"[{other.e_floor}, {other.e_ceiling})"
            )
        return other

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = NovikovScalar.monomial(other, e_ceiling=self.e_ceiling, e_floor=self.e_floor)
        if not isinstance(other, NovikovScalar):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(self.terms)

    def __add__(self, other):
        other = self._check(other)
        return self._like(self.terms + other.terms)

    __radd__ = __add__

    def __neg__(self):
        return NovikovScalar(tuple((-c, l, q) for c, l, q in self.terms),
                             self.e_ceiling, self.e_floor, _canonical=True)

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def __mul__(self, other):
        return nov_mul(self, other)

    __rmul__ = __mul__

    def __pow__(self, n):
        if n < 0:
            return nov_invert(self) ** (-n)
        out = NovikovScalar.one(self.e_ceiling, self.e_floor)
        for _ in range(n):
            out = out * self
        return out

    def shift(self, lam=0, q=0):
        """Multiply by T^lam e^q."""
        lam = _frac(lam)
        return self._like(tuple((c, l + lam, p + q) for c, l, p in self.terms))

    def with_window(self, e_ceiling=None, e_floor=None):
        floor = self.e_floor if e_floor is None else e_floor
        return NovikovScalar(self.terms, e_ceiling, floor)

    def coefficient(self, lam=0, q=0):
        lam = _frac(lam)
        for c, l, p in self.terms:
            if l == lam and p == q:
                return c
        return Fraction(0)

    def leading(self):
        """Terms of minimal energy."""
        if not self.terms:
            return ()
        lo = self.terms[0][1]
        return tuple(t for t in self.terms if t[1] == lo)

    def erase_maslov(self):
        return self._like(tuple((c, l, 0) for c, l, _ in self.terms))

    def __repr__(self):
        return f"NovikovScalar({format_scalar(self)!r})"

    def __str__(self):
        return format_scalar(self)


def _canonical_terms(raw, e_ceiling, e_floor):
    acc = {}
    for t in raw:
        c, lam, q = t
        c = _frac(c)
        lam = _frac(lam)
        q = int(q)
        if lam < e_floor:
            raise DomainError(f"energy {lam} below floor {e_floor}")
        if e_ceiling is not None and lam >= e_ceiling:
            continue
        key = (lam, q)
        acc[key] = acc.get(key, 0) + c
    return tuple((c, lam, q) for (lam, q), c in sorted(acc.items()) if c != 0)


def nov_normalize(raw_terms, e_ceiling=None, e_floor=0):
    return NovikovScalar(raw_terms, e_ceiling, e_floor)


def nov_mul(a, b):
    if not isinstance(b, NovikovScalar):
        b = NovikovScalar.monomial(b, e_ceiling=a.e_ceiling, e_floor=a.e_floor)
    if not isinstance(a, NovikovScalar):
        a = NovikovScalar.monomial(a, e_ceiling=b.e_ceiling, e_floor=b.e_floor)
    b = a._check(b)
    ceil = a.e_ceiling
    out = []
    for c1, l1, q1 in a.terms:
        for c2, l2, q2 in b.terms:
            lam = l1 + l2
            if ceil is not None and lam >= ceil:
                # terms are sorted by energy, the rest of b is above too
                break
            out.append((c1 * c2, lam, q1 + q2))
    floor = a.e_floor
    if out and min(t[1] for t in out) < floor:
        # negative floors can push products lower than allowed
        raise DomainError(f"product energy below floor {floor}")
    return NovikovScalar(out, ceil, floor)


def nov_valuation(a):
    if not a.terms:
        return INF
    return a.terms[0][1]


def nov_geometric_alt(h):
    """sum_j (-1)^j h^j, truncated at the ceiling of ``h``."""
    one = NovikovScalar.one(h.e_ceiling, h.e_floor)
    if h.is_zero():
        return one
    val = nov_valuation(h)
    if val <= 0:
        # still fine if h is nilpotent inside the window
        p = h
        for _ in range(64):
            p = p * h
            if p.is_zero():
                break
        else:
            raise DivergenceError("geometric series needs positive valuation or nilpotent h")
    elif h.e_ceiling is None:
        raise DivergenceError("geometric series of an untruncated scalar does not terminate")
    total = one
    power = one
    sign = 1
    while True:
        power = power * h
        sign = -sign
        if power.is_zero():
            return total
        total = total + (power if sign > 0 else -power)


def nov_invert(a):
    """Inverse of a scalar whose lowest-energy part is a single monomial."""
    if a.is_zero():
        raise ZeroDivisionError("inverse of the zero scalar")
    lead = a.leading()
    if len(lead) != 1:
        raise NotMonomialInvertible(
            f"{format_scalar(a)} has {len(lead)} leading terms at energy {lead[0][1]}"
        )
    c, lam, q = lead[0]
    ceil = a.e_ceiling
    # a = c T^lam e^q (1 + h); h is only known below ceil - lam
    floor = min(a.e_floor, -lam)
    h_ceil = None if ceil is None else ceil - lam
    h = NovikovScalar([(ci / c, li - lam, qi - q) for ci, li, qi in a.terms[1:]], h_ceil, 0)
    g = nov_geometric_alt(h)
    return NovikovScalar([(gc / c, gl - lam, gq - q) for gc, gl, gq in g.terms], ceil, floor)


# text format ---------------------------------------------------------------

def _fmt_rat(x):
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def format_monomial(c, lam, q):
    parts = []
    mag = abs(c)
    if mag != 1 or (lam == 0 and q == 0):
        parts.append(_fmt_rat(mag))
    if lam != 0:
        parts.append(f"T^{_fmt_rat(lam)}")
    if q != 0:
        parts.append(f"e^{q}")
    return "*".join(parts)


def format_scalar(a):
    if not a.terms:
        return "0"
    out = []
    for i, (c, lam, q) in enumerate(a.terms):
        body = format_monomial(c, lam, q)
        if i == 0:
            out.append(("-" if c < 0 else "") + body)
        else:
            out.append((" - " if c < 0 else " + ") + body)
    return "".join(out)


_RAT = r"-?\d+(?:/\d+)?"
_FACTOR = re.compile(rf"^(?:(?P<c>{_RAT})|T\^(?P<l>\(?{_RAT}\)?)|e\^(?P<q>\(?-?\d+\)?)|T|e)$")


def parse_scalar(text, e_ceiling=None, e_floor=0):
    """Parse ``1 - 2*T^1/2*e^2``-style text."""
    s = text.replace(" ", "")
    if not s:
        raise ValueError("empty scalar")
    if s == "0":
        return NovikovScalar.zero(e_ceiling, e_floor)
    # split on +/- not inside an exponent
    chunks = []
    cur = ""
    for i, ch in enumerate(s):
        if ch in "+-" and cur and cur[-1] != "^" and cur[-1] != "(":
            chunks.append(cur)
            cur = ch
        else:
            cur += ch
    chunks.append(cur)
    terms = []
    for chunk in chunks:
        sign = 1
        if chunk[0] in "+-":
            sign = -1 if chunk[0] == "-" else 1
            chunk = chunk[1:]
        c, lam, q = Fraction(1), Fraction(0), 0
        for factor in chunk.split("*"):
            m = _FACTOR.match(factor)
            if not m:
                raise ValueError(f"cannot parse factor {factor!r} in {text!r}")
            if m.group("c") is not None:
                c *= Fraction(m.group("c"))
            elif m.group("l") is not None:
                lam += Fraction(m.group("l").strip("()"))
            elif m.group("q") is not None:
                q += int(m.group("q").strip("()"))
            elif factor == "T":
                lam += 1
            else:
                q += 1
        terms.append((sign * c, lam, q))
    return NovikovScalar(terms, e_ceiling, e_floor)
