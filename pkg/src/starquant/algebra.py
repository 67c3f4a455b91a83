"""Exact arithmetic foundation: sparse multivariate polynomials over Q,
univariate polynomials in the deformation parameter h, and h-truncated
series with polynomial coefficients.

Monomials are exponent tuples; a polynomial is a map monomial -> nonzero
Fraction.  Everything is immutable after construction and every operation
is a pure function, so values can be shared freely.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations_with_replacement

Monomial = tuple  # exponent vector, one entry per variable

_ZERO = Fraction(0)


# ---------------------------------------------------------------------------
# monomial helpers
# ---------------------------------------------------------------------------

def mono_mul(a, b):
    return tuple(x + y for x, y in zip(a, b))


def mono_degree(a):
    return sum(a)


def mono_divides(a, b):
    """True if x^a divides x^b."""
    return all(x <= y for x, y in zip(a, b))


def mono_quotient(b, a):
    return tuple(y - x for x, y in zip(a, b))


def mono_lcm(a, b):
    return tuple(max(x, y) for x, y in zip(a, b))


def multiindex_to_monomial(index, n):
    """Sorted index sequence (i1 <= ... <= im) -> exponent vector."""
    exps = [0] * n
    for i in index:
        exps[i] += 1
    return tuple(exps)


def monomial_to_multiindex(mono):
    """Exponent vector -> sorted index sequence; inverse of the above."""
    out = []
    for i, e in enumerate(mono):
        out.extend([i] * e)
    return tuple(out)


def multiindices_up_to(n, degree):
    """All sorted multi-indices of total degree <= degree, graded-lex order."""
    out = []
    for d in range(degree + 1):
        out.extend(combinations_with_replacement(range(n), d))
    return out


def monomials_up_to(n, degree):
    """All monomials of total degree <= degree, graded-lex order."""
    return [multiindex_to_monomial(i, n) for i in multiindices_up_to(n, degree)]


def monomials_of_degree(n, degree):
    return [multiindex_to_monomial(i, n)
            for i in combinations_with_replacement(range(n), degree)]


# ---------------------------------------------------------------------------
# monomial orders
# ---------------------------------------------------------------------------

class MonomialOrder:
    """Total multiplicative well-order on monomials.

    kind is one of lex, grlex, grevlex; priority lists variable indices
    from highest to lowest precedence (default 0, 1, ..., n-1, i.e.
    x1 > x2 > ... > xn).
    """

    KINDS = ("lex", "grlex", "grevlex")
    __slots__ = ("kind", "priority")

    def __init__(self, kind="grevlex", priority=None):
        if kind not in self.KINDS:
            raise ValueError(f"unknown monomial order {kind!r}")
        self.kind = kind
        self.priority = None if priority is None else tuple(priority)

    def _permuted(self, mono):
        if self.priority is None:
            return mono
        if len(self.priority) != len(mono):
            raise ValueError("order priority does not match dimension")
        return tuple(mono[p] for p in self.priority)

    def key(self, mono):
        """Sort key; ascending sort puts the leading monomial last."""
        m = self._permuted(mono)
        if self.kind == "lex":
            return m
        if self.kind == "grlex":
            return (sum(m), m)
        return (sum(m), tuple(-e for e in reversed(m)))

    def sorted(self, monos, reverse=False):
        return sorted(monos, key=self.key, reverse=reverse)

    def leading(self, terms):
        """Leading (monomial, coefficient) of a nonempty term map."""
        m = max(terms, key=self.key)
        return m, terms[m]

    def __eq__(self, other):
        return (isinstance(other, MonomialOrder)
                and self.kind == other.kind and self.priority == other.priority)

    def __repr__(self):
        if self.priority is None:
            return f"MonomialOrder({self.kind!r})"
        return f"MonomialOrder({self.kind!r}, priority={self.priority})"


GREVLEX = MonomialOrder("grevlex")


# ---------------------------------------------------------------------------
# polynomials
# ---------------------------------------------------------------------------

def _as_fraction(c):
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    raise TypeError(f"coefficient must be rational, got {type(c).__name__}")


class Poly:
    """Sparse multivariate polynomial over Q in a fixed dimension n."""

    __slots__ = ("n", "terms")

    def __init__(self, n, terms=None):
        self.n = n
        clean = {}
        if terms:
            for m, c in terms.items():
                c = _as_fraction(c)
                if c:
                    if len(m) != n:
                        raise ValueError("monomial dimension mismatch")
                    clean[tuple(m)] = c
        self.terms = clean

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, n):
        return cls(n)

    @classmethod
    def one(cls, n):
        return cls.constant(n, 1)

    @classmethod
    def constant(cls, n, c):
        return cls(n, {(0,) * n: _as_fraction(c)})

    @classmethod
    def variable(cls, n, i):
        if not 0 <= i < n:
            raise ValueError(f"variable index {i} out of range for dimension {n}")
        exps = [0] * n
        exps[i] = 1
        return cls(n, {tuple(exps): Fraction(1)})

    @classmethod
    def monomial(cls, mono, coeff=1):
        return cls(len(mono), {tuple(mono): _as_fraction(coeff)})

    # -- queries ------------------------------------------------------------

    def is_zero(self):
        return not self.terms

    def degree(self):
        """Max total degree; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(mono_degree(m) for m in self.terms)

    def coeff(self, mono):
        return self.terms.get(tuple(mono), _ZERO)

    def constant_term(self):
        return self.terms.get((0,) * self.n, _ZERO)

    def is_constant(self):
        return self.degree() <= 0

    def leading(self, order):
        """Leading (monomial, coefficient) under order, or None if zero."""
        if not self.terms:
            return None
        return order.leading(self.terms)

    def key(self):
        """Canonical hashable key (for memo tables)."""
        return (self.n, tuple(sorted(self.terms.items())))

    # -- arithmetic ----------------------------------------------------------

    def _check_dim(self, other):
        if self.n != other.n:
            raise ValueError(f"dimension mismatch: {self.n} vs {other.n}")

    def __add__(self, other):
        self._check_dim(other)
        terms = dict(self.terms)
        for m, c in other.terms.items():
            s = terms.get(m, _ZERO) + c
            if s:
                terms[m] = s
            else:
                terms.pop(m, None)
        return self._raw(self.n, terms)

    def __sub__(self, other):
        self._check_dim(other)
        terms = dict(self.terms)
        for m, c in other.terms.items():
            s = terms.get(m, _ZERO) - c
            if s:
                terms[m] = s
            else:
                terms.pop(m, None)
        return self._raw(self.n, terms)

    def __neg__(self):
        return self._raw(self.n, {m: -c for m, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, Poly):
            self._check_dim(other)
            terms = {}
            for m1, c1 in self.terms.items():
                for m2, c2 in other.terms.items():
                    m = mono_mul(m1, m2)
                    s = terms.get(m, _ZERO) + c1 * c2
                    if s:
                        terms[m] = s
                    else:
                        del terms[m]
            return self._raw(self.n, terms)
        return self.scaled(other)

    def __rmul__(self, other):
        return self.scaled(other)

    def __pow__(self, k):
        if k < 0:
            raise ValueError("negative power")
        out = Poly.one(self.n)
        for _ in range(k):
            out = out * self
        return out

    def scaled(self, c):
        c = _as_fraction(c)
        if not c:
            return Poly.zero(self.n)
        return self._raw(self.n, {m: c * v for m, v in self.terms.items()})

    def term_mul(self, mono, coeff):
        """Multiply by the single term coeff * x^mono."""
        coeff = _as_fraction(coeff)
        if not coeff:
            return Poly.zero(self.n)
        return self._raw(self.n,
                         {mono_mul(m, mono): c * coeff for m, c in self.terms.items()})

    def diff(self, i):
        """Formal partial derivative with respect to variable i."""
        if not 0 <= i < self.n:
            raise ValueError(f"variable index {i} out of range for dimension {self.n}")
        terms = {}
        for m, c in self.terms.items():
            e = m[i]
            if e:
                dm = list(m)
                dm[i] = e - 1
                terms[tuple(dm)] = c * e
        return self._raw(self.n, terms)

    def diff_multi(self, d):
        """Apply the derivative multi-index d (d[i]-fold d/dx_i)."""
        out = self
        for i, e in enumerate(d):
            for _ in range(e):
                out = out.diff(i)
                if out.is_zero():
                    return out
        return out

    @classmethod
    def _raw(cls, n, terms):
        p = cls.__new__(cls)
        p.n = n
        p.terms = terms
        return p

    # -- comparison / display -------------------------------------------------

    def __eq__(self, other):
        return isinstance(other, Poly) and self.n == other.n and self.terms == other.terms

    def __bool__(self):
        return bool(self.terms)

    __hash__ = None

    def sorted_terms(self, order=GREVLEX):
        """Terms sorted descending (leading first)."""
        return sorted(self.terms.items(), key=lambda t: order.key(t[0]), reverse=True)

    def to_string(self, variables=None, order=GREVLEX):
        if not self.terms:
            return "0"
        if variables is None:
            variables = default_variables(self.n)
        parts = []
        for m, c in self.sorted_terms(order):
            factors = []
            for name, e in zip(variables, m):
                if e == 1:
                    factors.append(name)
                elif e > 1:
                    factors.append(f"{name}^{e}")
            if not factors:
                body = _frac_str(abs(c))
            elif abs(c) == 1:
                body = "*".join(factors)
            else:
                body = _frac_str(abs(c)) + "*" + "*".join(factors)
            if not parts:
                parts.append(body if c > 0 else "-" + body)
            else:
                parts.append((" + " if c > 0 else " - ") + body)
        return "".join(parts)

    def __repr__(self):
        return f"Poly({self.to_string()})"


def default_variables(n):
    return [f"x{i + 1}" for i in range(n)]


def _frac_str(c):
    return str(c)


# ---------------------------------------------------------------------------
# polynomials in h (exact, untruncated scalars of the deformation ring)
# ---------------------------------------------------------------------------

class HPoly:
    """Univariate polynomial in h over Q; the scalar ring for expansion
    matrices, relation coefficients, and reduction systems."""

    __slots__ = ("c",)

    def __init__(self, coeffs=()):
        c = [_as_fraction(x) for x in coeffs]
        while c and not c[-1]:
            c.pop()
        self.c = tuple(c)

    @classmethod
    def const(cls, value):
        return cls((value,))

    @classmethod
    def h(cls, k=1, coeff=1):
        return cls((0,) * k + (coeff,))

    @classmethod
    def zero(cls):
        return cls()

    @classmethod
    def one(cls):
        return cls((1,))

    def is_zero(self):
        return not self.c

    def degree(self):
        return len(self.c) - 1

    def coeff(self, k):
        return self.c[k] if k < len(self.c) else _ZERO

    def order(self):
        """Index of the lowest nonzero coefficient; None for 0."""
        for k, v in enumerate(self.c):
            if v:
                return k
        return None

    def __add__(self, other):
        m = max(len(self.c), len(other.c))
        return HPoly([self.coeff(k) + other.coeff(k) for k in range(m)])

    def __sub__(self, other):
        m = max(len(self.c), len(other.c))
        return HPoly([self.coeff(k) - other.coeff(k) for k in range(m)])

    def __neg__(self):
        return HPoly([-x for x in self.c])

    def __mul__(self, other):
        if isinstance(other, HPoly):
            if not self.c or not other.c:
                return HPoly()
            out = [_ZERO] * (len(self.c) + len(other.c) - 1)
            for i, a in enumerate(self.c):
                if a:
                    for j, b in enumerate(other.c):
                        out[i + j] += a * b
            return HPoly(out)
        f = _as_fraction(other)
        return HPoly([x * f for x in self.c])

    def __rmul__(self, other):
        return self.__mul__(other)

    def mul_mod(self, other, trunc):
        return (self * other).truncate(trunc)

    def shift(self, k):
        """Multiply by h^k."""
        if not self.c:
            return self
        return HPoly((0,) * k + self.c)

    def shift_down(self, k):
        """Divide by h^k; requires the first k coefficients to vanish."""
        if any(self.c[:k]):
            raise ValueError("not divisible by h^%d" % k)
        return HPoly(self.c[k:])

    def truncate(self, trunc):
        return HPoly(self.c[:trunc])

    def __eq__(self, other):
        return isinstance(other, HPoly) and self.c == other.c

    def __hash__(self):
        return hash(self.c)

    def __bool__(self):
        return bool(self.c)

    def to_string(self):
        if not self.c:
            return "0"
        parts = []
        for k, v in enumerate(self.c):
            if not v:
                continue
            if k == 0:
                body = _frac_str(abs(v))
            else:
                hpow = "h" if k == 1 else f"h^{k}"
                body = hpow if abs(v) == 1 else _frac_str(abs(v)) + "*" + hpow
            if not parts:
                parts.append(body if v > 0 else "-" + body)
            else:
                parts.append((" + " if v > 0 else " - ") + body)
        return "".join(parts)

    def __repr__(self):
        return f"HPoly({self.to_string()})"


# ---------------------------------------------------------------------------
# truncated series with polynomial coefficients
# ---------------------------------------------------------------------------

class HSeries:
    """Element of Poly[h]/(h^N): a vector of N polynomial coefficients.

    The truncation order N travels with the value; mixing different
    truncations is an error rather than a silent re-truncation.
    """

    __slots__ = ("n", "trunc", "coeffs")

    def __init__(self, n, trunc, coeffs=None):
        if trunc < 1:
            raise ValueError("truncation order must be >= 1")
        self.n = n
        self.trunc = trunc
        if coeffs is None:
            coeffs = [Poly.zero(n)] * trunc
        else:
            coeffs = list(coeffs)
            if len(coeffs) != trunc:
                raise ValueError("coefficient vector length must equal truncation")
            for p in coeffs:
                if p.n != n:
                    raise ValueError("coefficient dimension mismatch")
        self.coeffs = tuple(coeffs)

    @classmethod
    def from_poly(cls, p, trunc):
        return cls(p.n, trunc, [p] + [Poly.zero(p.n)] * (trunc - 1))

    @classmethod
    def zero(cls, n, trunc):
        return cls(n, trunc)

    @classmethod
    def one(cls, n, trunc):
        return cls.from_poly(Poly.one(n), trunc)

    def _check(self, other):
        if self.trunc != other.trunc:
            raise ValueError(
                f"mixed truncation orders: {self.trunc} vs {other.trunc}")
        if self.n != other.n:
            raise ValueError(f"dimension mismatch: {self.n} vs {other.n}")

    def coeff(self, k):
        return self.coeffs[k]

    def h0(self):
        return self.coeffs[0]

    def is_zero(self):
        return all(p.is_zero() for p in self.coeffs)

    def degree(self):
        return max(p.degree() for p in self.coeffs)

    def __add__(self, other):
        self._check(other)
        return HSeries(self.n, self.trunc,
                       [a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other):
        self._check(other)
        return HSeries(self.n, self.trunc,
                       [a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __neg__(self):
        return HSeries(self.n, self.trunc, [-p for p in self.coeffs])

    def __mul__(self, other):
        if isinstance(other, HSeries):
            self._check(other)
            out = [Poly.zero(self.n) for _ in range(self.trunc)]
            for i, a in enumerate(self.coeffs):
                if a.is_zero():
                    continue
                for j in range(self.trunc - i):
                    b = other.coeffs[j]
                    if not b.is_zero():
                        out[i + j] = out[i + j] + a * b
            return HSeries(self.n, self.trunc, out)
        if isinstance(other, HPoly):
            out = [Poly.zero(self.n) for _ in range(self.trunc)]
            for k, v in enumerate(other.c[:self.trunc]):
                if v:
                    for j in range(self.trunc - k):
                        p = self.coeffs[j]
                        if not p.is_zero():
                            out[k + j] = out[k + j] + p.scaled(v)
            return HSeries(self.n, self.trunc, out)
        if isinstance(other, Poly):
            return HSeries(self.n, self.trunc, [p * other for p in self.coeffs])
        return HSeries(self.n, self.trunc,
                       [p.scaled(other) for p in self.coeffs])

    def __rmul__(self, other):
        return self.__mul__(other)

    def shift(self, k):
        """Multiply by h^k, truncating at order N."""
        if k == 0:
            return self
        pad = [Poly.zero(self.n)] * k
        return HSeries(self.n, self.trunc, (pad + list(self.coeffs))[:self.trunc])

    def shift_down(self, k):
        """Divide by h^k; the dropped low orders must vanish.  The result
        keeps truncation N (top orders fill with zero)."""
        for p in self.coeffs[:k]:
            if not p.is_zero():
                raise ValueError("series not divisible by h^%d" % k)
        tail = list(self.coeffs[k:]) + [Poly.zero(self.n)] * k
        return HSeries(self.n, self.trunc, tail)

    def truncate(self, trunc):
        if trunc > self.trunc:
            raise ValueError("cannot extend a truncated series")
        return HSeries(self.n, trunc, self.coeffs[:trunc])

    def diff(self, i):
        return HSeries(self.n, self.trunc, [p.diff(i) for p in self.coeffs])

    def __eq__(self, other):
        return (isinstance(other, HSeries) and self.n == other.n
                and self.trunc == other.trunc and self.coeffs == other.coeffs)

    __hash__ = None

    def key(self):
        return (self.trunc,) + tuple(p.key() for p in self.coeffs)

    def to_string(self, variables=None, order=GREVLEX):
        parts = []
        for k, p in enumerate(self.coeffs):
            if p.is_zero():
                continue
            hpow = "" if k == 0 else ("h" if k == 1 else f"h^{k}")
            for m, c in p.sorted_terms(order):
                factors = []
                if hpow:
                    factors.append(hpow)
                names = variables or default_variables(self.n)
                for name, e in zip(names, m):
                    if e == 1:
                        factors.append(name)
                    elif e > 1:
                        factors.append(f"{name}^{e}")
                if not factors:
                    body = _frac_str(abs(c))
                elif abs(c) == 1:
                    body = "*".join(factors)
                else:
                    body = _frac_str(abs(c)) + "*" + "*".join(factors)
                if not parts:
                    parts.append(body if c > 0 else "-" + body)
                else:
                    parts.append((" + " if c > 0 else " - ") + body)
        if not parts:
            return "0"
        return "".join(parts)

    def __repr__(self):
        return f"HSeries({self.to_string()}; mod h^{self.trunc})"


# ---------------------------------------------------------------------------
# canonical JSON encoding
# ---------------------------------------------------------------------------

def poly_to_json(p, order=GREVLEX):
    """Canonical encoding: exponent vectors plus "p/q" coefficient strings,
    leading term first."""
    return {
        "dimension": p.n,
        "terms": [{"monomial": list(m), "coeff": str(c)}
                  for m, c in p.sorted_terms(order)],
    }


def poly_from_json(obj):
    n = obj["dimension"]
    terms = {}
    for t in obj["terms"]:
        terms[tuple(t["monomial"])] = Fraction(t["coeff"])
    return Poly(n, terms)


def hseries_to_json(f, order=GREVLEX):
    return {
        "truncation": f.trunc,
        "coeffs": [poly_to_json(p, order) for p in f.coeffs],
    }


def hseries_from_json(obj):
    coeffs = [poly_from_json(c) for c in obj["coeffs"]]
    return HSeries(coeffs[0].n, obj["truncation"], coeffs)


def hpoly_to_json(v):
    return [str(x) for x in v.c]


def hpoly_from_json(obj):
    return HPoly([Fraction(x) for x in obj])
