"""Truncated star-product engines and deformation-axiom verifiers.

Three engines are provided: the Moyal exponential product for constant
Poisson structures, the Gutt product for linear structures (computed
exactly by PBW word rewriting in the enveloping algebra, then truncated),
and a Custom engine for arbitrary polynomial structures whose first-order
term is built from the structure and whose higher corrections are
user-supplied bidifferential operators.

The first-order normalization is B_1(f,g) = (1/2) sum alpha^{ij} d_i f d_j g,
so the commutator at order h is exactly the Poisson bracket; the symmetric
part of B_1 is gauged to zero.
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial

from .algebra import (
    HPoly,
    HSeries,
    Poly,
    monomial_to_multiindex,
    monomials_up_to,
    multiindex_to_monomial,
)
from .poisson import PoissonStructure


# ---------------------------------------------------------------------------
# bidifferential operators
# ---------------------------------------------------------------------------

class BidiffOperator:
    """B(f, g) = sum coeff * (d^L f) * (d^R g) with polynomial coeffs."""

    __slots__ = ("n", "terms")

    def __init__(self, n, terms):
        clean = []
        for coeff, left, right in terms:
            if coeff.is_zero():
                continue
            if coeff.n != n or len(left) != n or len(right) != n:
                raise ValueError("operator term dimension mismatch")
            clean.append((coeff, tuple(left), tuple(right)))
        self.n = n
        self.terms = tuple(clean)

    @classmethod
    def half_bracket(cls, structure):
        """(1/2) sum alpha^{ij} d_i (x) d_j: the canonical B_1."""
        n = structure.n
        terms = []
        for i in range(n):
            for j in range(n):
                a = structure.alpha[i][j]
                if a.is_zero():
                    continue
                left = tuple(1 if t == i else 0 for t in range(n))
                right = tuple(1 if t == j else 0 for t in range(n))
                terms.append((a.scaled(Fraction(1, 2)), left, right))
        return cls(n, terms)

    def apply(self, f, g):
        out = Poly.zero(self.n)
        for coeff, left, right in self.terms:
            df = f.diff_multi(left)
            if df.is_zero():
                continue
            dg = g.diff_multi(right)
            if dg.is_zero():
                continue
            out = out + coeff * df * dg
        return out

    def max_order(self):
        """Largest one-sided derivative order appearing."""
        if not self.terms:
            return 0
        return max(max(sum(left), sum(right)) for _, left, right in self.terms)

    def to_json(self, variables=None):
        return [{"coeff": c.to_string(variables), "left": list(l), "right": list(r)}
                for c, l, r in self.terms]


# ---------------------------------------------------------------------------
# Moyal engine (constant structures)
# ---------------------------------------------------------------------------

def _moyal_star_poly(alpha, f, g, trunc):
    n = f.n
    coeffs = [f * g]
    level = [(f, g, Fraction(1))]
    k = 1
    while k < trunc:
        merged = {}
        for u, v, c in level:
            for i in range(n):
                du = u.diff(i)
                if du.is_zero():
                    continue
                for j in range(n):
                    a = alpha[i][j]
                    if not a:
                        continue
                    dv = v.diff(j)
                    if dv.is_zero():
                        continue
                    key = (du.key(), dv.key())
                    if key in merged:
                        prev = merged[key]
                        merged[key] = (prev[0], prev[1], prev[2] + c * a)
                    else:
                        merged[key] = (du, dv, c * a)
        level = [t for t in merged.values() if t[2]]
        if not level:
            break
        term = Poly.zero(n)
        for u, v, c in level:
            term = term + (u * v).scaled(c)
        coeffs.append(term.scaled(Fraction(1, (2 ** k) * factorial(k))))
        k += 1
    while len(coeffs) < trunc:
        coeffs.append(Poly.zero(n))
    return HSeries(n, trunc, coeffs)


def moyal_star(alpha, f, g, trunc):
    """Moyal product for a constant antisymmetric matrix alpha:
    sum_k (h/2)^k/k! alpha^{i1 j1}...alpha^{ik jk} (d_I f)(d_J g),
    truncated at h^trunc.  The series terminates on polynomials."""
    n = f.n
    mat = [[Fraction(x) for x in row] for row in alpha]
    if len(mat) != n or any(len(row) != n for row in mat):
        raise ValueError("alpha must be an n x n matrix")
    for i in range(n):
        for j in range(n):
            if mat[i][j] != -mat[j][i]:
                raise ValueError("alpha must be antisymmetric")
    return _moyal_star_poly(mat, f, g, trunc)


# ---------------------------------------------------------------------------
# Gutt engine (linear structures, exact PBW rewriting)
# ---------------------------------------------------------------------------

class _GuttEngine:
    """Star product for {x_i, x_j} = c_ij^k x_k through the enveloping
    algebra with [X_i, X_j] = h c_ij^k X_k.

    Tensor words are rewritten to PBW normal order; every rewrite consumes
    one h and shortens the word, so all computations are exact in h and
    only truncated at the very end.
    """

    def __init__(self, n, c):
        self.n = n
        self.c = c
        self._normal = {}
        self._sym = {}

    def normal_order(self, word):
        """PBW coordinates (sorted words -> exact h-polynomials) of a word."""
        cached = self._normal.get(word)
        if cached is not None:
            return cached
        swap = -1
        for s in range(len(word) - 1):
            if word[s] > word[s + 1]:
                swap = s
                break
        if swap < 0:
            result = {word: HPoly.one()}
        else:
            j, i = word[swap], word[swap + 1]
            result = dict(self.normal_order(word[:swap] + (i, j) + word[swap + 2:]))
            for k in range(self.n):
                coeff = self.c[j][i][k]
                if coeff:
                    sub = word[:swap] + (k,) + word[swap + 2:]
                    for w, hp in self.normal_order(sub).items():
                        add = hp.shift(1) * coeff
                        cur = result.get(w)
                        result[w] = add if cur is None else cur + add
            result = {w: v for w, v in result.items() if not v.is_zero()}
        self._normal[word] = result
        return result

    def symmetrize(self, index):
        """PBW coordinates of the symmetrization of the sorted word:
        sym(I) = (1/m) sum_j mult_j(I) X_j * sym(I minus j)."""
        cached = self._sym.get(index)
        if cached is not None:
            return cached
        m = len(index)
        if m == 0:
            result = {(): HPoly.one()}
        else:
            acc = {}
            seen = set()
            for pos, j in enumerate(index):
                if j in seen:
                    continue
                seen.add(j)
                mult = index.count(j)
                rest = index[:pos] + index[pos + 1:]
                factor = Fraction(mult, m)
                for w, hp in self.symmetrize(rest).items():
                    for w2, hp2 in self.normal_order((j,) + w).items():
                        add = hp * hp2 * factor
                        cur = acc.get(w2)
                        acc[w2] = add if cur is None else cur + add
            result = {w: v for w, v in acc.items() if not v.is_zero()}
        self._sym[index] = result
        return result

    def _to_pbw(self, f):
        out = {}
        for mono, coeff in f.terms.items():
            for w, hp in self.symmetrize(monomial_to_multiindex(mono)).items():
                add = hp * coeff
                cur = out.get(w)
                out[w] = add if cur is None else cur + add
        return {w: v for w, v in out.items() if not v.is_zero()}

    def _from_pbw(self, element):
        """Invert symmetrization: peel words from the longest down."""
        out = {}
        work = dict(element)
        while work:
            top = max(len(w) for w in work)
            for w in sorted(k for k in work if len(k) == top):
                hp = work.pop(w)
                if hp.is_zero():
                    continue
                mono = multiindex_to_monomial(w, self.n)
                cur = out.get(mono)
                out[mono] = hp if cur is None else cur + hp
                for w2, hp2 in self.symmetrize(w).items():
                    if w2 == w:
                        continue
                    sub = hp * hp2
                    cur = work.get(w2)
                    work[w2] = -sub if cur is None else cur - sub
            work = {w: v for w, v in work.items() if not v.is_zero()}
        return out

    def star(self, f, g, trunc):
        pf = self._to_pbw(f)
        pg = self._to_pbw(g)
        prod = {}
        for wf, hf in pf.items():
            for wg, hg in pg.items():
                scale = hf * hg
                for w, hp in self.normal_order(wf + wg).items():
                    add = hp * scale
                    cur = prod.get(w)
                    prod[w] = add if cur is None else cur + add
        prod = {w: v for w, v in prod.items() if not v.is_zero()}
        coords = self._from_pbw(prod)
        coeffs = [dict() for _ in range(trunc)]
        for mono, hp in coords.items():
            for k in range(min(len(hp.c), trunc)):
                if hp.c[k]:
                    coeffs[k][mono] = hp.c[k]
        return HSeries(f.n, trunc, [Poly(f.n, t) for t in coeffs])


def gutt_star(c, f, g, trunc):
    """Star product of a linear structure {x_i, x_j} = c[i][j][k] x_k,
    through symmetrization into the PBW-ordered enveloping algebra."""
    n = f.n
    const = [[[Fraction(x) for x in row] for row in mat] for mat in c]
    if len(const) != n or any(len(mat) != n for mat in const) \
            or any(len(row) != n for mat in const for row in mat):
        raise ValueError("structure constants must be n x n x n")
    entries = {}
    for i in range(n):
        for j in range(i + 1, n):
            entries[(i, j)] = Poly(n, {tuple(1 if t == k else 0 for t in range(n)): v
                                       for k, v in enumerate(const[i][j]) if v})
    structure = PoissonStructure(n, entries)
    for i in range(n):
        for j in range(n):
            for k in range(n):
                if const[i][j][k] != -const[j][i][k]:
                    raise ValueError("structure constants must be antisymmetric in (i, j)")
    bad = structure.check_jacobi()
    if bad is not None:
        raise ValueError(f"Jacobi identity fails on coordinates {bad[:3]}")
    return _GuttEngine(n, const).star(f, g, trunc)


# ---------------------------------------------------------------------------
# star product specifications
# ---------------------------------------------------------------------------

class StarProductSpec:
    """A Poisson structure, an engine matching its degree, and a truncation
    order N.  All products are computed mod h^N."""

    __slots__ = ("structure", "engine", "trunc", "operators",
                 "_gutt", "_alpha_const", "_star_cache", "_expand_cache")

    def __init__(self, structure, engine, trunc, operators=None):
        if trunc < 1:
            raise ValueError("truncation order must be >= 1")
        self.structure = structure
        self.engine = engine
        self.trunc = trunc
        self.operators = operators or {}
        self._gutt = None
        self._alpha_const = None
        self._star_cache = {}
        self._expand_cache = {(): HSeries.one(structure.n, trunc)}

    # -- constructors ---------------------------------------------------------

    @classmethod
    def moyal(cls, structure, trunc):
        if not structure.is_constant():
            raise ValueError("Moyal engine requires a constant structure (degree 0)")
        spec = cls(structure, "moyal", trunc)
        spec._alpha_const = [[p.constant_term() for p in row]
                             for row in structure.alpha]
        return spec

    @classmethod
    def gutt(cls, structure, trunc):
        if not structure.is_linear() or structure.degree != 1:
            raise ValueError("Gutt engine requires a linear structure (degree 1)")
        bad = structure.check_jacobi()
        if bad is not None:
            raise ValueError(f"Jacobi identity fails on coordinates {bad[:3]}")
        spec = cls(structure, "gutt", trunc)
        spec._gutt = _GuttEngine(structure.n, structure.structure_constants())
        return spec

    @classmethod
    def custom(cls, structure, trunc, corrections=None, validate=True,
               validate_degree=2):
        """B_1 is built from the structure; corrections supply B_k for
        2 <= k < trunc.  A validated spec must pass the associativity sweep
        up to validate_degree before use."""
        ops = {1: BidiffOperator.half_bracket(structure)}
        for k, op in (corrections or {}).items():
            if k < 2:
                raise ValueError("corrections start at order 2; B_1 is fixed")
            if k >= trunc:
                raise ValueError(f"correction order {k} is invisible mod h^{trunc}")
            if op.n != structure.n:
                raise ValueError("correction dimension mismatch")
            ops[k] = op
        spec = cls(structure, "custom", trunc, ops)
        if validate:
            bad = verify_associativity(spec, validate_degree)
            if bad is not None:
                raise ValueError(
                    "custom product is not associative mod h^%d: "
                    "monomial triple %s fails at order h^%d"
                    % (trunc, bad[:3], bad[3]))
        return spec

    @classmethod
    def tabulated(cls, structure, trunc, operators):
        """Custom engine with every B_k (including B_1) given explicitly;
        used for gauge-transformed products."""
        return cls(structure, "custom", trunc, dict(operators))

    # -- products -------------------------------------------------------------

    @property
    def n(self):
        return self.structure.n

    def star_poly(self, f, g):
        """Product of two h-free polynomials, as a series mod h^N."""
        key = (f.key(), g.key())
        cached = self._star_cache.get(key)
        if cached is not None:
            return cached
        if self.engine == "moyal":
            out = _moyal_star_poly(self._alpha_const, f, g, self.trunc)
        elif self.engine == "gutt":
            out = self._gutt.star(f, g, self.trunc)
        else:
            coeffs = [f * g]
            for k in range(1, self.trunc):
                op = self.operators.get(k)
                coeffs.append(op.apply(f, g) if op is not None else Poly.zero(f.n))
            out = HSeries(f.n, self.trunc, coeffs)
        self._star_cache[key] = out
        return out

    def star(self, f, g):
        """Bilinear extension of the product to series mod h^N."""
        if isinstance(f, Poly):
            f = HSeries.from_poly(f, self.trunc)
        if isinstance(g, Poly):
            g = HSeries.from_poly(g, self.trunc)
        if f.trunc != self.trunc or g.trunc != self.trunc:
            raise ValueError("operand truncation does not match the product")
        if f.n != self.n or g.n != self.n:
            raise ValueError("operand dimension does not match the product")
        out = HSeries.zero(self.n, self.trunc)
        for a, fa in enumerate(f.coeffs):
            if fa.is_zero():
                continue
            for b in range(self.trunc - a):
                gb = g.coeffs[b]
                if gb.is_zero():
                    continue
                out = out + self.star_poly(fa, gb).shift(a + b)
        return out

    def commutator(self, f, g):
        return self.star(f, g) - self.star(g, f)

    def order_term(self, k, f, g):
        """B_k(f, g) for h-free polynomials: the h^k coefficient of f * g."""
        return self.star_poly(f, g).coeff(k)

    def per_h_order(self):
        """Max one-sided derivative order per power of h; used to bound
        tabulation of transformed products."""
        if self.engine in ("moyal", "gutt"):
            return 1
        best = 1
        for k, op in self.operators.items():
            order = op.max_order()
            best = max(best, -(-order // k))
        return best

    def describe(self):
        return {"engine": self.engine, "truncation": self.trunc,
                "structure_degree": self.structure.degree}


# ---------------------------------------------------------------------------
# gauge transforms
# ---------------------------------------------------------------------------

class GaugeTransform:
    """T = Id + sum_{k>=1} h^k T_k with T_k a differential operator given
    as (coefficient, derivative multi-index) terms.  Unitriangular in h,
    hence invertible mod h^N by a Neumann series."""

    __slots__ = ("n", "ops")

    def __init__(self, n, ops):
        clean = {}
        for k, terms in ops.items():
            if k < 1:
                raise ValueError("gauge transform must be Id + O(h)")
            kept = []
            for coeff, deriv in terms:
                if coeff.is_zero():
                    continue
                if coeff.n != n or len(deriv) != n:
                    raise ValueError("gauge term dimension mismatch")
                kept.append((coeff, tuple(deriv)))
            if kept:
                clean[k] = tuple(kept)
        self.n = n
        self.ops = clean

    @classmethod
    def identity(cls, n):
        return cls(n, {})

    def _apply_level(self, k, p):
        out = Poly.zero(self.n)
        for coeff, deriv in self.ops.get(k, ()):
            dp = p.diff_multi(deriv)
            if not dp.is_zero():
                out = out + coeff * dp
        return out

    def _correction(self, f):
        """(T - Id) f, an O(h) series."""
        out = HSeries.zero(f.n, f.trunc)
        for k in self.ops:
            if k >= f.trunc:
                continue
            level = HSeries(f.n, f.trunc,
                            [self._apply_level(k, p) for p in f.coeffs])
            out = out + level.shift(k)
        return out

    def apply(self, f):
        return f + self._correction(f)

    def apply_inverse(self, f):
        """Neumann fixed point: x = f - (T - Id) x, exact mod h^N."""
        x = f
        for _ in range(f.trunc - 1):
            x = f - self._correction(x)
        return x

    def per_h_order(self):
        best = 0
        for k, terms in self.ops.items():
            for _, deriv in terms:
                best = max(best, sum(deriv))
        return best


def gauge_transform(spec, transform):
    """The product f, g -> T(T^-1 f * T^-1 g) mod h^N, tabulated as an
    explicit Custom engine over the same Poisson structure.

    Bidifferential coefficients of the transformed B'_k are recovered from
    values on monomial pairs up to derivative order k * omega, where omega
    bounds the derivative order per power of h of all ingredients.
    """
    if transform.n != spec.n:
        raise ValueError("gauge transform dimension mismatch")
    trunc = spec.trunc
    n = spec.n
    omega = max(spec.per_h_order(), transform.per_h_order(), 1)
    max_order = (trunc - 1) * omega

    def transformed(f, g):
        fi = transform.apply_inverse(HSeries.from_poly(f, trunc))
        gi = transform.apply_inverse(HSeries.from_poly(g, trunc))
        return transform.apply(spec.star(fi, gi))

    monos = monomials_up_to(n, max_order)
    values = {}
    for a in monos:
        fa = Poly.monomial(a)
        for b in monos:
            values[(a, b)] = transformed(fa, Poly.monomial(b))

    operators = {}
    for k in range(1, trunc):
        bound = k * omega
        local = [m for m in monos if sum(m) <= bound]
        known = {}
        for left in local:
            lf = Poly.monomial(left)
            lfact = 1
            for e in left:
                lfact *= factorial(e)
            for right in local:
                rf = Poly.monomial(right)
                rfact = 1
                for e in right:
                    rfact *= factorial(e)
                residual = values[(left, right)].coeff(k)
                for (l2, r2), c in known.items():
                    df = lf.diff_multi(l2)
                    if df.is_zero():
                        continue
                    dg = rf.diff_multi(r2)
                    if dg.is_zero():
                        continue
                    residual = residual - c * df * dg
                if not residual.is_zero():
                    known[(left, right)] = residual.scaled(
                        Fraction(1, lfact * rfact))
        op = BidiffOperator(n, [(c, l, r) for (l, r), c in known.items()])
        if op.terms:
            operators[k] = op
    return StarProductSpec.tabulated(spec.structure, trunc, operators)


# ---------------------------------------------------------------------------
# verifiers
# ---------------------------------------------------------------------------

def verify_associativity(spec, degree_bound):
    """Check (x_a * x_b) * x_c = x_a * (x_b * x_c) on all monomial triples
    up to the degree bound, mod h^N.  None on pass, else the first failing
    triple with the lowest failing h-order."""
    monos = monomials_up_to(spec.n, degree_bound)
    for b in monos:
        pb = Poly.monomial(b)
        for c in monos:
            bc = spec.star_poly(pb, Poly.monomial(c))
            for a in monos:
                pa = Poly.monomial(a)
                lhs = spec.star(spec.star_poly(pa, pb), Poly.monomial(c))
                rhs = spec.star(pa, bc)
                if lhs != rhs:
                    diff = lhs - rhs
                    for k in range(spec.trunc):
                        if not diff.coeff(k).is_zero():
                            return (a, b, c, k)
    return None


def verify_commutator_bracket(spec, degree_bound):
    """Check f * g - g * f = h {f, g} mod h^2 on monomial pairs up to the
    bound.  None on pass, else (f, g, defect series)."""
    monos = monomials_up_to(spec.n, degree_bound)
    for a in monos:
        pa = Poly.monomial(a)
        for b in monos:
            pb = Poly.monomial(b)
            comm = spec.star_poly(pa, pb) - spec.star_poly(pb, pa)
            if not comm.coeff(0).is_zero():
                return (a, b, comm)
            if spec.trunc >= 2:
                if comm.coeff(1) != spec.structure.bracket(pa, pb):
                    return (a, b, comm)
    return None


def verify_degree_bound(spec, degree_bound):
    """Check deg B_m(f, g) <= deg f + deg g + (p - 2) m for every order m
    and monomial pair up to the bound.  Returns the list of violations."""
    p = spec.structure.degree
    monos = monomials_up_to(spec.n, degree_bound)
    violations = []
    for a in monos:
        pa = Poly.monomial(a)
        for b in monos:
            series = spec.star_poly(pa, Poly.monomial(b))
            for m in range(1, spec.trunc):
                term = series.coeff(m)
                if term.is_zero():
                    continue
                allowed = sum(a) + sum(b) + (p - 2) * m
                if term.degree() > allowed:
                    violations.append((m, a, b, term.degree(), allowed))
    return violations


def check_semiformal_filtration(spec, degree_bound):
    """Check deg of every h^k coefficient of f * g <= deg f + deg g on
    monomial pairs up to the bound (filtration compatibility).  None on
    pass, else the first violation (f, g, k, degree, allowed)."""
    monos = monomials_up_to(spec.n, degree_bound)
    for a in monos:
        pa = Poly.monomial(a)
        for b in monos:
            series = spec.star_poly(pa, Poly.monomial(b))
            allowed = sum(a) + sum(b)
            for k in range(spec.trunc):
                term = series.coeff(k)
                if not term.is_zero() and term.degree() > allowed:
                    return (a, b, k, term.degree(), allowed)
    return None
