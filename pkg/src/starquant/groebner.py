"""Commutative ideal machinery: Buchberger's algorithm with
Gebauer-Moeller pair elimination, normal forms with cofactor tracking,
standard monomial enumeration, the maximal-rank smoothness test, and
antisymmetric syzygy certificates.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations

from .algebra import (
    GREVLEX,
    Poly,
    mono_degree,
    mono_divides,
    mono_lcm,
    mono_mul,
    mono_quotient,
    monomials_up_to,
)
from .linalg import LinearSolver


def divide(f, divisors, order):
    """Multivariate division: f = sum q_i * divisors[i] + r with no term of
    r divisible by any divisor's leading monomial.  Deterministic: always
    divides by the first eligible divisor."""
    n = f.n
    leads = [g.leading(order) for g in divisors]
    quotients = [Poly.zero(n) for _ in divisors]
    remainder = Poly.zero(n)
    p = f
    while p.terms:
        lm, lc = p.leading(order)
        for i, lead in enumerate(leads):
            if lead is not None and mono_divides(lead[0], lm):
                q_mono = mono_quotient(lm, lead[0])
                q_coeff = lc / lead[1]
                quotients[i] = quotients[i] + Poly.monomial(q_mono, q_coeff)
                p = p - divisors[i].term_mul(q_mono, q_coeff)
                break
        else:
            t = Poly.monomial(lm, lc)
            remainder = remainder + t
            p = p - t
    return quotients, remainder


def s_polynomial(f, g, order):
    (fm, fc), (gm, gc) = f.leading(order), g.leading(order)
    lcm = mono_lcm(fm, gm)
    uf = f.term_mul(mono_quotient(lcm, fm), Fraction(1) / fc)
    ug = g.term_mul(mono_quotient(lcm, gm), Fraction(1) / gc)
    return uf - ug


class GroebnerBasis:
    """Reduced Groebner basis with the transformation to the original
    generators: basis[k] = sum cofactors[k][i] * gens[i]."""

    __slots__ = ("order", "gens", "basis", "cofactors", "zero_ideal")

    def __init__(self, order, gens, basis, cofactors, zero_ideal=False):
        self.order = order
        self.gens = list(gens)
        self.basis = list(basis)
        self.cofactors = [list(c) for c in cofactors]
        self.zero_ideal = zero_ideal

    def leading_monomials(self):
        return [g.leading(self.order)[0] for g in self.basis]

    def divide(self, f):
        """(quotients over the basis, normal form)."""
        return divide(f, self.basis, self.order)

    def reduce(self, f):
        """Unique normal form of f modulo the ideal."""
        if not self.basis:
            return f
        return self.divide(f)[1]

    def reduce_with_cofactors(self, f):
        """(normal form r, cofactors c over the ORIGINAL generators) with
        f = sum c_i * gens[i] + r."""
        quotients, remainder = self.divide(f)
        cof = [Poly.zero(f.n) for _ in self.gens]
        for q, reps in zip(quotients, self.cofactors):
            if q.is_zero():
                continue
            for i, rep in enumerate(reps):
                if not rep.is_zero():
                    cof[i] = cof[i] + q * rep
        return remainder, cof

    def contains(self, f):
        return self.reduce(f).is_zero()

    def is_unit_ideal(self):
        return len(self.basis) == 1 and self.basis[0].is_constant() \
            and not self.basis[0].is_zero()

    def certify(self):
        """Every S-polynomial of the basis reduces to zero, and every
        tracked cofactor representation reproduces its basis element."""
        for i in range(len(self.basis)):
            for j in range(i):
                s = s_polynomial(self.basis[i], self.basis[j], self.order)
                if not self.reduce(s).is_zero():
                    return False
        for g, reps in zip(self.basis, self.cofactors):
            acc = Poly.zero(g.n)
            for rep, gen in zip(reps, self.gens):
                acc = acc + rep * gen
            if acc != g:
                return False
        return True

    def to_json(self, variables=None):
        return {
            "order": self.order.kind,
            "zero_ideal": self.zero_ideal,
            "leading_monomials": [list(m) for m in self.leading_monomials()],
            "basis": [g.to_string(variables, self.order) for g in self.basis],
        }


def _update_pairs(pairs, leads, t, order):
    """Gebauer-Moeller update on arrival of element index t: prune the new
    pairs (i, t) among themselves (divisor and product criteria), then
    prune the old pairs by the chain criterion."""
    lm_t = leads[t]
    lcm_with = {i: mono_lcm(leads[i], lm_t) for i in range(t)}

    candidates = sorted(range(t), key=lambda i: (order.key(lcm_with[i]), i))
    kept_new = []
    while candidates:
        i = candidates.pop(0)
        li = lcm_with[i]
        coprime = mono_mul(leads[i], lm_t) == li
        if coprime or (
                not any(mono_divides(lcm_with[k], li) for k in candidates)
                and not any(mono_divides(lcm_with[k], li) for k in kept_new)):
            kept_new.append(i)
    new_pairs = [(i, t) for i in kept_new
                 if mono_mul(leads[i], lm_t) != lcm_with[i]]

    old_pairs = []
    for (i, j) in pairs:
        lcm_ij = mono_lcm(leads[i], leads[j])
        if (not mono_divides(lm_t, lcm_ij)
                or lcm_with[i] == lcm_ij or lcm_with[j] == lcm_ij):
            old_pairs.append((i, j))
    return old_pairs + new_pairs


def buchberger(gens, order=GREVLEX):
    """Reduced Groebner basis of (gens), with cofactor tracking.

    All-zero input yields the flagged empty basis of the zero ideal.
    """
    if not gens:
        raise ValueError("empty generator list")
    n = gens[0].n
    for g in gens:
        if g.n != n:
            raise ValueError("generators have mixed dimensions")
    work = [(g, i) for i, g in enumerate(gens) if not g.is_zero()]
    if not work:
        return GroebnerBasis(order, gens, [], [], zero_ideal=True)

    basis = []   # monic polynomials
    cofs = []    # parallel cofactor vectors over gens
    leads = []
    pairs = []

    def zero_cof():
        return [Poly.zero(n) for _ in gens]

    def full_reduce_tracked(p, pcof):
        """Full normal form against the current basis, updating cofactors."""
        result = Poly.zero(n)
        while p.terms:
            lm, lc = p.leading(order)
            for k, lead in enumerate(leads):
                if mono_divides(lead, lm):
                    q_mono = mono_quotient(lm, lead)
                    p = p - basis[k].term_mul(q_mono, lc)
                    for i, rep in enumerate(cofs[k]):
                        if not rep.is_zero():
                            pcof[i] = pcof[i] - rep.term_mul(q_mono, lc)
                    break
            else:
                t = Poly.monomial(lm, lc)
                result = result + t
                p = p - t
        return result, pcof

    def append(p, pcof):
        lm, lc = p.leading(order)
        inv = Fraction(1) / lc
        basis.append(p.scaled(inv))
        cofs.append([c.scaled(inv) for c in pcof])
        leads.append(lm)

    for g, gi in sorted(work, key=lambda t: order.key(t[0].leading(order)[0])):
        gcof = zero_cof()
        gcof[gi] = Poly.one(n)
        r, rcof = full_reduce_tracked(g, gcof)
        if r.is_zero():
            continue
        append(r, rcof)
        pairs = _update_pairs(pairs, leads, len(basis) - 1, order)

    while pairs:
        # normal selection: smallest lcm first
        pairs.sort(key=lambda ij: (order.key(mono_lcm(leads[ij[0]], leads[ij[1]])),
                                   ij[1], ij[0]))
        i, j = pairs.pop(0)
        lcm = mono_lcm(leads[i], leads[j])
        qi = mono_quotient(lcm, leads[i])
        qj = mono_quotient(lcm, leads[j])
        s = basis[i].term_mul(qi, 1) - basis[j].term_mul(qj, 1)
        scof = zero_cof()
        for t in range(len(gens)):
            acc = Poly.zero(n)
            if not cofs[i][t].is_zero():
                acc = acc + cofs[i][t].term_mul(qi, 1)
            if not cofs[j][t].is_zero():
                acc = acc - cofs[j][t].term_mul(qj, 1)
            scof[t] = acc
        r, rcof = full_reduce_tracked(s, scof)
        if r.is_zero():
            continue
        append(r, rcof)
        pairs = _update_pairs(pairs, leads, len(basis) - 1, order)

    return _interreduce(gens, basis, cofs, order)


def _interreduce(gens, basis, cofs, order):
    """Minimize then tail-reduce to the unique reduced basis."""
    # minimize: processing leads in ascending order, drop any element whose
    # lead is divisible by an already kept one
    idx = sorted(range(len(basis)), key=lambda i: order.key(basis[i].leading(order)[0]))
    kept = []
    for i in idx:
        lm = basis[i].leading(order)[0]
        if any(mono_divides(basis[j].leading(order)[0], lm) for j in kept):
            continue
        kept.append(i)
    basis = [basis[i] for i in kept]
    cofs = [cofs[i] for i in kept]

    # tail-reduce each element against the others; leads are pairwise
    # non-divisible, so the leading term (coefficient 1) is stable
    changed = True
    while changed:
        changed = False
        for i in range(len(basis)):
            others = basis[:i] + basis[i + 1:]
            other_cofs = cofs[:i] + cofs[i + 1:]
            quotients, r = divide(basis[i], others, order)
            if r == basis[i]:
                continue
            changed = True
            rcof = list(cofs[i])
            for q, reps in zip(quotients, other_cofs):
                if q.is_zero():
                    continue
                for t, rep in enumerate(reps):
                    if not rep.is_zero():
                        rcof[t] = rcof[t] - q * rep
            basis[i] = r
            cofs[i] = rcof

    ordered = sorted(zip(basis, cofs), key=lambda t: order.key(t[0].leading(order)[0]))
    basis = [p for p, _ in ordered]
    cofs = [c for _, c in ordered]
    return GroebnerBasis(order, gens, basis, cofs)


# ---------------------------------------------------------------------------
# standard monomials
# ---------------------------------------------------------------------------

class StandardMonomialSet:
    """Monomials up to a degree bound split into the quotient basis (not
    divisible by any leading monomial) and its complement."""

    __slots__ = ("n", "degree_bound", "standard", "complement", "counts")

    def __init__(self, n, degree_bound, standard, complement):
        self.n = n
        self.degree_bound = degree_bound
        self.standard = list(standard)
        self.complement = list(complement)
        counts = [0] * (degree_bound + 1)
        for m in self.standard:
            counts[mono_degree(m)] += 1
        self.counts = counts

    def count_at_degree(self, d):
        return self.counts[d]

    def cumulative_counts(self):
        out, total = [], 0
        for c in self.counts:
            total += c
            out.append(total)
        return out

    def to_json(self):
        return {
            "degree_bound": self.degree_bound,
            "counts_per_degree": self.counts,
            "standard": [list(m) for m in self.standard],
        }


def standard_monomials(gb, degree_bound):
    """Monomials of degree <= bound not divisible by any GB leading
    monomial, plus the complement, in graded-lex enumeration order."""
    if degree_bound < 0:
        raise ValueError("degree bound must be >= 0")
    n = gb.gens[0].n
    leads = gb.leading_monomials()
    standard, complement = [], []
    for m in monomials_up_to(n, degree_bound):
        if any(mono_divides(lead, m) for lead in leads):
            complement.append(m)
        else:
            standard.append(m)
    return StandardMonomialSet(n, degree_bound, standard, complement)


# ---------------------------------------------------------------------------
# smoothness: maximal rank of the Jacobian on the zero set
# ---------------------------------------------------------------------------

class RankCheck:
    __slots__ = ("passed", "witness")

    def __init__(self, passed, witness):
        self.passed = passed
        self.witness = witness  # GroebnerBasis of (gens) + (minors)

    def __bool__(self):
        return self.passed


def _determinant(rows):
    """Exact determinant of a square Poly matrix by Laplace expansion."""
    size = len(rows)
    if size == 1:
        return rows[0][0]
    n = rows[0][0].n
    det = Poly.zero(n)
    for j in range(size):
        entry = rows[0][j]
        if entry.is_zero():
            continue
        minor = [[row[k] for k in range(size) if k != j] for row in rows[1:]]
        sub = _determinant(minor)
        det = det + (entry * sub if j % 2 == 0 else -(entry * sub))
    return det


def jacobian_rank_check(gens, order=GREVLEX):
    """Certify that the differentials of gens have maximal rank at every
    point of their common zero set: 1 must lie in (gens) + (m x m minors
    of the Jacobian)."""
    if not gens:
        raise ValueError("empty generator list")
    n = gens[0].n
    m = len(gens)
    if m > n:
        raise ValueError(f"rank {m} impossible with {n} variables")
    jac = [[g.diff(j) for j in range(n)] for g in gens]
    minors = []
    for cols in combinations(range(n), m):
        minor = _determinant([[jac[i][j] for j in cols] for i in range(m)])
        if not minor.is_zero():
            minors.append(minor)
    gb = buchberger(list(gens) + minors, order)
    return RankCheck(gb.is_unit_ideal(), gb)


# ---------------------------------------------------------------------------
# antisymmetric syzygies
# ---------------------------------------------------------------------------

def antisymmetric_syzygy(a, p, degree_bound, order=GREVLEX):
    """Given a relation sum a_i * p_i = 0, find b with b[i][j] = -b[j][i],
    deg b[i][j] <= degree_bound and a_i = sum_j b[i][j] * p_j.

    The search is degree-incremental from max deg(a_i) up to the bound;
    None means no solution within the bound, which is inconclusive, not a
    disproof of existence.
    """
    if len(a) != len(p):
        raise ValueError("relation and generator lists differ in length")
    m = len(p)
    n = p[0].n
    total = Poly.zero(n)
    for ai, pi in zip(a, p):
        total = total + ai * pi
    if not total.is_zero():
        raise ValueError("not a relation: sum a_i * p_i != 0")

    if all(ai.is_zero() for ai in a):
        return [[Poly.zero(n) for _ in range(m)] for _ in range(m)]

    start = max(ai.degree() for ai in a if not ai.is_zero())
    start = min(max(start, 0), degree_bound)
    for d in range(start, degree_bound + 1):
        b = _syzygy_at_degree(a, p, d)
        if b is not None:
            return b
    return None


def _syzygy_at_degree(a, p, d):
    m = len(p)
    n = p[0].n
    monos = monomials_up_to(n, d)
    solver = LinearSolver()
    for alpha in range(m):
        for beta in range(alpha + 1, m):
            for mono in monos:
                # column of the unknown coefficient of x^mono in b[alpha][beta]
                col = {}
                for mm, c in p[beta].terms.items():
                    key = (alpha, mono_mul(mono, mm))
                    col[key] = col.get(key, Fraction(0)) + c
                for mm, c in p[alpha].terms.items():
                    key = (beta, mono_mul(mono, mm))
                    col[key] = col.get(key, Fraction(0)) - c
                col = {k: v for k, v in col.items() if v}
                if col:
                    solver.add((alpha, beta, mono), col)
    target = {}
    for alpha, ai in enumerate(a):
        for mm, c in ai.terms.items():
            target[(alpha, mm)] = c
    combo = solver.express(target)
    if combo is None:
        return None
    b = [[Poly.zero(n) for _ in range(m)] for _ in range(m)]
    for (alpha, beta, mono), c in combo.items():
        if c:
            term = Poly.monomial(mono, c)
            b[alpha][beta] = b[alpha][beta] + term
            b[beta][alpha] = b[beta][alpha] - term
    return b
