"""Deformed quotient algebras: liftings of ideal generators, hypothesis
checks (centrality, two-sidedness, membership), the reduction system
v_* = (Id - hA)^-1 B e_* over the star basis, normal forms and
multiplication tables for the quotient, and flatness certificates.

Degree-bounded linear algebra over cached multiple tables decides
membership questions; negative answers at a bound are reported as
inconclusive unless an exact obstruction makes them definite (the h^0
part fails classical ideal membership, or the ideal has one generator,
whose cofactors are unique order by order).
"""

from __future__ import annotations

from fractions import Fraction
from itertools import permutations
from math import factorial

from .algebra import (
    GREVLEX,
    HPoly,
    HSeries,
    Poly,
    monomial_to_multiindex,
    monomials_up_to,
    multiindex_to_monomial,
)
from .groebner import buchberger, standard_monomials
from .linalg import LinearSolver, kernel_basis
from .presentation import expand_star_monomial, star_basis_coords


# ---------------------------------------------------------------------------
# liftings
# ---------------------------------------------------------------------------

class Lifting:
    """Classical generators p_i together with series P_i whose h^0 part
    is p_i."""

    __slots__ = ("generators", "lifted", "strategy")

    def __init__(self, generators, lifted, strategy):
        for p, P in zip(generators, lifted):
            if P.h0() != p:
                raise ValueError("lifting has the wrong classical limit")
        self.generators = list(generators)
        self.lifted = list(lifted)
        self.strategy = strategy

    def __len__(self):
        return len(self.generators)


def weyl_symmetrize(spec, p):
    """Star-symmetrization lift: monomial x_I maps to the average of
    x_{i_s(1)} * ... * x_{i_s(m)} over all permutations s."""
    out = HSeries.zero(spec.n, spec.trunc)
    for mono, coeff in sorted(p.terms.items()):
        index = monomial_to_multiindex(mono)
        m = len(index)
        if m == 0:
            out = out + HSeries.from_poly(Poly.constant(spec.n, coeff), spec.trunc)
            continue
        acc = HSeries.zero(spec.n, spec.trunc)
        for word in permutations(index):
            acc = acc + expand_star_monomial(spec, word)
        out = out + acc * Fraction(coeff, factorial(m))
    return out


def check_centrality(spec, series, degree_bound=0):
    """None if the series commutes with every coordinate mod h^N (which
    suffices, since coordinates generate), plus a belt-and-braces sweep
    over monomials up to degree_bound.  Otherwise the first witness
    (monomial, commutator)."""
    probes = [multiindex_to_monomial((i,), spec.n) for i in range(spec.n)]
    for mono in monomials_up_to(spec.n, degree_bound):
        if sum(mono) > 1 and mono not in probes:
            probes.append(mono)
    for mono in probes:
        g = HSeries.from_poly(Poly.monomial(mono), spec.trunc)
        comm = spec.star(series, g) - spec.star(g, series)
        if not comm.is_zero():
            return (mono, comm)
    return None


def lift_generators(spec, generators, strategy, degree_bound=0, custom=None):
    """Build a Lifting by the named strategy.

    identity: embed each generator unchanged; requires centrality.
    weyl: star-symmetrization of each generator.
    custom: caller-provided series (classical limits are checked).
    """
    if strategy == "identity":
        lifted = []
        for p in generators:
            series = HSeries.from_poly(p, spec.trunc)
            witness = check_centrality(spec, series, degree_bound)
            if witness is not None:
                mono, comm = witness
                raise ValueError(
                    "identity lifting needs a central generator, but "
                    f"[{p.to_string()}, x^{list(mono)}] = {comm.to_string()}")
            lifted.append(series)
        return Lifting(generators, lifted, strategy)
    if strategy == "weyl":
        return Lifting(generators,
                       [weyl_symmetrize(spec, p) for p in generators], strategy)
    if strategy == "custom":
        if custom is None:
            raise ValueError("custom strategy needs the lifted series")
        return Lifting(generators, list(custom), strategy)
    raise ValueError(f"unknown lifting strategy {strategy!r}")


# ---------------------------------------------------------------------------
# the deformed ideal: cached multiple tables and membership solving
# ---------------------------------------------------------------------------

def _series_vector(series):
    vec = {}
    for k, poly in enumerate(series.coeffs):
        for mono, c in poly.terms.items():
            vec[(mono, k)] = c
    return vec


class CheckResult:
    """Three-valued outcome of a degree-bounded certificate search."""

    __slots__ = ("status", "witness", "detail", "bound")

    def __init__(self, status, witness=None, detail="", bound=None):
        if status not in ("pass", "witness", "inconclusive"):
            raise ValueError(f"bad status {status!r}")
        self.status = status
        self.witness = witness
        self.detail = detail
        self.bound = bound

    def passed(self):
        return self.status == "pass"

    def to_json(self):
        return {"status": self.status, "detail": self.detail,
                "bound": self.bound}


class MembershipResult:
    __slots__ = ("status", "certificate", "detail", "bound")

    def __init__(self, status, certificate=None, detail="", bound=None):
        if status not in ("member", "not_member", "inconclusive"):
            raise ValueError(f"bad status {status!r}")
        self.status = status
        self.certificate = certificate
        self.detail = detail
        self.bound = bound

    def to_json(self):
        return {"status": self.status, "detail": self.detail,
                "bound": self.bound}


class DeformedIdeal:
    """Two-sided ideal generated by the lifted series, realized through
    cached left and right multiple tables up to a coefficient degree."""

    __slots__ = ("spec", "lifting", "order", "_gb", "_tables")

    def __init__(self, spec, lifting, order=GREVLEX):
        self.spec = spec
        self.lifting = lifting
        self.order = order
        self._gb = None
        self._tables = {}

    def classical_basis(self):
        if self._gb is None:
            self._gb = buchberger(self.lifting.generators, self.order)
        return self._gb

    def multiples(self, side, coeff_degree):
        """[(i, mono, x^mono * P_i)] (left) or [(i, mono, P_i * x^mono)]
        (right) for all monomials of degree <= coeff_degree."""
        key = (side, coeff_degree)
        cached = self._tables.get(key)
        if cached is not None:
            return cached
        out = []
        for i, P in enumerate(self.lifting.lifted):
            for mono in monomials_up_to(self.spec.n, coeff_degree):
                g = Poly.monomial(mono)
                prod = self.spec.star(g, P) if side == "left" else self.spec.star(P, g)
                out.append((i, mono, prod))
        self._tables[key] = out
        return out

    # -- membership ----------------------------------------------------------

    def _solve_bounded(self, target, side, coeff_degree):
        solver = LinearSolver()
        for i, mono, prod in self.multiples(side, coeff_degree):
            base = _series_vector(prod)
            for k in range(self.spec.trunc):
                vec = {(m, kk + k): c for (m, kk), c in base.items()
                       if kk + k < self.spec.trunc}
                if vec:
                    solver.add((i, mono, k), vec)
        combo = solver.express(_series_vector(target))
        if combo is None:
            return None
        certificate = [HSeries.zero(self.spec.n, self.spec.trunc)
                       for _ in self.lifting.lifted]
        for (i, mono, k), c in combo.items():
            if c:
                term = HSeries.from_poly(Poly.monomial(mono, c), self.spec.trunc)
                certificate[i] = certificate[i] + term.shift(k)
        return certificate

    def _peel_single(self, target, side):
        """Exact membership for a single generator: cofactors are unique
        order by order because A_k * p0 = residue has at most one solution."""
        P = self.lifting.lifted[0]
        gb = self.classical_basis()
        trunc = self.spec.trunc
        n = self.spec.n
        cofactor = HSeries.zero(n, trunc)
        residual = target
        for k in range(trunc):
            layer = residual.coeff(k)
            if layer.is_zero():
                continue
            rem, cofs = gb.reduce_with_cofactors(layer)
            if not rem.is_zero():
                return MembershipResult(
                    "not_member",
                    detail=f"h^{k} residue {rem.to_string()} is not a multiple "
                           f"of {self.lifting.generators[0].to_string()}")
            piece = HSeries.from_poly(cofs[0], trunc).shift(k)
            cofactor = cofactor + piece
            prod = (self.spec.star(piece, P) if side == "left"
                    else self.spec.star(P, piece))
            residual = residual - prod
        if not residual.is_zero():
            return MembershipResult("not_member",
                                    detail="peeling left a nonzero residue")
        return MembershipResult("member", certificate=[cofactor])

    def membership(self, target, side="left", degree_bound=None, rounds=3):
        """Certificate search for target in the left or right span.

        Escalation starts at deg(target) + max deg(p_i) and raises by
        max(1, (p - 2) * (N - 1)) for up to `rounds` rounds (or uses the
        caller's degree_bound for the first round).
        """
        if target.is_zero():
            zero = [HSeries.zero(self.spec.n, self.spec.trunc)
                    for _ in self.lifting.lifted]
            return MembershipResult("member", certificate=zero)
        gb = self.classical_basis()
        if not gb.contains(target.h0()):
            return MembershipResult(
                "not_member",
                detail="classical part is not in the undeformed ideal")
        if len(self.lifting) == 1:
            return self._peel_single(target, side)
        maxgen = max(p.degree() for p in self.lifting.generators)
        bound = degree_bound if degree_bound is not None \
            else max(target.degree(), 0) + maxgen
        step = max(1, (self.spec.structure.degree - 2) * (self.spec.trunc - 1))
        for _ in range(rounds):
            certificate = self._solve_bounded(target, side, bound)
            if certificate is not None:
                recombined = HSeries.zero(self.spec.n, self.spec.trunc)
                for A, P in zip(certificate, self.lifting.lifted):
                    prod = (self.spec.star(A, P) if side == "left"
                            else self.spec.star(P, A))
                    recombined = recombined + prod
                if recombined != target:
                    raise AssertionError("membership certificate failed "
                                         "substitution; solver bug")
                return MembershipResult("member", certificate=certificate,
                                        bound=bound)
            bound += step
        return MembershipResult("inconclusive", bound=bound - step,
                                detail="no certificate within the degree bound")


def ideal_membership_mod(spec, target, lifting, degree_bound=None, side="left"):
    """Certificate A_i with target = sum A_i * P_i (left) or sum P_i * A_i
    (right), verified by substitution, or a definite/inconclusive refusal."""
    if isinstance(target, Poly):
        target = HSeries.from_poly(target, spec.trunc)
    ideal = DeformedIdeal(spec, lifting)
    return ideal.membership(target, side=side, degree_bound=degree_bound)


def check_two_sided(spec, lifting, degree_bound):
    """Certify that left and right spans of the lifted generators agree on
    multiples with coefficient degree <= degree_bound.

    pass: every left generator has a right certificate and conversely.
    witness: some generator is provably outside the opposite span.
    inconclusive: a bounded search was exhausted without either outcome.
    """
    ideal = DeformedIdeal(spec, lifting)
    monos = monomials_up_to(spec.n, degree_bound)
    # fast path: a central lifting has identical left and right multiples
    central = True
    for i, P in enumerate(lifting.lifted):
        for mono in monos:
            g = Poly.monomial(mono)
            if spec.star(g, P) != spec.star(P, g):
                central = False
                break
        if not central:
            break
    if central:
        return CheckResult("pass", detail="left and right multiples coincide termwise",
                           bound=degree_bound)

    worst = None
    for i, P in enumerate(lifting.lifted):
        for mono in monos:
            g = Poly.monomial(mono)
            left_gen = spec.star(g, P)
            right_gen = spec.star(P, g)
            for target, opposite, desc in (
                    (right_gen, "left", f"P{i + 1} * x^{list(mono)}"),
                    (left_gen, "right", f"x^{list(mono)} * P{i + 1}")):
                result = ideal.membership(target, side=opposite)
                if result.status == "not_member":
                    return CheckResult(
                        "witness",
                        witness=(i, mono, opposite, result.detail),
                        detail=f"{desc} has no {opposite}-span certificate: "
                               f"{result.detail}",
                        bound=degree_bound)
                if result.status == "inconclusive":
                    worst = result
    if worst is not None:
        return CheckResult("inconclusive", bound=worst.bound,
                           detail="certificate search exhausted its degree bound")
    return CheckResult("pass", bound=degree_bound)


# ---------------------------------------------------------------------------
# quotient basis and reduction system
# ---------------------------------------------------------------------------

class QuotientBasis:
    """Standard monomials (as multi-indices) of the classical ideal and
    their complement, up to a degree bound; the star basis of the quotient
    is their star-monomial image."""

    __slots__ = ("gb", "sms", "basis_indices", "complement_indices", "degree_bound")

    def __init__(self, gb, degree_bound):
        self.gb = gb
        self.sms = standard_monomials(gb, degree_bound)
        self.basis_indices = [monomial_to_multiindex(m) for m in self.sms.standard]
        self.complement_indices = [monomial_to_multiindex(m) for m in self.sms.complement]
        self.degree_bound = degree_bound

    def counts_per_degree(self):
        return list(self.sms.counts)


class ReductionSystem:
    """Rows of the solved system v_* = (Id - hA)^-1 B e_*, together with
    the raw B, A matrices and the middle coefficients C."""

    __slots__ = ("spec", "lifting", "qbasis", "b_rows", "a_rows", "c_table",
                 "solved", "_standard_set")

    def __init__(self, spec, lifting, qbasis, b_rows, a_rows, c_table, solved):
        self.spec = spec
        self.lifting = lifting
        self.qbasis = qbasis
        self.b_rows = b_rows
        self.a_rows = a_rows
        self.c_table = c_table
        self.solved = solved
        self._standard_set = set(qbasis.basis_indices)

    def degree_bound(self):
        return self.qbasis.degree_bound


def build_reduction_system(spec, lifting, qbasis):
    """For each complement star monomial v_mu, produce the exact identity

        v_mu = sum_a B_{mu a}(h) e_a + sum_i C_{mu i} * P_i
               + h sum_nu A_{mu nu}(h) v_nu    (mod h^N)

    by lifting the classical division termwise (star products replace
    commutative ones) and sweeping the O(h) defect into the A term, then
    solve it by the Neumann series of (Id - hA)."""
    trunc = spec.trunc
    gb = qbasis.gb
    standard_set = set(qbasis.basis_indices)
    complement = sorted(qbasis.complement_indices, key=lambda i: (len(i), i))

    b_rows, a_rows, c_table = {}, {}, {}
    for mu in complement:
        v = Poly.monomial(multiindex_to_monomial(mu, spec.n))
        nf, cofs = gb.reduce_with_cofactors(v)
        b_row = {}
        for mono, c in nf.terms.items():
            index = monomial_to_multiindex(mono)
            if index not in standard_set:
                raise ValueError(
                    f"normal form of {v.to_string()} leaves the represented "
                    f"degree range (bound {qbasis.degree_bound}); raise the bound")
            b_row[index] = HPoly.const(c)
        lifted_c = [HSeries.from_poly(c, trunc) for c in cofs]
        defect = expand_star_monomial(spec, mu)
        for index, hp in b_row.items():
            defect = defect - expand_star_monomial(spec, index) * hp
        for C, P in zip(lifted_c, lifting.lifted):
            defect = defect - spec.star(C, P)
        if not defect.coeff(0).is_zero():
            raise AssertionError("classical identity failed to lift; engine bug")
        a_row = {}
        for index, hp in star_basis_coords(spec, defect).items():
            if index in standard_set:
                b_row[index] = b_row.get(index, HPoly.zero()) + hp
            elif len(index) <= qbasis.degree_bound:
                a_row[index] = hp.shift_down(1).truncate(trunc)
            else:
                raise ValueError(
                    f"reduction defect for {mu} reaches degree {len(index)} "
                    f"beyond the bound {qbasis.degree_bound}; raise the bound")
        b_rows[mu] = {i: v for i, v in b_row.items() if not v.is_zero()}
        a_rows[mu] = {i: v for i, v in a_row.items() if not v.is_zero()}
        c_table[mu] = lifted_c

    # v = B e + (hA) v  =>  v = sum_m (hA)^m B e, stationary after N-1 steps
    solved = {mu: dict(b_rows[mu]) for mu in b_rows}
    for _ in range(trunc - 1):
        nxt = {}
        for mu in b_rows:
            acc = dict(b_rows[mu])
            for nu, a_entry in a_rows[mu].items():
                for a_idx, hp in solved[nu].items():
                    add = (a_entry * hp).shift(1).truncate(trunc)
                    if add.is_zero():
                        continue
                    cur = acc.get(a_idx)
                    total = add if cur is None else cur + add
                    if total.is_zero():
                        acc.pop(a_idx, None)
                    else:
                        acc[a_idx] = total
            nxt[mu] = acc
        solved = nxt
    solved = {mu: {a: hp.truncate(trunc) for a, hp in row.items() if hp.truncate(trunc)}
              for mu, row in solved.items()}
    return ReductionSystem(spec, lifting, qbasis, b_rows, a_rows, c_table, solved)


def quotient_normal_form(system, f):
    """Coordinates of the class of f over the star basis of the quotient."""
    spec = system.spec
    if isinstance(f, Poly):
        f = HSeries.from_poly(f, spec.trunc)
    out = {}
    for index, hp in star_basis_coords(spec, f).items():
        if index in system._standard_set:
            cur = out.get(index)
            out[index] = hp if cur is None else cur + hp
        elif index in system.solved:
            for a_idx, s in system.solved[index].items():
                add = (hp * s).truncate(spec.trunc)
                if add.is_zero():
                    continue
                cur = out.get(a_idx)
                out[a_idx] = add if cur is None else cur + add
        else:
            raise ValueError(
                f"coordinate {index} exceeds the reduction system's bound "
                f"{system.degree_bound()}")
    return {i: hp.truncate(spec.trunc) for i, hp in out.items()
            if hp.truncate(spec.trunc)}


def multiplication_table(system, degree_bound):
    """Structure constants e_a * e_b = sum c_{ab}^e e_e mod h^N for basis
    elements of degree <= degree_bound."""
    if 2 * degree_bound > system.degree_bound():
        raise ValueError("products reach degree 2d; build the reduction "
                         "system with a bound of at least 2d")
    spec = system.spec
    basis = [i for i in system.qbasis.basis_indices if len(i) <= degree_bound]
    table = {}
    for a in basis:
        ea = expand_star_monomial(spec, a)
        for b in basis:
            prod = spec.star(ea, expand_star_monomial(spec, b))
            table[(a, b)] = quotient_normal_form(system, prod)
    return table


# ---------------------------------------------------------------------------
# flatness certificates
# ---------------------------------------------------------------------------

class FlatnessReport:
    __slots__ = ("independence", "torsion_free", "counts_match", "counts",
                 "degree_bound", "trunc", "witnesses")

    def __init__(self, independence, torsion_free, counts_match, counts,
                 degree_bound, trunc, witnesses):
        self.independence = independence
        self.torsion_free = torsion_free
        self.counts_match = counts_match
        self.counts = counts
        self.degree_bound = degree_bound
        self.trunc = trunc
        self.witnesses = witnesses

    def passed(self):
        return self.independence and self.torsion_free and self.counts_match

    def to_json(self):
        return {
            "independence": self.independence,
            "torsion_free": self.torsion_free,
            "counts_match": self.counts_match,
            "counts_per_degree": self.counts,
            "degree_bound": self.degree_bound,
            "truncation": self.trunc,
            "witnesses": self.witnesses,
        }


def verify_flatness(system, degree_bound=None):
    """Certify, up to (degree_bound, N): (i) no nonzero combination of the
    star basis lies in the bounded ideal span, (ii) no bounded series F has
    h F in the span but F outside it, (iii) the per-degree star basis
    counts match the classical standard-monomial counts."""
    spec = system.spec
    trunc = spec.trunc
    if degree_bound is None:
        degree_bound = system.degree_bound()
    if degree_bound > system.degree_bound():
        raise ValueError("flatness bound exceeds the reduction system's bound")

    ideal = DeformedIdeal(spec, system.lifting)
    span = LinearSolver()
    for i, mono, prod in ideal.multiples("left", degree_bound):
        base = _series_vector(prod)
        for k in range(trunc):
            vec = {(m, kk + k): c for (m, kk), c in base.items() if kk + k < trunc}
            if vec:
                span.add((i, mono, k), vec)

    witnesses = {}

    # (i) independence of the star basis modulo the bounded span
    independence = True
    residues = LinearSolver()
    basis = [i for i in system.qbasis.basis_indices if len(i) <= degree_bound]
    for index in basis:
        vec = _series_vector(expand_star_monomial(spec, index))
        for k in range(trunc):
            shifted = {(m, kk + k): c for (m, kk), c in vec.items() if kk + k < trunc}
            residue = span.reduce(shifted)
            if not residue:
                independence = False
                witnesses["independence"] = \
                    f"h^{k} e_{list(index)} lies in the ideal span"
                break
            if not residues.add((index, k), residue):
                independence = False
                witnesses["independence"] = \
                    f"a combination involving h^{k} e_{list(index)} lies in the span"
                break
        if not independence:
            break

    # (ii) torsion probe: kernel of F -> residue of h F, each member must
    # itself lie in the span
    torsion_free = True
    columns = []
    for mono in monomials_up_to(spec.n, degree_bound):
        for k in range(trunc - 1):
            columns.append(((mono, k), span.reduce({(mono, k + 1): Fraction(1)})))
    for combo in kernel_basis(columns):
        vec = {key: c for key, c in combo.items()}
        if not span.in_span(vec):
            torsion_free = False
            mono_desc = {f"x^{list(m)}*h^{k}": str(c) for (m, k), c in combo.items()}
            witnesses["torsion"] = \
                f"h*F lies in the span but F does not: F = {mono_desc}"
            break

    # (iii) per-degree counts
    counts = system.qbasis.counts_per_degree()[:degree_bound + 1]
    complement_ok = all(
        mu in system.solved
        for mu in system.qbasis.complement_indices if len(mu) <= degree_bound)
    counts_match = complement_ok and all(
        sum(1 for i in system.qbasis.basis_indices if len(i) == d) == counts[d]
        for d in range(degree_bound + 1))
    if not counts_match:
        witnesses["counts"] = "reduction system does not cover the complement"

    return FlatnessReport(independence, torsion_free, counts_match, counts,
                          degree_bound, trunc, witnesses)
