"""Generators-and-relations machinery for the deformed affine algebra:
expansion of ordered star monomials over commutative monomials (the
matrix A = Id + hB), its Neumann-series inverse, coordinates in the star
monomial basis, rewriting of unordered words, and emission of the
relation ideal presenting the algebra mod h^N.

Rows and columns of expansion matrices are both indexed by sorted
multi-indices; the bijection with monomials makes the choice cosmetic.
Multi-index enumeration order is graded-lexicographic.
"""

from __future__ import annotations

from .algebra import (
    HPoly,
    HSeries,
    Poly,
    monomial_to_multiindex,
    multiindex_to_monomial,
    multiindices_up_to,
)


def expand_star_monomial(spec, index):
    """x_{i1} * ... * x_{im} as a series mod h^N, folding left to right.

    Accepts sorted multi-indices and arbitrary words alike; results for
    sorted prefixes are cached on the spec.
    """
    index = tuple(index)
    for i in index:
        if not 0 <= i < spec.n:
            raise ValueError(f"variable index {i} out of range")
    cache = spec._expand_cache
    cached = cache.get(index)
    if cached is not None:
        return cached
    acc = cache[()]
    known = 0
    # reuse the longest cached prefix
    for cut in range(len(index) - 1, 0, -1):
        hit = cache.get(index[:cut])
        if hit is not None:
            acc, known = hit, cut
            break
    for pos in range(known, len(index)):
        acc = spec.star(acc, Poly.variable(spec.n, index[pos]))
        cache[index[:pos + 1]] = acc
    return acc


def star_basis_coords(spec, f, degree_bound=None):
    """Coordinates c_J with f = sum_J c_J x_{*J} mod h^N, peeled order by
    order in h: the h^0 residue determines new coordinates, whose star
    expansions are subtracted before the next order.

    Exact for any input; degree_bound, when given, is enforced on f as a
    precondition.
    """
    if isinstance(f, Poly):
        f = HSeries.from_poly(f, spec.trunc)
    if f.trunc != spec.trunc:
        raise ValueError("operand truncation does not match the product")
    if degree_bound is not None and f.degree() > degree_bound:
        raise ValueError(
            f"degree {f.degree()} exceeds the declared bound {degree_bound}")
    coords = {}
    residual = f
    for k in range(spec.trunc):
        layer = residual.coeff(k)
        if layer.is_zero():
            continue
        batch = []
        for mono, c in sorted(layer.terms.items()):
            index = monomial_to_multiindex(mono)
            hp = HPoly.h(k, c) if k else HPoly.const(c)
            coords[index] = coords.get(index, HPoly.zero()) + hp
            batch.append((index, c))
        if k < spec.trunc - 1:
            for index, c in batch:
                residual = residual - expand_star_monomial(spec, index).shift(k) * c
    return {i: v for i, v in coords.items() if not v.is_zero()}


def recompose(spec, coords):
    """sum_J c_J x_{*J}: inverse of star_basis_coords."""
    out = HSeries.zero(spec.n, spec.trunc)
    for index, hp in coords.items():
        out = out + expand_star_monomial(spec, index) * hp
    return out


def rewrite_unordered(spec, word):
    """Coordinates of the star word x_{w1} * ... * x_{wm} over the ordered
    star monomial basis."""
    return star_basis_coords(spec, expand_star_monomial(spec, word))


def normal_form_word(spec, element):
    """Image in the ordered star basis of a formal sum of tensor words
    with coefficients in Q[h]/(h^N).

    element iterates as (word, HPoly) pairs (a mapping works too).
    """
    if hasattr(element, "items"):
        element = element.items()
    total = HSeries.zero(spec.n, spec.trunc)
    for word, coeff in element:
        total = total + expand_star_monomial(spec, word) * coeff
    return star_basis_coords(spec, total)


# ---------------------------------------------------------------------------
# expansion matrices
# ---------------------------------------------------------------------------

class ExpansionMatrix:
    """Row-finite matrix over Q[h]/(h^N) indexed by sorted multi-indices.

    kind "expand" holds A (star monomials over commutative monomials);
    kind "contract" holds the Neumann inverse.  Rows extend lazily, so
    Custom engines whose corrections raise the degree stay closed; the
    highest degree actually touched is reported.
    """

    __slots__ = ("spec", "trunc", "degree_bound", "kind", "rows", "_compute")

    def __init__(self, spec, degree_bound, kind, compute=None):
        self.spec = spec
        self.trunc = spec.trunc
        self.degree_bound = degree_bound
        self.kind = kind
        self.rows = {}
        self._compute = compute

    def row(self, index):
        index = tuple(index)
        cached = self.rows.get(index)
        if cached is None:
            if self._compute is None:
                raise KeyError(f"row {index} not represented")
            cached = self._compute(index)
            self.rows[index] = cached
        return cached

    def entry(self, row_index, col_index):
        return self.row(row_index).get(tuple(col_index), HPoly.zero())

    def indices(self):
        return sorted(self.rows, key=lambda i: (len(i), i))

    def working_degree(self):
        touched = [len(i) for i in self.rows]
        touched += [len(j) for r in self.rows.values() for j in r]
        return max(touched) if touched else 0

    def row_support_counts(self):
        return {i: len(self.rows[i]) for i in self.indices()}

    def compose(self, other, indices=None):
        """Row set of self applied to other: (self * other)[i] rows."""
        out = {}
        for i in (indices if indices is not None else self.indices()):
            acc = {}
            for j, entry in self.row(i).items():
                for k, entry2 in other.row(j).items():
                    prod = entry.mul_mod(entry2, self.trunc)
                    if prod.is_zero():
                        continue
                    cur = acc.get(k)
                    total = prod if cur is None else cur + prod
                    if total.is_zero():
                        acc.pop(k, None)
                    else:
                        acc[k] = total
            out[i] = acc
        return out

    def is_identity_product(self, other, indices=None):
        for i, row in self.compose(other, indices).items():
            if row != {i: HPoly.one()}:
                return False
        return True

    def to_json(self):
        rows = {}
        for i in self.indices():
            rows[",".join(str(t + 1) for t in i) or "()"] = [
                {"index": [t + 1 for t in j], "coeff": entry.to_string()}
                for j, entry in sorted(self.row(i).items())
            ]
        return {
            "kind": self.kind,
            "truncation": self.trunc,
            "degree_bound": self.degree_bound,
            "working_degree": self.working_degree(),
            "row_support_counts": {
                ",".join(str(t + 1) for t in i) or "()": c
                for i, c in self.row_support_counts().items()},
            "rows": rows,
        }


def _series_to_row(series):
    row = {}
    for k, poly in enumerate(series.coeffs):
        for mono, c in poly.terms.items():
            index = monomial_to_multiindex(mono)
            hp = HPoly.h(k, c) if k else HPoly.const(c)
            cur = row.get(index)
            row[index] = hp if cur is None else cur + hp
    return {i: v for i, v in row.items() if not v.is_zero()}


def build_expansion_matrix(spec, degree_bound):
    """A with rows x_{*I} = sum_J A_I^J x_J for every sorted multi-index of
    degree <= bound.  A - Id is divisible by h."""
    if degree_bound < 0:
        raise ValueError("degree bound must be >= 0")
    matrix = ExpansionMatrix(
        spec, degree_bound, "expand",
        compute=lambda index: _series_to_row(expand_star_monomial(spec, index)))
    for index in multiindices_up_to(spec.n, degree_bound):
        matrix.row(index)
    return matrix


def invert_expansion(matrix):
    """Neumann inverse sum_m (-1)^m h^m B^m of A = Id + hB, computed row by
    row; rows of A extend lazily when B reaches outside the represented
    range (possible for degree-raising Custom engines)."""
    if matrix.kind != "expand":
        raise ValueError("can only invert an expansion matrix")
    trunc = matrix.trunc

    def b_row(index):
        row = matrix.row(index)
        out = {}
        for j, entry in row.items():
            if j == index:
                entry = entry - HPoly.one()
            if entry.is_zero():
                continue
            if entry.order() == 0:
                raise ValueError("matrix is not of the form Id + h B")
            out[j] = entry.shift_down(1)
        return out

    def neumann_row(index):
        acc = {index: HPoly.one()}
        term = {index: HPoly.one()}
        for _ in range(1, trunc):
            nxt = {}
            for j, entry in term.items():
                for k, entry2 in b_row(j).items():
                    prod = ((entry * entry2).shift(1) * -1).truncate(trunc)
                    if prod.is_zero():
                        continue
                    cur = nxt.get(k)
                    total = prod if cur is None else cur + prod
                    if total.is_zero():
                        nxt.pop(k, None)
                    else:
                        nxt[k] = total
            term = nxt
            if not term:
                break
            for k, entry in term.items():
                cur = acc.get(k)
                total = entry if cur is None else cur + entry
                if total.is_zero():
                    acc.pop(k, None)
                else:
                    acc[k] = total
        return acc

    inverse = ExpansionMatrix(matrix.spec, matrix.degree_bound, "contract",
                              compute=neumann_row)
    for index in matrix.indices():
        inverse.row(index)
    return inverse


# ---------------------------------------------------------------------------
# relation sets
# ---------------------------------------------------------------------------

class Relation:
    """word = sum_J coeff_J x_{*J}, an identity mod h^N."""

    __slots__ = ("word", "rhs")

    def __init__(self, word, rhs):
        self.word = tuple(word)
        self.rhs = dict(rhs)

    def classical_part(self):
        """rhs with h set to 0."""
        return {i: hp.coeff(0) for i, hp in self.rhs.items() if hp.coeff(0)}

    def is_classical_commutator(self):
        """True iff at h = 0 the relation degenerates to word = sorted(word)."""
        return self.classical_part() == {tuple(sorted(self.word)): 1}

    def to_json(self, variables=None):
        names = variables or [f"x{i + 1}" for i in range(max(self.word) + 1)]
        return {
            "word": [i + 1 for i in self.word],
            "rhs": [{"multiindex": [t + 1 for t in i],
                     "coeff_poly_in_h": hp.to_string()}
                    for i, hp in sorted(self.rhs.items())],
        }

    def render(self, variables=None, symbol="X"):
        def gen(i):
            return f"{symbol}{i + 1}"

        lhs = "*".join(gen(i) for i in self.word)
        parts = []
        for index, hp in sorted(self.rhs.items(),
                                key=lambda t: (-len(t[0]), t[0])):
            mono = "*".join(gen(i) for i in index) if index else "1"
            coeff = hp.to_string()
            if coeff == "1":
                body = mono
            elif coeff == "-1":
                body = "-" + mono
            elif "+" in coeff or (coeff.count("-") and not coeff.startswith("-")):
                body = f"({coeff})*{mono}"
            else:
                body = f"{coeff}*{mono}" if mono != "1" else coeff
            if not parts:
                parts.append(body)
            else:
                parts.append(("- " + body[1:]) if body.startswith("-") else "+ " + body)
        return f"{lhs} = " + " ".join(parts)


class RelationSet:
    """Generators of the relation ideal mod h^N up to a degree bound."""

    __slots__ = ("relations", "degree_bound", "trunc")

    def __init__(self, relations, degree_bound, trunc):
        self.relations = list(relations)
        self.degree_bound = degree_bound
        self.trunc = trunc

    def __iter__(self):
        return iter(self.relations)

    def __len__(self):
        return len(self.relations)

    def to_json(self, variables=None):
        return {
            "degree_bound": self.degree_bound,
            "truncation": self.trunc,
            "relations": [r.to_json(variables) for r in self.relations],
        }

    def render(self, variables=None):
        return "\n".join(r.render(variables) for r in self.relations)


def emit_presentation(spec, degree_bound):
    """One relation per adjacent transposition of each sorted multi-index
    of degree <= bound; every unordered word is reachable from these.
    Each relation is re-verified by substitution before emission."""
    if degree_bound < 2:
        raise ValueError("presentation needs degree bound >= 2")
    relations = []
    for index in multiindices_up_to(spec.n, degree_bound):
        if len(index) < 2:
            continue
        for s in range(len(index) - 1):
            if index[s] >= index[s + 1]:
                continue
            word = index[:s] + (index[s + 1], index[s]) + index[s + 2:]
            rhs = rewrite_unordered(spec, word)
            if recompose(spec, rhs) != expand_star_monomial(spec, word):
                raise AssertionError(
                    f"relation for word {word} fails substitution; engine bug")
            relations.append(Relation(word, rhs))
    relations.sort(key=lambda r: (len(r.word), r.word))
    return RelationSet(relations, degree_bound, spec.trunc)
