"""Polynomial Poisson structures on affine n-space: bracket evaluation,
Jacobi verification, Casimir and Poisson-ideal tests.
"""

from __future__ import annotations

from itertools import combinations

from .algebra import Poly


class PoissonStructure:
    """Antisymmetric n x n matrix of polynomials alpha[i][j] = {x_i, x_j}.

    Construct with entries for i < j only (the mirror is filled by
    antisymmetry); supplying both (i, j) and (j, i) is accepted when
    consistent and rejected otherwise.
    """

    __slots__ = ("n", "alpha", "degree")

    def __init__(self, n, entries):
        if n < 1:
            raise ValueError("dimension must be >= 1")
        alpha = [[Poly.zero(n) for _ in range(n)] for _ in range(n)]
        seen = {}
        for (i, j), p in entries.items():
            if not (0 <= i < n and 0 <= j < n):
                raise ValueError(f"entry index ({i}, {j}) out of range")
            if i == j:
                if not p.is_zero():
                    raise ValueError(f"diagonal entry ({i}, {i}) must be zero")
                continue
            if p.n != n:
                raise ValueError("entry dimension mismatch")
            key = (min(i, j), max(i, j))
            value = p if i < j else -p
            if key in seen:
                if seen[key] != value:
                    raise ValueError(
                        f"entries ({key[0]}, {key[1]}) and mirror are not antisymmetric")
                continue
            seen[key] = value
        for (i, j), p in seen.items():
            alpha[i][j] = p
            alpha[j][i] = -p
        self.n = n
        self.alpha = tuple(tuple(row) for row in alpha)
        degs = [p.degree() for row in self.alpha for p in row if not p.is_zero()]
        self.degree = max(degs) if degs else 0

    @classmethod
    def zero(cls, n):
        return cls(n, {})

    def entry(self, i, j):
        return self.alpha[i][j]

    def is_constant(self):
        return all(p.is_constant() for row in self.alpha for p in row)

    def is_linear(self):
        """Every entry homogeneous of degree one (or zero)."""
        for row in self.alpha:
            for p in row:
                for m, _ in p.terms.items():
                    if sum(m) != 1:
                        return False
        return True

    def structure_constants(self):
        """c[i][j][k] with alpha[i][j] = sum_k c[i][j][k] * x_k; requires a
        linear structure."""
        if not self.is_linear():
            raise ValueError("structure is not linear")
        n = self.n
        c = [[[p.coeff(tuple(1 if t == k else 0 for t in range(n)))
               for k in range(n)]
              for p in row] for row in self.alpha]
        return c

    def bracket(self, f, g):
        """{f, g} = sum alpha[i][j] * df/dx_i * dg/dx_j."""
        if f.n != self.n or g.n != self.n:
            raise ValueError("dimension mismatch")
        out = Poly.zero(self.n)
        df = [f.diff(i) for i in range(self.n)]
        dg = [g.diff(j) for j in range(self.n)]
        for i in range(self.n):
            if df[i].is_zero():
                continue
            for j in range(self.n):
                a = self.alpha[i][j]
                if a.is_zero() or dg[j].is_zero():
                    continue
                out = out + a * df[i] * dg[j]
        return out

    def check_jacobi(self):
        """None if the Jacobi identity holds; otherwise the first coordinate
        triple (i, j, k) with its nonzero Jacobiator.

        Coordinate triples suffice: the Jacobiator is a derivation in each
        argument, so it vanishes identically iff it vanishes on them.
        """
        for i, j, k in combinations(range(self.n), 3):
            x = [Poly.variable(self.n, t) for t in (i, j, k)]
            jac = (self.bracket(x[0], self.alpha[j][k])
                   + self.bracket(x[1], self.alpha[k][i])
                   + self.bracket(x[2], self.alpha[i][j]))
            if not jac.is_zero():
                return (i, j, k, jac)
        return None

    def is_casimir(self, f):
        """True iff {f, x_j} = 0 for every coordinate (enough by Leibniz)."""
        if f.n != self.n:
            raise ValueError("dimension mismatch")
        for j in range(self.n):
            if not self.bracket(f, Poly.variable(self.n, j)).is_zero():
                return False
        return True

    def is_poisson_ideal(self, gens, gb):
        """True iff {p_i, x_j} lies in the ideal for every generator and
        coordinate, deciding membership with the given Groebner basis."""
        for g in gens:
            if not gb.reduce(g).is_zero():
                raise ValueError("Groebner basis is inconsistent with the generators")
        for p in gens:
            for j in range(self.n):
                br = self.bracket(p, Poly.variable(self.n, j))
                if not gb.reduce(br).is_zero():
                    return False
        return True

    def to_json(self, variables=None):
        cells = {}
        for i in range(self.n):
            for j in range(i + 1, self.n):
                if not self.alpha[i][j].is_zero():
                    cells[f"{i + 1},{j + 1}"] = self.alpha[i][j].to_string(variables)
        return {"dimension": self.n, "degree": self.degree, "alpha": cells}

    def __repr__(self):
        return f"PoissonStructure(n={self.n}, degree={self.degree})"
