"""Sparse exact linear algebra over Q.

Vectors are dicts mapping a hashable, totally ordered coordinate key to a
nonzero Fraction.  The solver keeps an incremental row echelon with
combination tracking, so membership queries come back with an explicit
expression over the inserted generators.
"""

from __future__ import annotations

from fractions import Fraction

_ZERO = Fraction(0)


def vec_add_scaled(target, src, factor):
    """target += factor * src, in place, dropping zeros."""
    for k, v in src.items():
        s = target.get(k, _ZERO) + factor * v
        if s:
            target[k] = s
        else:
            target.pop(k, None)


class LinearSolver:
    """Incremental echelon form with combination tracking.

    add(tag, vec) inserts a generator; express(vec) returns a dict
    tag -> Fraction with vec = sum coeff * generator, or None if vec is
    outside the span.
    """

    def __init__(self):
        self._rows = {}  # pivot key -> (vector, combo)

    def _eliminate(self, vec, combo):
        vec = dict(vec)
        while vec:
            pivot = min(vec)
            row = self._rows.get(pivot)
            if row is None:
                return vec, combo, pivot
            rvec, rcombo = row
            factor = -vec[pivot] / rvec[pivot]
            vec_add_scaled(vec, rvec, factor)
            vec_add_scaled(combo, rcombo, factor)
        return vec, combo, None

    def add(self, tag, vec):
        """Insert a generator; returns False if it was already in the span."""
        vec, combo, pivot = self._eliminate(vec, {tag: Fraction(1)})
        if pivot is None:
            return False
        self._rows[pivot] = (vec, combo)
        return True

    def express(self, vec):
        """Coordinates of vec over the inserted generators, or None."""
        residual, combo, pivot = self._eliminate(vec, {})
        if pivot is not None:
            return None
        return {t: -c for t, c in combo.items() if c}

    def reduce(self, vec):
        """Residual of vec modulo the current span."""
        residual, _combo, _pivot = self._eliminate(vec, {})
        return residual

    def in_span(self, vec):
        return self.express(vec) is not None

    def rank(self):
        return len(self._rows)


def kernel_basis(columns):
    """Kernel of the linear map e_tag -> column_tag.

    columns is a list of (tag, vector) pairs; returns a list of combos
    {tag: Fraction} with sum combo[tag] * column_tag = 0, one per kernel
    dimension (deterministic in input order).
    """
    solver = LinearSolver()
    kernel = []
    for tag, col in columns:
        combo = solver.express(col)
        if combo is None:
            solver.add(tag, col)
        else:
            combo[tag] = combo.get(tag, _ZERO) - 1
            kernel.append({t: -c for t, c in combo.items() if c})
    return kernel
