"""Exact sparse linear algebra over the rationals.

Vectors are plain dicts ``key -> Rational`` with sortable keys; zero entries
are never stored. Everything here is Gaussian elimination, kept incremental so
that spans, membership tests, kernels and particular solutions all come out
of the same echelon basis.
"""

from __future__ import annotations

from typing import Dict, Hashable, List, Mapping, Optional, Sequence, Tuple

from .ring import Rational

Vector = Dict[Hashable, Rational]


def axpy(y: Vector, a: Rational, x: Mapping) -> None:
    """In place ``y += a * x``."""
    if not a:
        return
    for k, v in x.items():
        w = y.get(k, 0) + a * v
        if w:
            y[k] = w
        else:
            y.pop(k, None)


def combine(coeffs: Mapping[int, Rational], vectors: Sequence[Mapping]) -> Vector:
    out: Vector = {}
    for j, c in coeffs.items():
        axpy(out, c, vectors[j])
    return out


class Span:
    """Incremental echelon basis of a subspace.

    Each accepted vector is reduced against the previous basis vectors and
    normalized so that its pivot entry is 1. Alongside, every basis vector
    remembers its expression in terms of the vectors offered so far, so
    relations (kernel vectors) and coordinates are available for free.
    """

    def __init__(self):
        self.basis: List[Tuple[Hashable, Vector, Vector]] = []  # (pivot, vector, combo)
        self._pivots: Dict[Hashable, int] = {}
        self.offered = 0
        self.relations: List[Vector] = []

    def __len__(self):
        return len(self.basis)

    @property
    def rank(self) -> int:
        return len(self.basis)

    def reduce(self, vec: Mapping) -> Tuple[Vector, Vector]:
        """Return ``(residual, combo)`` with ``vec = residual + sum combo[j] * offered_j``."""
        v: Vector = dict(vec)
        combo: Vector = {}
        if not v:
            return v, combo
        for pivot, b, bc in self.basis:
            c = v.get(pivot)
            if c:
                axpy(v, -c, b)
                axpy(combo, c, bc)
        return v, combo

    def add(self, vec: Mapping) -> bool:
        """Offer a vector; returns True if it enlarged the span."""
        idx = self.offered
        self.offered += 1
        v, combo = self.reduce(vec)
        if not v:
            rel = {j: -c for j, c in combo.items()}
            rel[idx] = Rational(1)
            self.relations.append(rel)
            return False
        pivot = min(v)
        inv = 1 / v[pivot]
        v = {k: c * inv for k, c in v.items()}
        bc = {j: -c * inv for j, c in combo.items()}
        bc[idx] = inv
        self._pivots[pivot] = len(self.basis)
        self.basis.append((pivot, v, bc))
        return True

    def contains(self, vec: Mapping) -> bool:
        return not self.reduce(vec)[0]

    def coordinates(self, vec: Mapping) -> Optional[Vector]:
        """Coefficients on the offered vectors reproducing ``vec``, or None."""
        v, combo = self.reduce(vec)
        if v:
            return None
        return combo


def rank(vectors: Sequence[Mapping]) -> int:
    s = Span()
    for v in vectors:
        s.add(v)
    return s.rank


def rref_rows(rows: Sequence[Mapping]) -> List[Vector]:
    """Reduced row echelon form of a list of sparse rows (zero rows dropped)."""
    s = Span()
    for r in rows:
        s.add(r)
    basis = [(p, dict(v)) for p, v, _ in s.basis]
    basis.sort(key=lambda t: t[0])
    for i, (p, v) in enumerate(basis):
        for j, (q, w) in enumerate(basis):
            if j != i and w.get(p):
                axpy(w, -w[p], v)
    return [v for _, v in basis]


def nullspace(columns: Sequence[Mapping]) -> List[Vector]:
    """Basis of ``{c : sum_j c_j columns[j] = 0}``, in reduced echelon form.

    Kernel vectors are returned as dicts ``column index -> coefficient``.
    """
    s = Span()
    for col in columns:
        s.add(col)
    return rref_rows(s.relations)


def solve(columns: Sequence[Mapping], rhs: Mapping) -> Tuple[Optional[Vector], List[Vector]]:
    """Solve ``sum_j c_j columns[j] = rhs``.

    Returns ``(particular, kernel)``; ``particular`` is None when the system is
    inconsistent. The particular solution has zero weight on every column that
    is dependent on earlier ones.
    """
    s = Span()
    for col in columns:
        s.add(col)
    return s.coordinates(rhs), rref_rows(s.relations)


def independent_subset(vectors: Sequence[Mapping]) -> List[int]:
    """Indices of a maximal linearly independent subfamily, greedy in order."""
    s = Span()
    keep = []
    for j, v in enumerate(vectors):
        if s.add(v):
            keep.append(j)
    return keep


def inverse(matrix: Sequence[Sequence]) -> List[List[Rational]]:
    """Exact inverse of a square matrix given as nested sequences."""
    m = len(matrix)
    a = [[Rational(x) for x in row] + [Rational(int(i == j)) for j in range(m)] for i, row in enumerate(matrix)]
    for col in range(m):
        piv = next((r for r in range(col, m) if a[r][col]), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(m):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [row[m:] for row in a]


def determinant(matrix: Sequence[Sequence]) -> Rational:
    m = len(matrix)
    a = [[Rational(x) for x in row] for row in matrix]
    det = Rational(1)
    for col in range(m):
        piv = next((r for r in range(col, m) if a[r][col]), None)
        if piv is None:
            return Rational(0)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        det *= a[col][col]
        inv = 1 / a[col][col]
        for r in range(col + 1, m):
            if a[r][col]:
                f = a[r][col] * inv
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return det
