"""The conformal Lie algebra o(p+1, q+1) of the flat model R^{p,q}.

Generators are realized twice: as conformal Killing vector fields on R^n and
as matrices acting on the ambient space R^{p+1,q+1}. The ambient space uses
the light-cone basis ``(e_+, e_1, ..., e_n, e_-)`` with ``<e_+, e_-> = 1`` and
the flat metric on the middle block; the point ``x`` of R^n sits on the null
cone as ``e_+ + x^i e_i - (x^2/2) e_-``.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from functools import lru_cache
from typing import Dict, List, Sequence, Tuple

from . import linalg
from .opalg import DiffOp, PhaseOp, left_sharp_op, right_sharp_op
from .ring import Rational, PhasePoly, Signature, as_fraction

Matrix = Tuple[Tuple[Rational, ...], ...]


@dataclass(frozen=True)
class ConformalGenerator:
    """One basis element of the conformal algebra.

    ``label`` is ``("P", i)``, ``("J", i, j)`` with ``i < j``, ``("E",)`` or
    ``("K", i)``; indices are 0-based.
    """

    label: tuple
    field: Tuple[PhasePoly, ...]
    ambient: Matrix
    divergence: PhasePoly = dc_field(compare=False)

    @property
    def n(self) -> int:
        return len(self.field)

    @property
    def name(self) -> str:
        head, *idx = self.label
        return head + "".join(str(i) for i in idx)

    def symbol(self) -> PhasePoly:
        """The moment-map symbol ``X^i p_i``."""
        n = self.n
        out = PhasePoly.zero(n)
        for i, comp in enumerate(self.field):
            out = out + comp * PhasePoly.p(i, n)
        return out

    def __repr__(self):
        return f"ConformalGenerator({self.name})"


def _poly_x(n: int, exps: Sequence[int], c=1) -> PhasePoly:
    return PhasePoly.monomial(tuple(exps), (0,) * n, c)


def _unit(n: int, i: int) -> List[int]:
    e = [0] * n
    e[i] = 1
    return e


def ambient_metric(sig: Signature) -> List[List[int]]:
    n = sig.n
    g = [[0] * (n + 2) for _ in range(n + 2)]
    g[0][n + 1] = g[n + 1][0] = 1
    for i, e in enumerate(sig.eta):
        g[i + 1][i + 1] = e
    return g


def wedge_matrix(u: Sequence, w: Sequence, sig: Signature) -> List[List[Rational]]:
    """Matrix of ``v -> u <w, v> - w <u, v>``, an element of o(p+1, q+1)."""
    g = ambient_metric(sig)
    N = sig.n + 2
    gu = [sum(g[a][b] * u[a] for a in range(N)) for b in range(N)]
    gw = [sum(g[a][b] * w[a] for a in range(N)) for b in range(N)]
    return [[Rational(u[A] * gw[B] - w[A] * gu[B]) for B in range(N)] for A in range(N)]


def _basis_vec(N: int, a: int) -> List[int]:
    v = [0] * N
    v[a] = 1
    return v


def induced_field(A: Sequence[Sequence], sig: Signature) -> Tuple[PhasePoly, ...]:
    """Vector field on R^n induced by the linear ambient field ``v -> A v`` on the null cone.

    ``X^i = (A v)^i - x^i (A v)^+`` with ``v = e_+ + x^i e_i - (x^2/2) e_-``.
    """
    n = sig.n
    one = PhasePoly.const(n, 1)
    v = [one] + [PhasePoly.x(i, n) for i in range(n)] + [PhasePoly.x_squared(sig).scale(Rational(-1, 2))]
    Av = []
    for row in A:
        acc = PhasePoly.zero(n)
        for c, comp in zip(row, v):
            if c:
                acc = acc + comp.scale(c)
        Av.append(acc)
    return tuple(Av[i + 1] - PhasePoly.x(i, n) * Av[0] for i in range(n))


def vf_bracket(X: Sequence[PhasePoly], Y: Sequence[PhasePoly]) -> Tuple[PhasePoly, ...]:
    """``[X, Y]^j = X^i d_i Y^j - Y^i d_i X^j`` (commutator of derivations)."""
    n = len(X)
    out = []
    for j in range(n):
        acc = PhasePoly.zero(n)
        for i in range(n):
            acc = acc + X[i] * Y[j].dx(i) - Y[i] * X[j].dx(i)
        out.append(acc)
    return tuple(out)


def divergence(X: Sequence[PhasePoly]) -> PhasePoly:
    n = len(X)
    out = PhasePoly.zero(n)
    for i in range(n):
        out = out + X[i].dx(i)
    return out


def _as_matrix(rows) -> Matrix:
    return tuple(tuple(Rational(c) for c in r) for r in rows)


def mat_mul(A, B):
    N = len(A)
    return [[sum((A[i][k] * B[k][j] for k in range(N) if A[i][k] and B[k][j]), Rational(0)) for j in range(N)] for i in range(N)]


def mat_bracket(A, B):
    AB, BA = mat_mul(A, B), mat_mul(B, A)
    return [[a - b for a, b in zip(r1, r2)] for r1, r2 in zip(AB, BA)]


# The ambient matrix ``A`` induces the field of the label listed here; the
# Lie algebra morphism is X -> -A (linear fields bracket with the opposite sign).
_AMBIENT_SIGN = -1


@lru_cache(maxsize=None)
def generators(sig: Signature) -> Tuple[ConformalGenerator, ...]:
    """Standard basis ``P_i, J_ij (i<j), E, K_i`` with ambient matrices."""
    n = sig.n
    if n < 3:
        raise ValueError("conformal algebra needs n >= 3")
    eta = sig.eta
    N = n + 2
    ep, em = _basis_vec(N, 0), _basis_vec(N, n + 1)
    ei = [_basis_vec(N, i + 1) for i in range(n)]
    zero = PhasePoly.zero(n)
    xsq = PhasePoly.x_squared(sig)
    xlow = [_poly_x(n, _unit(n, i), eta[i]) for i in range(n)]

    gens: List[ConformalGenerator] = []

    def add(label, fld, A):
        fld = tuple(fld)
        induced = induced_field(A, sig)
        if induced != fld:
            raise AssertionError(f"ambient matrix does not induce {label}")
        amb = _as_matrix([[_AMBIENT_SIGN * c for c in row] for row in A])
        gens.append(ConformalGenerator(label, fld, amb, divergence(fld)))

    for i in range(n):
        fld = [PhasePoly.const(n, 1) if k == i else zero for k in range(n)]
        add(("P", i), fld, wedge_matrix(ei[i], em, sig))
    for i in range(n):
        for j in range(i + 1, n):
            fld = [zero] * n
            fld[j] = xlow[i]
            fld[i] = -xlow[j]
            add(("J", i, j), fld, wedge_matrix(ei[j], ei[i], sig))
    add(("E",), [PhasePoly.x(k, n) for k in range(n)], wedge_matrix(em, ep, sig))
    for i in range(n):
        fld = [xlow[i] * PhasePoly.x(k, n) * 2 - (xsq if k == i else zero) for k in range(n)]
        A = wedge_matrix(ei[i], ep, sig)
        add(("K", i), fld, [[2 * c for c in row] for row in A])
    return tuple(gens)


def generator(sig: Signature, *label) -> ConformalGenerator:
    for g in generators(sig):
        if g.label == tuple(label):
            return g
    raise KeyError(label)


def _field_vector(fld: Sequence[PhasePoly]) -> Dict:
    vec = {}
    for j, comp in enumerate(fld):
        for key, c in comp.terms.items():
            vec[(j,) + key] = c
    return vec


@lru_cache(maxsize=None)
def _field_span(sig: Signature) -> linalg.Span:
    span = linalg.Span()
    for g in generators(sig):
        if not span.add(_field_vector(g.field)):
            raise AssertionError("generator fields are linearly dependent")
    return span


def decompose_field(fld: Sequence[PhasePoly], sig: Signature) -> Dict[int, Rational]:
    """Coordinates of a vector field in the generator basis (KeyError if outside)."""
    coords = _field_span(sig).coordinates(_field_vector(fld))
    if coords is None:
        raise KeyError("vector field is not conformal Killing")
    return coords


@lru_cache(maxsize=None)
def structure_constants(sig: Signature) -> Dict[Tuple[int, int], Dict[int, Rational]]:
    """``[X_a, X_b] = sum_c f[a, b][c] X_c`` from vector-field brackets."""
    gens = generators(sig)
    out = {}
    for a, X in enumerate(gens):
        for b, Y in enumerate(gens):
            out[(a, b)] = decompose_field(vf_bracket(X.field, Y.field), sig) if a != b else {}
    return out


def bracket_closure_report(sig: Signature) -> dict:
    """Check closure and agreement of field and ambient brackets on the whole basis."""
    gens = generators(sig)
    f = structure_constants(sig)
    N = sig.n + 2
    mismatches = 0
    for a, X in enumerate(gens):
        for b, Y in enumerate(gens):
            lhs = mat_bracket(X.ambient, Y.ambient)
            rhs = [[Rational(0)] * N for _ in range(N)]
            for c, coef in f[(a, b)].items():
                for r in range(N):
                    for s in range(N):
                        rhs[r][s] += coef * gens[c].ambient[r][s]
            if lhs != rhs:
                mismatches += 1
    return {"generator_count": len(gens), "brackets_closed": mismatches == 0, "mismatches": mismatches}


def bracket(X: ConformalGenerator, Y: ConformalGenerator, sig: Signature) -> Dict[int, Rational]:
    return decompose_field(vf_bracket(X.field, Y.field), sig)


def combination_field(coeffs: Dict[int, Rational], sig: Signature) -> Tuple[PhasePoly, ...]:
    gens = generators(sig)
    n = sig.n
    out = [PhasePoly.zero(n)] * n
    for a, c in coeffs.items():
        out = [o + comp.scale(c) for o, comp in zip(out, gens[a].field)]
    return tuple(out)


# ---------------------------------------------------------------------------
# actions


def _field_of(X) -> Tuple[PhasePoly, ...]:
    return X.field if isinstance(X, ConformalGenerator) else tuple(X)


def lie_density(X, lam) -> DiffOp:
    """``X^i d_i + lam * Div X`` on ``lam``-densities."""
    fld = _field_of(X)
    n = len(fld)
    lam = as_fraction(lam)
    sym = PhasePoly.zero(n)
    for i, comp in enumerate(fld):
        sym = sym + comp * PhasePoly.p(i, n)
    return DiffOp(sym + divergence(fld).scale(lam), lam, lam)


def lie_symbol(X, delta) -> PhaseOp:
    """``X^i d_{x^i} - p_j (d_i X^j) d_{p_i} + delta * Div X`` on symbols of weight ``delta``."""
    fld = _field_of(X)
    n = len(fld)
    delta = as_fraction(delta)
    op = PhaseOp.mult(divergence(fld).scale(delta))
    for i, comp in enumerate(fld):
        op = op + PhaseOp.mult(comp) * PhaseOp.dx(i, n)
    for i in range(n):
        coef = PhasePoly.zero(n)
        for j, comp in enumerate(fld):
            coef = coef + comp.dx(i) * PhasePoly.p(j, n)
        op = op - PhaseOp.mult(coef) * PhaseOp.dp(i, n)
    return op


def lie_operator(X, lam, mu, A: DiffOp) -> DiffOp:
    """``ell^mu_X o A - A o ell^lam_X``."""
    lam, mu = as_fraction(lam), as_fraction(mu)
    if (A.lam, A.mu) != (lam, mu):
        raise ValueError(f"weight mismatch: operator has ({A.lam}, {A.mu}), action uses ({lam}, {mu})")
    return lie_density(X, mu).compose(A) - A.compose(lie_density(X, lam))


def operator_action_on_symbols(X, lam, mu) -> PhaseOp:
    """The action ``L^{lam,mu}_X`` transported to total symbols through normal ordering.

    Returns the PhaseOp ``S -> sym(ell^mu_X) # S - S # sym(ell^lam_X)``.
    """
    left = lie_density(X, mu).symbol
    right = lie_density(X, lam).symbol
    return left_sharp_op(left) - right_sharp_op(right)


def killing_form(X: ConformalGenerator, Y: ConformalGenerator) -> Rational:
    """``(1/2) tr(rho(X) rho(Y))`` with the ambient matrices."""
    N = len(X.ambient)
    tr = sum((X.ambient[i][k] * Y.ambient[k][i] for i in range(N) for k in range(N)), Rational(0))
    return tr / 2


@lru_cache(maxsize=None)
def killing_matrix(sig: Signature) -> Tuple[Tuple[Rational, ...], ...]:
    gens = generators(sig)
    return tuple(tuple(killing_form(X, Y) for Y in gens) for X in gens)


def killing_determinant(sig: Signature) -> Rational:
    return linalg.determinant(killing_matrix(sig))


def dimension(sig: Signature) -> int:
    n = sig.n
    return (n + 1) * (n + 2) // 2
