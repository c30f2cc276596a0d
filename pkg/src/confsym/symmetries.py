"""Generalized conformal Killing tensors and higher symmetries of powers of the Laplacian."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Optional, Tuple, Union

from . import linalg
from .invariants import _p_only_decompose, harmonic_basis, harmonic_decompose, op_G
from .opalg import DiffOp, divmod_R_power, right_divide
from .quantization import quantize
from .ring import PhasePoly, Rational, Signature, monomials

__all__ = [
    "KillingBasis",
    "SymmetryPair",
    "SymmetryDefect",
    "default_bound",
    "solve_ckt",
    "is_killing",
    "laplacian_weights",
    "verify_symmetry",
    "symmetry_product",
    "identity_pair",
    "killing_tensor_equation",
]


def default_bound(k: int, s: int) -> int:
    return 2 * k + 2 * s + 2


def _x_monomial(n: int, alpha) -> PhasePoly:
    return PhasePoly(n, {tuple(alpha) + (0,) * n: Rational(1)}, _trusted=True)


def _trace_free_vector(P: PhasePoly, sig: Signature) -> Dict:
    """Sparse encoding of the trace-free part of a p-homogeneous symbol."""
    out: Dict = {}
    if P.is_zero():
        return out
    d = P.p_degree()
    for alpha, coef in P.x_coefficients().items():
        comp = _p_only_decompose(coef, sig, d).get(0)
        if comp is not None:
            for key, c in comp.terms.items():
                out[(alpha, key)] = c
    return out


def _G_power(P: PhasePoly, sig: Signature, m: int) -> PhasePoly:
    G = op_G(sig)
    for _ in range(m):
        P = G(P)
    return P


@lru_cache(maxsize=None)
def _killing_layer(sig: Signature, k: int, s: int, d: int) -> Tuple[PhasePoly, ...]:
    """Solutions ``Q`` of x-degree exactly ``d`` (Q trace-free of p-degree ``k - 2s``)."""
    n = sig.n
    harm = harmonic_basis(sig, k - 2 * s)
    cands = [_x_monomial(n, alpha) * h for alpha in monomials(n, d) for h in harm]
    cols = [_trace_free_vector(_G_power(c, sig, 2 * s + 1), sig) for c in cands]
    out = []
    for vec in linalg.nullspace(cols):
        Q = PhasePoly.zero(n)
        for j, c in vec.items():
            Q = Q + cands[j].scale(c)
        out.append(Q)
    return tuple(out)


@dataclass
class KillingBasis:
    """Basis of ``s``-generalized conformal Killing ``k``-tensors ``R^s Q``."""

    k: int
    s: int
    sig: Signature
    degree_bound: int
    basis: List[PhasePoly]
    stable: bool

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "s": self.s,
            "signature": [self.sig.p, self.sig.q],
            "degree_bound": self.degree_bound,
            "dimension": self.dimension,
            "stable": self.stable,
            "basis": [P.to_json(self.sig) for P in self.basis],
        }


def solve_ckt(k: int, s: int, sig: Signature, degree_bound: Optional[int] = None) -> KillingBasis:
    """Kernel of ``G0^(2s+1) T^s`` on ``S_{k,s}`` with coefficients of x-degree at most the bound.

    On trace-free symbols ``G0^m`` is the trace-free part of ``G^m`` (``G``
    commutes with ``R``), and ``T^s`` is a nonzero multiple of the identity
    from ``R^s Q`` back to ``Q``; since ``G`` lowers the x-degree by one, the
    system splits by x-degree.
    """
    if k < 0 or s < 0 or 2 * s > k:
        raise ValueError("need 0 <= 2s <= k")
    bound = default_bound(k, s) if degree_bound is None else degree_bound
    if bound < 0:
        raise ValueError("degree bound must be non-negative")
    Rs = PhasePoly.R(sig) ** s
    basis = [Rs * Q for d in range(bound + 1) for Q in _killing_layer(sig, k, s, d)]
    stable = not _killing_layer(sig, k, s, bound + 1)
    return KillingBasis(k, s, sig, bound, basis, stable)


def is_killing(P: PhasePoly, s: int, sig: Signature) -> bool:
    """``P`` lies in ``S_{k,s}`` and is killed by ``G0^(2s+1) T^s``."""
    if P.is_zero():
        return True
    if not P.is_p_homogeneous():
        return False
    parts = harmonic_decompose(P, sig)
    if any(part.s != s for part in parts):
        return False
    return not _trace_free_vector(_G_power(parts[0].component, sig, 2 * s + 1), sig)


# ---------------------------------------------------------------------------
# tensor-form cross-check


def _symmetric_tensor(P: PhasePoly, n: int) -> Dict[Tuple[int, int], PhasePoly]:
    """Upper-index components ``K^{ij}(x)`` of a quadratic-in-p symbol."""
    out: Dict[Tuple[int, int], PhasePoly] = {}
    for beta, coef in P.p_coefficients().items():
        idx = [i for i in range(n) for _ in range(beta[i])]
        i, j = idx
        c = coef if i == j else coef.scale(Rational(1, 2))
        out[(i, j)] = c
        out[(j, i)] = c
    return out


def killing_tensor_equation(P: PhasePoly, sig: Signature) -> bool:
    """Feasibility of ``d_(a K_bc) = eta_(ab L_c)`` for some vector ``L(x)``.

    Works on index components with lowered indices, independently of the
    operator calculus; only quadratic symbols are supported.
    """
    n = sig.n
    if P.is_zero():
        return True
    if P.p_degrees() != {2}:
        raise ValueError("the tensor form is implemented for quadratic symbols")
    eta = sig.eta
    upper = _symmetric_tensor(P, n)
    zero = PhasePoly.zero(n)
    K = {(i, j): upper.get((i, j), zero).scale(eta[i] * eta[j]) for i in range(n) for j in range(n)}
    top = max(P.x_degree() - 1, 0)
    xmonos = [alpha for d in range(top + 1) for alpha in monomials(n, d)]
    unknowns = [(c, alpha) for c in range(n) for alpha in xmonos]
    cols: List[Dict] = [dict() for _ in unknowns]
    rhs: Dict = {}
    index = {u: j for j, u in enumerate(unknowns)}
    for trip in itertools.combinations_with_replacement(range(n), 3):
        for a, b, c in set(itertools.permutations(trip)):
            for key, v in K[(b, c)].dx(a).terms.items():
                row = (trip, key[:n])
                rhs[row] = rhs.get(row, 0) + v
            if a == b:
                for alpha in xmonos:
                    row = (trip, tuple(alpha))
                    col = cols[index[(c, alpha)]]
                    col[row] = col.get(row, 0) + eta[a]
    rhs = {k: v for k, v in rhs.items() if v}
    for col in cols:
        for k in [k for k, v in col.items() if not v]:
            del col[k]
    sol, _ = linalg.solve(cols, rhs)
    return sol is not None


# ---------------------------------------------------------------------------
# higher symmetries


def laplacian_weights(ell: int, n: int) -> Tuple[Rational, Rational]:
    return Rational(n - 2 * ell, 2 * n), Rational(n + 2 * ell, 2 * n)


@dataclass
class SymmetryPair:
    """``Delta^ell o D1 = D2 o Delta^ell``."""

    D1: DiffOp
    D2: DiffOp
    ell: int
    sig: Signature
    method: str = "quantization"

    def check(self) -> bool:
        lap = DiffOp.laplacian(self.sig, self.ell)
        return (lap.compose(self.D1) - self.D2.compose(lap)).is_zero()

    def to_json(self) -> dict:
        return {
            "kind": "symmetry_pair",
            "ell": self.ell,
            "signature": [self.sig.p, self.sig.q],
            "method": self.method,
            "valid": self.check(),
            "D1": self.D1.to_json(),
            "D2": self.D2.to_json(),
        }


@dataclass
class SymmetryDefect:
    """Failure report: ``Delta^ell o D1 - D2 o Delta^ell`` for the quantized candidate."""

    D1: DiffOp
    D2: DiffOp
    ell: int
    sig: Signature
    defect: DiffOp
    divisible: bool = False

    def to_json(self) -> dict:
        return {
            "kind": "defect",
            "ell": self.ell,
            "signature": [self.sig.p, self.sig.q],
            "right_divisible": self.divisible,
            "D1": self.D1.to_json(),
            "D2": self.D2.to_json(),
            "defect": self.defect.to_json(),
        }


def verify_symmetry(K: PhasePoly, ell: int, sig: Signature) -> Union[SymmetryPair, SymmetryDefect]:
    """Test whether the quantization of ``K`` at the Laplacian weights is a symmetry of ``Delta^ell``.

    ``D1 = Q^{lam,lam}(K)`` and ``D2 = Q^{mu,mu}(K)`` with
    ``lam = (n - 2 ell)/(2n)``, ``mu = (n + 2 ell)/(2n)``. When the identity
    fails, right division of ``Delta^ell o D1`` by ``Delta^ell`` is attempted
    as a fallback.
    """
    if ell < 1:
        raise ValueError("ell must be positive")
    lam, mu = laplacian_weights(ell, sig.n)
    D1 = quantize(K, lam, lam, sig)
    D2 = quantize(K, mu, mu, sig)
    lap = DiffOp.laplacian(sig, ell)
    left = lap.compose(D1)
    defect = left - D2.compose(lap)
    if defect.is_zero():
        return SymmetryPair(D1, D2, ell, sig)
    other = right_divide(left, ell, sig)
    if other is not None:
        return SymmetryPair(D1, other.with_weights(mu, mu), ell, sig, method="right_division")
    return SymmetryDefect(D1, D2, ell, sig, defect, False)


def identity_pair(sig: Signature, ell: int) -> SymmetryPair:
    lam, mu = laplacian_weights(ell, sig.n)
    return SymmetryPair(DiffOp.identity(sig.n, lam), DiffOp.identity(sig.n, mu), ell, sig, "identity")


def _reduce(pair: SymmetryPair) -> SymmetryPair:
    """Strip the trivial part ``B o Delta^ell`` from ``D1`` (and ``Delta^ell o B`` from ``D2``)."""
    sig, ell = pair.sig, pair.ell
    q, r = divmod_R_power(pair.D1.symbol, sig, ell)
    if q.is_zero():
        return pair
    lam, mu = laplacian_weights(ell, sig.n)
    B = DiffOp(q, mu, lam)
    lap = DiffOp.laplacian(sig, ell)
    return SymmetryPair(DiffOp(r, lam, lam), pair.D2 - lap.compose(B), ell, sig, "product")


def symmetry_product(A: SymmetryPair, B: SymmetryPair, ell: Optional[int] = None) -> SymmetryPair:
    """Composite symmetry, reduced modulo trivial symmetries."""
    ell = A.ell if ell is None else ell
    if A.ell != ell or B.ell != ell or A.sig != B.sig:
        raise ValueError("symmetry pairs must share ell and signature")
    prod = SymmetryPair(A.D1.compose(B.D1), A.D2.compose(B.D2), ell, A.sig, "product")
    out = _reduce(prod)
    if not out.check():
        raise AssertionError("product of symmetries failed the intertwining identity")
    return out
