"""Invariant operators on symbols and the harmonic decomposition.

Operators on symbols are :class:`PhaseOp` instances. Identities that only
hold on a sub-space of symbols (homogeneous degree ``k``, trace depth ``s``)
are checked through :func:`restricted`, which turns an operator into an exact
finite vector: since ``x^a d_x^c`` parts are independent and commute with the
momentum parts, it suffices to evaluate each momentum block on a basis of the
finite-dimensional momentum space.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

from . import linalg
from .conformal import generators, lie_symbol
from .opalg import PhaseOp, op_compose
from .ring import Rational, PhasePoly, Signature, as_fraction, fraction_to_str, monomials

__all__ = [
    "CanonicalOp",
    "HarmonicPart",
    "canonical",
    "op_R",
    "op_T",
    "op_D",
    "op_G",
    "op_Lambda",
    "op_Ex",
    "op_Ep",
    "op_G0",
    "contraction_monomial",
    "p_basis",
    "harmonic_basis",
    "harmonic_decompose",
    "harmonic_project",
    "trace_free_part",
    "restricted",
    "is_invariant",
    "solve_Lell",
    "op_Lell",
    "classify",
    "ClassifyResult",
]


# ---------------------------------------------------------------------------
# canonical operators


@lru_cache(maxsize=None)
def op_R(sig: Signature) -> PhaseOp:
    return PhaseOp.mult(PhasePoly.R(sig))


@lru_cache(maxsize=None)
def op_T(sig: Signature) -> PhaseOp:
    n = sig.n
    out = PhaseOp.zero(n)
    for i, e in enumerate(sig.eta):
        out = out + (PhaseOp.dp(i, n) * PhaseOp.dp(i, n)).scale(e)
    return out


@lru_cache(maxsize=None)
def op_D(sig: Signature) -> PhaseOp:
    n = sig.n
    out = PhaseOp.zero(n)
    for i in range(n):
        out = out + PhaseOp.dx(i, n) * PhaseOp.dp(i, n)
    return out


@lru_cache(maxsize=None)
def op_G(sig: Signature) -> PhaseOp:
    n = sig.n
    out = PhaseOp.zero(n)
    for i, e in enumerate(sig.eta):
        out = out + (PhaseOp.mult(PhasePoly.p(i, n)) * PhaseOp.dx(i, n)).scale(e)
    return out


@lru_cache(maxsize=None)
def op_Lambda(sig: Signature) -> PhaseOp:
    """Laplacian in the positions, acting on symbol coefficients."""
    n = sig.n
    out = PhaseOp.zero(n)
    for i, e in enumerate(sig.eta):
        out = out + (PhaseOp.dx(i, n) * PhaseOp.dx(i, n)).scale(e)
    return out


@lru_cache(maxsize=None)
def op_Ex(sig: Signature) -> PhaseOp:
    n = sig.n
    out = PhaseOp.zero(n)
    for i in range(n):
        out = out + PhaseOp.mult(PhasePoly.x(i, n)) * PhaseOp.dx(i, n)
    return out


@lru_cache(maxsize=None)
def op_Ep(sig: Signature) -> PhaseOp:
    n = sig.n
    out = PhaseOp.zero(n)
    for i in range(n):
        out = out + PhaseOp.mult(PhasePoly.p(i, n)) * PhaseOp.dp(i, n)
    return out


@lru_cache(maxsize=None)
def contraction_monomial(sig: Signature, a: int, b: int, c: int, e: int, f: int) -> PhaseOp:
    """``R^a G^b Lambda^c D^e T^f`` (already normal ordered)."""
    out = PhaseOp.identity(sig.n)
    for op, power in ((op_R(sig), a), (op_G(sig), b), (op_Lambda(sig), c), (op_D(sig), e), (op_T(sig), f)):
        for _ in range(power):
            out = op_compose(out, op)
    return out


@dataclass(frozen=True)
class CanonicalOp:
    name: str
    realization: PhaseOp
    bidegree: Tuple[int, int]


_BIDEGREES = {
    "R": (0, 2),
    "T": (0, -2),
    "D": (-1, -1),
    "G": (-1, 1),
    "G0": (-1, 1),
    "Lambda": (-2, 0),
    "Ex": (0, 0),
    "Ep": (0, 0),
}


def canonical(name: str, sig: Signature, k: Optional[int] = None, s: int = 0, ell: Optional[int] = None) -> CanonicalOp:
    """Build one of the named operators.

    ``G0`` needs the source component ``(k, s)``; ``Lell`` needs ``ell`` and
    the degree ``k`` of its trace-free source.
    """
    simple = {"R": op_R, "T": op_T, "D": op_D, "G": op_G, "Lambda": op_Lambda, "Ex": op_Ex, "Ep": op_Ep}
    if name in simple:
        return CanonicalOp(name, simple[name](sig), _BIDEGREES[name])
    if name == "G0":
        if k is None:
            raise ValueError("G0 needs the source component (k, s)")
        return CanonicalOp(name, op_G0(sig, k, s), _BIDEGREES[name])
    if name == "Lell":
        if ell is None or k is None:
            raise ValueError("Lell needs ell and k")
        return CanonicalOp(f"L{ell}", op_Lell(sig, ell, k), (-2 * ell, 0))
    raise ValueError(f"unknown operator {name!r}")


# ---------------------------------------------------------------------------
# momentum spaces and the harmonic decomposition


@lru_cache(maxsize=None)
def p_basis(n: int, d: int) -> Tuple[PhasePoly, ...]:
    """Monomials of degree ``d`` in the momenta."""
    if d < 0:
        return ()
    zeros = (0,) * n
    return tuple(PhasePoly(n, {zeros + beta: Rational(1)}, _trusted=True) for beta in monomials(n, d))


def _vec(P: PhasePoly) -> Dict:
    return dict(P.terms)


@lru_cache(maxsize=None)
def harmonic_basis(sig: Signature, d: int) -> Tuple[PhasePoly, ...]:
    """Basis of trace-free (``T``-harmonic) momentum polynomials of degree ``d``."""
    if d < 0:
        return ()
    basis = p_basis(sig.n, d)
    T = op_T(sig)
    cols = [_vec(T(b)) for b in basis]
    out = []
    for rel in linalg.nullspace(cols):
        P = PhasePoly.zero(sig.n)
        for j, c in rel.items():
            P = P + basis[j].scale(c)
        out.append(P)
    return tuple(out)


@lru_cache(maxsize=None)
def _fischer(sig: Signature, d: int):
    """Span of ``R^s h`` (h harmonic of degree d - 2s) with the labels of the offered vectors."""
    span = linalg.Span()
    labels = []
    R = PhasePoly.R(sig)
    for s in range(d // 2 + 1):
        Rs = R ** s
        for h in harmonic_basis(sig, d - 2 * s):
            if not span.add(_vec(Rs * h)):
                raise AssertionError("harmonic decomposition is degenerate")
            labels.append((s, h))
    return span, labels


def _p_only_decompose(P: PhasePoly, sig: Signature, d: int) -> Dict[int, PhasePoly]:
    span, labels = _fischer(sig, d)
    coords = span.coordinates(_vec(P))
    if coords is None:
        raise AssertionError("harmonic decomposition failed")
    out: Dict[int, PhasePoly] = {}
    for j, c in coords.items():
        s, h = labels[j]
        out[s] = out.get(s, PhasePoly.zero(sig.n)) + h.scale(c)
    return out


@dataclass(frozen=True)
class HarmonicPart:
    s: int
    component: PhasePoly


def harmonic_decompose(P: PhasePoly, sig: Signature) -> List[HarmonicPart]:
    """``P = sum_s R^s P_s`` with each ``P_s`` trace-free (P homogeneous in p)."""
    if not P.is_p_homogeneous():
        raise ValueError("harmonic decomposition needs a symbol homogeneous in the momenta")
    if P.is_zero():
        return []
    n = sig.n
    d = P.p_degree()
    parts: Dict[int, PhasePoly] = {}
    for alpha, coef in P.x_coefficients().items():
        xmono = PhasePoly(n, {alpha + (0,) * n: Rational(1)}, _trusted=True)
        for s, comp in _p_only_decompose(coef, sig, d).items():
            parts[s] = parts.get(s, PhasePoly.zero(n)) + xmono * comp
    return [HarmonicPart(s, parts[s]) for s in sorted(parts) if not parts[s].is_zero()]


def harmonic_project(P: PhasePoly, sig: Signature, s: int) -> PhasePoly:
    """The ``R^s P_s`` summand of ``P`` (degree-wise for non-homogeneous input)."""
    out = PhasePoly.zero(sig.n)
    R = PhasePoly.R(sig)
    for _, comp in P.p_components().items():
        for part in harmonic_decompose(comp, sig):
            if part.s == s:
                out = out + (R ** s) * part.component
    return out


def trace_free_part(P: PhasePoly, sig: Signature) -> PhasePoly:
    return harmonic_project(P, sig, 0)


@lru_cache(maxsize=None)
def component_basis(sig: Signature, k: int, s: Optional[int]) -> Tuple[PhasePoly, ...]:
    """Momentum basis of ``S_{k,s}`` (``s=None``: all of ``S_k``)."""
    if s is None:
        return p_basis(sig.n, k)
    if 2 * s > k:
        return ()
    Rs = PhasePoly.R(sig) ** s
    return tuple(Rs * h for h in harmonic_basis(sig, k - 2 * s))


# ---------------------------------------------------------------------------
# restriction of operators to components


def _apply_p_block(block: Dict, h: PhasePoly) -> PhasePoly:
    n = h.n
    zeros = (0,) * n
    op = PhaseOp(n, {zeros + b + zeros + d: c for (b, d), c in block.items()}, _trusted=True)
    return op(h)


def restricted(op: PhaseOp, sig: Signature, k: int, s: Optional[int] = None, target_s: Optional[int] = None) -> Dict:
    """Exact finite encoding of ``op`` restricted to ``S_{k,s}``.

    The result is zero iff ``op`` vanishes on every symbol of degree ``k`` and
    trace depth ``s`` (any ``x``-dependence). With ``target_s`` the output is
    first projected on its ``R^{target_s}`` harmonic summand.
    """
    basis = component_basis(sig, k, s)
    vec: Dict = {}
    for xkey, block in op.blocks().items():
        for j, h in enumerate(basis):
            out = _apply_p_block(block, h)
            if target_s is not None and not out.is_zero():
                out = harmonic_project(out, sig, target_s)
            for key, c in out.terms.items():
                vec[(xkey, j, key)] = c
    return vec


def _invariance_defect(O: PhaseOp, X, delta, delta_p) -> PhaseOp:
    return op_compose(lie_symbol(X, delta_p), O) - op_compose(O, lie_symbol(X, delta))


def is_invariant(
    O: PhaseOp,
    delta,
    delta_p,
    sig: Signature,
    k: Optional[int] = None,
    s: Optional[int] = None,
    target_s: Optional[int] = None,
) -> bool:
    """``L^{delta'}_X o O = O o L^delta_X`` for every generator ``X``.

    Without ``k`` the identity is checked on the whole operator; with ``k``
    (and optionally the trace depth ``s`` and a target projection) only on
    that component.
    """
    delta, delta_p = as_fraction(delta), as_fraction(delta_p)
    for X in generators(sig):
        defect = _invariance_defect(O, X, delta, delta_p)
        if k is None:
            if not defect.is_zero():
                return False
        elif restricted(defect, sig, k, s, target_s):
            return False
    return True


# ---------------------------------------------------------------------------
# G0 and the L_ell family


@lru_cache(maxsize=None)
def op_G0(sig: Signature, k: int, s: int = 0) -> PhaseOp:
    """Trace-free projection of ``G`` on trace-free symbols of degree ``k - 2s``.

    For ``s > 0`` the operator is meant to act after ``T^s`` (source degree
    ``k - 2s``). Written as ``G + c R D`` with ``c`` from an exact solve.
    """
    d = k - 2 * s
    G, RD = op_G(sig), op_compose(op_R(sig), op_D(sig))
    T = op_T(sig)
    lhs = restricted(op_compose(T, RD), sig, d, 0)
    rhs = restricted(op_compose(T, G), sig, d, 0)
    if not rhs:
        return G
    sol, _ = linalg.solve([lhs], {key: -v for key, v in rhs.items()})
    if sol is None:
        raise AssertionError("trace-free projection of G is not of the form G + c R D")
    return G + RD.scale(sol.get(0, 0))


def _Lell_terms(sig: Signature, ell: int) -> List[PhaseOp]:
    return [contraction_monomial(sig, 0, i, ell - i, i, 0) for i in range(ell + 1)]


@lru_cache(maxsize=None)
def solve_Lell(ell: int, k: int, sig: Signature) -> Tuple[Rational, ...]:
    """Coefficients ``a_1..a_ell`` making ``Lambda^ell + sum_i a_i G^i D^i Lambda^(ell-i)`` invariant.

    The operator acts on trace-free symbols of degree ``k`` with
    ``delta = 1/2 + (k - ell)/n`` and lands, after trace-free projection, in
    weight ``delta + 2 ell / n``. Raises ``ValueError`` when the solution does
    not exist or is not unique.
    """
    n = sig.n
    delta = Rational(1, 2) + Rational(k - ell, n)
    delta_p = delta + Rational(2 * ell, n)
    terms = _Lell_terms(sig, ell)
    images = [restricted(t, sig, k, 0, 0) for t in terms]
    keep = linalg.independent_subset(images)
    if 0 not in keep:
        raise ValueError("Lambda^ell vanishes on this component")
    rows: List[Dict] = [dict() for _ in terms]
    for gi, X in enumerate(generators(sig)):
        for ti, t in enumerate(terms):
            d = restricted(_invariance_defect(t, X, delta, delta_p), sig, k, 0, 0)
            for key, v in d.items():
                rows[ti][(gi,) + key] = v
    unknown = [i for i in keep if i != 0]
    sol, kernel = linalg.solve([rows[i] for i in unknown], {key: -v for key, v in rows[0].items()})
    if sol is None:
        raise ValueError(f"no invariant L_{ell} on trace-free symbols of degree {k}")
    if kernel:
        raise ValueError(f"L_{ell} is not unique on trace-free symbols of degree {k}")
    coeffs = [Rational(0)] * (ell + 1)
    for j, i in enumerate(unknown):
        coeffs[i] = sol.get(j, Rational(0))
    return tuple(coeffs[1:])


@lru_cache(maxsize=None)
def op_Lell(sig: Signature, ell: int, k: int, coeffs: Optional[Tuple[Rational, ...]] = None) -> PhaseOp:
    if coeffs is None:
        coeffs = solve_Lell(ell, k, sig)
    terms = _Lell_terms(sig, ell)
    out = terms[0]
    for a, t in zip(coeffs, terms[1:]):
        out = out + t.scale(a)
    return out


# ---------------------------------------------------------------------------
# classification within the contraction ansatz


@dataclass
class ClassifyResult:
    dimension: int
    basis: List[Dict[Tuple[int, int, int, int, int], Rational]]
    operators: List[PhaseOp]
    candidates: List[Tuple[int, int, int, int, int]]
    bound: int
    zeroth_order: bool = False
    at_bound: bool = False

    def to_json(self) -> dict:
        return {
            "dimension": self.dimension,
            "basis": [
                [{"monomial": dict(zip("RGLDT", m)), "c": fraction_to_str(c)} for m, c in sorted(vec.items())]
                for vec in self.basis
            ],
            "operators": [op.to_json() for op in self.operators],
            "search_bound": self.bound,
            "search_bound_reached": self.at_bound,
            "zeroth_order_invariant": self.zeroth_order,
        }


def ansatz_monomials(k: int, kp: int, j, bound: int, min_order: int = 0) -> List[Tuple[int, int, int, int, int]]:
    """``(a, b, c, e, f)`` with ``2a+b-e-2f = kp-k``, ``a+b+c-f = j`` and ``min_order <= b+2c+e <= bound``."""
    j = as_fraction(j)
    if j.denominator != 1:
        return []
    j = int(j)
    out = []
    for b in range(bound + 1):
        for c in range((bound - b) // 2 + 1):
            for e in range(max(0, min_order - b - 2 * c), bound - b - 2 * c + 1):
                # a - f = j - b - c and 2(a - f) = kp - k - b + e
                if 2 * (j - b - c) != kp - k - b + e:
                    continue
                for f in range(k // 2 + 1):
                    if 2 * f + e > k:
                        break
                    a = f + j - b - c
                    if a < 0:
                        continue
                    out.append((a, b, c, e, f))
    out.sort(key=lambda m: (m[1] + 2 * m[2] + m[3], m[4], m[0], m[1], m[2]))
    return out


def classify(k: int, s: int, kp: int, sp: int, delta, delta_p, sig: Signature, bound: int = 4) -> ClassifyResult:
    """Dimension and basis of invariant operators ``S^delta_{k,s} -> S^delta'_{kp,sp}``.

    Searched among ``R^a G^b Lambda^c D^e T^f`` followed by projection on the
    ``(kp, sp)`` summand, with between 1 and ``bound`` derivatives in ``x``.
    Zeroth-order maps (``R^a T^f``) are invariant on every component they
    connect and never share a slot with differential ones, so they are not
    counted; ``zeroth_order`` records whether the slot carries one.
    """
    delta, delta_p = as_fraction(delta), as_fraction(delta_p)
    if 2 * s > k or 2 * sp > kp:
        raise ValueError("need 2s <= k and 2s' <= k'")
    j = Rational(sig.n, 2) * (delta_p - delta)
    if bound < 1:
        raise ValueError("search bound must be at least 1")
    zeroth = (
        j.denominator == 1
        and 2 * int(j) == kp - k
        and kp - 2 * sp == k - 2 * s
    )
    cands = ansatz_monomials(k, kp, j, bound, min_order=1)
    ops = [contraction_monomial(sig, *m) for m in cands]
    images = [restricted(op, sig, k, s, sp) for op in ops]
    keep = linalg.independent_subset(images)
    cands = [cands[i] for i in keep]
    ops = [ops[i] for i in keep]
    images = [images[i] for i in keep]
    rows = []
    gens = generators(sig)
    for op in ops:
        row: Dict = {}
        for gi, X in enumerate(gens):
            for key, v in restricted(_invariance_defect(op, X, delta, delta_p), sig, k, s, sp).items():
                row[(gi,) + key] = v
        rows.append(row)
    kernel = linalg.nullspace(rows)
    basis = [{cands[i]: c for i, c in vec.items()} for vec in kernel]
    operators = []
    for vec in kernel:
        op = PhaseOp.zero(sig.n)
        for i, c in vec.items():
            op = op + ops[i].scale(c)
        operators.append(op)
    at_bound = any(m[1] + 2 * m[2] + m[3] == bound for vec in basis for m in vec)
    return ClassifyResult(len(kernel), basis, operators, cands, bound, zeroth, at_bound)
