"""Conformally equivariant quantization of symbols into differential operators.

A quantization of degree-``k`` symbols is sought as
``P -> N(sum_m A_m P)`` where ``A_0`` is the identity and ``A_m`` is a
combination of contraction monomials ``R^a G^b Lambda^c D^e T^f`` lowering
the momentum degree by ``m`` (hence ``m`` position derivatives). Translation,
rotation and dilation equivariance hold for every such combination; the
coefficients are fixed by exact equivariance under the special conformal
generators.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

from . import linalg
from .conformal import generators, lie_symbol, operator_action_on_symbols
from .invariants import contraction_monomial, op_D, op_T, restricted
from .opalg import DiffOp, PhaseOp, op_compose
from .ring import Rational, PhasePoly, Signature, as_fraction, fraction_to_str

__all__ = [
    "ResonanceError",
    "QuantMap",
    "radoux_coeffs",
    "quantize_tracefree",
    "level_monomials",
    "solve_quantization",
    "quantize",
    "dequantize",
]

Monomial = Tuple[int, int, int, int, int]

UNIQUE = "unique"
NON_UNIQUE = "non_unique"
NON_EXISTENT = "non_existent"


class ResonanceError(ValueError):
    """The requested shift is exceptional for some degree."""

    def __init__(self, message: str, k: Optional[int] = None, m: Optional[int] = None, status: Optional[str] = None):
        super().__init__(message)
        self.k = k
        self.m = m
        self.status = status


def radoux_coeffs(k: int, n: int, lam, delta) -> List[Rational]:
    """Closed-form coefficients ``c_0..c_k`` of ``D^m`` on trace-free symbols."""
    lam, delta = as_fraction(lam), as_fraction(delta)
    c = [Rational(1)]
    for m in range(1, k + 1):
        den = m * (2 * k - m - 1 + n * (1 - delta))
        if den == 0:
            raise ResonanceError(f"delta = {delta} is resonant at m = {m} for k = {k}", k=k, m=m)
        c.append(c[-1] * (k - m + n * lam) / den)
    return c


def _is_trace_free(P: PhasePoly, sig: Signature) -> bool:
    return op_T(sig)(P).is_zero()


def quantize_tracefree(P: PhasePoly, lam, mu, sig: Signature) -> DiffOp:
    """Quantize a trace-free symbol with the closed-form divergence series."""
    lam, mu = as_fraction(lam), as_fraction(mu)
    if not _is_trace_free(P, sig):
        raise ValueError("symbol is not trace-free")
    D = op_D(sig)
    out = PhasePoly.zero(sig.n)
    for k, Pk in sorted(P.p_components().items()):
        c = radoux_coeffs(k, sig.n, lam, mu - lam)
        term = Pk
        for m in range(k + 1):
            out = out + term.scale(c[m])
            term = D(term)
    return DiffOp(out, lam, mu)


def level_monomials(k: int, m: int) -> List[Monomial]:
    """Monomials lowering the momentum degree by ``m`` with ``m`` position derivatives.

    They are ``(a, b, c, m-b-2c, a+b+c)``; only those that can act
    nontrivially on degree ``k`` are listed, pure divergences first.
    """
    out = []
    for b in range(m + 1):
        for c in range((m - b) // 2 + 1):
            e = m - b - 2 * c
            a = 0
            while 2 * a + b + m <= k:
                out.append((a, b, c, e, a + b + c))
                a += 1
    out.sort(key=lambda t: (t[4], t[1], t[2], t[0]))
    return out


@dataclass
class QuantMap:
    """Solved quantization of degree-``k`` symbols for the weights ``(lam, lam + delta)``."""

    k: int
    delta: Rational
    sig: Signature
    lam: Rational = Rational(0)
    corrections: Dict[Monomial, Rational] = field(default_factory=dict)
    status: str = UNIQUE
    kernel: List[Dict[Monomial, Rational]] = field(default_factory=list)
    s: Optional[int] = None

    @property
    def kernel_dimension(self) -> int:
        return len(self.kernel)

    @property
    def mu(self) -> Rational:
        return self.lam + self.delta

    def _combination(self, coeffs: Dict[Monomial, Rational]) -> PhaseOp:
        out = PhaseOp.zero(self.sig.n)
        for mono, c in coeffs.items():
            out = out + contraction_monomial(self.sig, *mono).scale(c)
        return out

    def operator(self) -> PhaseOp:
        """The map ``P -> total symbol`` as an operator on symbols."""
        return PhaseOp.identity(self.sig.n) + self._combination(self.corrections)

    def well_defined_on(self, P: PhasePoly) -> bool:
        """True if every solution of the equivariance system agrees on ``P``."""
        if self.status == NON_EXISTENT or self.s is not None:
            return False
        return all(self._combination(vec)(P).is_zero() for vec in self.kernel)

    def apply(self, P: PhasePoly) -> PhasePoly:
        """Total symbol of the quantization of ``P``.

        A non-unique map is still usable on inputs killed by its whole
        kernel, since the result then does not depend on the chosen solution.
        """
        if self.s is not None:
            raise ValueError("this map was solved on a single harmonic component only")
        if self.status != UNIQUE and not self.well_defined_on(P):
            raise ResonanceError(
                f"quantization of degree {self.k} at delta = {self.delta} is {self.status}", k=self.k, status=self.status
            )
        return self.operator()(P)

    def level(self, m: int) -> Dict[Monomial, Rational]:
        return {mono: c for mono, c in self.corrections.items() if mono[3] + mono[1] + 2 * mono[2] == m}

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "delta": fraction_to_str(self.delta),
            "lambda": fraction_to_str(self.lam),
            "mu": fraction_to_str(self.mu),
            "signature": [self.sig.p, self.sig.q],
            "trace_depth": self.s,
            "status": self.status,
            "kernel_dimension": self.kernel_dimension,
            "kernel": [
                [{"monomial": dict(zip("RGLDT", mono)), "c": fraction_to_str(c)} for mono, c in sorted(vec.items())]
                for vec in self.kernel
            ],
            "corrections": [
                {"monomial": dict(zip("RGLDT", mono)), "c": fraction_to_str(c)}
                for mono, c in sorted(self.corrections.items())
            ],
        }


def _equation(op: PhaseOp, sig: Signature, k: int, s: Optional[int], gens) -> Dict:
    out: Dict = {}
    for gi, (sym_action, lie) in enumerate(gens):
        defect = op_compose(sym_action, op) - op_compose(op, lie)
        for key, v in restricted(defect, sig, k, s).items():
            out[(gi,) + key] = v
    return out


@lru_cache(maxsize=None)
def _solve(k: int, delta: Rational, lam: Rational, sig: Signature, s: Optional[int]) -> QuantMap:
    if k == 0:
        return QuantMap(0, delta, sig, lam, s=s)
    mu = lam + delta
    special = [X for X in generators(sig) if X.label[0] == "K"]
    gens = [(operator_action_on_symbols(X, lam, mu), lie_symbol(X, delta)) for X in special]
    monos: List[Monomial] = []
    for m in range(1, k + 1):
        monos.extend(level_monomials(k, m))
    ops = [contraction_monomial(sig, *mono) for mono in monos]
    keep = linalg.independent_subset([restricted(op, sig, k, s) for op in ops])
    monos = [monos[i] for i in keep]
    ops = [ops[i] for i in keep]
    columns = [_equation(op, sig, k, s, gens) for op in ops]
    rhs = {key: -v for key, v in _equation(PhaseOp.identity(sig.n), sig, k, s, gens).items()}
    sol, kernel = linalg.solve(columns, rhs)
    named_kernel = [{monos[i]: c for i, c in vec.items()} for vec in kernel]
    if sol is None:
        return QuantMap(k, delta, sig, lam, {}, NON_EXISTENT, named_kernel, s)
    corrections = {monos[i]: c for i, c in sol.items() if c}
    status = NON_UNIQUE if kernel else UNIQUE
    return QuantMap(k, delta, sig, lam, corrections, status, named_kernel, s)


def solve_quantization(k: int, delta, sig: Signature, lam=0, s: Optional[int] = None) -> QuantMap:
    """Solve for the equivariant quantization of degree-``k`` symbols.

    The operator weights are ``(lam, lam + delta)``. Status is ``unique``,
    ``non_unique`` (solvable with a nontrivial kernel) or ``non_existent``.
    With ``s`` the equations are imposed on the harmonic component
    ``R^s (trace-free)`` only, e.g. ``s=0`` for trace-free symbols; such maps
    are diagnostic and cannot be applied.
    """
    if k < 0:
        raise ValueError("degree must be non-negative")
    if s is not None and not 0 <= 2 * s <= k:
        raise ValueError("need 0 <= 2s <= k")
    return _solve(k, as_fraction(delta), as_fraction(lam), sig, s)


def quantize(P: PhasePoly, lam, mu, sig: Signature) -> DiffOp:
    """Equivariant quantization of ``P``, degree by degree."""
    lam, mu = as_fraction(lam), as_fraction(mu)
    out = PhasePoly.zero(sig.n)
    for k, Pk in sorted(P.p_components().items()):
        out = out + solve_quantization(k, mu - lam, sig, lam).apply(Pk)
    return DiffOp(out, lam, mu)


def dequantize(A: DiffOp, lam, mu, sig: Signature) -> PhasePoly:
    """Inverse of :func:`quantize`: peel off the top symbol and recurse."""
    lam, mu = as_fraction(lam), as_fraction(mu)
    rest = A.symbol
    out = PhasePoly.zero(sig.n)
    while not rest.is_zero():
        top = rest.p_part(rest.p_degree())
        out = out + top
        rest = rest - solve_quantization(top.p_degree(), mu - lam, sig, lam).apply(top)
    return out
