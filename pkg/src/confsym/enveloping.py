"""Truncated symmetric and enveloping algebras of the conformal algebra.

Elements are linear combinations of weakly increasing index words over the
basis returned by :func:`confsym.conformal.generators`. Enveloping products
are rewritten to ordered (PBW) words with the structure constants.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

from . import linalg
from .conformal import ambient_metric, dimension, generators, killing_matrix, lie_density, structure_constants
from .opalg import DiffOp, right_divide
from .ring import PhasePoly, Rational, Signature, as_fraction, fraction_to_str

__all__ = [
    "EnvElement",
    "basis_words",
    "generator_element",
    "casimir",
    "pbw",
    "rho",
    "casimir_eigenvalue",
    "model_moment",
    "ambient_moment",
    "moment_pullback",
    "ell_morphism",
    "decompose_g2",
    "G2Parts",
    "kernel_deg2",
    "KernelResult",
    "joseph_generator",
    "jlambda_generator",
    "joseph_weight",
    "joseph_divisible",
    "ambient_casimir_expected",
]

Word = Tuple[int, ...]
SYMMETRIC = "symmetric"
ENVELOPING = "enveloping"


@lru_cache(maxsize=None)
def _ordered(sig: Signature, word: Word) -> Tuple[Tuple[Word, Rational], ...]:
    """Rewrite a product of basis elements in U(g) to ordered words."""
    for i in range(len(word) - 1):
        a, b = word[i], word[i + 1]
        if a > b:
            out: Dict[Word, Rational] = {}
            swapped = word[:i] + (b, a) + word[i + 2:]
            for w, c in _ordered(sig, swapped):
                out[w] = out.get(w, 0) + c
            for k, c in structure_constants(sig)[(a, b)].items():
                for w, c2 in _ordered(sig, word[:i] + (k,) + word[i + 2:]):
                    out[w] = out.get(w, 0) + c * c2
            return tuple((w, c) for w, c in out.items() if c)
    return ((word, Rational(1)),)


@dataclass
class EnvElement:
    kind: str
    sig: Signature
    coeffs: Dict[Word, Rational] = field(default_factory=dict)
    max_degree: int = 3

    def __post_init__(self):
        if self.kind not in (SYMMETRIC, ENVELOPING):
            raise ValueError(f"unknown kind {self.kind!r}")
        clean = {}
        for w, c in self.coeffs.items():
            c = as_fraction(c)
            if not c:
                continue
            w = tuple(w)
            if len(w) > self.max_degree:
                raise ValueError(f"degree {len(w)} exceeds the truncation {self.max_degree}")
            if list(w) != sorted(w):
                raise ValueError("words must be weakly increasing")
            clean[w] = clean.get(w, 0) + c
        self.coeffs = {w: c for w, c in clean.items() if c}

    @classmethod
    def scalar(cls, kind: str, sig: Signature, c=1, max_degree: int = 3) -> "EnvElement":
        return cls(kind, sig, {(): c}, max_degree)

    def _like(self, coeffs) -> "EnvElement":
        return EnvElement(self.kind, self.sig, coeffs, self.max_degree)

    def _check(self, other: "EnvElement"):
        if other.kind != self.kind or other.sig != self.sig:
            raise ValueError("elements live in different algebras")

    def __add__(self, other: "EnvElement") -> "EnvElement":
        self._check(other)
        out = dict(self.coeffs)
        for w, c in other.coeffs.items():
            out[w] = out.get(w, 0) + c
        return self._like(out)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "EnvElement":
        c = as_fraction(c)
        return self._like({w: v * c for w, v in self.coeffs.items()})

    def __mul__(self, other: "EnvElement") -> "EnvElement":
        self._check(other)
        out: Dict[Word, Rational] = {}
        for w1, c1 in self.coeffs.items():
            for w2, c2 in other.coeffs.items():
                if len(w1) + len(w2) > self.max_degree:
                    raise ValueError(f"product degree exceeds the truncation {self.max_degree}")
                if self.kind == SYMMETRIC:
                    terms = ((tuple(sorted(w1 + w2)), Rational(1)),)
                else:
                    terms = _ordered(self.sig, w1 + w2)
                for w, c in terms:
                    out[w] = out.get(w, 0) + c1 * c2 * c
        return self._like(out)

    def __eq__(self, other):
        if not isinstance(other, EnvElement):
            return NotImplemented
        return self.kind == other.kind and self.sig == other.sig and self.coeffs == other.coeffs

    def is_zero(self) -> bool:
        return not self.coeffs

    def degree(self) -> int:
        return max((len(w) for w in self.coeffs), default=0)

    def part(self, d: int) -> "EnvElement":
        return self._like({w: c for w, c in self.coeffs.items() if len(w) == d})

    def __repr__(self):
        names = [g.name for g in generators(self.sig)]
        parts = []
        for w, c in sorted(self.coeffs.items()):
            mono = "*".join(names[i] for i in w) or "1"
            parts.append(f"{c}*{mono}")
        return f"EnvElement[{self.kind}](" + " + ".join(parts) + ")"

    def to_json(self) -> dict:
        names = [g.name for g in generators(self.sig)]
        return {
            "kind": self.kind,
            "signature": [self.sig.p, self.sig.q],
            "terms": [
                {"word": [names[i] for i in w], "c": fraction_to_str(c)} for w, c in sorted(self.coeffs.items())
            ],
        }


def generator_element(sig: Signature, index: int, kind: str = SYMMETRIC, max_degree: int = 3) -> EnvElement:
    return EnvElement(kind, sig, {(index,): 1}, max_degree)


def basis_words(sig: Signature, degree: int, exact: bool = True) -> List[Word]:
    N = dimension(sig)
    degrees = [degree] if exact else range(degree + 1)
    return [w for d in degrees for w in itertools.combinations_with_replacement(range(N), d)]


@lru_cache(maxsize=None)
def _killing_inverse(sig: Signature) -> Tuple[Tuple[Rational, ...], ...]:
    return tuple(tuple(r) for r in linalg.inverse(killing_matrix(sig)))


def casimir(sig: Signature, kind: str = SYMMETRIC) -> EnvElement:
    """``sum g^{ab} X_a X_b`` with ``g`` the Killing form; the enveloping version is its PBW image."""
    ginv = _killing_inverse(sig)
    N = len(ginv)
    out: Dict[Word, Rational] = {}
    for a in range(N):
        for b in range(N):
            if ginv[a][b]:
                w = tuple(sorted((a, b)))
                out[w] = out.get(w, 0) + ginv[a][b]
    C = EnvElement(SYMMETRIC, sig, out)
    return C if kind == SYMMETRIC else pbw(C)


def pbw(u: EnvElement) -> EnvElement:
    """Symmetrization ``S(g) -> U(g)``: each word goes to the average of its orderings."""
    if u.kind != SYMMETRIC:
        raise ValueError("pbw takes a symmetric-algebra element")
    out: Dict[Word, Rational] = {}
    for w, c in u.coeffs.items():
        perms = set(itertools.permutations(w))
        share = c / len(perms)
        for perm in perms:
            for w2, c2 in _ordered(u.sig, perm):
                out[w2] = out.get(w2, 0) + share * c2
    return EnvElement(ENVELOPING, u.sig, out, u.max_degree)


def rho(lam, n: int) -> Rational:
    """``n^2 lam (1 - lam)``, the magnitude of the Casimir eigenvalue.

    With the Killing form ``(1/2) tr`` the operator ``ell(Casimir)`` is
    ``-rho(lam)``; see :func:`casimir_eigenvalue`.
    """
    lam = as_fraction(lam)
    return n * n * lam * (1 - lam)


@lru_cache(maxsize=None)
def casimir_eigenvalue(lam, sig: Signature) -> Rational:
    """The scalar by which ``ell^lam(PBW(C))`` acts, computed from the operator itself."""
    A = ell_morphism(casimir(sig, ENVELOPING), lam)
    if A.symbol.p_degrees() - {0} or A.symbol.x_degrees() - {0}:
        raise AssertionError("Casimir operator is not a scalar")
    return A.symbol.terms.get((0,) * (2 * sig.n), Rational(0))


def joseph_weight(n: int) -> Rational:
    return Rational(n - 2, 2 * n)


# ---------------------------------------------------------------------------
# moment maps


@lru_cache(maxsize=None)
def model_moment(sig: Signature) -> Tuple[PhasePoly, ...]:
    return tuple(X.symbol() for X in generators(sig))


def _ambient_inverse_metric(sig: Signature):
    return linalg.inverse(ambient_metric(sig))


@lru_cache(maxsize=None)
def ambient_moment(sig: Signature) -> Tuple[PhasePoly, ...]:
    """``p_A rho(X)^A_B x^B`` on the cotangent bundle of the ambient space (n+2 variables)."""
    N = sig.n + 2
    out = []
    for X in generators(sig):
        P = PhasePoly.zero(N)
        for A in range(N):
            for B in range(N):
                c = X.ambient[A][B]
                if c:
                    P = P + (PhasePoly.p(A, N) * PhasePoly.x(B, N)).scale(c)
        out.append(P)
    return tuple(out)


def ambient_casimir_expected(sig: Signature) -> PhasePoly:
    """``(x.p)^2 - x^2 p^2`` with the ambient metric."""
    N = sig.n + 2
    g = ambient_metric(sig)
    ginv = _ambient_inverse_metric(sig)
    xp = PhasePoly.zero(N)
    x2 = PhasePoly.zero(N)
    p2 = PhasePoly.zero(N)
    for A in range(N):
        xp = xp + PhasePoly.x(A, N) * PhasePoly.p(A, N)
        for B in range(N):
            if g[A][B]:
                x2 = x2 + (PhasePoly.x(A, N) * PhasePoly.x(B, N)).scale(g[A][B])
            if ginv[A][B]:
                p2 = p2 + (PhasePoly.p(A, N) * PhasePoly.p(B, N)).scale(ginv[A][B])
    return xp * xp - x2 * p2


def moment_pullback(u: EnvElement, target: str = "model") -> PhasePoly:
    """Algebra morphism ``S(g) -> symbols`` sending ``X`` to its moment function."""
    if u.kind != SYMMETRIC:
        raise ValueError("moment pullback takes a symmetric-algebra element")
    if target == "model":
        images, N = model_moment(u.sig), u.sig.n
    elif target == "ambient":
        images, N = ambient_moment(u.sig), u.sig.n + 2
    else:
        raise ValueError(f"unknown target {target!r}")
    out = PhasePoly.zero(N)
    for w, c in u.coeffs.items():
        term = PhasePoly.const(N, c)
        for i in w:
            term = term * images[i]
        out = out + term
    return out


def ell_morphism(u: EnvElement, lam) -> DiffOp:
    """Algebra morphism ``U(g) -> operators on lam-densities`` extending the Lie derivative."""
    if u.kind != ENVELOPING:
        raise ValueError("ell_morphism takes an enveloping-algebra element")
    lam = as_fraction(lam)
    gens = generators(u.sig)
    n = u.sig.n
    out = DiffOp.zero(n, lam, lam)
    for w, c in u.coeffs.items():
        term = DiffOp.identity(n, lam)
        for i in w:
            term = term.compose(lie_density(gens[i], lam))
        out = out + term.scale(c)
    return out


# ---------------------------------------------------------------------------
# decomposition of the symmetric square


def _bivector(X, ginv) -> List[List[Rational]]:
    # raise the second index of the ambient matrix: U^{AB} = rho^A_C g^{CB}
    N = len(ginv)
    return [[sum((X.ambient[A][C] * ginv[C][B] for C in range(N)), Rational(0)) for B in range(N)] for A in range(N)]


@lru_cache(maxsize=None)
def _bivectors(sig: Signature):
    ginv = _ambient_inverse_metric(sig)
    return tuple(tuple(tuple(r) for r in _bivector(X, ginv)) for X in generators(sig))


def _sym_tensor(U, V) -> Dict[Tuple[int, int, int, int], Rational]:
    N = len(U)
    T: Dict[Tuple[int, int, int, int], Rational] = {}
    for A, B, C, D in itertools.product(range(N), repeat=4):
        v = (U[A][B] * V[C][D] + V[A][B] * U[C][D]) / 2
        if v:
            T[(A, B, C, D)] = v
    return T


def _perm_sign(perm) -> int:
    sign = 1
    p = list(perm)
    for i in range(len(p)):
        for j in range(i + 1, len(p)):
            if p[i] > p[j]:
                sign = -sign
    return sign


_PERMS4 = [(perm, _perm_sign(perm)) for perm in itertools.permutations(range(4))]


def _alternate(T):
    out: Dict = {}
    for key in T:
        for perm, sign in _PERMS4:
            k2 = tuple(key[i] for i in perm)
            out[k2] = out.get(k2, 0) + sign * T[key] / 24
    return {k: v for k, v in out.items() if v}


def _sub(T, S):
    out = dict(T)
    for k, v in S.items():
        out[k] = out.get(k, 0) - v
    return {k: v for k, v in out.items() if v}


def _curvature_parts(W, g, ginv):
    """Scalar, Ricci-trace-free and Weyl parts of an algebraic curvature tensor (upper indices)."""
    N = len(g)
    ric = [[Rational(0)] * N for _ in range(N)]
    for (A, B, C, D), v in W.items():
        if g[A][C]:
            ric[B][D] += g[A][C] * v
    scal = sum((g[B][D] * ric[B][D] for B in range(N) for D in range(N)), Rational(0))
    ric0 = [[ric[B][D] - scal * ginv[B][D] / N for D in range(N)] for B in range(N)]
    S: Dict = {}
    Z: Dict = {}
    for A, B, C, D in itertools.product(range(N), repeat=4):
        s = scal * (ginv[A][C] * ginv[B][D] - ginv[A][D] * ginv[B][C]) / (N * (N - 1))
        if s:
            S[(A, B, C, D)] = s
        z = (
            ginv[A][C] * ric0[B][D] - ginv[A][D] * ric0[B][C] - ginv[B][C] * ric0[A][D] + ginv[B][D] * ric0[A][C]
        ) / (N - 2)
        if z:
            Z[(A, B, C, D)] = z
    return S, Z, _sub(_sub(W, S), Z)


@lru_cache(maxsize=None)
def _sym2_dual(sig: Signature):
    """Dual basis of the bivectors for reading tensors back into S^2(g)."""
    g = ambient_metric(sig)
    biv = _bivectors(sig)
    N = len(g)
    ginv_k = _killing_inverse(sig)
    # pairing of a bivector with an upper-index tensor slot via the Killing form: <U, V> = -1/2 U^{AC} V_{AC}
    lowered = []
    for U in biv:
        L = [[sum((g[A][A2] * g[C][C2] * U[A2][C2] for A2 in range(N) for C2 in range(N) if g[A][A2] and g[C][C2]), Rational(0)) for C in range(N)] for A in range(N)]
        lowered.append(L)
    M = len(biv)
    dual = []
    for a in range(M):
        D = [[sum((ginv_k[a][b] * lowered[b][A][C] for b in range(M)), Rational(0)) * Rational(-1, 2) for C in range(N)] for A in range(N)]
        dual.append(D)
    return dual


def _tensor_to_sym2(T, sig: Signature) -> EnvElement:
    dual = _sym2_dual(sig)
    M = len(dual)
    out: Dict[Word, Rational] = {}
    for a in range(M):
        for b in range(a, M):
            s = Rational(0)
            Da, Db = dual[a], dual[b]
            for (A, B, C, D), v in T.items():
                if Da[A][B] and Db[C][D]:
                    s += Da[A][B] * Db[C][D] * v
            c = s if a == b else 2 * s
            if c:
                out[(a, b)] = c
    return EnvElement(SYMMETRIC, sig, out)


@dataclass
class G2Parts:
    wedge: EnvElement
    casimir: EnvElement
    bullet: EnvElement
    box: EnvElement

    def total(self) -> EnvElement:
        return self.wedge + self.casimir + self.bullet + self.box


def decompose_g2(X: int, Y: int, sig: Signature) -> G2Parts:
    """Split ``X Y`` in ``S^2(g)`` into its four irreducible pieces.

    Through ``g = Lambda^2 R^{n+2}`` the product becomes a 4-tensor; its full
    antisymmetrization, its scalar (Casimir) part, its trace-free Ricci part
    and the Weyl-type remainder are read back into ``S^2(g)``.
    """
    g = ambient_metric(sig)
    ginv = _ambient_inverse_metric(sig)
    biv = _bivectors(sig)
    T = _sym_tensor(biv[X], biv[Y])
    wedge = _alternate(T)
    S, Z, weyl = _curvature_parts(_sub(T, wedge), g, ginv)
    return G2Parts(
        _tensor_to_sym2(wedge, sig),
        _tensor_to_sym2(S, sig),
        _tensor_to_sym2(Z, sig),
        _tensor_to_sym2(weyl, sig),
    )


# ---------------------------------------------------------------------------
# degree-2 kernels and Joseph generators


@dataclass
class KernelResult:
    which: str
    dimension: int
    basis: List[EnvElement]
    lam: Optional[Rational] = None

    def to_json(self) -> dict:
        out = {"which": self.which, "dimension": self.dimension, "basis": [b.to_json() for b in self.basis]}
        if self.lam is not None:
            out["lambda"] = fraction_to_str(self.lam)
        return out


def kernel_deg2(which: str, sig: Signature, lam=None) -> KernelResult:
    """Kernel of ``model_moment``, ``ambient_moment`` or ``ell`` on elements of degree at most 2."""
    words = basis_words(sig, 2, exact=False)
    cols = []
    if which in ("model_moment", "ambient_moment"):
        target = "model" if which == "model_moment" else "ambient"
        kind = SYMMETRIC
        for w in words:
            cols.append(dict(moment_pullback(EnvElement(kind, sig, {w: 1}), target).terms))
    elif which == "ell":
        if lam is None:
            raise ValueError("ell kernel needs lambda")
        lam = as_fraction(lam)
        kind = ENVELOPING
        for w in words:
            cols.append(dict(ell_morphism(EnvElement(kind, sig, {w: 1}), lam).symbol.terms))
    else:
        raise ValueError(f"unknown map {which!r}")
    basis = [EnvElement(kind, sig, {words[j]: c for j, c in vec.items()}) for vec in linalg.nullspace(cols)]
    return KernelResult(which, len(basis), basis, lam if which == "ell" else None)


def _killing(sig: Signature, X: int, Y: int) -> Rational:
    return killing_matrix(sig)[X][Y]


def joseph_generator(X: int, Y: int, lam, sig: Signature) -> EnvElement:
    """``PBW(X Y - box part) - <X,Y> c(lam) / dim g`` with ``c`` the Casimir eigenvalue.

    The Casimir piece of ``X Y`` is ``<X,Y>/dim g`` times ``C``; subtracting
    the matching scalar makes the image under ``ell`` vanish except for the
    trace-free symmetric piece.
    """
    parts = decompose_g2(X, Y, sig)
    u = EnvElement(SYMMETRIC, sig, {tuple(sorted((X, Y))): 1}) - parts.box
    c = _killing(sig, X, Y) * casimir_eigenvalue(as_fraction(lam), sig) / dimension(sig)
    return pbw(u) - EnvElement.scalar(ENVELOPING, sig, c)


def jlambda_generator(X: int, Y: int, lam, sig: Signature) -> EnvElement:
    """Like :func:`joseph_generator` without the trace-free symmetric piece; lies in the ``ell`` kernel."""
    parts = decompose_g2(X, Y, sig)
    u = EnvElement(SYMMETRIC, sig, {tuple(sorted((X, Y))): 1}) - parts.box - parts.bullet
    c = _killing(sig, X, Y) * casimir_eigenvalue(as_fraction(lam), sig) / dimension(sig)
    return pbw(u) - EnvElement.scalar(ENVELOPING, sig, c)


def joseph_divisible(X: int, Y: int, lam, sig: Signature) -> bool:
    """Whether ``ell(joseph_generator)`` is a right multiple of the Laplacian."""
    A = ell_morphism(joseph_generator(X, Y, lam, sig), lam)
    return right_divide(A, 1, sig) is not None
