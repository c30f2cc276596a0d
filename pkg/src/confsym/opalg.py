"""Normal-ordered operators on phase-space polynomials and differential operators.

Two operator types live here.

``PhaseOp``
    Polynomial differential operators acting on :class:`PhasePoly`. A term
    keyed by ``(a, b, c, d)`` (four length-``n`` exponent vectors) stands for
    ``x^a p^b d_x^c d_p^d``: multiplications to the left of derivations.

``DiffOp``
    Differential operators ``sum_alpha A_alpha(x) d^alpha`` between density
    modules of weights ``lam -> mu``. Internally an operator is stored through
    its normal-ordered total symbol, i.e. ``d^alpha`` is recorded as
    ``p^alpha``, so composition is the symbol product
    ``a # b = sum_g (1/g!) d_p^g a * d_x^g b``.
"""

from __future__ import annotations

import itertools
from functools import lru_cache
from math import comb
from typing import Dict, Mapping, Optional, Tuple

from .ring import Rational, PhasePoly, Signature, as_fraction, fraction_to_str, parse_fraction

OpKey = Tuple[int, ...]


@lru_cache(maxsize=None)
def _falling(a: int, j: int) -> int:
    out = 1
    for t in range(j):
        out *= a - t
    return out


@lru_cache(maxsize=None)
def _leibniz(left: int, right: int) -> Tuple[Tuple[int, int], ...]:
    """Pairs ``(j, weight)`` for ``d^left . m^right = sum_j weight * m^(right-j) d^(left-j)``."""
    return tuple((j, comb(left, j) * _falling(right, j)) for j in range(min(left, right) + 1))


class PhaseOp:
    """Normal-ordered polynomial differential operator on phase space."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: Optional[Mapping[OpKey, object]] = None, _trusted: bool = False):
        self.n = n
        if _trusted:
            self.terms: Dict[OpKey, Rational] = terms  # type: ignore[assignment]
            return
        clean: Dict[OpKey, Rational] = {}
        for key, c in (terms or {}).items():
            c = as_fraction(c)
            key = tuple(int(e) for e in key)
            if len(key) != 4 * n or min(key, default=0) < 0:
                raise ValueError("malformed operator key")
            v = clean.get(key, 0) + c
            if v:
                clean[key] = v
            else:
                clean.pop(key, None)
        self.terms = clean

    # -- constructors -------------------------------------------------------
    @classmethod
    def zero(cls, n: int) -> "PhaseOp":
        return cls(n, {}, _trusted=True)

    @classmethod
    def identity(cls, n: int) -> "PhaseOp":
        return cls.scalar(n, 1)

    @classmethod
    def scalar(cls, n: int, c) -> "PhaseOp":
        c = as_fraction(c)
        return cls(n, {(0,) * (4 * n): c} if c else {}, _trusted=True)

    @classmethod
    def mult(cls, f: PhasePoly) -> "PhaseOp":
        """Multiplication by a phase-space polynomial."""
        n = f.n
        tail = (0,) * (2 * n)
        return cls(n, {key + tail: c for key, c in f.terms.items()}, _trusted=True)

    @classmethod
    def dx(cls, i: int, n: int) -> "PhaseOp":
        key = [0] * (4 * n)
        key[2 * n + i] = 1
        return cls(n, {tuple(key): Rational(1)}, _trusted=True)

    @classmethod
    def dp(cls, i: int, n: int) -> "PhaseOp":
        key = [0] * (4 * n)
        key[3 * n + i] = 1
        return cls(n, {tuple(key): Rational(1)}, _trusted=True)

    @classmethod
    def term(cls, a, b, c, d, coef=1) -> "PhaseOp":
        n = len(a)
        return cls(n, {tuple(a) + tuple(b) + tuple(c) + tuple(d): coef})

    # -- protocol -----------------------------------------------------------
    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if isinstance(other, PhaseOp):
            return self.n == other.n and self.terms == other.terms
        return NotImplemented

    def __hash__(self):
        return hash((self.n, frozenset(self.terms.items())))

    def __len__(self):
        return len(self.terms)

    def __repr__(self):
        return f"PhaseOp(n={self.n}, {len(self.terms)} terms)"

    def _check(self, other):
        if other.n != self.n:
            raise ValueError(f"dimension mismatch: {self.n} vs {other.n}")

    def __add__(self, other: "PhaseOp") -> "PhaseOp":
        self._check(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            v = out.get(k, 0) + c
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return PhaseOp(self.n, out, _trusted=True)

    def __neg__(self):
        return PhaseOp(self.n, {k: -c for k, c in self.terms.items()}, _trusted=True)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "PhaseOp":
        c = as_fraction(c)
        if not c:
            return PhaseOp.zero(self.n)
        return PhaseOp(self.n, {k: v * c for k, v in self.terms.items()}, _trusted=True)

    def __mul__(self, other):
        """``A * B`` is composition ``A o B``; a scalar scales."""
        if isinstance(other, PhaseOp):
            return op_compose(self, other)
        return self.scale(other)

    __matmul__ = __mul__

    def __rmul__(self, other):
        return self.scale(other)

    def __call__(self, f: PhasePoly) -> PhasePoly:
        return op_apply(self, f)

    def __pow__(self, e: int) -> "PhaseOp":
        out = PhaseOp.identity(self.n)
        for _ in range(e):
            out = op_compose(out, self)
        return out

    def blocks(self) -> Dict[Tuple[OpKey, OpKey], Dict[Tuple[OpKey, OpKey], Rational]]:
        """Group terms as ``x^a d_x^c * (p^b d_p^d)``: ``(a, c) -> {(b, d): coef}``.

        The x-parts ``x^a d_x^c`` are linearly independent operators on
        polynomials and commute with the p-parts, so an operator vanishes on
        ``(x-polynomials) (x) V`` for a space ``V`` of p-polynomials iff every
        block's p-operator vanishes on ``V``.
        """
        n = self.n
        out: Dict = {}
        for key, c in self.terms.items():
            a, b, cc, d = key[:n], key[n:2 * n], key[2 * n:3 * n], key[3 * n:]
            out.setdefault((a, cc), {})[(b, d)] = c
        return out

    def to_json(self) -> dict:
        n = self.n
        items = sorted(self.terms.items())
        return {
            "n": n,
            "terms": [
                {
                    "x": list(k[:n]),
                    "p": list(k[n:2 * n]),
                    "dx": list(k[2 * n:3 * n]),
                    "dp": list(k[3 * n:]),
                    "c": fraction_to_str(c),
                }
                for k, c in items
            ],
        }

    @classmethod
    def from_json(cls, doc: Mapping) -> "PhaseOp":
        n = int(doc["n"])
        terms: Dict[OpKey, Rational] = {}
        for t in doc.get("terms", []):
            key = tuple(list(t["x"]) + list(t["p"]) + list(t["dx"]) + list(t["dp"]))
            terms[key] = terms.get(key, 0) + parse_fraction(str(t["c"]))
        return cls(n, terms)


def op_apply(A: PhaseOp, f: PhasePoly) -> PhasePoly:
    """Apply a normal-ordered operator to a polynomial."""
    if A.n != f.n:
        raise ValueError(f"dimension mismatch: {A.n} vs {f.n}")
    n = A.n
    out: Dict[Tuple[int, ...], Rational] = {}
    for key, c in A.terms.items():
        a, b, dc, dd = key[:n], key[n:2 * n], key[2 * n:3 * n], key[3 * n:]
        lower = dc + dd
        raise_ = a + b
        for fk, fc in f.terms.items():
            w = 1
            nk = []
            for e, d, r in zip(fk, lower, raise_):
                if e < d:
                    break
                if d:
                    w *= _falling(e, d)
                nk.append(e - d + r)
            else:
                nk = tuple(nk)
                v = out.get(nk, 0) + c * fc * w
                if v:
                    out[nk] = v
                else:
                    out.pop(nk, None)
    return PhasePoly(n, out, _trusted=True)


def op_compose(A: PhaseOp, B: PhaseOp) -> PhaseOp:
    """Normal-ordered form of ``A o B``."""
    if A.n != B.n:
        raise ValueError(f"dimension mismatch: {A.n} vs {B.n}")
    n = A.n
    out: Dict[OpKey, Rational] = {}
    for ka, ca in A.terms.items():
        a1, b1, c1, d1 = ka[:n], ka[n:2 * n], ka[2 * n:3 * n], ka[3 * n:]
        for kb, cb in B.terms.items():
            a2, b2, c2, d2 = kb[:n], kb[n:2 * n], kb[2 * n:3 * n], kb[3 * n:]
            # d_x^c1 past x^a2, d_p^d1 past p^b2, variable by variable
            choices = [_leibniz(c1[i], a2[i]) for i in range(n)] + [_leibniz(d1[i], b2[i]) for i in range(n)]
            cab = ca * cb
            mults = a1 + b1
            mults2 = a2 + b2
            ders = c1 + d1
            ders2 = c2 + d2
            for pick in itertools.product(*choices):
                w = 1
                js = []
                for j, wt in pick:
                    w *= wt
                    js.append(j)
                key = tuple(m + m2 - j for m, m2, j in zip(mults, mults2, js)) + tuple(
                    d - j + d2 for d, d2, j in zip(ders, ders2, js)
                )
                v = out.get(key, 0) + cab * w
                if v:
                    out[key] = v
                else:
                    out.pop(key, None)
    return PhaseOp(n, out, _trusted=True)


def commutator(A: PhaseOp, B: PhaseOp) -> PhaseOp:
    return op_compose(A, B) - op_compose(B, A)


# ---------------------------------------------------------------------------
# symbol calculus and differential operators


def sharp(a: PhasePoly, b: PhasePoly) -> PhasePoly:
    """Normal-ordered symbol of ``N(a) o N(b)``: ``sum_g (1/g!) d_p^g a * d_x^g b``."""
    if a.n != b.n:
        raise ValueError(f"dimension mismatch: {a.n} vs {b.n}")
    n = a.n
    out: Dict[Tuple[int, ...], Rational] = {}
    for ka, ca in a.terms.items():
        xa, pa = ka[:n], ka[n:]
        for kb, cb in b.terms.items():
            xb, pb = kb[:n], kb[n:]
            choices = [_leibniz(pa[i], xb[i]) for i in range(n)]
            for pick in itertools.product(*choices):
                w = ca * cb
                for _, wt in pick:
                    w *= wt
                key = tuple(xa[i] + xb[i] - pick[i][0] for i in range(n)) + tuple(
                    pa[i] + pb[i] - pick[i][0] for i in range(n)
                )
                v = out.get(key, 0) + w
                if v:
                    out[key] = v
                else:
                    out.pop(key, None)
    return PhasePoly(n, out, _trusted=True)


def left_sharp_op(a: PhasePoly) -> PhaseOp:
    """PhaseOp of ``S -> a # S``, i.e. ``sum_g (1/g!) (d_p^g a) d_x^g``."""
    return _sharp_op(a, left=True)


def right_sharp_op(b: PhasePoly) -> PhaseOp:
    """PhaseOp of ``S -> S # b``, i.e. ``sum_g (1/g!) (d_x^g b) d_p^g``."""
    return _sharp_op(b, left=False)


def _sharp_op(f: PhasePoly, left: bool) -> PhaseOp:
    n = f.n
    out: Dict[OpKey, Rational] = {}
    for key, c in f.terms.items():
        xs, ps = key[:n], key[n:]
        src = ps if left else xs
        ranges = [range(e + 1) for e in src]
        for g in itertools.product(*ranges):
            w = c
            for i in range(n):
                w *= comb(src[i], g[i])
            if left:
                mult = xs + tuple(ps[i] - g[i] for i in range(n))
                k = mult + tuple(g) + (0,) * n
            else:
                mult = tuple(xs[i] - g[i] for i in range(n)) + ps
                k = mult + (0,) * n + tuple(g)
            v = out.get(k, 0) + w
            if v:
                out[k] = v
            else:
                out.pop(k, None)
    return PhaseOp(n, out, _trusted=True)


class DiffOp:
    """Differential operator ``sum_alpha A_alpha(x) d^alpha`` from ``lam``- to ``mu``-densities."""

    __slots__ = ("symbol", "lam", "mu")

    def __init__(self, symbol: PhasePoly, lam=0, mu=0):
        self.symbol = symbol
        self.lam = as_fraction(lam)
        self.mu = as_fraction(mu)

    @property
    def n(self) -> int:
        return self.symbol.n

    @property
    def terms(self) -> Dict[Tuple[int, ...], PhasePoly]:
        """``alpha -> A_alpha(x)``."""
        return self.symbol.p_coefficients()

    @classmethod
    def zero(cls, n: int, lam=0, mu=0) -> "DiffOp":
        return cls(PhasePoly.zero(n), lam, mu)

    @classmethod
    def identity(cls, n: int, lam=0) -> "DiffOp":
        return cls(PhasePoly.const(n, 1), lam, lam)

    @classmethod
    def laplacian(cls, sig: Signature, power: int = 1, lam=None, mu=None) -> "DiffOp":
        """``Delta^power``; weights default to the conformally invariant pair."""
        n = sig.n
        if lam is None:
            lam = Rational(n - 2 * power, 2 * n)
        if mu is None:
            mu = Rational(n + 2 * power, 2 * n)
        return cls(PhasePoly.R(sig) ** power, lam, mu)

    def order(self) -> int:
        return self.symbol.p_degree()

    def principal_symbol(self) -> PhasePoly:
        return self.symbol.p_part(self.order())

    def is_zero(self) -> bool:
        return self.symbol.is_zero()

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        if isinstance(other, DiffOp):
            return self.symbol == other.symbol and self.lam == other.lam and self.mu == other.mu
        return NotImplemented

    def __hash__(self):
        return hash((self.symbol, self.lam, self.mu))

    def same_operator(self, other: "DiffOp") -> bool:
        """Equality of the underlying operators, ignoring weights."""
        return self.symbol == other.symbol

    def __repr__(self):
        return f"DiffOp[{self.lam}->{self.mu}]({self.symbol})"

    def __add__(self, other: "DiffOp") -> "DiffOp":
        if (self.lam, self.mu) != (other.lam, other.mu):
            raise ValueError("weight mismatch in operator sum")
        return DiffOp(self.symbol + other.symbol, self.lam, self.mu)

    def __sub__(self, other: "DiffOp") -> "DiffOp":
        if (self.lam, self.mu) != (other.lam, other.mu):
            raise ValueError("weight mismatch in operator difference")
        return DiffOp(self.symbol - other.symbol, self.lam, self.mu)

    def __neg__(self):
        return DiffOp(-self.symbol, self.lam, self.mu)

    def scale(self, c) -> "DiffOp":
        return DiffOp(self.symbol.scale(c), self.lam, self.mu)

    def with_weights(self, lam, mu) -> "DiffOp":
        return DiffOp(self.symbol, lam, mu)

    def compose(self, other: "DiffOp", check_weights: bool = True) -> "DiffOp":
        """``self o other``; the target weight of ``other`` must be the source weight of ``self``."""
        if check_weights and other.mu != self.lam:
            raise ValueError(f"weight mismatch: {other.mu} -> then source {self.lam}")
        return DiffOp(sharp(self.symbol, other.symbol), other.lam, self.mu)

    def __matmul__(self, other: "DiffOp") -> "DiffOp":
        return self.compose(other)

    def apply(self, f: PhasePoly) -> PhasePoly:
        """Act on a function of ``x`` (a PhasePoly without momenta)."""
        if not f.is_x_only():
            raise ValueError("operators act on functions of x only")
        out = PhasePoly.zero(self.n)
        for alpha, coef in self.terms.items():
            g = f
            for i, e in enumerate(alpha):
                for _ in range(e):
                    g = g.dx(i)
            out = out + coef * g
        return out

    def to_json(self) -> dict:
        n = self.n
        return {
            "n": n,
            "lambda": fraction_to_str(self.lam),
            "mu": fraction_to_str(self.mu),
            "terms": [
                {"x": list(k[:n]), "d": list(k[n:]), "c": fraction_to_str(c)} for k, c in self.symbol
            ],
        }

    @classmethod
    def from_json(cls, doc: Mapping) -> "DiffOp":
        n = int(doc["n"])
        terms = {}
        for t in doc.get("terms", []):
            key = tuple(list(t["x"]) + list(t["d"]))
            terms[key] = terms.get(key, 0) + parse_fraction(str(t["c"]))
        return cls(PhasePoly(n, terms), parse_fraction(str(doc["lambda"])), parse_fraction(str(doc["mu"])))


def normal_order_N(P: PhasePoly, lam=0, mu=0) -> DiffOp:
    """``A(x) p^beta -> A(x) d^beta``."""
    return DiffOp(P, lam, mu)


def total_symbol(A: DiffOp) -> PhasePoly:
    """Inverse of :func:`normal_order_N`."""
    return A.symbol


def divmod_R_power(f: PhasePoly, sig: Signature, ell: int = 1) -> Tuple[PhasePoly, PhasePoly]:
    """``(q, r)`` with ``f = q R^ell + r`` and no term of ``r``'s reduction divisible by ``p_0^2``.

    The remainder is the normal form modulo the principal ideal ``(R^ell)``.
    """
    q = f
    for _ in range(ell):
        q, _ = _divmod_R(q, sig)
    return q, f - q * PhasePoly.R(sig) ** ell


def divide_by_R_power(f: PhasePoly, sig: Signature, ell: int = 1) -> Optional[PhasePoly]:
    """Exact quotient ``f / R^ell`` in the polynomial ring, or None if not divisible."""
    cur = f
    for _ in range(ell):
        cur, rem = _divmod_R(cur, sig)
        if rem:
            return None
    return cur


def _divmod_R(f: PhasePoly, sig: Signature) -> Tuple[PhasePoly, PhasePoly]:
    # R = eta_0 p_0^2 + (terms free of p_0): divide with p_0^2 as leading monomial
    n = sig.n
    eta0 = sig.eta[0]
    others = {k: c for k, c in PhasePoly.R(sig).terms.items() if k[n] == 0}
    rem = dict(f.terms)
    quot: Dict[Tuple[int, ...], Rational] = {}
    while True:
        lead = [k for k in rem if k[n] >= 2]
        if not lead:
            break
        key = max(lead, key=lambda k: k[n])
        c = rem.pop(key) * eta0
        qk = list(key)
        qk[n] -= 2
        qk = tuple(qk)
        quot[qk] = quot.get(qk, 0) + c
        for rk, rc in others.items():
            k2 = tuple(a + b for a, b in zip(qk, rk))
            v = rem.get(k2, 0) - c * rc
            if v:
                rem[k2] = v
            else:
                rem.pop(k2, None)
    return PhasePoly(n, {k: v for k, v in quot.items() if v}), PhasePoly(n, rem, _trusted=True)


def right_divide(A: DiffOp, ell: int, sig: Signature) -> Optional[DiffOp]:
    """``B`` with ``A = B o Delta^ell``, or None when ``A`` is not in the left ideal.

    ``Delta^ell`` has constant coefficients, so the symbol of ``B o Delta^ell``
    is the plain product ``sym(B) * R^ell``; membership in the left ideal is
    exact divisibility of the normal-ordered symbol by ``R^ell``.
    """
    if ell < 1:
        raise ValueError("ell must be positive")
    q = divide_by_R_power(A.symbol, sig, ell)
    if q is None:
        return None
    n = sig.n
    lam_src = A.lam
    # Delta^ell goes lam_src -> lam_src + 2 ell / n; B starts there
    return DiffOp(q, lam_src + Rational(2 * ell, n), A.mu)
