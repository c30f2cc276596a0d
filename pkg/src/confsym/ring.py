"""Exact rational polynomials on the phase space T*R^n.

A :class:`PhasePoly` is a sparse polynomial in positions ``x^0..x^{n-1}``
and momenta ``p_0..p_{n-1}`` with exact rational coefficients (``gmpy2.mpq``; ``Fraction`` inputs are
accepted and converted).
Each term is keyed by a tuple of ``2n`` exponents: the first ``n`` belong to
``x``, the last ``n`` to ``p``. Instances are treated as immutable.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Iterator, Mapping, Optional, Sequence, Tuple

from gmpy2 import mpq as Rational

Key = Tuple[int, ...]

__all__ = [
    "Fraction",
    "Rational",
    "Signature",
    "PhasePoly",
    "as_fraction",
    "fraction_to_str",
    "parse_fraction",
    "poisson",
    "monomials",
]


_RATIONAL_TYPE = type(Rational(0))


def as_fraction(value) -> Rational:
    """Coerce to the exact scalar type; floats are refused."""
    if isinstance(value, _RATIONAL_TYPE):
        return value
    if isinstance(value, str):
        return parse_fraction(value)
    if isinstance(value, float):
        raise TypeError("floating point scalars are not accepted; use a Fraction or 'num/den'")
    if isinstance(value, Fraction):
        return Rational(value.numerator, value.denominator)
    return Rational(value)


def parse_fraction(text: str) -> Rational:
    """Parse ``"num/den"`` or ``"num"`` into an exact rational."""
    text = text.strip()
    if not text:
        raise ValueError("empty rational")
    if any(ch in text for ch in ".eE"):
        raise ValueError(f"not an exact rational: {text!r}")
    try:
        return Rational(Fraction(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not an exact rational: {text!r}") from exc


def fraction_to_str(value) -> str:
    return f"{value.numerator}/{value.denominator}"


@dataclass(frozen=True)
class Signature:
    """Signature ``(p, q)`` of the flat metric ``diag(+1 x p, -1 x q)``."""

    p: int
    q: int

    def __post_init__(self):
        if self.p < 0 or self.q < 0:
            raise ValueError("signature entries must be non-negative")
        if self.p + self.q < 3:
            raise ValueError(f"dimension n = p + q must be at least 3, got {self.p + self.q}")

    @property
    def n(self) -> int:
        return self.p + self.q

    @property
    def eta(self) -> Tuple[int, ...]:
        """Diagonal of the metric; it is its own inverse."""
        return (1,) * self.p + (-1,) * self.q

    def lower(self, i: int) -> int:
        return self.eta[i]

    def __str__(self):
        return f"({self.p},{self.q})"


def _check_key(key: Sequence[int], n: int) -> Key:
    key = tuple(int(e) for e in key)
    if len(key) != 2 * n:
        raise ValueError(f"exponent key of length {len(key)} for n = {n}")
    if any(e < 0 for e in key):
        raise ValueError("negative exponent")
    return key


def _sort_key(key: Key, n: int):
    xs, ps = key[:n], key[n:]
    return (sum(ps), tuple(-e for e in ps), sum(xs), tuple(-e for e in xs))


class PhasePoly:
    """Sparse polynomial in ``x`` and ``p`` with exact rational coefficients."""

    __slots__ = ("n", "terms", "_hash")

    def __init__(self, n: int, terms: Optional[Mapping[Key, object]] = None, _trusted: bool = False):
        self.n = n
        self._hash = None
        if _trusted:
            self.terms: Dict[Key, Rational] = terms  # type: ignore[assignment]
            return
        clean: Dict[Key, Rational] = {}
        if terms:
            for key, c in terms.items():
                c = as_fraction(c)
                if c:
                    key = _check_key(key, n)
                    c = clean.get(key, 0) + c
                    if c:
                        clean[key] = c
                    else:
                        clean.pop(key, None)
        self.terms = clean

    # -- constructors -------------------------------------------------------
    @classmethod
    def zero(cls, n: int) -> "PhasePoly":
        return cls(n, {}, _trusted=True)

    @classmethod
    def const(cls, n: int, c) -> "PhasePoly":
        c = as_fraction(c)
        return cls(n, {(0,) * (2 * n): c} if c else {}, _trusted=True)

    @classmethod
    def monomial(cls, xexp: Sequence[int], pexp: Sequence[int], c=1) -> "PhasePoly":
        n = len(xexp)
        if len(pexp) != n:
            raise ValueError("x and p exponent vectors differ in length")
        return cls(n, {tuple(xexp) + tuple(pexp): c})

    @classmethod
    def x(cls, i: int, n: int) -> "PhasePoly":
        _check_index(i, n)
        key = [0] * (2 * n)
        key[i] = 1
        return cls(n, {tuple(key): Rational(1)}, _trusted=True)

    @classmethod
    def p(cls, i: int, n: int) -> "PhasePoly":
        _check_index(i, n)
        key = [0] * (2 * n)
        key[n + i] = 1
        return cls(n, {tuple(key): Rational(1)}, _trusted=True)

    @classmethod
    def R(cls, sig: Signature) -> "PhasePoly":
        """The invariant symbol ``eta^{ij} p_i p_j``."""
        n = sig.n
        terms = {}
        for i, e in enumerate(sig.eta):
            key = [0] * (2 * n)
            key[n + i] = 2
            terms[tuple(key)] = Rational(e)
        return cls(n, terms, _trusted=True)

    @classmethod
    def x_squared(cls, sig: Signature) -> "PhasePoly":
        n = sig.n
        terms = {}
        for i, e in enumerate(sig.eta):
            key = [0] * (2 * n)
            key[i] = 2
            terms[tuple(key)] = Rational(e)
        return cls(n, terms, _trusted=True)

    # -- basic protocol -----------------------------------------------------
    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if isinstance(other, PhasePoly):
            return self.n == other.n and self.terms == other.terms
        if isinstance(other, (int, Fraction, _RATIONAL_TYPE)):
            return self == PhasePoly.const(self.n, other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.n, frozenset(self.terms.items())))
        return self._hash

    def __iter__(self) -> Iterator[Tuple[Key, Rational]]:
        for key in sorted(self.terms, key=lambda k: _sort_key(k, self.n)):
            yield key, self.terms[key]

    def __len__(self):
        return len(self.terms)

    def __repr__(self):
        return f"PhasePoly({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for key, c in self:
            factors = []
            for i in range(self.n):
                if key[i]:
                    factors.append(f"x{i}" + (f"^{key[i]}" if key[i] > 1 else ""))
            for i in range(self.n):
                e = key[self.n + i]
                if e:
                    factors.append(f"p{i}" + (f"^{e}" if e > 1 else ""))
            mono = "*".join(factors)
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    # -- arithmetic ---------------------------------------------------------
    def _coerce(self, other) -> "PhasePoly":
        if isinstance(other, PhasePoly):
            if other.n != self.n:
                raise ValueError(f"dimension mismatch: {self.n} vs {other.n}")
            return other
        return PhasePoly.const(self.n, other)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for key, c in other.terms.items():
            v = out.get(key, 0) + c
            if v:
                out[key] = v
            else:
                out.pop(key, None)
        return PhasePoly(self.n, out, _trusted=True)

    __radd__ = __add__

    def __neg__(self):
        return PhasePoly(self.n, {k: -c for k, c in self.terms.items()}, _trusted=True)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def scale(self, c) -> "PhasePoly":
        c = as_fraction(c)
        if not c:
            return PhasePoly.zero(self.n)
        return PhasePoly(self.n, {k: v * c for k, v in self.terms.items()}, _trusted=True)

    def __mul__(self, other):
        if not isinstance(other, PhasePoly):
            return self.scale(other)
        other = self._coerce(other)
        out: Dict[Key, Rational] = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                key = tuple(a + b for a, b in zip(k1, k2))
                v = out.get(key, 0) + c1 * c2
                if v:
                    out[key] = v
                else:
                    out.pop(key, None)
        return PhasePoly(self.n, out, _trusted=True)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative power")
        result = PhasePoly.const(self.n, 1)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    # -- calculus -----------------------------------------------------------
    def partial(self, var: str, i: int) -> "PhasePoly":
        """Formal partial derivative in ``x^i`` (``var='x'``) or ``p_i`` (``var='p'``)."""
        _check_index(i, self.n)
        if var == "x":
            pos = i
        elif var == "p":
            pos = self.n + i
        else:
            raise ValueError(f"variable kind must be 'x' or 'p', got {var!r}")
        out = {}
        for key, c in self.terms.items():
            e = key[pos]
            if e:
                k = list(key)
                k[pos] = e - 1
                out[tuple(k)] = c * e
        return PhasePoly(self.n, out, _trusted=True)

    def dx(self, i: int) -> "PhasePoly":
        return self.partial("x", i)

    def dp(self, i: int) -> "PhasePoly":
        return self.partial("p", i)

    # -- gradings -----------------------------------------------------------
    def p_degrees(self) -> set:
        return {sum(k[self.n:]) for k in self.terms}

    def x_degrees(self) -> set:
        return {sum(k[: self.n]) for k in self.terms}

    def p_degree(self) -> int:
        """Maximal degree in the momenta (-1 for the zero polynomial)."""
        return max(self.p_degrees(), default=-1)

    def x_degree(self) -> int:
        return max(self.x_degrees(), default=-1)

    def is_p_homogeneous(self) -> bool:
        return len(self.p_degrees()) <= 1

    def p_part(self, k: int) -> "PhasePoly":
        n = self.n
        return PhasePoly(n, {key: c for key, c in self.terms.items() if sum(key[n:]) == k}, _trusted=True)

    def p_components(self) -> Dict[int, "PhasePoly"]:
        n = self.n
        out: Dict[int, Dict[Key, Rational]] = {}
        for key, c in self.terms.items():
            out.setdefault(sum(key[n:]), {})[key] = c
        return {k: PhasePoly(n, t, _trusted=True) for k, t in sorted(out.items())}

    def weight(self) -> set:
        """Set of dilation weights ``deg_x - deg_p`` occurring in the terms."""
        n = self.n
        return {sum(k[:n]) - sum(k[n:]) for k in self.terms}

    def x_coefficients(self) -> Dict[Key, "PhasePoly"]:
        """Split into ``sum_alpha x^alpha * P_alpha(p)``; returns ``alpha -> P_alpha``."""
        n = self.n
        out: Dict[Key, Dict[Key, Rational]] = {}
        zeros = (0,) * n
        for key, c in self.terms.items():
            out.setdefault(key[:n], {})[zeros + key[n:]] = c
        return {a: PhasePoly(n, t, _trusted=True) for a, t in out.items()}

    def p_coefficients(self) -> Dict[Key, "PhasePoly"]:
        """Split into ``sum_beta A_beta(x) p^beta``; returns ``beta -> A_beta``."""
        n = self.n
        out: Dict[Key, Dict[Key, Rational]] = {}
        zeros = (0,) * n
        for key, c in self.terms.items():
            out.setdefault(key[n:], {})[key[:n] + zeros] = c
        return {b: PhasePoly(n, t, _trusted=True) for b, t in out.items()}

    def is_x_only(self) -> bool:
        return all(not any(k[self.n:]) for k in self.terms)

    # -- serialization ------------------------------------------------------
    def to_json(self, sig: Optional[Signature] = None) -> dict:
        doc = {"n": self.n}
        if sig is not None:
            doc["signature"] = [sig.p, sig.q]
        doc["terms"] = [
            {"x": list(key[: self.n]), "p": list(key[self.n:]), "c": fraction_to_str(c)}
            for key, c in self
        ]
        return doc

    @classmethod
    def from_json(cls, doc: Mapping) -> "PhasePoly":
        n = int(doc["n"])
        terms: Dict[Key, Rational] = {}
        for t in doc.get("terms", []):
            xs, ps = list(t["x"]), list(t["p"])
            if len(xs) != n or len(ps) != n:
                raise ValueError("exponent vector length does not match n")
            key = tuple(xs + ps)
            terms[key] = terms.get(key, 0) + parse_fraction(str(t["c"]))
        return cls(n, terms)


def _check_index(i: int, n: int):
    if not 0 <= i < n:
        raise IndexError(f"variable index {i} out of range for n = {n}")


def poisson(a: PhasePoly, b: PhasePoly) -> PhasePoly:
    """``{a, b} = sum_i d_{p_i} a * d_{x^i} b - d_{x^i} a * d_{p_i} b``."""
    if a.n != b.n:
        raise ValueError(f"dimension mismatch: {a.n} vs {b.n}")
    out = PhasePoly.zero(a.n)
    for i in range(a.n):
        out = out + a.dp(i) * b.dx(i) - a.dx(i) * b.dp(i)
    return out


def monomials(n: int, degree: int) -> Iterable[Tuple[int, ...]]:
    """Exponent vectors of length ``n`` and total degree ``degree`` in a fixed order."""
    if n == 1:
        yield (degree,)
        return
    for first in range(degree, -1, -1):
        for rest in monomials(n - 1, degree - first):
            yield (first,) + rest
