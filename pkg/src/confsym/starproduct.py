"""Graded star products induced by the equivariant quantization.

For symbols of degrees ``k`` and ``l`` the product ``Q(P) o Q(Q)`` is
dequantized; its component of momentum degree ``k + l - m`` is ``B_m(P, Q)``.
The formal parameter is carried by the grading, so everything stays rational.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

from . import linalg
from .conformal import generators
from .enveloping import joseph_weight, model_moment
from .opalg import divide_by_R_power
from .quantization import dequantize, quantize
from .ring import PhasePoly, Rational, Signature, as_fraction, fraction_to_str, poisson
from .symmetries import solve_ckt

__all__ = [
    "StarComponent",
    "star_levels",
    "star_component",
    "killing_spanning_set",
    "image_span",
    "check_star",
]


@dataclass(frozen=True)
class StarComponent:
    m: int
    lam: Rational
    value: PhasePoly

    def to_json(self, sig: Optional[Signature] = None) -> dict:
        return {"m": self.m, "lambda": fraction_to_str(self.lam), "value": self.value.to_json(sig)}


@lru_cache(maxsize=None)
def _homogeneous_levels(P: PhasePoly, Q: PhasePoly, lam: Rational, sig: Signature) -> Tuple[Tuple[int, PhasePoly], ...]:
    k, l = P.p_degree(), Q.p_degree()
    A = quantize(P, lam, lam, sig).compose(quantize(Q, lam, lam, sig))
    S = dequantize(A, lam, lam, sig)
    out = []
    for d, comp in sorted(S.p_components().items()):
        out.append((k + l - d, comp))
    return tuple(out)


def star_levels(P: PhasePoly, Q: PhasePoly, lam, sig: Signature) -> Dict[int, PhasePoly]:
    """All nonzero ``B_m(P, Q)``, summed over the homogeneous parts of ``P`` and ``Q``."""
    lam = as_fraction(lam)
    out: Dict[int, PhasePoly] = {}
    for Pk in P.p_components().values():
        for Ql in Q.p_components().values():
            for m, comp in _homogeneous_levels(Pk, Ql, lam, sig):
                out[m] = out.get(m, PhasePoly.zero(sig.n)) + comp
    return {m: v for m, v in out.items() if not v.is_zero()}


def star_component(P: PhasePoly, Q: PhasePoly, m: int, lam, sig: Signature) -> StarComponent:
    if m < 0:
        raise ValueError("level must be non-negative")
    lam = as_fraction(lam)
    return StarComponent(m, lam, star_levels(P, Q, lam, sig).get(m, PhasePoly.zero(sig.n)))


def _B(P, Q, m, lam, sig) -> PhasePoly:
    return star_levels(P, Q, lam, sig).get(m, PhasePoly.zero(sig.n))


# ---------------------------------------------------------------------------
# the image of the moment map


def killing_spanning_set(sig: Signature, max_degree: int) -> List[PhasePoly]:
    """Products of generator symbols of degree at most ``max_degree``, thinned to a basis per degree."""
    out = []
    for d in range(max_degree + 1):
        prods = killing_spanning_set_degree(sig, d)
        keep = linalg.independent_subset([dict(P.terms) for P in prods])
        out.extend(prods[i] for i in keep)
    return out


@lru_cache(maxsize=None)
def image_span(sig: Signature, degree: int) -> linalg.Span:
    span = linalg.Span()
    for P in killing_spanning_set_degree(sig, degree):
        span.add(dict(P.terms))
    return span


@lru_cache(maxsize=None)
def killing_spanning_set_degree(sig: Signature, degree: int) -> Tuple[PhasePoly, ...]:
    mus = model_moment(sig)
    out = []
    for w in itertools.combinations_with_replacement(range(len(mus)), degree):
        P = PhasePoly.const(sig.n, 1)
        for i in w:
            P = P * mus[i]
        out.append(P)
    return tuple(out)


def _in_image(P: PhasePoly, sig: Signature) -> bool:
    return all(image_span(sig, d).contains(dict(comp.terms)) for d, comp in P.p_components().items())


# ---------------------------------------------------------------------------
# the property report


def _test_symbols(sig: Signature, max_degree: int, seed: int, count: int) -> List[PhasePoly]:
    """Seeded symbols with small integer coefficients and x-degree at most 2."""
    rng = random.Random(seed)
    n = sig.n
    out = []
    for _ in range(count):
        k = rng.randint(0, max_degree)
        P = PhasePoly.zero(n)
        for _ in range(3):
            xexp = [0] * n
            for _ in range(rng.randint(0, 2)):
                xexp[rng.randrange(n)] += 1
            pexp = [0] * n
            for _ in range(k):
                pexp[rng.randrange(n)] += 1
            P = P + PhasePoly.monomial(xexp, pexp, rng.choice([-3, -2, -1, 1, 2, 3]))
        out.append(P)
    return out


def check_star(
    lam,
    max_degree: int,
    sig: Signature,
    seed: int = 0,
    associativity_samples: int = 12,
    pair_limit: Optional[int] = None,
) -> dict:
    """Verify the star-product properties over a spanning family of degree at most ``max_degree``.

    The family is a basis of the image of the moment map up to that degree,
    plus a few seeded generic symbols. Pairs are exhausted (or the first
    ``pair_limit``); associativity, being trilinear, is checked on seeded
    triples that always include the generic symbols.
    """
    lam = as_fraction(lam)
    n = sig.n
    killing = killing_spanning_set(sig, max_degree)
    generic = _test_symbols(sig, max_degree, seed, 4)
    family = killing + generic
    pairs = list(itertools.product(family, repeat=2))
    if pair_limit is not None:
        pairs = pairs[:pair_limit]
    report: Dict[str, dict] = {}

    # (a) gradation
    bad = None
    for P, Q in pairs:
        for Pk in P.p_components().values():
            for Ql in Q.p_components().values():
                top = Pk.p_degree() + Ql.p_degree()
                levels = _homogeneous_levels(Pk, Ql, lam, sig)
                if any(m < 0 or m > top for m, _ in levels):
                    bad = (Pk, Ql)
                    break
                if dict(levels).get(0, PhasePoly.zero(n)) != Pk * Ql:
                    bad = (Pk, Ql)
                    break
    report["gradation"] = {"pass": bad is None, "pairs": len(pairs)}
    if bad is not None:
        report["gradation"]["witness"] = [str(bad[0]), str(bad[1])]

    # (b) associativity at levels up to 3
    rng = random.Random(seed + 1)
    triples = [tuple(rng.choice(family) for _ in range(3)) for _ in range(associativity_samples)]
    triples += [(generic[i % len(generic)], generic[(i + 1) % len(generic)], generic[(i + 2) % len(generic)]) for i in range(len(generic))]
    bad = None
    for P, Q, S in triples:
        left_inner = star_levels(P, Q, lam, sig)
        right_inner = star_levels(Q, S, lam, sig)
        for M in range(4):
            left = PhasePoly.zero(n)
            right = PhasePoly.zero(n)
            for j in range(M + 1):
                i = M - j
                if j in left_inner:
                    left = left + _B(left_inner[j], S, i, lam, sig)
                if j in right_inner:
                    right = right + _B(P, right_inner[j], i, lam, sig)
            if left != right:
                bad = (P, Q, S, M)
                break
        if bad:
            break
    report["associativity"] = {"pass": bad is None, "triples": len(triples), "max_level": 3}
    if bad is not None:
        report["associativity"]["witness"] = [str(x) for x in bad[:3]] + [bad[3]]

    # (c) strong invariance
    bad = None
    for X in generators(sig):
        mu = X.symbol()
        for P in family:
            B1 = star_levels(mu, P, lam, sig)
            B2 = star_levels(P, mu, lam, sig)
            for m in (set(B1) | set(B2) | {1}) - {0}:
                diff = B1.get(m, PhasePoly.zero(n)) - B2.get(m, PhasePoly.zero(n))
                want = poisson(mu, P) if m == 1 else PhasePoly.zero(n)
                if diff != want:
                    bad = (X.name, P, m)
                    break
            if bad:
                break
        if bad:
            break
    report["strong_invariance"] = {"pass": bad is None, "generators": len(generators(sig))}
    if bad is not None:
        report["strong_invariance"]["witness"] = [bad[0], str(bad[1]), bad[2]]

    # (d) parity
    witness = None
    for P, Q in pairs:
        L1, L2 = star_levels(P, Q, lam, sig), star_levels(Q, P, lam, sig)
        for m in set(L1) | set(L2):
            a = L1.get(m, PhasePoly.zero(n))
            b = L2.get(m, PhasePoly.zero(n))
            if a != b.scale((-1) ** m):
                witness = (P, Q, m)
                break
        if witness:
            break
    report["parity"] = {"pass": witness is None, "lambda": fraction_to_str(lam)}
    if witness is not None:
        report["parity"]["witness"] = [str(witness[0]), str(witness[1]), witness[2]]

    # (e) tangentiality to the image of the moment map
    bad = None
    for P, Q in itertools.product(killing, repeat=2):
        for m, comp in star_levels(P, Q, lam, sig).items():
            if not _in_image(comp, sig):
                bad = (P, Q, m)
                break
        if bad:
            break
    report["tangentiality"] = {"pass": bad is None, "pairs": len(killing) ** 2}
    if bad is not None:
        report["tangentiality"]["witness"] = [str(bad[0]), str(bad[1]), bad[2]]

    # (f) descent modulo R at the Laplacian weight
    lam_j = joseph_weight(n)
    multiples = [K for k in range(2, max_degree + 1) for s in range(1, k // 2 + 1) for K in solve_ckt(k, s, sig).basis]
    bad = None
    for RS in multiples:
        for P in killing:
            for A, B in ((P, RS), (RS, P)):
                for m, comp in star_levels(A, B, lam_j, sig).items():
                    if divide_by_R_power(comp, sig) is None:
                        bad = (A, B, m)
                        break
                if bad:
                    break
            if bad:
                break
        if bad:
            break
    report["descent"] = {
        "pass": bad is None and bool(multiples),
        "lambda": fraction_to_str(lam_j),
        "multiples_of_R": len(multiples),
    }
    if bad is not None:
        report["descent"]["witness"] = [str(bad[0]), str(bad[1]), bad[2]]

    return {
        "lambda": fraction_to_str(lam),
        "max_degree": max_degree,
        "signature": [sig.p, sig.q],
        "family_size": len(family),
        "verdicts": report,
        "all_pass": all(v["pass"] for v in report.values()),
    }
