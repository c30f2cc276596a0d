"""Acceptance checks, each returning a verdict plus the evidence behind it.

Shared by ``confsym report all`` and the acceptance tests. Every check is
exact; nothing is sampled except where a seed is stated.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from math import comb
from typing import Callable, Dict, List, Optional, Sequence

from . import linalg
from .conformal import dimension, generators, lie_density
from .enveloping import (
    ENVELOPING,
    SYMMETRIC,
    EnvElement,
    ambient_casimir_expected,
    casimir,
    casimir_eigenvalue,
    ell_morphism,
    joseph_divisible,
    joseph_weight,
    kernel_deg2,
    moment_pullback,
    rho,
)
from .invariants import classify
from .opalg import DiffOp
from .quantization import NON_EXISTENT, NON_UNIQUE, UNIQUE, radoux_coeffs, solve_quantization
from .ring import PhasePoly, Rational, Signature, fraction_to_str
from .starproduct import check_star, image_span
from .symmetries import SymmetryDefect, SymmetryPair, laplacian_weights, solve_ckt, verify_symmetry

__all__ = ["CheckResult", "CHECKS", "run_check", "run_all"]


@dataclass
class CheckResult:
    number: int
    name: str
    passed: bool
    detail: Dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.number:2d} {self.name} ({self.seconds:.1f}s)"

    def to_json(self) -> dict:
        return {
            "number": self.number,
            "name": self.name,
            "pass": self.passed,
            "detail": self.detail,
        }


def _s(x) -> str:
    return fraction_to_str(x)


# per-n parameter choices used by the acceptance criteria
CASIMIR_WEIGHTS = {3: [Rational(1, 2), Rational(1, 6)], 4: [Rational(1, 4), Rational(0)]}


def casimir_scalar(sigs: Sequence[Signature]) -> CheckResult:
    """``ell(PBW(C))`` against the closed form ``n^2 lam (1 - lam)``."""
    rows = []
    for sig in sigs:
        for lam in CASIMIR_WEIGHTS.get(sig.n, [Rational(1, 2)]):
            got = casimir_eigenvalue(lam, sig)
            rows.append(
                {
                    "signature": [sig.p, sig.q],
                    "lambda": _s(lam),
                    "computed": _s(got),
                    "closed_form": _s(rho(lam, sig.n)),
                    "equal": got == rho(lam, sig.n),
                    "equal_up_to_sign": got == -rho(lam, sig.n),
                }
            )
    return CheckResult(1, "casimir eigenvalue", all(r["equal"] for r in rows), {"cases": rows})


def closed_form_agreement(sigs: Sequence[Signature], max_k: int = 3) -> CheckResult:
    """Solved trace-free corrections at ``delta = 0`` against the closed form."""
    rows = []
    for sig in sigs:
        for lam in (Rational(0), Rational(1, 2), Rational(2, 7)):
            for k in range(1, max_k + 1):
                qm = solve_quantization(k, 0, sig, lam, s=0)
                want = radoux_coeffs(k, sig.n, lam, 0)
                got = [Rational(1)] + [Rational(0)] * k
                extra = False
                for mono, c in qm.corrections.items():
                    a, b, cc, e, f = mono
                    if (a, b, cc, f) == (0, 0, 0, 0):
                        got[e] = c
                    else:
                        extra = True
                rows.append(
                    {
                        "signature": [sig.p, sig.q],
                        "lambda": _s(lam),
                        "k": k,
                        "status": qm.status,
                        "match": qm.status == UNIQUE and not extra and got == want,
                        "coefficients": [_s(c) for c in got],
                    }
                )
    return CheckResult(2, "closed-form agreement", all(r["match"] for r in rows), {"cases": rows})


def first_order_symmetries(sigs: Sequence[Signature]) -> CheckResult:
    rows = []
    for sig in sigs:
        lam, mu = laplacian_weights(1, sig.n)
        lap = DiffOp.laplacian(sig, 1)
        bad = [
            X.name
            for X in generators(sig)
            if not (lap.compose(lie_density(X, lam)) - lie_density(X, mu).compose(lap)).is_zero()
        ]
        rows.append({"signature": [sig.p, sig.q], "generators": len(generators(sig)), "failures": bad})
    return CheckResult(3, "first-order symmetries", all(not r["failures"] for r in rows), {"cases": rows})


MAIN_THEOREM_CASES = [((1, 0), 1), ((2, 0), 1), ((2, 1), 1), ((3, 1), 1), ((2, 1), 2), ((3, 1), 2)]


def main_theorem(sigs: Sequence[Signature]) -> CheckResult:
    """Every Killing basis element quantizes to a symmetry of the Laplacian power."""
    rows = []
    for sig in sigs:
        for (k, s), ell in MAIN_THEOREM_CASES:
            kb = solve_ckt(k, s, sig)
            failures = 0
            for K in kb.basis:
                out = verify_symmetry(K, ell, sig)
                if not (isinstance(out, SymmetryPair) and out.check()):
                    failures += 1
            rows.append(
                {
                    "signature": [sig.p, sig.q],
                    "k": k,
                    "s": s,
                    "ell": ell,
                    "dimension": kb.dimension,
                    "stable": kb.stable,
                    "failures": failures,
                }
            )
    ok = all(r["failures"] == 0 and r["dimension"] > 0 and r["stable"] for r in rows)
    return CheckResult(4, "killing tensors give symmetries", ok, {"cases": rows})


def _killing_span2(sig: Signature) -> linalg.Span:
    span = linalg.Span()
    for s in (0, 1):
        for K in solve_ckt(2, s, sig).basis:
            span.add(dict(K.terms))
    return span


def random_quadratic_symbol(sig: Signature, rng: random.Random, terms: int = 4) -> PhasePoly:
    """Degree-2 symbol with x-degree at most 2 and small integer coefficients."""
    n = sig.n
    P = PhasePoly.zero(n)
    for _ in range(terms):
        xexp = [0] * n
        for _ in range(rng.randint(0, 2)):
            xexp[rng.randrange(n)] += 1
        pexp = [0] * n
        for _ in range(2):
            pexp[rng.randrange(n)] += 1
        P = P + PhasePoly.monomial(xexp, pexp, rng.choice([-3, -2, -1, 1, 2, 3]))
    return P


def bijectivity_probe(sigs: Sequence[Signature], count: int = 20, seed: int = 2024) -> CheckResult:
    rows = []
    for sig in sigs:
        rng = random.Random(seed)
        span = _killing_span2(sig)
        probes = []
        while len(probes) < count:
            P = random_quadratic_symbol(sig, rng)
            if not P.is_zero() and not span.contains(dict(P.terms)):
                probes.append(P)
        defects = 0
        for P in probes:
            out = verify_symmetry(P, 1, sig)
            if isinstance(out, SymmetryDefect) and not out.defect.is_zero():
                defects += 1
        rows.append({"signature": [sig.p, sig.q], "seed": seed, "probes": count, "defects": defects})
    return CheckResult(5, "non-killing symbols fail", all(r["defects"] == r["probes"] for r in rows), {"cases": rows})


def kernel_dimensions(sigs: Sequence[Signature], lam=Rational(1, 2)) -> CheckResult:
    """Degree-2 kernels, plus membership of ``C - rho`` and ``C - c`` in the ``ell`` kernel."""
    rows = []
    for sig in sigs:
        n = sig.n
        want = comb(n + 2, 4)
        amb = kernel_deg2("ambient_moment", sig).dimension
        mod = kernel_deg2("model_moment", sig).dimension
        ell = kernel_deg2("ell", sig, lam).dimension
        C = casimir(sig, ENVELOPING)
        closed = ell_morphism(C - EnvElement.scalar(ENVELOPING, sig, rho(lam, n)), lam).is_zero()
        computed = ell_morphism(C - EnvElement.scalar(ENVELOPING, sig, casimir_eigenvalue(lam, sig)), lam).is_zero()
        rows.append(
            {
                "signature": [sig.p, sig.q],
                "lambda": _s(lam),
                "expected_ambient": want,
                "ambient": amb,
                "model": mod,
                "ell": ell,
                "casimir_minus_closed_form_in_kernel": closed,
                "casimir_minus_eigenvalue_in_kernel": computed,
            }
        )
    ok = all(
        r["ambient"] == r["expected_ambient"]
        and r["model"] == r["expected_ambient"] + 1
        and r["ell"] == r["expected_ambient"] + 1
        and r["casimir_minus_closed_form_in_kernel"]
        for r in rows
    )
    return CheckResult(6, "degree-2 kernels", ok, {"cases": rows})


def ambient_casimir(sigs: Sequence[Signature]) -> CheckResult:
    rows = []
    for sig in sigs:
        got = moment_pullback(casimir(sig, SYMMETRIC), "ambient")
        rows.append({"signature": [sig.p, sig.q], "equal": got == ambient_casimir_expected(sig)})
    return CheckResult(7, "ambient casimir identity", all(r["equal"] for r in rows), {"cases": rows})


def joseph_membership(sigs: Sequence[Signature], generic=Rational(1, 7)) -> CheckResult:
    rows = []
    for sig in sigs:
        lam = joseph_weight(sig.n)
        N = dimension(sig)
        pairs = [(X, Y) for X in range(N) for Y in range(X, N)]
        failures = [(X, Y) for X, Y in pairs if not joseph_divisible(X, Y, lam, sig)]
        counter = next(((X, Y) for X, Y in pairs if not joseph_divisible(X, Y, generic, sig)), None)
        rows.append(
            {
                "signature": [sig.p, sig.q],
                "lambda": _s(lam),
                "pairs": len(pairs),
                "failures": failures,
                "generic_lambda": _s(generic),
                "generic_witness": list(counter) if counter else None,
            }
        )
    ok = all(not r["failures"] and r["generic_witness"] is not None for r in rows)
    return CheckResult(8, "joseph generators", ok, {"cases": rows})


def star_suite(sigs: Sequence[Signature], max_degree: int = 2) -> CheckResult:
    rows = []
    for sig in sigs:
        half = check_star(Rational(1, 2), max_degree, sig)
        zero = check_star(Rational(0), max_degree, sig)
        zero_parity = zero["verdicts"]["parity"]
        rows.append(
            {
                "signature": [sig.p, sig.q],
                "half": half["verdicts"],
                "zero_parity": zero_parity,
                "ok": half["all_pass"] and not zero_parity["pass"] and "witness" in zero_parity,
            }
        )
    return CheckResult(9, "star product", all(r["ok"] for r in rows), {"cases": rows})


GENERIC_DELTAS = [Rational(1, 7), Rational(3, 11), Rational(-5, 13)]


def _slots(n: int):
    two = Rational(2, n)
    return [
        ("D", (2, 0, 1, 0), 1 + two, Rational(0)),
        ("G0", (2, 0, 3, 0), Rational(0), two),
        ("L1", (2, 0, 2, 0), Rational(1, 2) + Rational(1, n), two),
    ]


def _excluded(k: int, n: int) -> List[Rational]:
    return sorted({1 + Rational(2 * k - m - 1, n) for m in range(1, k + 1)})


def classification_spots(sigs: Sequence[Signature]) -> CheckResult:
    rows = []
    ok = True
    for sig in sigs:
        n = sig.n
        for name, (k, s, kp, sp), delta, shift in _slots(n):
            dim = classify(k, s, kp, sp, delta, delta + shift, sig).dimension
            generic = [classify(k, s, kp, sp, d, d + shift, sig).dimension for d in GENERIC_DELTAS]
            rows.append({"signature": [sig.p, sig.q], "slot": name, "delta": _s(delta), "dimension": dim, "generic": generic})
            ok = ok and dim == 1 and generic == [0, 0, 0]
        grid = sorted({Rational(a, 2 * n) for a in range(-2 * n, 4 * n + 1)} | set(_excluded(2, n)))
        for k in (1, 2):
            for lam in (Rational(0), Rational(1, 5)):
                bad = [d for d in grid if solve_quantization(k, d, sig, lam, s=0).status in (NON_UNIQUE, NON_EXISTENT)]
                want = [d for d in _excluded(k, n) if d in grid]
                rows.append(
                    {
                        "signature": [sig.p, sig.q],
                        "k": k,
                        "lambda": _s(lam),
                        "grid_size": len(grid),
                        "degenerate": [_s(d) for d in bad],
                        "excluded": [_s(d) for d in want],
                    }
                )
                ok = ok and bad == want
    return CheckResult(10, "classification spot-checks", ok, {"cases": rows})


def generation(sigs: Sequence[Signature]) -> CheckResult:
    rows = []
    for sig in sigs:
        image = image_span(sig, 2)
        killing = _killing_span2(sig)
        same = image.rank == killing.rank and all(image.contains(v) for _, v, _ in killing.basis)
        rows.append({"signature": [sig.p, sig.q], "image": image.rank, "killing": killing.rank, "equal": same})
    return CheckResult(11, "generation by killing vectors", all(r["equal"] for r in rows), {"cases": rows})


CHECKS: Dict[int, Callable[[Sequence[Signature]], CheckResult]] = {
    1: casimir_scalar,
    2: closed_form_agreement,
    3: first_order_symmetries,
    4: main_theorem,
    5: bijectivity_probe,
    6: kernel_dimensions,
    7: ambient_casimir,
    8: joseph_membership,
    9: star_suite,
    10: classification_spots,
    11: generation,
}


def run_check(number: int, sigs: Sequence[Signature]) -> CheckResult:
    start = time.perf_counter()
    out = CHECKS[number](sigs)
    out.seconds = time.perf_counter() - start
    return out


def run_all(sigs: Sequence[Signature], numbers: Optional[Sequence[int]] = None) -> List[CheckResult]:
    return [run_check(i, sigs) for i in (numbers or sorted(CHECKS))]
