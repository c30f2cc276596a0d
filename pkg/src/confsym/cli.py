"""Command-line front end: ``confsym <command> ...`` with canonical JSON output.

Exit codes: 0 success, 1 a verification came out false, 2 bad usage or input.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass, field
from math import comb
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from . import __version__
from .conformal import bracket_closure_report, dimension, killing_determinant
from .enveloping import (
    ENVELOPING,
    EnvElement,
    casimir,
    casimir_eigenvalue,
    ell_morphism,
    jlambda_generator,
    joseph_divisible,
    kernel_deg2,
    moment_pullback,
    rho,
)
from .invariants import classify
from .quantization import ResonanceError, quantize, solve_quantization
from .ring import PhasePoly, Rational, Signature, fraction_to_str, parse_fraction
from .starproduct import check_star, star_component
from .symmetries import SymmetryPair, solve_ckt, verify_symmetry

SCHEMA_VERSION = "1"
MAX_DEGREE_ENV = "CONFSYM_MAX_DEGREE"
DEFAULT_MAX_DEGREE = 8

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2

log = logging.getLogger("confsym")


class UsageError(Exception):
    """Bad input; reported on stderr with exit code 2."""


@dataclass
class RunConfig:
    command: str
    sig: Signature
    max_degree: int
    out: Optional[Path] = None
    verbosity: int = 0
    params: Dict = field(default_factory=dict)


def rational(text: str) -> Rational:
    try:
        return parse_fraction(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"unparseable rational {text!r}; expected 'num/den' or an integer")


def max_degree_from_env() -> int:
    raw = os.environ.get(MAX_DEGREE_ENV)
    if raw is None or raw == "":
        return DEFAULT_MAX_DEGREE
    try:
        value = int(raw)
    except ValueError:
        raise UsageError(f"{MAX_DEGREE_ENV} must be a non-negative integer, got {raw!r}")
    if value < 0:
        raise UsageError(f"{MAX_DEGREE_ENV} must be a non-negative integer, got {raw!r}")
    return value


def _cap(cfg: RunConfig, degree: int, what: str):
    if degree > cfg.max_degree:
        raise UsageError(f"{what} {degree} exceeds the degree cap {cfg.max_degree} ({MAX_DEGREE_ENV})")


def _read_json(path: str) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc.msg} at line {exc.lineno}")


def _symbol_from_doc(doc: dict, sig: Signature, source: str) -> PhasePoly:
    if "n" not in doc or "terms" not in doc:
        raise UsageError(f"{source} is not a symbol document (needs 'n' and 'terms')")
    if int(doc["n"]) != sig.n:
        raise UsageError(f"dimension mismatch: {source} has n = {doc['n']} but the signature gives n = {sig.n}")
    if "signature" in doc and list(doc["signature"]) != [sig.p, sig.q]:
        raise UsageError(f"signature mismatch: {source} is for {tuple(doc['signature'])}, requested {sig}")
    try:
        return PhasePoly.from_json(doc)
    except ValueError as exc:
        if "rational" in str(exc):
            raise UsageError(f"unparseable rational in {source}: {exc}")
        raise UsageError(f"dimension mismatch in {source}: {exc}")


def _read_symbol(path: str, cfg: RunConfig) -> PhasePoly:
    P = _symbol_from_doc(_read_json(path), cfg.sig, path)
    if not P.is_zero():
        _cap(cfg, P.p_degree(), "symbol degree")
    return P


def _emit(doc: dict, cfg: RunConfig) -> str:
    doc = dict(doc)
    doc["schema_version"] = SCHEMA_VERSION
    doc["command"] = cfg.command
    text = json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
    if cfg.out is not None:
        cfg.out.write_text(text, encoding="utf-8")
        log.info("wrote %s", cfg.out)
    sys.stdout.write(text)
    return text


# ---------------------------------------------------------------------------
# commands


def cmd_algebra(args, cfg: RunConfig) -> int:
    report = bracket_closure_report(cfg.sig)
    report["killing_determinant"] = fraction_to_str(killing_determinant(cfg.sig))
    report["signature"] = [cfg.sig.p, cfg.sig.q]
    _emit(report, cfg)
    return EXIT_OK if report["brackets_closed"] else EXIT_FAILED


def cmd_classify(args, cfg: RunConfig) -> int:
    _cap(cfg, max(args.k, args.kp), "degree")
    _cap(cfg, args.bound, "search bound")
    try:
        result = classify(args.k, args.s, args.kp, args.sp, args.delta, args.deltap, cfg.sig, bound=args.bound)
    except ValueError as exc:
        raise UsageError(str(exc))
    doc = result.to_json()
    doc.update(
        {
            "signature": [cfg.sig.p, cfg.sig.q],
            "source": {"k": args.k, "s": args.s, "delta": fraction_to_str(args.delta)},
            "target": {"k": args.kp, "s": args.sp, "delta": fraction_to_str(args.deltap)},
        }
    )
    _emit(doc, cfg)
    return EXIT_OK


def cmd_quantize(args, cfg: RunConfig) -> int:
    if args.action == "solve":
        if args.k is None or args.delta is None or args.lam is None:
            raise UsageError("quantize solve needs --k, --delta and --lambda")
        if args.k < 0:
            raise UsageError("--k must be non-negative")
        _cap(cfg, args.k, "degree")
        qm = solve_quantization(args.k, args.delta, cfg.sig, args.lam)
        _emit(qm.to_json(), cfg)
        return EXIT_OK
    if args.lam is None or args.mu is None or args.input is None:
        raise UsageError("quantize needs --lambda, --mu and --in")
    P = _read_symbol(args.input, cfg)
    try:
        A = quantize(P, args.lam, args.mu, cfg.sig)
    except ResonanceError as exc:
        raise UsageError(f"resonant weights: {exc}")
    doc = A.to_json()
    doc["signature"] = [cfg.sig.p, cfg.sig.q]
    _emit(doc, cfg)
    return EXIT_OK


def cmd_ckt(args, cfg: RunConfig) -> int:
    _cap(cfg, args.k, "degree")
    if args.bound is not None:
        _cap(cfg, args.bound, "coefficient degree bound")
    try:
        kb = solve_ckt(args.k, args.s, cfg.sig, args.bound)
    except ValueError as exc:
        raise UsageError(str(exc))
    _emit(kb.to_json(), cfg)
    return EXIT_OK


def cmd_symmetry(args, cfg: RunConfig) -> int:
    if args.ell < 1:
        raise UsageError("--ell must be positive")
    doc = _read_json(args.input)
    if "basis" in doc:
        symbols = [_symbol_from_doc(d, cfg.sig, f"{args.input} basis[{i}]") for i, d in enumerate(doc["basis"])]
    else:
        symbols = [_symbol_from_doc(doc, cfg.sig, args.input)]
    for P in symbols:
        if not P.is_zero():
            _cap(cfg, P.p_degree(), "symbol degree")
    results = []
    try:
        for P in symbols:
            results.append(verify_symmetry(P, args.ell, cfg.sig))
    except ResonanceError as exc:
        raise UsageError(f"resonant weights: {exc}")
    valid = all(isinstance(r, SymmetryPair) and r.check() for r in results)
    if len(results) == 1:
        out = results[0].to_json()
    else:
        out = {"results": [r.to_json() for r in results], "count": len(results)}
    out["all_valid"] = valid
    _emit(out, cfg)
    return EXIT_OK if valid else EXIT_FAILED


def cmd_star(args, cfg: RunConfig) -> int:
    if args.lam is None:
        raise UsageError("star needs --lambda")
    if args.action == "check":
        if args.maxdeg is None:
            raise UsageError("star check needs --maxdeg")
        _cap(cfg, args.maxdeg, "maximal degree")
        report = check_star(args.lam, args.maxdeg, cfg.sig)
        _emit(report, cfg)
        return EXIT_OK if report["all_pass"] else EXIT_FAILED
    if args.m is None or args.in1 is None or args.in2 is None:
        raise UsageError("star needs --m, --in1 and --in2")
    if args.m < 0:
        raise UsageError("--m must be non-negative")
    P, Q = _read_symbol(args.in1, cfg), _read_symbol(args.in2, cfg)
    try:
        comp = star_component(P, Q, args.m, args.lam, cfg.sig)
    except ResonanceError as exc:
        raise UsageError(f"resonant weights: {exc}")
    _emit(comp.to_json(cfg.sig), cfg)
    return EXIT_OK


def _casimir_shift_in_kernel(sig: Signature, lam: Rational, c: Rational) -> bool:
    C = casimir(sig, ENVELOPING)
    return ell_morphism(C - EnvElement.scalar(ENVELOPING, sig, c), lam).is_zero()


def cmd_ideal(args, cfg: RunConfig) -> int:
    sig = cfg.sig
    n = sig.n
    expected = comb(n + 2, 4)
    if args.which != "I2" and args.lam is None:
        raise UsageError(f"ideal --which {args.which} needs --lambda")
    if args.which == "I2":
        model = kernel_deg2("model_moment", sig)
        ambient = kernel_deg2("ambient_moment", sig)
        C = casimir(sig)
        verdicts = {
            "ambient_dimension": ambient.dimension == expected,
            "model_dimension": model.dimension == expected + 1,
            "casimir_in_model_kernel": moment_pullback(C, "model").is_zero(),
        }
        doc = {
            "which": "I2",
            "dimension": model.dimension,
            "ambient_dimension": ambient.dimension,
            "basis": [b.to_json() for b in model.basis],
        }
    elif args.which == "Jlambda2":
        lam = args.lam
        res = kernel_deg2("ell", sig, lam)
        N = dimension(sig)
        outside = [
            [X, Y]
            for X in range(N)
            for Y in range(X, N)
            if not ell_morphism(jlambda_generator(X, Y, lam, sig), lam).is_zero()
        ]
        eigen = casimir_eigenvalue(lam, sig)
        verdicts = {
            "dimension": res.dimension == expected + 1,
            "generators_in_kernel": not outside,
            "casimir_minus_eigenvalue_in_kernel": _casimir_shift_in_kernel(sig, lam, eigen),
            "casimir_minus_closed_form_in_kernel": _casimir_shift_in_kernel(sig, lam, rho(lam, n)),
        }
        doc = {
            "which": "Jlambda2",
            "lambda": fraction_to_str(lam),
            "dimension": res.dimension,
            "casimir_eigenvalue": fraction_to_str(eigen),
            "closed_form": fraction_to_str(rho(lam, n)),
            "generators_outside_kernel": outside,
            "basis": [b.to_json() for b in res.basis],
        }
    else:
        lam = args.lam
        N = dimension(sig)
        pairs = [(X, Y) for X in range(N) for Y in range(X, N)]
        failures = [[X, Y] for X, Y in pairs if not joseph_divisible(X, Y, lam, sig)]
        verdicts = {"all_divisible": not failures}
        doc = {"which": "joseph", "lambda": fraction_to_str(lam), "pairs": len(pairs), "not_divisible": failures}
    doc["signature"] = [sig.p, sig.q]
    doc["verdicts"] = verdicts
    _emit(doc, cfg)
    return EXIT_OK if all(verdicts.values()) else EXIT_FAILED


def cmd_report(args, cfg: RunConfig) -> int:
    from .report import CHECKS, run_check

    numbers = sorted(CHECKS)
    if args.only:
        try:
            numbers = sorted({int(t) for t in args.only.split(",")})
        except ValueError:
            raise UsageError(f"--only takes comma-separated criterion numbers, got {args.only!r}")
        unknown = [i for i in numbers if i not in CHECKS]
        if unknown:
            raise UsageError(f"unknown criterion numbers {unknown}")
    results = []
    for i in numbers:
        r = run_check(i, [cfg.sig])
        print(r.line(), file=sys.stderr)
        results.append(r)
    doc = {
        "signature": [cfg.sig.p, cfg.sig.q],
        "criteria": [r.to_json() for r in results],
        "passed": sum(r.passed for r in results),
        "failed": sum(not r.passed for r in results),
        "all_pass": all(r.passed for r in results),
    }
    _emit(doc, cfg)
    return EXIT_OK if doc["all_pass"] else EXIT_FAILED


# ---------------------------------------------------------------------------
# parser


def _common(p: argparse.ArgumentParser):
    p.add_argument("--p", type=int, required=True, help="number of positive metric directions")
    p.add_argument("--q", type=int, required=True, help="number of negative metric directions")
    p.add_argument("--out", help="also write the JSON document to this file")
    p.add_argument("-v", "--verbose", action="count", default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="confsym", description="Exact conformal quantization toolkit")
    parser.add_argument("--version", action="version", version=f"confsym {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("algebra", help="structure checks of the conformal algebra")
    p.add_argument("action", choices=["check"])
    _common(p)

    p = sub.add_parser("classify", help="invariant operators between symbol components")
    for name in ("--k", "--s", "--kp", "--sp"):
        p.add_argument(name, type=int, required=True)
    p.add_argument("--delta", type=rational, required=True)
    p.add_argument("--deltap", type=rational, required=True)
    p.add_argument("--bound", type=int, default=4, help="maximal number of x-derivatives searched")
    _common(p)

    p = sub.add_parser("quantize", help="quantize a symbol, or 'solve' for the quantization map")
    p.add_argument("action", nargs="?", choices=["solve"])
    p.add_argument("--lambda", dest="lam", type=rational)
    p.add_argument("--mu", type=rational)
    p.add_argument("--in", dest="input")
    p.add_argument("--k", type=int)
    p.add_argument("--delta", type=rational)
    _common(p)

    p = sub.add_parser("ckt", help="generalized conformal Killing tensors")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--bound", type=int, help="maximal x-degree of the coefficients")
    _common(p)

    p = sub.add_parser("symmetry", help="higher symmetries of Laplacian powers")
    p.add_argument("action", choices=["verify"])
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--in", dest="input", required=True)
    _common(p)

    p = sub.add_parser("star", help="star-product levels, or 'check' its properties")
    p.add_argument("action", nargs="?", choices=["check"])
    p.add_argument("--lambda", dest="lam", type=rational)
    p.add_argument("--m", type=int)
    p.add_argument("--in1")
    p.add_argument("--in2")
    p.add_argument("--maxdeg", type=int)
    _common(p)

    p = sub.add_parser("ideal", help="degree-2 kernels and ideal generators")
    p.add_argument("--which", choices=["I2", "Jlambda2", "joseph"], required=True)
    p.add_argument("--lambda", dest="lam", type=rational)
    _common(p)

    p = sub.add_parser("report", help="run the acceptance checks for one signature")
    p.add_argument("action", choices=["all"])
    p.add_argument("--only", help="comma-separated criterion numbers")
    _common(p)
    return parser


COMMANDS = {
    "algebra": cmd_algebra,
    "classify": cmd_classify,
    "quantize": cmd_quantize,
    "ckt": cmd_ckt,
    "symmetry": cmd_symmetry,
    "star": cmd_star,
    "ideal": cmd_ideal,
    "report": cmd_report,
}


def dispatch(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose > 1 else logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(message)s",
        stream=sys.stderr,
    )
    try:
        try:
            sig = Signature(args.p, args.q)
        except ValueError as exc:
            raise UsageError(f"bad signature: {exc}")
        cfg = RunConfig(
            command=args.command,
            sig=sig,
            max_degree=max_degree_from_env(),
            out=Path(args.out) if args.out else None,
            verbosity=args.verbose,
            params={k: v for k, v in vars(args).items() if k not in ("p", "q", "out", "verbose")},
        )
        log.info("running %s for signature %s", cfg.command, cfg.sig)
        return COMMANDS[args.command](args, cfg)
    except UsageError as exc:
        print(f"confsym: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main(argv: Optional[List[str]] = None) -> int:
    return dispatch(argv)


if __name__ == "__main__":
    sys.exit(main())
