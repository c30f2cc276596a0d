import itertools
import json

import pytest

from confsym.conformal import bracket, combination_field, generator, generators, lie_density
from confsym.invariants import op_T, trace_free_part
from confsym.linalg import Span
from confsym.opalg import right_divide
from confsym.quantization import quantize
from confsym.ring import PhasePoly, Rational, Signature
from confsym.symmetries import (
    SymmetryDefect,
    SymmetryPair,
    default_bound,
    identity_pair,
    is_killing,
    killing_tensor_equation,
    laplacian_weights,
    solve_ckt,
    symmetry_product,
    verify_symmetry,
)

n = 3
X = lambda i: PhasePoly.x(i, n)
P = lambda i: PhasePoly.p(i, n)


def _span(polys):
    s = Span()
    for p in polys:
        s.add(dict(p.terms))
    return s


def test_killing_vectors(sig3):
    kb = solve_ckt(1, 0, sig3, 4)
    assert kb.dimension == 10 and kb.stable
    span = _span(kb.basis)
    assert span.rank == _span([g.symbol() for g in generators(sig3)]).rank == 10
    assert all(span.contains(dict(g.symbol().terms)) for g in generators(sig3))
    assert solve_ckt(0, 0, sig3).dimension == 1


@pytest.mark.parametrize("sig", [Signature(3, 0), Signature(2, 1)])
def test_quadratic_killing_tensors_match_products(sig):
    kb = solve_ckt(2, 0, sig, 6)
    assert kb.stable
    gens = [g.symbol() for g in generators(sig)]
    tf = [trace_free_part(a * b, sig) for a, b in itertools.combinations_with_replacement(gens, 2)]
    assert _span(tf).rank == kb.dimension == 35
    span = _span(kb.basis)
    assert all(span.contains(dict(t.terms)) for t in tf)


@pytest.mark.parametrize("sig,dims", [(Signature(3, 0), {(2, 1): 14, (3, 1): 81}), (Signature(4, 0), {(2, 1): 20})])
def test_generalized_dimensions(sig, dims):
    for (k, s), d in dims.items():
        kb = solve_ckt(k, s, sig)
        assert kb.dimension == d and kb.stable
        assert kb.degree_bound == default_bound(k, s)
        T = op_T(sig)
        for K in kb.basis:
            assert is_killing(K, s, sig)
            assert not T(K).is_zero() or s == 0


def test_ckt_rejects_bad_trace_depth(sig3):
    with pytest.raises(ValueError):
        solve_ckt(1, 1, sig3)


def test_tensor_form_cross_check(sig3):
    for K in solve_ckt(2, 0, sig3).basis:
        assert killing_tensor_equation(K, sig3)
    assert not killing_tensor_equation(X(0) * P(0) ** 2, sig3)
    assert not is_killing(X(0) * P(0) ** 2 - (X(0) * PhasePoly.R(sig3)).scale(Rational(1, 3)), 0, sig3)


def test_first_order_pairs(sig3):
    lam, mu = laplacian_weights(1, 3)
    for g in generators(sig3):
        out = verify_symmetry(g.symbol(), 1, sig3)
        assert isinstance(out, SymmetryPair)
        assert out.D1 == lie_density(g, lam) and out.D2 == lie_density(g, mu)


@pytest.mark.parametrize("sig", [Signature(3, 0), Signature(4, 0)])
@pytest.mark.parametrize("k,s,ell", [(1, 0, 1), (2, 0, 1), (2, 1, 1), (2, 1, 2), (1, 0, 2)])
def test_killing_tensors_give_symmetries(sig, k, s, ell):
    for K in solve_ckt(k, s, sig).basis:
        out = verify_symmetry(K, ell, sig)
        assert isinstance(out, SymmetryPair) and out.check()


def test_non_killing_symbol_fails(sig3):
    out = verify_symmetry(X(0) * P(0) ** 2, 1, sig3)
    assert isinstance(out, SymmetryDefect)
    assert not out.defect.is_zero() and not out.divisible
    doc = json.loads(json.dumps(out.to_json()))
    assert doc["kind"] == "defect"


def test_trivial_symmetry_from_R(sig3):
    lam, _ = laplacian_weights(1, 3)
    D1 = quantize(PhasePoly.R(sig3), lam, lam, sig3)
    assert right_divide(D1, 1, sig3) is not None
    for K in solve_ckt(2, 1, sig3).basis[:4]:
        assert right_divide(quantize(K, lam, lam, sig3), 1, sig3) is not None


def test_products(sig3):
    gens = generators(sig3)
    pairs = {g.name: verify_symmetry(g.symbol(), 1, sig3) for g in gens}
    A = pairs["K0"]
    assert symmetry_product(A, A).check()
    unit = identity_pair(sig3, 1)
    B = pairs["J01"]
    prod = symmetry_product(unit, B)
    assert prod.D1 == B.D1 and prod.D2 == B.D2
    for Xg, Yg in [(gens[0], gens[-1]), (gens[3], gens[7]), (gens[6], gens[8])]:
        ab = symmetry_product(pairs[Xg.name], pairs[Yg.name])
        ba = symmetry_product(pairs[Yg.name], pairs[Xg.name])
        fld = combination_field(bracket(Xg, Yg, sig3), sig3)
        lam, mu = laplacian_weights(1, 3)
        assert ab.D1 - ba.D1 == lie_density(fld, lam)
        assert ab.D2 - ba.D2 == lie_density(fld, mu)


def test_product_rejects_mismatch(sig3):
    with pytest.raises(ValueError):
        symmetry_product(identity_pair(sig3, 1), identity_pair(sig3, 2))


def test_pair_json(sig3):
    out = verify_symmetry(generator(sig3, "E").symbol(), 1, sig3)
    doc = json.loads(json.dumps(out.to_json()))
    assert doc["valid"] and doc["D1"]["lambda"] == "1/6" and doc["D2"]["mu"] == "5/6"
    with pytest.raises(ValueError):
        verify_symmetry(generator(sig3, "E").symbol(), 0, sig3)
