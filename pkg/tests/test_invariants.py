import pytest
from hypothesis import given

from confsym.conformal import generator, generators
from confsym.invariants import (
    canonical,
    classify,
    component_basis,
    harmonic_basis,
    harmonic_decompose,
    harmonic_project,
    is_invariant,
    op_D,
    op_G,
    op_G0,
    op_Lell,
    op_R,
    op_T,
    solve_Lell,
    trace_free_part,
)
from confsym.opalg import op_compose
from confsym.ring import PhasePoly, Rational, Signature

from conftest import phase_polys

n = 3
X = lambda i: PhasePoly.x(i, n)
P = lambda i: PhasePoly.p(i, n)


def _bidegree_ok(op, bideg, f):
    out = op(f)
    if out.is_zero():
        return True
    dx, dp = bideg
    return out.x_degrees() == {f.x_degree() + dx} and out.p_degrees() == {f.p_degree() + dp}


@pytest.mark.parametrize("name", ["R", "T", "D", "G", "Lambda", "Ex", "Ep"])
def test_bidegrees(sig3, name):
    c = canonical(name, sig3)
    f = X(0) ** 2 * X(1) * P(0) * P(2) ** 2
    assert _bidegree_ok(c.realization, c.bidegree, f)


def test_canonical_examples(sig3):
    assert canonical("D", sig3).realization(X(0) * P(0) ** 2) == P(0).scale(2)
    assert canonical("G", sig3).realization(X(0)) == P(0)
    K0 = generator(sig3, "K", 0).symbol()
    assert canonical("G0", sig3, k=1).realization(K0).is_zero()
    with pytest.raises(ValueError):
        canonical("G0", sig3)
    with pytest.raises(ValueError):
        canonical("Q", sig3)


def test_killing_vectors_in_kernel_of_G0(sig3):
    G0 = op_G0(sig3, 1)
    for Xg in generators(sig3):
        assert trace_free_part(G0(Xg.symbol()), sig3).is_zero()
    assert not trace_free_part(G0(X(0) ** 2 * P(1)), sig3).is_zero()


def test_harmonic_examples(sig3):
    R = PhasePoly.R(sig3)
    parts = harmonic_decompose(R, sig3)
    assert [(h.s, h.component) for h in parts] == [(1, PhasePoly.const(n, 1))]
    parts = harmonic_decompose(P(0) ** 2, sig3)
    third = Rational(1, 3)
    assert [(h.s, h.component) for h in parts] == [(0, P(0) ** 2 - R.scale(third)), (1, PhasePoly.const(n, third))]
    tf = P(0) * P(1) * X(2)
    assert [(h.s, h.component) for h in harmonic_decompose(tf, sig3)] == [(0, tf)]
    with pytest.raises(ValueError):
        harmonic_decompose(P(0) + P(0) ** 2, sig3)


@pytest.mark.parametrize("sig", [Signature(3, 0), Signature(2, 1)])
@given(f=phase_polys(max_x=1, max_terms=5, p_degree=4))
def test_harmonic_reconstruction(sig, f):
    R, T = PhasePoly.R(sig), op_T(sig)
    rebuilt = PhasePoly.zero(n)
    for part in harmonic_decompose(f, sig):
        assert T(part.component).is_zero()
        assert 2 * part.s <= 4
        rebuilt = rebuilt + R ** part.s * part.component
    assert rebuilt == f
    assert sum((harmonic_project(f, sig, s) for s in range(3)), PhasePoly.zero(n)) == f


@pytest.mark.parametrize("d,count", [(0, 1), (1, 3), (2, 5), (3, 7), (4, 9)])
def test_harmonic_dimensions(sig3, d, count):
    assert len(harmonic_basis(sig3, d)) == count
    assert len(component_basis(sig3, 4, 1)) == 5


def test_G0_trace_free_output(sig3):
    T = op_T(sig3)
    G0 = op_G0(sig3, 2)
    for h in harmonic_basis(sig3, 2):
        f = (X(0) * X(1) + X(2) ** 2) * h
        assert T(G0(f)).is_zero()


def test_is_invariant_examples(sig3):
    R = op_R(sig3)
    for delta in (Rational(0), Rational(1, 2), Rational(-3, 7)):
        assert is_invariant(R, delta, delta + Rational(2, 3), sig3)
    D = op_D(sig3)
    k = 2
    d = 1 + Rational(2 * k - 2, 3)
    assert is_invariant(D, d, d, sig3, k=k, s=0)
    assert not is_invariant(D, 0, 0, sig3, k=k, s=0)


def test_L1_examples(sig3):
    (a1,) = solve_Lell(1, 2, sig3)
    assert a1 == Rational(-4, 5)
    k = 2
    delta = Rational(1, 2) + Rational(k - 1, 3)
    L = op_Lell(sig3, 1, k)
    assert is_invariant(L, delta, delta + Rational(2, 3), sig3, k=k, s=0, target_s=0)
    bumped = op_Lell(sig3, 1, k, (a1 + 1,))
    assert not is_invariant(bumped, delta, delta + Rational(2, 3), sig3, k=k, s=0, target_s=0)
    (b1,) = solve_Lell(1, 1, sig3)
    assert is_invariant(op_Lell(sig3, 1, 1), Rational(1, 2), Rational(1, 2) + Rational(2, 3), sig3, k=1, s=0, target_s=0)
    assert b1 == Rational(-4, 3)


@pytest.mark.parametrize("sig,k", [(Signature(3, 0), 2), (Signature(3, 0), 3), (Signature(4, 0), 2), (Signature(2, 1), 2)])
def test_L1_coefficient_pattern(sig, k):
    # observed closed form for the first coefficient
    assert solve_Lell(1, k, sig) == (Rational(-4, sig.n + 2 * k - 2),)


def test_classify_examples(sig3):
    two = Rational(2, 3)
    res = classify(2, 0, 1, 0, 1 + two, 1 + two, sig3)
    assert res.dimension == 1 and list(res.basis[0]) == [(0, 0, 0, 1, 0)]
    res = classify(2, 0, 3, 0, 0, two, sig3)
    assert res.dimension == 1
    assert set(res.basis[0]) <= {(0, 1, 0, 0, 0), (1, 0, 0, 1, 0)}
    for d in (Rational(1, 7), Rational(3, 11), Rational(-5, 13)):
        assert classify(2, 0, 2, 0, d, d, sig3).dimension == 0
    res = classify(2, 0, 2, 0, Rational(5, 6), Rational(5, 6) + two, sig3)
    assert res.dimension == 1
    for vec in res.basis:
        assert not res.zeroth_order


def test_classified_operators_are_invariant(sig3):
    two = Rational(2, 3)
    cases = [
        ((2, 0, 1, 0), 1 + two, 1 + two),
        ((2, 0, 3, 0), Rational(0), two),
        ((2, 0, 2, 0), Rational(5, 6), Rational(5, 6) + two),
        ((3, 0, 2, 0), 1 + Rational(4, 3), 1 + Rational(4, 3)),
    ]
    for (k, s, kp, sp), d, dp in cases:
        res = classify(k, s, kp, sp, d, dp, sig3)
        assert res.dimension == 1
        for op in res.operators:
            assert is_invariant(op, d, dp, sig3, k=k, s=s, target_s=sp)


def test_zeroth_order_flag(sig3):
    res = classify(2, 0, 2, 0, Rational(1, 7), Rational(1, 7), sig3)
    assert res.zeroth_order and res.dimension == 0
    res = classify(2, 1, 0, 0, Rational(1, 7), Rational(1, 7) - Rational(2, 3), sig3)
    assert res.zeroth_order


def test_classify_rejects_bad_components(sig3):
    with pytest.raises(ValueError):
        classify(1, 1, 1, 0, 0, 0, sig3)
    with pytest.raises(ValueError):
        classify(2, 0, 2, 0, 0, 0, sig3, bound=0)


def test_G0_equals_G_plus_trace_correction(sig3):
    G, RD = op_G(sig3), op_compose(op_R(sig3), op_D(sig3))
    diff = op_G0(sig3, 2) - G
    key, c = next(iter(diff.terms.items()))
    assert diff == RD.scale(c / RD.terms[key])
