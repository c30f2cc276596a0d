import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from confsym.conformal import generators, lie_density
from confsym.invariants import op_D, op_G, op_T
from confsym.opalg import (
    DiffOp,
    PhaseOp,
    divide_by_R_power,
    divmod_R_power,
    normal_order_N,
    op_apply,
    op_compose,
    right_divide,
    sharp,
    total_symbol,
)
from confsym.ring import PhasePoly, Rational, Signature

from conftest import phase_polys

n = 3
X = lambda i: PhasePoly.x(i, n)
P = lambda i: PhasePoly.p(i, n)


def small_ops():
    slots = st.lists(st.integers(0, 4 * n - 1), max_size=3)
    key = slots.map(lambda idx: tuple(idx.count(i) for i in range(4 * n)))
    return st.dictionaries(key.map(tuple), st.integers(-2, 2), max_size=3).map(lambda d: PhaseOp(n, d))


def test_apply_examples(sig3):
    euler = PhaseOp.mult(X(0)) * PhaseOp.dx(0, n)
    assert op_apply(euler, X(0) ** 2) == (X(0) ** 2).scale(2)
    assert op_D(sig3)(X(0) * P(0)) == 1
    assert op_T(sig3)(P(0) ** 2) == 2


def test_compose_examples(sig3):
    d0, x0 = PhaseOp.dx(0, n), PhaseOp.mult(X(0))
    assert op_compose(d0, x0) == x0 * d0 + PhaseOp.identity(n)
    dp0, p0 = PhaseOp.dp(0, n), PhaseOp.mult(P(0))
    assert op_compose(dp0, p0) == p0 * dp0 + PhaseOp.identity(n)
    D, R = op_D(sig3), PhaseOp.mult(PhasePoly.R(sig3))
    assert op_compose(D, R) - op_compose(R, D) == op_G(sig3).scale(2)


@given(small_ops(), small_ops(), small_ops())
def test_compose_associative(a, b, c):
    assert op_compose(op_compose(a, b), c) == op_compose(a, op_compose(b, c))


@given(small_ops(), small_ops(), phase_polys())
def test_compose_matches_nested_apply(a, b, f):
    assert op_apply(op_compose(a, b), f) == op_apply(a, op_apply(b, f))


def test_phaseop_json_round_trip(sig3):
    G = op_G(sig3)
    assert PhaseOp.from_json(json.loads(json.dumps(G.to_json()))) == G


def test_normal_ordering_examples(sig3):
    A = normal_order_N(X(0) * P(0))
    assert A.apply(X(0) ** 3) == (X(0) ** 3).scale(3)
    lap = normal_order_N(PhasePoly.R(sig3))
    f = X(0) ** 2 + X(1) ** 2 * X(2)
    assert lap.apply(f) == 2 + X(2).scale(2)
    assert normal_order_N(PhasePoly.const(n, 5)).apply(X(1)) == X(1).scale(5)


@given(phase_polys(), phase_polys())
def test_symbol_product_is_composition(a, b):
    f = X(0) ** 3 * X(1) + X(2) ** 2 * X(1) ** 2
    A, B = normal_order_N(a), normal_order_N(b)
    assert normal_order_N(sharp(a, b)).apply(f) == A.apply(B.apply(f))


@given(phase_polys(max_p=3))
def test_normal_ordering_bijective(a):
    A = normal_order_N(a, Rational(1, 3), Rational(2, 3))
    assert total_symbol(A) == a
    # principal symbols peel off grade by grade
    rest, rebuilt = total_symbol(A), PhasePoly.zero(n)
    while not rest.is_zero():
        top = rest.p_part(rest.p_degree())
        rebuilt, rest = rebuilt + top, rest - top
    assert rebuilt == a


def test_diffop_weights():
    A = DiffOp(X(0) * P(0), Rational(1, 3), Rational(1, 2))
    B = DiffOp(P(1), Rational(1, 2), Rational(1))
    assert B.compose(A).lam == Rational(1, 3) and B.compose(A).mu == 1
    with pytest.raises(ValueError):
        A.compose(A)
    doc = json.loads(json.dumps(A.to_json()))
    assert DiffOp.from_json(doc) == A
    assert doc["lambda"] == "1/3"


def test_right_divide_examples(sig3):
    lap = DiffOp.laplacian(sig3, 1)
    euler = DiffOp(X(0) * P(0), lap.mu, lap.mu)
    B = right_divide(euler.compose(lap), 1, sig3)
    assert B is not None and B.symbol == euler.symbol
    # the other order leaves 2 d_0^2 behind
    lam = lap.lam
    left = lap.compose(DiffOp(X(0) * P(0), lam, lam))
    assert right_divide(left, 1, sig3) is None
    assert right_divide(DiffOp(P(0), lam, lam), 1, sig3) is None
    lam, mu = Rational(1, 6), Rational(5, 6)
    for Xg in generators(sig3):
        A = lap.compose(lie_density(Xg, lam)) - lie_density(Xg, mu).compose(lap)
        assert A.is_zero()
        assert right_divide(A, 1, sig3).is_zero()
    with pytest.raises(ValueError):
        right_divide(lap, 0, sig3)


@pytest.mark.parametrize("sig", [Signature(3, 0), Signature(2, 1), Signature(1, 2)])
@given(b=phase_polys(max_p=2, max_x=2), ell=st.integers(1, 2))
def test_right_divide_round_trip(sig, b, ell):
    lap = DiffOp.laplacian(sig, ell)
    B = DiffOp(b, lap.mu, Rational(1, 2))
    A = B.compose(lap)
    out = right_divide(A, ell, sig)
    assert out is not None and out.symbol == b and out.lam == lap.mu


@given(phase_polys(max_p=4))
def test_divmod_by_R(f):
    sig = Signature(2, 1)
    q, r = divmod_R_power(f, sig, 1)
    assert q * PhasePoly.R(sig) + r == f
    assert all(key[n] < 2 for key in r.terms)
    prod = f * PhasePoly.R(sig) ** 2
    assert divide_by_R_power(prod, sig, 2) == f
