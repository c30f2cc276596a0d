import itertools

import pytest
from hypothesis import given

from confsym.conformal import (
    bracket,
    bracket_closure_report,
    combination_field,
    divergence,
    generator,
    generators,
    killing_determinant,
    killing_form,
    killing_matrix,
    lie_density,
    lie_operator,
    lie_symbol,
    vf_bracket,
)
from confsym.opalg import DiffOp, op_compose
from confsym.ring import PhasePoly, Rational, Signature, poisson

from conftest import SIGNATURES, phase_polys, x_polys


@pytest.mark.parametrize("sig,count", [(Signature(3, 0), 10), (Signature(2, 1), 10), (Signature(4, 0), 15), (Signature(3, 2), 21)])
def test_generator_count(sig, count):
    assert len(generators(sig)) == count
    assert bracket_closure_report(sig) == {"generator_count": count, "brackets_closed": True, "mismatches": 0}


def test_divergences(sig3):
    n = 3
    assert divergence(generator(sig3, "E").field) == n
    for i in range(n):
        assert divergence(generator(sig3, "P", i).field).is_zero()
        assert divergence(generator(sig3, "K", i).field) == PhasePoly.x(i, n).scale(2 * n * sig3.eta[i])


@pytest.mark.parametrize("sig", SIGNATURES)
def test_grading_brackets(sig):
    E = generator(sig, "E")
    for i in range(sig.n):
        P, K = generator(sig, "P", i), generator(sig, "K", i)
        assert vf_bracket(E.field, P.field) == tuple(c.scale(-1) for c in P.field)
        assert vf_bracket(E.field, K.field) == K.field


def test_lie_density_examples(sig3):
    lam = Rational(2, 7)
    P0 = generator(sig3, "P", 0)
    assert lie_density(P0, lam).symbol == PhasePoly.p(0, 3)
    E = generator(sig3, "E")
    euler = sum((PhasePoly.x(i, 3) * PhasePoly.p(i, 3) for i in range(3)), PhasePoly.zero(3))
    assert lie_density(E, lam).symbol == euler + 3 * lam
    K1 = generator(sig3, "K", 1)
    assert lie_density(K1, 0).symbol == K1.symbol()


def test_lie_symbol_examples(sig3):
    R = PhasePoly.R(sig3)
    E = generator(sig3, "E")
    for delta in (Rational(0), Rational(2, 3), Rational(1, 5)):
        assert lie_symbol(E, delta)(R) == R.scale(3 * delta - 2)
    f = PhasePoly.x(0, 3) * PhasePoly.p(1, 3) ** 2 + PhasePoly.x(2, 3) ** 3
    for i in range(3):
        assert lie_symbol(generator(sig3, "P", i), Rational(1, 3))(f) == f.dx(i)


@given(phase_polys(max_p=3))
def test_weight_zero_action_is_poisson(f):
    for X in generators(Signature(2, 1)):
        assert lie_symbol(X, 0)(f) == poisson(X.symbol(), f)


def test_lie_operator_examples(sig3):
    lap = DiffOp.laplacian(sig3)
    for X in generators(sig3):
        assert lie_operator(X, lap.lam, lap.mu, lap).is_zero()
        one = DiffOp.identity(3, Rational(1, 4))
        assert lie_operator(X, Rational(1, 4), Rational(1, 4), one).is_zero()
    flat = lap.with_weights(0, 0)
    assert not lie_operator(generator(sig3, "E"), 0, 0, flat).is_zero()


def test_killing_form_examples(sig3):
    assert killing_form(generator(sig3, "E"), generator(sig3, "E")) == 1
    for i, j in itertools.product(range(3), repeat=2):
        assert killing_form(generator(sig3, "P", i), generator(sig3, "P", j)) == 0
    assert killing_determinant(sig3) != 0


@pytest.mark.parametrize("sig", SIGNATURES)
def test_killing_form_invariant(sig):
    gens = generators(sig)
    g = killing_matrix(sig)
    N = len(gens)
    for z in range(N):
        for x in range(N):
            zx = bracket(gens[z], gens[x], sig)
            for y in range(N):
                zy = bracket(gens[z], gens[y], sig)
                lhs = sum((c * g[c_idx][y] for c_idx, c in zx.items()), Rational(0))
                lhs += sum((c * g[x][c_idx] for c_idx, c in zy.items()), Rational(0))
                assert lhs == 0


@pytest.mark.parametrize("sig", [Signature(3, 0), Signature(2, 1)])
def test_lie_density_is_morphism(sig):
    gens = generators(sig)
    for lam in (Rational(0), Rational(1, 2), Rational(sig.n - 2, 2 * sig.n)):
        for X, Y in itertools.combinations(gens, 2):
            lhs = lie_density(combination_field(bracket(X, Y, sig), sig), lam)
            A, B = lie_density(X, lam), lie_density(Y, lam)
            assert lhs == A.compose(B) - B.compose(A)


def test_lie_symbol_is_morphism(sig3):
    gens = generators(sig3)
    for delta in (Rational(0), Rational(2, 3)):
        for X, Y in itertools.combinations(gens, 2):
            lhs = lie_symbol(combination_field(bracket(X, Y, sig3), sig3), delta)
            A, B = lie_symbol(X, delta), lie_symbol(Y, delta)
            assert lhs == op_compose(A, B) - op_compose(B, A)


@given(x_polys(max_x=2), x_polys(max_x=2))
def test_lie_operator_is_derivation(a, b):
    sig = Signature(3, 0)
    lam, nu, mu = Rational(1, 3), Rational(1, 2), Rational(3, 4)
    A = DiffOp(a * PhasePoly.p(0, 3) + b, nu, mu)
    B = DiffOp(b * PhasePoly.p(1, 3) ** 2 + a, lam, nu)
    for X in (generator(sig, "E"), generator(sig, "K", 2), generator(sig, "J", 0, 1)):
        lhs = lie_operator(X, lam, mu, A.compose(B))
        rhs = lie_operator(X, nu, mu, A).compose(B) + A.compose(lie_operator(X, lam, nu, B))
        assert lhs == rhs
