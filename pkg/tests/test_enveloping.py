from math import comb

import pytest
from hypothesis import given, strategies as st

from confsym.conformal import dimension, generator, generators, killing_form, structure_constants
from confsym.enveloping import (
    ENVELOPING,
    SYMMETRIC,
    EnvElement,
    ambient_casimir_expected,
    casimir,
    casimir_eigenvalue,
    decompose_g2,
    ell_morphism,
    generator_element,
    jlambda_generator,
    joseph_divisible,
    joseph_weight,
    kernel_deg2,
    moment_pullback,
    pbw,
    rho,
)
from confsym.opalg import DiffOp
from confsym.ring import PhasePoly, Rational, Signature

S3 = Signature(3, 0)
S21 = Signature(2, 1)
S4 = Signature(4, 0)


def _gen(sig, i, kind=ENVELOPING):
    return generator_element(sig, i, kind)


def _index(sig, *label):
    return [g.label for g in generators(sig)].index(tuple(label))


def test_symmetric_product_commutes():
    a, b = _gen(S3, 0, SYMMETRIC), _gen(S3, 8, SYMMETRIC)
    assert a * b == b * a


def test_enveloping_product_reorders_with_bracket():
    consts = structure_constants(S3)
    for i in range(dimension(S3)):
        for j in range(i + 1, dimension(S3)):
            a, b = _gen(S3, i), _gen(S3, j)
            br = EnvElement(ENVELOPING, S3, {(c,): v for c, v in consts.get((j, i), {}).items()})
            # b a = a b + [b, a]
            assert b * a == a * b + br


def test_enveloping_product_is_associative():
    x, y, z = _gen(S3, 8), _gen(S3, 1), _gen(S3, 6)
    assert (x * y) * z == x * (y * z)


def test_truncation_overflow():
    a = _gen(S3, 0)
    with pytest.raises(ValueError):
        a * a * a * a


def test_pbw_of_degree_one_is_identity():
    for i in range(dimension(S3)):
        assert pbw(_gen(S3, i, SYMMETRIC)) == _gen(S3, i)


def test_pbw_of_product_is_half_anticommutator():
    a, b = 9, 0
    u = _gen(S3, a, SYMMETRIC) * _gen(S3, b, SYMMETRIC)
    A, B = _gen(S3, a), _gen(S3, b)
    assert pbw(u) == (A * B + B * A).scale(Rational(1, 2))


def _ad_sym(sig, x, u):
    consts = structure_constants(sig)
    out = EnvElement(SYMMETRIC, sig, {})
    for w, c in u.coeffs.items():
        for pos, i in enumerate(w):
            for k, v in consts.get((x, i), {}).items():
                rest = w[:pos] + (k,) + w[pos + 1 :]
                out = out + EnvElement(SYMMETRIC, sig, {tuple(sorted(rest)): c * v})
    return out


@given(st.integers(0, 9), st.integers(0, 9), st.integers(0, 9))
def test_pbw_is_equivariant(x, i, j):
    u = _gen(S3, i, SYMMETRIC) * _gen(S3, j, SYMMETRIC)
    X = _gen(S3, x)
    assert pbw(_ad_sym(S3, x, u)) == X * pbw(u) - pbw(u) * X


def test_pbw_of_casimir_is_central():
    C = casimir(S3, ENVELOPING)
    for i in range(dimension(S3)):
        X = _gen(S3, i)
        assert (X * C - C * X).is_zero()


@pytest.mark.parametrize("sig", [S3, S21, S4])
def test_ambient_casimir_identity(sig):
    assert moment_pullback(casimir(sig, SYMMETRIC), "ambient") == ambient_casimir_expected(sig)


@pytest.mark.parametrize("sig", [S3, S21])
def test_model_casimir_vanishes(sig):
    assert moment_pullback(casimir(sig, SYMMETRIC), "model").is_zero()


def test_model_pullback_of_translation():
    for i in range(3):
        assert moment_pullback(_gen(S3, _index(S3, "P", i), SYMMETRIC)) == PhasePoly.p(i, 3)


def test_ell_of_translations_squared():
    i, j = _index(S3, "P", 0), _index(S3, "P", 2)
    A = ell_morphism(_gen(S3, i) * _gen(S3, j), Rational(1, 3))
    want = PhasePoly.p(0, 3) * PhasePoly.p(2, 3)
    assert A.symbol == want


@given(st.integers(0, 9), st.integers(0, 9))
def test_ell_is_an_algebra_morphism(i, j):
    lam = Rational(2, 5)
    A, B = _gen(S3, i), _gen(S3, j)
    assert ell_morphism(A * B, lam) == ell_morphism(A, lam).compose(ell_morphism(B, lam))


@pytest.mark.parametrize(
    "sig,lam",
    [(S3, Rational(0)), (S3, Rational(1, 2)), (S3, Rational(1, 6)), (S4, Rational(1, 4)), (S21, Rational(1, 3))],
)
def test_casimir_acts_by_scalar_of_closed_form_magnitude(sig, lam):
    # with the half-trace Killing form the scalar is -rho
    A = ell_morphism(casimir(sig, ENVELOPING), lam)
    assert A == DiffOp.identity(sig.n, lam).scale(-rho(lam, sig.n))
    assert casimir_eigenvalue(lam, sig) == -rho(lam, sig.n)


@pytest.mark.parametrize("sig", [S3, S4])
def test_kernel_dimensions(sig):
    want = comb(sig.n + 2, 4)
    assert kernel_deg2("ambient_moment", sig).dimension == want
    assert kernel_deg2("model_moment", sig).dimension == want + 1
    for lam in (Rational(1, 2), Rational(0), Rational(2, 9)):
        assert kernel_deg2("ell", sig, lam).dimension == want + 1


def test_ell_kernel_contains_shifted_casimir():
    lam = Rational(1, 2)
    C = casimir(S3, ENVELOPING) - EnvElement.scalar(ENVELOPING, S3, casimir_eigenvalue(lam, S3))
    assert ell_morphism(C, lam).is_zero()


def test_kernel_basis_is_in_the_kernel():
    res = kernel_deg2("ell", S3, Rational(1, 3))
    for u in res.basis:
        assert ell_morphism(u, Rational(1, 3)).is_zero()


@pytest.mark.parametrize("sig", [S3, S21])
def test_decomposition_reconstructs_every_pair(sig):
    N = dimension(sig)
    for X in range(N):
        for Y in range(X, N):
            parts = decompose_g2(X, Y, sig)
            assert parts.total() == _gen(sig, X, SYMMETRIC) * _gen(sig, Y, SYMMETRIC)


def test_decomposition_casimir_part():
    for X in range(dimension(S3)):
        for Y in range(X, dimension(S3)):
            parts = decompose_g2(X, Y, S3)
            k = killing_form(generators(S3)[X], generators(S3)[Y])
            assert parts.casimir == casimir(S3, SYMMETRIC).scale(k / dimension(S3))


def test_decomposition_edge_cases():
    p1 = _index(S3, "P", 1)
    assert decompose_g2(p1, p1, S3).casimir.is_zero()
    e = _index(S3, "E")
    assert decompose_g2(e, e, S3).wedge.is_zero()


def test_wedge_part_is_in_both_moment_kernels():
    for X, Y in [(0, 9), (3, 8), (1, 7)]:
        w = decompose_g2(X, Y, S3).wedge
        assert moment_pullback(w, "ambient").is_zero()
        assert moment_pullback(w, "model").is_zero()


@pytest.mark.parametrize("lam", [Rational(1, 2), Rational(1, 7)])
def test_jlambda_generators_are_in_ell_kernel(lam):
    N = dimension(S3)
    for X in range(N):
        for Y in range(X, N):
            assert ell_morphism(jlambda_generator(X, Y, lam, S3), lam).is_zero()


def test_joseph_weight():
    assert joseph_weight(3) == Rational(1, 6)
    assert joseph_weight(4) == Rational(1, 4)


def test_joseph_translation_square_divisible():
    p1 = _index(S3, "P", 1)
    assert joseph_divisible(p1, p1, joseph_weight(3), S3)


def test_joseph_fails_at_generic_weight():
    N = dimension(S3)
    assert any(not joseph_divisible(X, Y, Rational(1, 7), S3) for X in range(N) for Y in range(X, N))


def test_element_validation():
    with pytest.raises(ValueError):
        EnvElement("free", S3, {})
    with pytest.raises(ValueError):
        EnvElement(SYMMETRIC, S3, {(2, 1): 1})
    with pytest.raises(ValueError):
        pbw(_gen(S3, 0))
    with pytest.raises(ValueError):
        ell_morphism(_gen(S3, 0, SYMMETRIC), 0)
