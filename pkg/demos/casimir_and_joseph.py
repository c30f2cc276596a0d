"""The Casimir operator on densities and the degree-2 Joseph generators.

Prints the scalar by which the Casimir acts for a few weights, next to
n^2 lam (1 - lam), then checks right divisibility by the Laplacian.
"""

from confsym.conformal import dimension
from confsym.enveloping import casimir_eigenvalue, joseph_divisible, joseph_weight, rho
from confsym.ring import Rational, Signature

sig = Signature(3, 0)
for lam in (Rational(0), Rational(1, 6), Rational(1, 2), Rational(2, 3)):
    print(f"lambda = {lam}: ell(Casimir) = {casimir_eigenvalue(lam, sig)}, n^2 lam (1 - lam) = {rho(lam, sig.n)}")

N = dimension(sig)
pairs = [(X, Y) for X in range(N) for Y in range(X, N)]
for lam in (joseph_weight(sig.n), Rational(1, 7)):
    good = sum(joseph_divisible(X, Y, lam, sig) for X, Y in pairs)
    print(f"lambda = {lam}: {good}/{len(pairs)} generators divisible by the Laplacian")
