"""Low levels of the star product induced by the equivariant quantization."""

from confsym.ring import PhasePoly, Rational, Signature, poisson
from confsym.starproduct import star_levels

sig = Signature(3, 0)
x0, x1, p0, p1 = PhasePoly.x(0, 3), PhasePoly.x(1, 3), PhasePoly.p(0, 3), PhasePoly.p(1, 3)
P, Q = x0 * x1 * p1, x0 * p0 * p0

for lam in (Rational(1, 2), Rational(0)):
    print(f"lambda = {lam}")
    left, right = star_levels(P, Q, lam, sig), star_levels(Q, P, lam, sig)
    for m in sorted(set(left) | set(right)):
        print(f"  B_{m}(P,Q) = {left.get(m, PhasePoly.zero(3))}")
        print(f"  B_{m}(Q,P) = {right.get(m, PhasePoly.zero(3))}")
    diff = left.get(1, PhasePoly.zero(3)) - right.get(1, PhasePoly.zero(3))
    print(f"  B_1 antisymmetric part equals the Poisson bracket: {diff == poisson(P, Q)}")
