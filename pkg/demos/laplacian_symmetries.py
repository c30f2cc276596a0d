"""Second-order symmetries of the conformal Laplacian in three dimensions.

Solves for the conformal Killing tensors of degree 2, quantizes each one and
checks that it intertwines the Laplacian. Then shows a generic symbol failing.
"""

from confsym.ring import PhasePoly, Signature
from confsym.symmetries import SymmetryPair, laplacian_weights, solve_ckt, verify_symmetry

sig = Signature(3, 0)
lam, mu = laplacian_weights(1, sig.n)
print(f"Laplacian weights: lambda = {lam}, mu = {mu}")

basis = solve_ckt(2, 0, sig).basis
print(f"trace-free Killing tensors of degree 2: {len(basis)}")

ok = 0
for K in basis:
    out = verify_symmetry(K, 1, sig)
    ok += isinstance(out, SymmetryPair) and out.check()
print(f"symmetries verified: {ok}/{len(basis)}")

x0, p1 = PhasePoly.x(0, 3), PhasePoly.p(1, 3)
out = verify_symmetry(x0 * x0 * p1 * p1, 1, sig)
print(f"x0^2 p1^2 gives {type(out).__name__}")
