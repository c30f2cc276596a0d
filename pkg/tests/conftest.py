import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from confsym.ring import PhasePoly, Rational, Signature

settings.register_profile(
    "exact", max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("exact")

SIGNATURES = [Signature(3, 0), Signature(2, 1), Signature(4, 0)]


@pytest.fixture
def sig3():
    return Signature(3, 0)


@pytest.fixture
def sig4():
    return Signature(4, 0)


small_rationals = st.builds(
    Rational,
    st.integers(min_value=-6, max_value=6),
    st.integers(min_value=1, max_value=7),
)


def _exponents(n, max_total, exact=None):
    size = {"min_size": exact, "max_size": exact} if exact is not None else {"max_size": max_total}
    return st.lists(st.integers(0, n - 1), **size).map(lambda idx: [idx.count(i) for i in range(n)])


def phase_polys(n=3, max_x=2, max_p=2, max_terms=4, p_degree=None):
    """Sparse PhasePolys with small integer coefficients and bounded total degrees."""
    term = st.tuples(_exponents(n, max_x), _exponents(n, max_p, p_degree), st.integers(-3, 3))
    return st.lists(term, max_size=max_terms).map(
        lambda ts: sum((PhasePoly.monomial(x, p, c) for x, p, c in ts), PhasePoly.zero(n))
    )


def x_polys(n=3, max_x=3, max_terms=4):
    return phase_polys(n, max_x=max_x, max_p=0, max_terms=max_terms)


# one PASS/FAIL line per acceptance criterion, printed at the end of the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
